//! Robot trajectories across Plane H: margin logging along a path and a
//! shortest path that skirts the no-view region.

use std::path::Path;

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use petgraph::visit::EdgeRef;
use serde::{Deserialize, Serialize};

use crate::camera::{PixelMargins, PoseSearch, PoseSearcher};
use crate::error::{Error, Result};
use crate::format::sig6;
use crate::region::{ConvexPolygon, RnaRegion, Vec2};
use crate::scene::{Scene, Vec3};

/// Default travel speed for planned paths, in m/s.
pub const DEFAULT_SPEED: f64 = 0.5;

/// Default metric clearance around the no-view region, in meters.
pub const DEFAULT_CLEARANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub t: f64,
    /// Robot base position; `z` is the floor, normally 0.
    pub position: [f64; 3],
}

/// Piecewise linear trajectory of the robot base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<Waypoint>,
}

impl Trajectory {
    pub fn new(waypoints: Vec<Waypoint>) -> Result<Self> {
        let traj = Self { waypoints };
        traj.validate()?;
        Ok(traj)
    }

    /// Polyline visited at constant `speed`, starting at `t = 0`.
    pub fn timed(points: &[Vec2], speed: f64) -> Result<Self> {
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(Error::InvalidInput(format!("speed must be positive, got {speed}")));
        }
        let mut t = 0.0;
        let mut waypoints = Vec::with_capacity(points.len());
        for (k, p) in points.iter().enumerate() {
            if k > 0 {
                let step = (p - points[k - 1]).norm();
                if step == 0.0 {
                    continue;
                }
                t += step / speed;
            }
            waypoints.push(Waypoint {
                t,
                position: [p.x, p.y, 0.0],
            });
        }
        Self::new(waypoints)
    }

    pub fn validate(&self) -> Result<()> {
        if self.waypoints.is_empty() {
            return Err(Error::InvalidInput("trajectory has no waypoints".into()));
        }
        for w in &self.waypoints {
            if !w.t.is_finite() || !w.position.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidInput("trajectory values must be finite".into()));
            }
        }
        if self.waypoints.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::InvalidInput("waypoint times must strictly increase".into()));
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let traj: Self = serde_json::from_str(&text)?;
        traj.validate()?;
        Ok(traj)
    }

    pub fn start_time(&self) -> f64 {
        self.waypoints[0].t
    }

    pub fn end_time(&self) -> f64 {
        self.waypoints[self.waypoints.len() - 1].t
    }

    /// Base position at time `t`, clamped to the ends.
    pub fn position_at(&self, t: f64) -> Vec3 {
        let w = &self.waypoints;
        let k = w.partition_point(|p| p.t <= t);
        if k == 0 {
            return Vec3::from(w[0].position);
        }
        if k == w.len() {
            return Vec3::from(w[k - 1].position);
        }
        let (a, b) = (&w[k - 1], &w[k]);
        let s = (t - a.t) / (b.t - a.t);
        Vec3::from(a.position) * (1.0 - s) + Vec3::from(b.position) * s
    }

    /// Planar length of the polyline.
    pub fn length(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| {
                let d = Vec3::from(w[1].position) - Vec3::from(w[0].position);
                d.xy().norm()
            })
            .sum()
    }

    pub fn points(&self) -> Vec<Vec2> {
        self.waypoints
            .iter()
            .map(|w| Vec2::new(w.position[0], w.position[1]))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub t: f64,
    /// Optical center, at height `h_c`.
    pub position: [f64; 3],
    pub margins: PixelMargins,
    pub in_rnh: bool,
    pub in_rnv: bool,
    pub in_rna: bool,
}

/// Sample times from the start to the end of `traj`, always including both.
fn sample_times(traj: &Trajectory, dt: f64) -> Vec<f64> {
    let (t0, t1) = (traj.start_time(), traj.end_time());
    let n = ((t1 - t0) / dt + 1e-9).floor() as usize;
    let mut ts: Vec<f64> = (0..=n).map(|k| t0 + k as f64 * dt).collect();
    if t1 - ts[ts.len() - 1] > 1e-9 {
        ts.push(t1);
    }
    ts
}

pub fn simulate(
    traj: &Trajectory,
    scene: &Scene,
    rna: &RnaRegion,
    dt: f64,
    search: &PoseSearch,
) -> Result<Vec<TraceRecord>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let h_c = scene.camera.h_c;
    let searcher = PoseSearcher::new(scene, search);
    let records = sample_times(traj, dt)
        .into_iter()
        .map(|t| {
            let base = traj.position_at(t);
            let (x, y) = (base.x, base.y);
            let (_, margins) = searcher.best(&Vec3::new(x, y, h_c));
            let in_rnh = rna.rnh.contains_xy(x, y);
            let in_rnv = rna.rnv.contains_xy(x, y);
            TraceRecord {
                t,
                position: [x, y, h_c],
                margins,
                in_rnh,
                in_rnv,
                in_rna: in_rnh || in_rnv,
            }
        })
        .collect();
    Ok(records)
}

/// Shortest polyline from `start` to `goal` that stays outside the region
/// grown by `clearance`, timed at constant `speed`.
pub fn plan_boundary_path(
    start: &Vec3,
    goal: &Vec3,
    rna: &RnaRegion,
    clearance: f64,
    speed: f64,
) -> Result<Trajectory> {
    if !(clearance >= 0.0 && clearance.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "clearance must be non-negative, got {clearance}"
        )));
    }
    let obstacles: Vec<ConvexPolygon> = rna.pieces().iter().map(|p| p.inflate(clearance, rna.arc_tol)).collect();
    let s = Vec2::new(start.x, start.y);
    let g = Vec2::new(goal.x, goal.y);
    let inside = |p: &Vec2| obstacles.iter().any(|o| o.inner_margin(p) > 1e-9);
    for (name, p) in [("start", &s), ("goal", &g)] {
        if inside(p) {
            return Err(Error::Unreachable(format!(
                "{name} ({}, {}) lies inside the region grown by {clearance} m",
                p.x, p.y
            )));
        }
    }

    let mut nodes = vec![s, g];
    nodes.extend(
        obstacles
            .iter()
            .flat_map(|o| o.vertices.iter().copied())
            .filter(|v| !inside(v)),
    );
    let clear = |a: &Vec2, b: &Vec2| !obstacles.iter().any(|o| o.segment_crosses_interior(a, b, 1e-9));

    let mut graph = UnGraph::<Vec2, f64>::with_capacity(nodes.len(), 0);
    let ids: Vec<NodeIndex> = nodes.iter().map(|p| graph.add_node(*p)).collect();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if clear(&nodes[i], &nodes[j]) {
                graph.add_edge(ids[i], ids[j], (nodes[j] - nodes[i]).norm());
            }
        }
    }

    let dist = dijkstra(&graph, ids[0], None, |e| *e.weight());
    if !dist.contains_key(&ids[1]) {
        return Err(Error::Unreachable("no collision-free path to the goal".into()));
    }
    // Walk back from the goal along edges that are tight in the distance map.
    let mut route = vec![ids[1]];
    let mut cur = ids[1];
    while cur != ids[0] {
        let dc = dist[&cur];
        cur = graph
            .edges(cur)
            .filter_map(|e| {
                let other = if e.source() == cur { e.target() } else { e.source() };
                dist.get(&other).map(|d| (other, (d + e.weight() - dc).abs()))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(n, _)| n)
            .expect("reachable node has a predecessor");
        route.push(cur);
    }
    route.reverse();
    let points: Vec<Vec2> = route.iter().map(|&n| graph[n]).collect();
    log::info!(
        "planned path with {} waypoints, length {:.3} m",
        points.len(),
        dist[&ids[1]]
    );
    Trajectory::timed(&points, speed)
}

pub fn write_trace_csv(records: &[TraceRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "t",
        "x",
        "y",
        "dist_left",
        "dist_right",
        "dist_top",
        "dist_bottom",
        "in_rnh",
        "in_rnv",
        "in_rna",
    ])?;
    for r in records {
        let m = &r.margins;
        w.write_record([
            sig6(r.t),
            sig6(r.position[0]),
            sig6(r.position[1]),
            sig6(m.left),
            sig6(m.right),
            sig6(m.top),
            sig6(m.bottom),
            u8::from(r.in_rnh).to_string(),
            u8::from(r.in_rnv).to_string(),
            u8::from(r.in_rna).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trajectory_json(traj: &Trajectory, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(traj)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
