//! Pinhole pan-tilt camera and the brute-force visibility oracle.
//!
//! Pan turns about +z (counter-clockwise seen from above, zero along +x);
//! tilt raises the optical axis. Image u grows to the right and v grows
//! downward, with the principal point at the image center.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scene::{CameraModel, Scene, Vec3};

/// Depth below which a point counts as behind the camera.
const MIN_DEPTH: f64 = 1e-9;
/// Score given to poses that put a point behind the camera.
const BEHIND_SCORE: f64 = -1e9;
/// Keeps the tilt grid off the poles.
const TILT_GUARD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PanTiltPose {
    pub position: [f64; 3],
    pub pan: f64,
    pub tilt: f64,
}

impl PanTiltPose {
    pub fn new(position: Vec3, pan: f64, tilt: f64) -> Self {
        Self {
            position: [position.x, position.y, position.z],
            pan,
            tilt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImagePoint {
    pub u: f64,
    pub v: f64,
}

/// Signed pixel distances from the extreme projections to the image edges.
/// Positive means inside the image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PixelMargins {
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
}

impl PixelMargins {
    pub fn min(&self) -> f64 {
        self.left.min(self.right).min(self.top).min(self.bottom)
    }

    pub fn horizontal(&self) -> f64 {
        self.left.min(self.right)
    }

    pub fn vertical(&self) -> f64 {
        self.top.min(self.bottom)
    }

    pub fn visible(&self) -> bool {
        self.min() > 0.0
    }
}

/// Camera axes in robot coordinates: (right, down, forward).
fn axes(pan: f64, tilt: f64) -> (Vec3, Vec3, Vec3) {
    let (sp, cp) = pan.sin_cos();
    let (st, ct) = tilt.sin_cos();
    let forward = Vec3::new(cp * ct, sp * ct, st);
    let right = Vec3::new(sp, -cp, 0.0);
    let down = forward.cross(&right);
    (right, down, forward)
}

fn focal(cam: &CameraModel) -> (f64, f64) {
    (
        cam.width_px() / 2.0 / (cam.theta / 2.0).tan(),
        cam.height_px() / 2.0 / (cam.phi / 2.0).tan(),
    )
}

pub fn project(point: &Vec3, pose: &PanTiltPose, cam: &CameraModel) -> Result<ImagePoint> {
    let (right, down, forward) = axes(pose.pan, pose.tilt);
    let q = point - Vec3::from(pose.position);
    let z = q.dot(&forward);
    if z <= MIN_DEPTH {
        return Err(Error::BehindCamera);
    }
    let (fu, fv) = focal(cam);
    Ok(ImagePoint {
        u: cam.width_px() / 2.0 + fu * q.dot(&right) / z,
        v: cam.height_px() / 2.0 + fv * q.dot(&down) / z,
    })
}

pub fn margins_at_pose(points: &[Vec3], pose: &PanTiltPose, cam: &CameraModel) -> Result<PixelMargins> {
    let mut m = PixelMargins {
        left: f64::INFINITY,
        right: f64::INFINITY,
        top: f64::INFINITY,
        bottom: f64::INFINITY,
    };
    for p in points {
        let ip = project(p, pose, cam)?;
        m.left = m.left.min(ip.u);
        m.right = m.right.min(cam.width_px() - ip.u);
        m.top = m.top.min(ip.v);
        m.bottom = m.bottom.min(cam.height_px() - ip.v);
    }
    Ok(m)
}

/// Search settings for [`best_pose_margins`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseSearch {
    /// Samples per axis of the coarse pan/tilt grid.
    pub grid: usize,
    /// Number of best grid cells refined locally.
    pub starts: usize,
    /// Final bracket width of the local refinement, radians.
    pub tol: f64,
}

impl Default for PoseSearch {
    fn default() -> Self {
        Self {
            grid: 64,
            starts: 2,
            tol: 1e-5,
        }
    }
}

/// Golden-section maximization of `f` on `[a, b]`.
fn golden_max(mut a: f64, mut b: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    const G: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - G * (b - a);
    let mut x2 = a + G * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + G * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - G * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Camera axes for one grid pose.
#[derive(Debug, Clone, Copy)]
struct GridPose {
    pan: f64,
    tilt: f64,
    right: Vec3,
    down: Vec3,
    forward: Vec3,
}

/// Reusable pose optimizer for one scene. The pan/tilt grid is built once
/// and shared by every position.
#[derive(Debug, Clone)]
pub struct PoseSearcher {
    points: Vec<Vec3>,
    cam: CameraModel,
    search: PoseSearch,
    grid: Vec<GridPose>,
    d_pan: f64,
    d_tilt: f64,
    fu: f64,
    fv: f64,
}

impl PoseSearcher {
    pub fn new(scene: &Scene, search: &PoseSearch) -> Self {
        let n = search.grid.max(4);
        let d_pan = TAU / n as f64;
        let d_tilt = (PI - 2.0 * TILT_GUARD) / (n - 1) as f64;
        let mut grid = Vec::with_capacity(n * n);
        for i in 0..n {
            let pan = -PI + (i + 1) as f64 * d_pan;
            for j in 0..n {
                let tilt = -FRAC_PI_2 + TILT_GUARD + j as f64 * d_tilt;
                let (right, down, forward) = axes(pan, tilt);
                grid.push(GridPose {
                    pan,
                    tilt,
                    right,
                    down,
                    forward,
                });
            }
        }
        let (fu, fv) = focal(&scene.camera);
        Self {
            points: scene.points().copied().collect(),
            cam: scene.camera,
            search: *search,
            grid,
            d_pan,
            d_tilt,
            fu,
            fv,
        }
    }

    /// Minimum margin at a pose. Stops early once it drops below `floor`,
    /// since the caller only cares whether it beats `floor`.
    fn score_axes(&self, rel: &[Vec3], right: &Vec3, down: &Vec3, forward: &Vec3, floor: f64) -> f64 {
        let (w, h) = (self.cam.width_px(), self.cam.height_px());
        let mut best = f64::INFINITY;
        for q in rel {
            let z = q.dot(forward);
            if z <= MIN_DEPTH {
                return BEHIND_SCORE;
            }
            let u = w / 2.0 + self.fu * q.dot(right) / z;
            let v = h / 2.0 + self.fv * q.dot(down) / z;
            best = best.min(u).min(w - u).min(v).min(h - v);
            if best < floor {
                return best;
            }
        }
        best
    }

    fn score(&self, rel: &[Vec3], pan: f64, tilt: f64) -> f64 {
        let (r, d, f) = axes(pan, tilt);
        self.score_axes(rel, &r, &d, &f, f64::NEG_INFINITY)
    }

    /// Pose maximizing the smallest of the four margins at `position`.
    ///
    /// A coarse grid over the full pan circle and tilt range picks candidate
    /// poses; each is refined by golden-section search on tilt with the pan
    /// re-optimized for every trial tilt, so ridges where two margins
    /// balance do not stall the search.
    pub fn best(&self, position: &Vec3) -> (PanTiltPose, PixelMargins) {
        let rel: Vec<Vec3> = self.points.iter().map(|p| p - position).collect();
        let starts = self.search.starts.max(1);

        // Aiming at the centroid gives a good floor for the grid's early exit.
        let c = rel.iter().sum::<Vec3>() / rel.len() as f64;
        let aim = (c.y.atan2(c.x), c.z.atan2(c.x.hypot(c.y)));
        let mut top: Vec<(f64, f64, f64)> = vec![(self.score(&rel, aim.0, aim.1), aim.0, aim.1)];
        for g in &self.grid {
            let floor = if top.len() == starts {
                top[starts - 1].0
            } else {
                f64::NEG_INFINITY
            };
            let s = self.score_axes(&rel, &g.right, &g.down, &g.forward, floor);
            if s > floor {
                let at = top.partition_point(|t| t.0 >= s);
                top.insert(at, (s, g.pan, g.tilt));
                top.truncate(starts);
            }
        }

        let mut best = top[0];
        // Deep inside the no-view region a one-cell refinement cannot reach
        // a feasible pose; the grid value is reported as is.
        if best.0 > -self.cam.width_px().max(self.cam.height_px()) {
            let tilt_lim = FRAC_PI_2 - TILT_GUARD;
            for &(_, pan0, tilt0) in &top {
                let pan_at = |tilt: f64| {
                    golden_max(pan0 - self.d_pan, pan0 + self.d_pan, self.search.tol, |p| {
                        self.score(&rel, p, tilt)
                    })
                };
                let a = (tilt0 - self.d_tilt).max(-tilt_lim);
                let b = (tilt0 + self.d_tilt).min(tilt_lim);
                let (tilt, _) = golden_max(a, b, self.search.tol, |t| pan_at(t).1);
                let (pan, s) = pan_at(tilt);
                if s > best.0 {
                    best = (s, pan, tilt);
                }
            }
        }
        let pose = PanTiltPose::new(*position, wrap_angle(best.1), best.2);
        let margins = margins_at_pose(&self.points, &pose, &self.cam).unwrap_or(PixelMargins {
            left: BEHIND_SCORE,
            right: BEHIND_SCORE,
            top: BEHIND_SCORE,
            bottom: BEHIND_SCORE,
        });
        (pose, margins)
    }
}

/// One-off form of [`PoseSearcher::best`].
pub fn best_pose_margins(position: &Vec3, scene: &Scene, search: &PoseSearch) -> (PanTiltPose, PixelMargins) {
    PoseSearcher::new(scene, search).best(position)
}

/// True when `position` is on the front side of every marker plane. A
/// planar marker cannot be detected from behind.
pub fn faces_all_markers(position: &Vec3, scene: &Scene) -> bool {
    scene
        .markers
        .iter()
        .all(|m| m.points.iter().all(|p| (position - p).dot(&m.unit_normal) > 0.0))
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

fn bearings(position: &Vec3, points: &[Vec3]) -> Vec<f64> {
    points
        .iter()
        .filter_map(|p| {
            let q = p - position;
            (q.x.hypot(q.y) > 1e-12).then(|| q.y.atan2(q.x))
        })
        .collect()
}

/// Smallest azimuth interval covering every point, as (start, width).
fn azimuth_cover(position: &Vec3, points: &[Vec3]) -> Option<(f64, f64)> {
    let mut b = bearings(position, points);
    if b.is_empty() {
        return None;
    }
    b.sort_by(f64::total_cmp);
    // The cover is the complement of the widest gap between bearings.
    let n = b.len();
    let (mut gap, mut after) = (b[0] + TAU - b[n - 1], 0);
    for i in 1..n {
        let g = b[i] - b[i - 1];
        if g > gap {
            gap = g;
            after = i;
        }
    }
    Some((b[after], TAU - gap))
}

/// Width of the smallest azimuth interval covering all points seen from
/// `position`. Points straight above or below are ignored.
pub fn horizontal_span(position: &Vec3, points: &[Vec3]) -> f64 {
    azimuth_cover(position, points).map_or(0.0, |(_, w)| w)
}

/// Elevation spread of the points in the vertical plane of the pan that
/// centers the azimuth cover. Returns pi when a point lies behind that pan.
pub fn vertical_span_at_best_pan(position: &Vec3, points: &[Vec3]) -> f64 {
    let Some((start, width)) = azimuth_cover(position, points) else {
        return PI;
    };
    let pan = start + width / 2.0;
    let dir = Vec3::new(pan.cos(), pan.sin(), 0.0);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in points {
        let q = p - position;
        let fwd = q.dot(&dir);
        if fwd <= MIN_DEPTH {
            return PI;
        }
        let e = q.z.atan2(fwd);
        lo = lo.min(e);
        hi = hi.max(e);
    }
    hi - lo
}
