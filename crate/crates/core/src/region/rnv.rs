//! Vertical no-view region: the section of the extended solid Sv by Plane H.
//!
//! Sv is a hexahedron JKMN-J'K'M'N' flush with BV and extruded toward the
//! camera by `d`, plus a half-cylinder cap of radius `r` on its front face.
//! Its profile across the extrusion axis (along AB) is the rectangle
//! `[0, d] x [-r, r]` joined to the half-disc `v >= d`, where `v` is depth
//! along the box normal and `w` height along the box plane.

use serde::Serialize;

use super::chord::{chord_params, inclination, ChordParams};
use super::polygon::{ConvexPolygon, Vec2};
use super::{check_plane, BOUNDARY_TOL};
use crate::boxes::RectBox;
use crate::error::Result;
use crate::scene::{CameraModel, Vec3};

/// Corner order used by [`Prism::vertices`].
pub const PRISM_EDGES: [(usize, usize); 12] = [
    (0, 1),
    (1, 2),
    (2, 3),
    (3, 0),
    (4, 5),
    (5, 6),
    (6, 7),
    (7, 4),
    (0, 4),
    (1, 5),
    (2, 6),
    (3, 7),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prism {
    pub j: Vec3,
    pub k: Vec3,
    pub m: Vec3,
    pub n: Vec3,
    pub j_p: Vec3,
    pub k_p: Vec3,
    pub m_p: Vec3,
    pub n_p: Vec3,
    /// Unit box normal toward the camera side.
    pub normal: Vec3,
    pub chord: ChordParams,
    pub alpha: f64,
}

pub fn rnv_prism(bv: &RectBox, cam: &CameraModel) -> Result<Prism> {
    let l = bv.height();
    // The vertical box is governed by the vertical aperture.
    let chord = chord_params(l, cam.phi)?;
    let ab = bv.ab_dir();
    let ad = bv.ad_dir();
    let side = ab * (chord.d + chord.r);
    let ext = ad * ((2.0 * chord.r - l) / 2.0);
    let j = bv.a - side - ext;
    let k = bv.b + side - ext;
    let n = bv.d - side + ext;
    let m = bv.c + side + ext;
    let normal = bv.frame.e0;
    let off = normal * chord.d;
    Ok(Prism {
        j,
        k,
        m,
        n,
        j_p: j + off,
        k_p: k + off,
        m_p: m + off,
        n_p: n + off,
        normal,
        chord,
        alpha: inclination(bv),
    })
}

impl Prism {
    pub fn vertices(&self) -> [Vec3; 8] {
        [self.j, self.k, self.m, self.n, self.j_p, self.k_p, self.m_p, self.n_p]
    }

    /// Midpoint of JN, origin of the profile coordinates.
    fn origin(&self) -> Vec3 {
        (self.j + self.n) / 2.0
    }

    fn axis(&self) -> Vec3 {
        (self.k - self.j).normalize()
    }

    fn length(&self) -> f64 {
        (self.k - self.j).norm()
    }

    /// Unit vector from N to J, pointing up the box plane.
    fn up(&self) -> Vec3 {
        (self.j - self.n).normalize()
    }

    /// (u, v, w): along JK, along the normal, along NJ.
    fn local(&self, p: &Vec3) -> (f64, f64, f64) {
        let q = p - self.origin();
        (q.dot(&self.axis()), q.dot(&self.normal), q.dot(&self.up()))
    }

    fn at(&self, u: f64, v: f64, w: f64) -> Vec3 {
        self.origin() + self.axis() * u + self.normal * v + self.up() * w
    }

    /// Membership in the full solid (hexahedron plus cap).
    pub fn contains(&self, p: &Vec3) -> bool {
        let tol = BOUNDARY_TOL;
        let (u, v, w) = self.local(p);
        let (r, d) = (self.chord.r, self.chord.d);
        if u < -tol || u > self.length() + tol || v < -tol {
            return false;
        }
        if v <= d + tol {
            return w.abs() <= r + tol;
        }
        (v - d).powi(2) + w * w <= (r + tol).powi(2)
    }
}

/// A point where a plane crosses a polyhedron edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectionPoint {
    pub point: [f64; 3],
    pub edge: (usize, usize),
}

/// Section of a convex polyhedron, given by vertices and edges, with the
/// plane z = h. Edges lying in the plane contribute both endpoints.
pub fn clip_edges(vertices: &[Vec3], edges: &[(usize, usize)], h: f64) -> Vec<SectionPoint> {
    let mut out = Vec::new();
    for &(i, j) in edges {
        let (a, b) = (vertices[i], vertices[j]);
        let (da, db) = (a.z - h, b.z - h);
        if da * db > 0.0 {
            continue;
        }
        let p = if da == db {
            // Both on the plane.
            out.push(SectionPoint {
                point: [a.x, a.y, h],
                edge: (i, j),
            });
            b
        } else {
            a + (b - a) * ((h - a.z) / (b.z - a.z))
        };
        out.push(SectionPoint {
            point: [p.x, p.y, h],
            edge: (i, j),
        });
    }
    out
}

/// Which two faces of the profile Plane H enters and leaves through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionCase {
    /// Marker face and top face (JN and JJ').
    MarkerTop = 1,
    MarkerFront = 2,
    MarkerBottom = 3,
    /// Top, front and bottom faces only; the marker face is missed.
    Detached = 4,
    /// Only the cap is cut.
    CapOnly = 5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Face {
    Marker,
    Top,
    Bottom,
    Front,
}

/// The strip of the cap cut by Plane H, as a rectangle on the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapSection {
    pub corners: [Vec3; 4],
    /// Depth range along the box normal, measured from the marker face.
    pub depth: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RnvRegion {
    pub exists: bool,
    pub case: Option<SectionCase>,
    /// Convex boundary on Plane H, counter-clockwise.
    pub vertices: Vec<Vec3>,
    /// Raw hexahedron-edge crossings.
    pub section: Vec<SectionPoint>,
    pub cap: Option<CapSection>,
    pub prism: Prism,
    pub h_c: f64,
}

/// Clips the line `g . (v, w) = k` to the box `[v0, v1] x [w0, w1]`.
/// Returns the two endpoints when the overlap is non-empty.
fn clip_line_to_rect(g: (f64, f64), k: f64, v: (f64, f64), w: (f64, f64)) -> Option<((f64, f64), (f64, f64))> {
    let gg = g.0 * g.0 + g.1 * g.1;
    let base = (k * g.0 / gg, k * g.1 / gg);
    let dir = (g.1 / gg.sqrt(), -g.0 / gg.sqrt());
    let (mut s0, mut s1) = (f64::NEG_INFINITY, f64::INFINITY);
    for (b, dd, lo, hi) in [(base.0, dir.0, v.0, v.1), (base.1, dir.1, w.0, w.1)] {
        if dd.abs() < 1e-15 {
            if b < lo - 1e-12 || b > hi + 1e-12 {
                return None;
            }
            continue;
        }
        let (ta, tb) = ((lo - b) / dd, (hi - b) / dd);
        s0 = s0.max(ta.min(tb));
        s1 = s1.min(ta.max(tb));
    }
    if s0 > s1 + 1e-12 {
        return None;
    }
    let at = |s: f64| (base.0 + s * dir.0, base.1 + s * dir.1);
    Some((at(s0), at(s1)))
}

/// Clips the same line to the part of the disc `(v - d)^2 + w^2 <= r^2`
/// with `v >= v_min`.
fn clip_line_to_cap(g: (f64, f64), k: f64, d: f64, r: f64, v_min: f64) -> Option<((f64, f64), (f64, f64))> {
    let gg = g.0 * g.0 + g.1 * g.1;
    let base = (k * g.0 / gg, k * g.1 / gg);
    let dir = (g.1 / gg.sqrt(), -g.0 / gg.sqrt());
    let off = (base.0 - d, base.1);
    let bq = off.0 * dir.0 + off.1 * dir.1;
    let cq = off.0 * off.0 + off.1 * off.1 - r * r;
    let disc = bq * bq - cq;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let (mut s0, mut s1) = (-bq - sq, -bq + sq);
    if dir.0.abs() < 1e-15 {
        if base.0 < v_min {
            return None;
        }
    } else {
        let s_d = (v_min - base.0) / dir.0;
        if dir.0 > 0.0 {
            s0 = s0.max(s_d);
        } else {
            s1 = s1.min(s_d);
        }
    }
    if s1 - s0 <= 1e-12 {
        return None;
    }
    let at = |s: f64| (base.0 + s * dir.0, base.1 + s * dir.1);
    Some((at(s0), at(s1)))
}

fn face_of(pt: (f64, f64), d: f64, r: f64, eps: f64) -> Face {
    if pt.0.abs() <= eps {
        Face::Marker
    } else if (pt.1 - r).abs() <= eps {
        Face::Top
    } else if (pt.1 + r).abs() <= eps {
        Face::Bottom
    } else {
        debug_assert!((pt.0 - d).abs() <= eps.max(1e-6));
        Face::Front
    }
}

fn classify(a: Face, b: Face) -> SectionCase {
    use Face::*;
    match (a, b) {
        (Marker, Top) | (Top, Marker) => SectionCase::MarkerTop,
        (Marker, Front) | (Front, Marker) => SectionCase::MarkerFront,
        (Marker, Bottom) | (Bottom, Marker) => SectionCase::MarkerBottom,
        // A chord from marker to marker only happens when the plane holds
        // the whole marker face; report it with the face it leaves through.
        (Marker, Marker) => SectionCase::MarkerFront,
        _ => SectionCase::Detached,
    }
}

pub fn rnv_section(prism: &Prism, h_c: f64) -> RnvRegion {
    let section = clip_edges(&prism.vertices(), &PRISM_EDGES, h_c);
    let (r, d) = (prism.chord.r, prism.chord.d);
    let o = prism.origin();
    // Plane H in profile coordinates: n_z v + up_z w = h_c - o_z (the axis
    // is horizontal, so u drops out).
    let g = (prism.normal.z, prism.up().z);
    let k = h_c - o.z;
    let eps = 1e-9 * (1.0 + r + d);

    // An obtuse aperture puts the primed face behind the marker; only the
    // cap then reaches the camera side.
    let obtuse = d < 0.0;
    let rect = if obtuse {
        None
    } else {
        clip_line_to_rect(g, k, (0.0, d), (-r, r))
    };
    let rect = rect.filter(|(p, q)| ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt() > eps);
    let cap_seg = clip_line_to_cap(g, k, d, r, d.max(0.0));

    let case = match (rect, cap_seg) {
        (Some((p, q)), _) => Some(classify(face_of(p, d, r, eps), face_of(q, d, r, eps))),
        (None, Some(_)) => Some(SectionCase::CapOnly),
        (None, None) => None,
    };

    let len = prism.length();
    let cap = cap_seg.map(|(p, q)| {
        let corners = [
            prism.at(0.0, p.0, p.1),
            prism.at(0.0, q.0, q.1),
            prism.at(len, q.0, q.1),
            prism.at(len, p.0, p.1),
        ];
        CapSection {
            corners,
            depth: (p.0.min(q.0), p.0.max(q.0)),
        }
    });

    let mut pts: Vec<Vec2> = if obtuse {
        Vec::new()
    } else {
        section.iter().map(|s| Vec2::new(s.point[0], s.point[1])).collect()
    };
    if let Some(c) = &cap {
        pts.extend(c.corners.iter().map(|p| Vec2::new(p.x, p.y)));
    }
    let hull = ConvexPolygon::hull(&pts);
    let exists = case.is_some() && hull.area() > 1e-12;
    let vertices = if exists {
        hull.vertices.iter().map(|p| Vec3::new(p.x, p.y, h_c)).collect()
    } else {
        Vec::new()
    };
    RnvRegion {
        exists,
        case: if exists { case } else { None },
        vertices,
        section,
        cap,
        prism: *prism,
        h_c,
    }
}

impl RnvRegion {
    pub fn contains(&self, p: &Vec3) -> Result<bool> {
        check_plane(p, self.h_c)?;
        Ok(self.contains_xy(p.x, p.y))
    }

    pub fn contains_xy(&self, x: f64, y: f64) -> bool {
        self.exists && self.prism.contains(&Vec3::new(x, y, self.h_c))
    }

    pub fn polygon(&self) -> ConvexPolygon {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|p| Vec2::new(p.x, p.y)).collect(),
        }
    }

    pub fn area(&self) -> f64 {
        self.polygon().area()
    }
}

/// Closed form for the crossing of Plane H with JN:
/// `V1 = J + m3 (N - J)` with `h_c = J_z + m3 (N_z - J_z)`.
pub fn case1_v1(prism: &Prism, h_c: f64) -> Vec3 {
    let p = prism.n - prism.j;
    let m3 = (h_c - prism.j.z) / p.z;
    prism.j + p * m3
}

#[derive(Debug, Clone, Serialize)]
pub struct RnvExport {
    pub exists: bool,
    pub case: Option<u8>,
    pub vertices: Vec<[f64; 3]>,
    pub caps: Vec<[[f64; 3]; 4]>,
}

impl From<&RnvRegion> for RnvExport {
    fn from(r: &RnvRegion) -> Self {
        let arr = |v: &Vec3| [v.x, v.y, v.z];
        Self {
            exists: r.exists,
            case: r.case.map(|c| c as u8),
            vertices: r.vertices.iter().map(arr).collect(),
            caps: r
                .cap
                .iter()
                .filter(|_| r.exists)
                .map(|c| {
                    [
                        arr(&c.corners[0]),
                        arr(&c.corners[1]),
                        arr(&c.corners[2]),
                        arr(&c.corners[3]),
                    ]
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::build_boxes;
    use crate::scene::{Marker, Scene};
    use approx::assert_abs_diff_eq;

    fn scene(normal: Vec3, points: Vec<Vec3>, h_c: f64) -> Scene {
        let m = Marker::new("m", points, normal).unwrap();
        Scene::new(vec![m], CameraModel::new(1.13, 1.13, 1024, 1024, h_c).unwrap()).unwrap()
    }

    fn square(h_c: f64) -> Scene {
        scene(
            Vec3::new(0.0, -1.0, 0.0),
            vec![
                Vec3::new(-0.5, 2.0, 1.0),
                Vec3::new(0.5, 2.0, 1.0),
                Vec3::new(0.5, 2.0, 2.0),
                Vec3::new(-0.5, 2.0, 2.0),
            ],
            h_c,
        )
    }

    fn prism_of(s: &Scene) -> Prism {
        let (_, bv) = build_boxes(s).unwrap();
        rnv_prism(&bv, &s.camera).unwrap()
    }

    #[test]
    fn square_prism_offsets() {
        let p = prism_of(&square(1.5));
        let (r, d) = (p.chord.r, p.chord.d);
        assert_abs_diff_eq!(p.j, Vec3::new(-0.5 - d - r, 2.0, 1.5 + r), epsilon = 1e-12);
        assert_abs_diff_eq!(p.m, Vec3::new(0.5 + d + r, 2.0, 1.5 - r), epsilon = 1e-12);
        let off = p.normal * d;
        for (a, b) in [(p.j, p.j_p), (p.k, p.k_p), (p.m, p.m_p), (p.n, p.n_p)] {
            assert_abs_diff_eq!(b - a, off, epsilon = 1e-15);
        }
    }

    #[test]
    fn square_section_spans_prism_and_cap() {
        let s = square(1.5);
        let p = prism_of(&s);
        let v = rnv_section(&p, 1.5);
        let (r, d) = (p.chord.r, p.chord.d);
        assert!(v.exists);
        assert_eq!(v.case, Some(SectionCase::MarkerFront));
        let cap = v.cap.unwrap();
        assert_abs_diff_eq!(cap.depth.0, d, epsilon = 1e-12);
        assert_abs_diff_eq!(cap.depth.1, d + r, epsilon = 1e-12);
        let w = 1.0 + 2.0 * (d + r);
        assert_abs_diff_eq!(v.area(), w * (d + r), epsilon = 1e-12);
        assert!(v.contains(&Vec3::new(0.0, 2.0 - d - r + 1e-10, 1.5)).unwrap());
        assert!(!v.contains(&Vec3::new(0.0, 2.0 - d - r - 1e-6, 1.5)).unwrap());
        assert!(!v.contains(&Vec3::new(0.0, 2.0 + 1e-6, 1.5)).unwrap());
    }

    #[test]
    fn obtuse_aperture_section_stays_in_front_of_marker() {
        let s = square(1.5);
        let s = s
            .with_camera(CameraModel::new(1.13, 2.2, 1024, 1024, 1.5).unwrap())
            .unwrap();
        let p = prism_of(&s);
        let (r, d) = (p.chord.r, p.chord.d);
        assert!(d < 0.0);
        let v = rnv_section(&p, 1.5);
        assert_eq!(v.case, Some(SectionCase::CapOnly));
        let cap = v.cap.unwrap();
        assert_abs_diff_eq!(cap.depth.0, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cap.depth.1, d + r, epsilon = 1e-12);
        assert_abs_diff_eq!(v.area(), (1.0 + 2.0 * (d + r)) * (d + r), epsilon = 1e-12);
        assert!(v.vertices.iter().all(|q| q.y <= 2.0 + 1e-12));
        assert!(v.contains(&Vec3::new(0.0, 2.0 - (d + r) + 1e-10, 1.5)).unwrap());
        assert!(!v.contains(&Vec3::new(0.0, 2.0 + 1e-6, 1.5)).unwrap());
    }

    #[test]
    fn plane_below_solid_is_empty() {
        let p = prism_of(&square(1.5));
        let v = rnv_section(&p, 0.0);
        assert!(!v.exists);
        assert!(v.case.is_none());
        assert!(!v.contains_xy(0.0, 1.9));
    }

    #[test]
    fn vertical_marker_near_top_cuts_the_cap_only_at_its_rim() {
        let p = prism_of(&square(1.5));
        let r = p.chord.r;
        let v = rnv_section(&p, 1.5 + r * 0.99);
        assert!(v.exists);
        assert_eq!(v.case, Some(SectionCase::MarkerFront));
        let v = rnv_section(&p, 1.5 + r * 1.01);
        assert!(!v.exists);
    }

    /// Downward-facing tilted marker overhead, as in a ceiling mount.
    fn tilted() -> Scene {
        let n = Vec3::new(0.0, -0.6, -0.8);
        let e1 = Vec3::new(1.0, 0.0, 0.0);
        let e2 = n.cross(&e1);
        let c = Vec3::new(0.0, 2.0, 3.0);
        let pts = [(-0.5, -0.3), (0.5, -0.3), (0.5, 0.3), (-0.5, 0.3)]
            .iter()
            .map(|&(a, b)| c + e1 * a + e2 * b)
            .collect();
        scene(n, pts, 1.5)
    }

    #[test]
    fn case_one_matches_closed_form() {
        let p = prism_of(&tilted());
        assert!(p.j_p.z < p.j.z);
        let lo = p.j_p.z.max(p.n.z);
        for k in 0..10 {
            let h = lo + (p.j.z - lo) * k as f64 / 10.0;
            let v = rnv_section(&p, h);
            assert_eq!(v.case, Some(SectionCase::MarkerTop), "h = {h}");
            let v1 = case1_v1(&p, h);
            let hit = v.section.iter().find(|s| s.edge == (3, 0)).unwrap();
            assert_abs_diff_eq!(Vec3::from(hit.point), v1, epsilon = 1e-9);
        }
    }

    #[test]
    fn clip_of_unit_cube() {
        let cube: Vec<Vec3> = [
            (0.0, 0.0, 0.0),
            (1.0, 0.0, 0.0),
            (1.0, 1.0, 0.0),
            (0.0, 1.0, 0.0),
            (0.0, 0.0, 1.0),
            (1.0, 0.0, 1.0),
            (1.0, 1.0, 1.0),
            (0.0, 1.0, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z))
        .collect();
        assert_eq!(clip_edges(&cube, &PRISM_EDGES, 0.5).len(), 4);
        assert_eq!(clip_edges(&cube, &PRISM_EDGES, 2.0).len(), 0);
    }

    #[test]
    fn membership_matches_polygon_away_from_boundary() {
        let s = tilted();
        let p = prism_of(&s);
        for h in [1.5, 2.0, 2.5, 2.9] {
            let v = rnv_section(&p, h);
            if !v.exists {
                continue;
            }
            let poly = v.polygon();
            for i in 0..60 {
                for j in 0..60 {
                    let q = Vec2::new(-2.0 + i as f64 * 0.07, -1.0 + j as f64 * 0.07);
                    let m = poly.inner_margin(&q);
                    if m.abs() > 1e-6 {
                        assert_eq!(v.contains_xy(q.x, q.y), m > 0.0, "h = {h}, q = {q:?}");
                    }
                }
            }
        }
    }
}
