//! Construction of the rectangles BH and BV that bound the feature points.
//!
//! Both boxes live in a plane whose normal is the averaged marker normal.
//! BH keeps the true left/right extremal points on its vertical sides and
//! ray-projects the top/bottom points toward the reference optical center.
//! BV does the opposite.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scene::{average_unit_normal, compute_frame, Extrema, Frame, Scene, Vec3};

const MIN_BOX_SIDE: f64 = 1e-9;
const PARALLEL_TOL: f64 = 1e-9;
const ON_PLANE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoxKind {
    #[serde(rename = "BH")]
    Horizontal,
    #[serde(rename = "BV")]
    Vertical,
}

/// Oriented rectangle. `a` is the top-left corner seen from the camera side,
/// `a -> b` runs along `frame.e1` and `a -> d` runs down the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectBox {
    pub a: Vec3,
    pub b: Vec3,
    pub c: Vec3,
    pub d: Vec3,
    pub frame: Frame,
    pub kind: BoxKind,
}

impl RectBox {
    pub fn corners(&self) -> [Vec3; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn width(&self) -> f64 {
        (self.b - self.a).norm()
    }

    pub fn height(&self) -> f64 {
        (self.d - self.a).norm()
    }

    /// Unit vector from `a` to `b`.
    pub fn ab_dir(&self) -> Vec3 {
        (self.b - self.a).normalize()
    }

    /// Unit vector from `a` to `d`.
    pub fn ad_dir(&self) -> Vec3 {
        (self.d - self.a).normalize()
    }

    /// Point-in-rectangle test for a point already on the box plane.
    pub fn contains_in_plane(&self, p: &Vec3, tol: f64) -> bool {
        let ab = self.b - self.a;
        let ad = self.d - self.a;
        let s = (p - self.a).dot(&ab) / ab.norm();
        let t = (p - self.a).dot(&ad) / ad.norm();
        s >= -tol && s <= ab.norm() + tol && t >= -tol && t <= ad.norm() + tol
    }
}

/// Moves `p` along `dir` until it reaches the plane through `anchor` with
/// normal `n`. Returns the projected point and the step `m` with
/// `p' = p + m * dir`.
pub fn project_onto_box_plane(p: &Vec3, anchor: &Vec3, dir: &Vec3, n: &Vec3) -> Result<(Vec3, f64)> {
    let offset = (anchor - p).dot(n);
    // A point already on the plane stays put whatever the ray direction.
    if offset.abs() <= ON_PLANE_TOL {
        return Ok((*p, 0.0));
    }
    let denom = dir.dot(n);
    if denom.abs() <= PARALLEL_TOL {
        return Err(Error::RayParallelToPlane);
    }
    let m = offset / denom;
    Ok((p + dir * m, m))
}

/// Intersection of the in-plane line `base + s * dir` with the line
/// `other + t * other_dir`, solved in the least-squares sense. The returned
/// point is on the first line, so it stays on the box plane even when the
/// second line is slightly off it.
fn meet(base: &Vec3, dir: &Vec3, other: &Vec3, other_dir: &Vec3) -> Result<Vec3> {
    // base + s*dir - t*other_dir = other
    let rhs = other - base;
    let m11 = dir.dot(dir);
    let m12 = -dir.dot(other_dir);
    let m22 = other_dir.dot(other_dir);
    let b1 = dir.dot(&rhs);
    let b2 = -other_dir.dot(&rhs);
    let det = m11 * m22 - m12 * m12;
    if det.abs() < 1e-15 {
        return Err(Error::DegenerateBox("box sides are parallel".into()));
    }
    let s = (b1 * m22 - m12 * b2) / det;
    Ok(base + dir * s)
}

fn box_frame(scene: &Scene) -> Result<Frame> {
    compute_frame(&average_unit_normal(&scene.markers)?)
}

fn check_box(b: RectBox) -> Result<RectBox> {
    if b.width() < MIN_BOX_SIDE || b.height() < MIN_BOX_SIDE {
        return Err(Error::DegenerateBox(format!(
            "{:?} is {:.3e} x {:.3e} m",
            b.kind,
            b.width(),
            b.height()
        )));
    }
    Ok(b)
}

pub fn build_bh(scene: &Scene, extrema: &Extrema) -> Result<RectBox> {
    let frame = box_frame(scene)?;
    let oc = scene.optical_center();
    let Frame { e0, e1, e2 } = frame;
    let anchor = extrema.p_l;
    let (pt, _) = project_onto_box_plane(&extrema.p_t, &anchor, &(oc - extrema.p_t), &e0)?;
    let (pb, _) = project_onto_box_plane(&extrema.p_b, &anchor, &(oc - extrema.p_b), &e0)?;
    // Horizontal sides run along e1 through the projected top/bottom points;
    // vertical sides run along e2 through P_l and P_r.
    let a = meet(&pt, &e1, &extrema.p_l, &e2)?;
    let b = meet(&pt, &e1, &extrema.p_r, &e2)?;
    let c = meet(&pb, &e1, &extrema.p_r, &e2)?;
    let d = meet(&pb, &e1, &extrema.p_l, &e2)?;
    check_box(RectBox {
        a,
        b,
        c,
        d,
        frame,
        kind: BoxKind::Horizontal,
    })
}

pub fn build_bv(scene: &Scene, extrema: &Extrema) -> Result<RectBox> {
    let frame = box_frame(scene)?;
    let oc = scene.optical_center();
    let Frame { e0, e1, e2 } = frame;
    let anchor = extrema.p_t;
    let (pl, _) = project_onto_box_plane(&extrema.p_l, &anchor, &(oc - extrema.p_l), &e0)?;
    let (pr, _) = project_onto_box_plane(&extrema.p_r, &anchor, &(oc - extrema.p_r), &e0)?;
    let a = meet(&pl, &e2, &extrema.p_t, &e1)?;
    let b = meet(&pr, &e2, &extrema.p_t, &e1)?;
    let c = meet(&pr, &e2, &extrema.p_b, &e1)?;
    let d = meet(&pl, &e2, &extrema.p_b, &e1)?;
    check_box(RectBox {
        a,
        b,
        c,
        d,
        frame,
        kind: BoxKind::Vertical,
    })
}

/// Builds both boxes for a scene.
pub fn build_boxes(scene: &Scene) -> Result<(RectBox, RectBox)> {
    let frame = box_frame(scene)?;
    let ex = crate::scene::extrema_in_frame(scene.points(), &frame);
    Ok((build_bh(scene, &ex)?, build_bv(scene, &ex)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{compute_extrema, CameraModel, Marker};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn square_scene() -> Scene {
        let m = Marker::new(
            "m",
            vec![
                Vec3::new(-0.5, 2.0, 1.0),
                Vec3::new(0.5, 2.0, 1.0),
                Vec3::new(0.5, 2.0, 2.0),
                Vec3::new(-0.5, 2.0, 2.0),
            ],
            Vec3::new(0.0, -1.0, 0.0),
        )
        .unwrap();
        Scene::new(vec![m], CameraModel::new(1.13, 1.13, 1024, 1024, 1.5).unwrap()).unwrap()
    }

    #[test]
    fn projection_examples() {
        let anchor = Vec3::new(0.0, 2.0, 0.0);
        let n = Vec3::new(0.0, -1.0, 0.0);
        let (p, m) = project_onto_box_plane(&Vec3::new(0.0, 3.0, 2.0), &anchor, &n, &n).unwrap();
        assert_abs_diff_eq!(p, Vec3::new(0.0, 2.0, 2.0), epsilon = 1e-15);
        assert_abs_diff_eq!(m, 1.0, epsilon = 1e-15);

        let on = Vec3::new(3.0, 2.0, -1.0);
        let (p, m) = project_onto_box_plane(&on, &anchor, &n, &n).unwrap();
        assert_eq!(p, on);
        assert_eq!(m, 0.0);

        let dir = Vec3::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0);
        let (p, m) = project_onto_box_plane(&Vec3::new(1.0, 3.0, 1.0), &anchor, &dir, &n).unwrap();
        assert_abs_diff_eq!(p, Vec3::new(0.0, 2.0, 1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(m, SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn parallel_ray_is_rejected() {
        let on = project_onto_box_plane(&Vec3::new(1.0, 0.0, 0.0), &Vec3::zeros(), &Vec3::x(), &Vec3::y());
        assert_eq!(on.unwrap(), (Vec3::new(1.0, 0.0, 0.0), 0.0));
        let r = project_onto_box_plane(&Vec3::new(0.0, 3.0, 0.0), &Vec3::zeros(), &Vec3::x(), &Vec3::y());
        assert!(matches!(r, Err(Error::RayParallelToPlane)));
    }

    #[test]
    fn coplanar_marker_box_is_marker_rectangle() {
        let scene = square_scene();
        let ex = compute_extrema(&scene).unwrap();
        for b in [build_bh(&scene, &ex).unwrap(), build_bv(&scene, &ex).unwrap()] {
            assert_abs_diff_eq!(b.a, Vec3::new(-0.5, 2.0, 2.0), epsilon = 1e-12);
            assert_abs_diff_eq!(b.b, Vec3::new(0.5, 2.0, 2.0), epsilon = 1e-12);
            assert_abs_diff_eq!(b.c, Vec3::new(0.5, 2.0, 1.0), epsilon = 1e-12);
            assert_abs_diff_eq!(b.d, Vec3::new(-0.5, 2.0, 1.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn side_by_side_markers_span_both() {
        let mut scene = square_scene();
        let m2 = Marker::new(
            "m2",
            vec![
                Vec3::new(1.5, 2.0, 1.2),
                Vec3::new(2.5, 2.0, 1.2),
                Vec3::new(2.5, 2.0, 1.8),
            ],
            Vec3::new(0.0, -1.0, 0.0),
        )
        .unwrap();
        scene.markers.push(m2);
        let (bh, bv) = build_boxes(&scene).unwrap();
        assert_abs_diff_eq!(bh.a, Vec3::new(-0.5, 2.0, 2.0), epsilon = 1e-12);
        assert_abs_diff_eq!(bh.c, Vec3::new(2.5, 2.0, 1.0), epsilon = 1e-12);
        assert_abs_diff_eq!(bv.a, bh.a, epsilon = 1e-12);
        assert_abs_diff_eq!(bv.c, bh.c, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_box_is_rejected() {
        let m = Marker::new(
            "flat",
            vec![
                Vec3::new(-0.5, 2.0, 1.0),
                Vec3::new(0.0, 2.0, 1.0),
                Vec3::new(0.5, 2.0, 1.0),
            ],
            Vec3::new(0.0, -1.0, 0.0),
        )
        .unwrap();
        let scene = Scene::new(vec![m], CameraModel::new(1.13, 1.13, 64, 64, 1.5).unwrap()).unwrap();
        assert!(matches!(build_boxes(&scene), Err(Error::DegenerateBox(_))));
    }
}
