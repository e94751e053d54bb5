//! Horizontal no-view region on Plane H: a rectangle flush with the box
//! plane, capped on the camera side by a half ellipse.

use serde::Serialize;

use super::chord::{chord_params, inclination, ChordParams};
use super::polygon::{arc_step, ConvexPolygon, Vec2};
use super::{check_plane, BOUNDARY_TOL};
use crate::boxes::RectBox;
use crate::error::{Error, Result};
use crate::scene::{CameraModel, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RnhRegion {
    pub h1: Vec3,
    pub h2: Vec3,
    pub h3: Vec3,
    pub h4: Vec3,
    /// Horizontal unit vector perpendicular to H1H2, toward the camera side.
    pub t1: Vec3,
    /// Unit vector from H1 to H2.
    pub along: Vec3,
    /// Ellipse semi-axis along `t1`.
    pub a: f64,
    /// Ellipse semi-axis along H3H4 (and half the rectangle length).
    pub b: f64,
    /// Rectangle depth along `t1`.
    pub c: f64,
    pub alpha: f64,
    pub chord: ChordParams,
    /// Where Plane H meets the two non-horizontal sides of BH.
    pub p: Vec3,
    pub q: Vec3,
    pub h_c: f64,
}

fn line_at_height(from: &Vec3, to: &Vec3, h: f64) -> Option<(Vec3, f64)> {
    let dz = to.z - from.z;
    if dz.abs() < 1e-12 {
        return None;
    }
    let t = (h - from.z) / dz;
    Some((from + (to - from) * t, t))
}

pub fn rnh_section(bh: &RectBox, cam: &CameraModel) -> Result<RnhRegion> {
    let h_c = cam.h_c;
    let (p, tp) = line_at_height(&bh.a, &bh.d, h_c).ok_or(Error::NoIntersection { h_c })?;
    let (q, tq) = line_at_height(&bh.b, &bh.c, h_c).ok_or(Error::NoIntersection { h_c })?;
    if !(0.0..=1.0).contains(&tp) || !(0.0..=1.0).contains(&tq) {
        log::warn!("plane z = {h_c} meets the BH sides outside the box; using the extended sides");
    }
    let l = (q - p).norm();
    let chord = chord_params(l, cam.theta)?;
    let alpha = inclination(bh);
    let sin_a = alpha.sin();
    let a = chord.r / sin_a;
    let b = chord.r;
    let c = chord.d / sin_a;

    let along = bh.ab_dir();
    let ext = (2.0 * chord.r - l) / 2.0;
    let h1 = p - along * ext;
    let h2 = q + along * ext;
    let e0 = bh.frame.e0;
    let t1 = Vec3::new(e0.x, e0.y, 0.0).normalize();
    let h3 = h2 + t1 * c;
    let h4 = h1 + t1 * c;
    Ok(RnhRegion {
        h1,
        h2,
        h3,
        h4,
        t1,
        along,
        a,
        b,
        c,
        alpha,
        chord,
        p,
        q,
        h_c,
    })
}

impl RnhRegion {
    /// Coordinates of a plane point relative to H1: (along H1H2, along t1).
    fn local(&self, x: f64, y: f64) -> (f64, f64) {
        let dx = x - self.h1.x;
        let dy = y - self.h1.y;
        (dx * self.along.x + dy * self.along.y, dx * self.t1.x + dy * self.t1.y)
    }

    pub fn contains(&self, p: &Vec3) -> Result<bool> {
        check_plane(p, self.h_c)?;
        Ok(self.contains_xy(p.x, p.y))
    }

    /// Membership for a point given by its Plane H coordinates.
    pub fn contains_xy(&self, x: f64, y: f64) -> bool {
        let tol = BOUNDARY_TOL;
        let (s, t) = self.local(x, y);
        if s < -tol || s > 2.0 * self.b + tol || t < -tol {
            return false;
        }
        if t <= self.c + tol {
            return true;
        }
        let ds = s - self.b;
        let dt = t - self.c;
        let q = (ds / self.b).powi(2) + (dt / self.a).powi(2);
        q <= 1.0 + 2.0 * tol / self.a.min(self.b)
    }

    pub fn area(&self) -> f64 {
        if self.c >= 0.0 {
            return 2.0 * self.b * self.c + std::f64::consts::FRAC_PI_2 * self.a * self.b;
        }
        // Obtuse aperture: the ellipse center lies behind H1H2 and only the
        // segment in front of it remains.
        let u = (-self.c / self.a).min(1.0);
        self.a * self.b * (u.acos() - u * (1.0 - u * u).sqrt())
    }

    /// Parameter range of the half-ellipse that lies on the camera side of
    /// H1H2.
    fn arc_range(&self) -> (f64, f64) {
        let t0 = (-self.c / self.a).clamp(0.0, 1.0).asin();
        (t0, std::f64::consts::PI - t0)
    }

    /// Point on the half-ellipse boundary at parameter `t` in `[0, pi]`;
    /// `t = 0` is H3 and `t = pi` is H4.
    pub fn ellipse_point(&self, t: f64) -> Vec3 {
        let center = (self.h3 + self.h4) / 2.0;
        center + self.along * (self.b * t.cos()) + self.t1 * (self.a * t.sin())
    }

    /// Circumscribed polygon of the region; every edge is within `arc_tol`
    /// of the true boundary.
    pub fn polygon(&self, arc_tol: f64) -> ConvexPolygon {
        let (t0, t1) = self.arc_range();
        let step = arc_step(self.a.max(self.b), arc_tol);
        let k = ((t1 - t0) / step).ceil().max(1.0) as usize;
        let h = (t1 - t0) / k as f64;
        let center = (self.h3 + self.h4) / 2.0;
        let scale = 1.0 / (h / 2.0).cos();
        let (first, last) = if self.c >= 0.0 {
            (self.h3, self.h4)
        } else {
            (self.ellipse_point(t0), self.ellipse_point(t1))
        };
        let mut pts = vec![xy(&first)];
        if self.c >= 0.0 {
            pts.extend([xy(&self.h1), xy(&self.h2)]);
        }
        for j in 0..k {
            let t = t0 + (j as f64 + 0.5) * h;
            let p = center + self.along * (self.b * t.cos() * scale) + self.t1 * (self.a * t.sin() * scale);
            pts.push(xy(&p));
        }
        pts.push(xy(&last));
        ConvexPolygon::hull(&pts)
    }
}

fn xy(p: &Vec3) -> Vec2 {
    Vec2::new(p.x, p.y)
}

#[derive(Debug, Clone, Serialize)]
pub struct RnhExport {
    pub h1: [f64; 3],
    pub h2: [f64; 3],
    pub h3: [f64; 3],
    pub h4: [f64; 3],
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub t1: [f64; 3],
    pub alpha: f64,
    pub r: f64,
    pub d: f64,
}

impl From<&RnhRegion> for RnhExport {
    fn from(r: &RnhRegion) -> Self {
        let arr = |v: &Vec3| [v.x, v.y, v.z];
        Self {
            h1: arr(&r.h1),
            h2: arr(&r.h2),
            h3: arr(&r.h3),
            h4: arr(&r.h4),
            a: r.a,
            b: r.b,
            c: r.c,
            t1: arr(&r.t1),
            alpha: r.alpha,
            r: r.chord.r,
            d: r.chord.d,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::build_boxes;
    use crate::scene::{Marker, Scene};
    use approx::assert_abs_diff_eq;

    // 1 / (2 sin 1.13) and 1 / (2 tan 1.13), evaluated at 40 digits.
    #[allow(clippy::excessive_precision)]
    const R: f64 = 0.552_845_268_862_876_730_4;
    #[allow(clippy::excessive_precision)]
    const D: f64 = 0.235_876_856_228_131_163_6;

    fn square(theta: f64) -> Scene {
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
        Scene::new(vec![m], CameraModel::new(theta, theta, 1024, 1024, 1.5).unwrap()).unwrap()
    }

    fn rnh(theta: f64) -> RnhRegion {
        let s = square(theta);
        let (bh, _) = build_boxes(&s).unwrap();
        rnh_section(&bh, &s.camera).unwrap()
    }

    #[test]
    fn square_marker_corners() {
        let h = rnh(1.13);
        assert_abs_diff_eq!(h.p, Vec3::new(-0.5, 2.0, 1.5), epsilon = 1e-12);
        assert_abs_diff_eq!(h.q, Vec3::new(0.5, 2.0, 1.5), epsilon = 1e-12);
        assert_abs_diff_eq!(h.h1, Vec3::new(-R, 2.0, 1.5), epsilon = 1e-12);
        assert_abs_diff_eq!(h.h2, Vec3::new(R, 2.0, 1.5), epsilon = 1e-12);
        assert_abs_diff_eq!(h.h3, Vec3::new(R, 2.0 - D, 1.5), epsilon = 1e-12);
        assert_abs_diff_eq!(h.h4, Vec3::new(-R, 2.0 - D, 1.5), epsilon = 1e-12);
        assert_eq!(h.a, h.b);
        assert_eq!(h.c, h.chord.d);
    }

    #[test]
    fn apex_sees_chord_at_aperture() {
        let h = rnh(1.13);
        let apex = h.ellipse_point(std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(apex, Vec3::new(0.0, 2.0 - D - R, 1.5), epsilon = 1e-12);
        let angle = (h.p - apex).angle(&(h.q - apex));
        assert_abs_diff_eq!(angle, 1.13, epsilon = 1e-12);
        assert!(h.contains(&apex).unwrap());
    }

    #[test]
    fn right_angle_aperture_is_half_disc() {
        let h = rnh(std::f64::consts::FRAC_PI_2);
        assert_eq!(h.c, 0.0);
        assert_abs_diff_eq!(h.b, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(h.area(), std::f64::consts::PI / 8.0, epsilon = 1e-12);
    }

    #[test]
    fn membership() {
        let h = rnh(1.13);
        let mid = (h.h1 + h.h2 + h.h3 + h.h4) / 4.0;
        assert!(h.contains(&mid).unwrap());
        let far = h.ellipse_point(std::f64::consts::FRAC_PI_2) - h.t1 * 0.0 + h.t1 * (h.a + 1.0);
        assert!(!h.contains(&far).unwrap());
        assert!(h.contains(&h.ellipse_point(0.7)).unwrap());
        assert!(!h.contains(&(h.h1 - h.t1 * 1e-6)).unwrap());
        assert!(matches!(
            h.contains(&Vec3::new(0.0, 1.9, 1.6)),
            Err(Error::WrongPlane { .. })
        ));
    }

    #[test]
    fn polygon_encloses_region_tightly() {
        let h = rnh(1.13);
        let tol = 1e-3;
        let poly = h.polygon(tol);
        for k in 0..=400 {
            let e = h.ellipse_point(std::f64::consts::PI * k as f64 / 400.0);
            let q = Vec2::new(e.x, e.y);
            assert!(poly.contains(&q, 1e-12));
            assert!(poly.inner_margin(&q) < tol + 1e-12);
        }
        assert!(poly.area() >= h.area() && poly.area() < h.area() + 0.01);
    }

    #[test]
    fn obtuse_aperture_keeps_only_the_front_segment() {
        let h = rnh(2.2);
        assert!(h.c < 0.0);
        // The apex still sees the chord under the aperture.
        let apex = h.ellipse_point(std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!((h.p - apex).angle(&(h.q - apex)), 2.2, epsilon = 1e-12);
        assert!(h.contains(&apex).unwrap());
        assert!(!h.contains_xy(0.0, 2.0 + 1e-6));
        assert!(h.contains_xy(0.0, 2.0 - 1e-6));

        // Area against a midpoint-rule count of the membership test.
        let n = 800;
        let (x0, x1, y0, y1) = (h.h1.x, h.h2.x, apex.y, 2.0);
        let (dx, dy) = ((x1 - x0) / n as f64, (y1 - y0) / n as f64);
        let mut hits = 0;
        for i in 0..n {
            for j in 0..n {
                hits += usize::from(h.contains_xy(x0 + (i as f64 + 0.5) * dx, y0 + (j as f64 + 0.5) * dy));
            }
        }
        let counted = hits as f64 * dx * dy;
        assert!(h.area() > 0.0);
        assert_abs_diff_eq!(h.area(), counted, epsilon = 2e-3 * h.area());

        let poly = h.polygon(1e-3);
        let (t0, t1) = h.arc_range();
        for k in 0..=400 {
            let e = h.ellipse_point(t0 + (t1 - t0) * k as f64 / 400.0);
            let q = Vec2::new(e.x, e.y);
            assert!(poly.contains(&q, 1e-12));
            assert!(poly.inner_margin(&q) < 1e-3 + 1e-12);
        }
        assert!(poly.area() >= h.area() && poly.area() < h.area() + 0.01);
        assert!(poly.vertices.iter().all(|v| v.y <= 2.0 + 1e-12));
    }
}
