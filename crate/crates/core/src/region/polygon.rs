//! Small planar toolkit for convex polygons on Plane H.

use nalgebra::Vector2;

pub type Vec2 = Vector2<f64>;

fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Convex polygon with counter-clockwise vertices and no repeated endpoint.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexPolygon {
    pub vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    /// Convex hull (Andrew's monotone chain). Collinear points are dropped.
    pub fn hull(points: &[Vec2]) -> Self {
        let mut pts: Vec<Vec2> = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup_by(|a, b| (*a - *b).norm() < 1e-12);
        if pts.len() < 3 {
            return Self { vertices: pts };
        }
        let mut lower: Vec<Vec2> = Vec::new();
        for p in &pts {
            while lower.len() >= 2 {
                let n = lower.len();
                if cross(&(lower[n - 1] - lower[n - 2]), &(p - lower[n - 2])) <= 0.0 {
                    lower.pop();
                } else {
                    break;
                }
            }
            lower.push(*p);
        }
        let mut upper: Vec<Vec2> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2 {
                let n = upper.len();
                if cross(&(upper[n - 1] - upper[n - 2]), &(p - upper[n - 2])) <= 0.0 {
                    upper.pop();
                } else {
                    break;
                }
            }
            upper.push(*p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Self {
            vertices: drop_straight_vertices(lower),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        (0..n)
            .map(|i| cross(&self.vertices[i], &self.vertices[(i + 1) % n]))
            .sum::<f64>()
            * 0.5
    }

    fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Signed distance from `p` to the supporting line of each edge,
    /// minimized: positive inside, negative outside (a lower bound on the
    /// true exterior distance).
    pub fn inner_margin(&self, p: &Vec2) -> f64 {
        self.edges()
            .map(|(a, b)| {
                let e = b - a;
                cross(&e, &(p - a)) / e.norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: &Vec2, tol: f64) -> bool {
        !self.is_empty() && self.inner_margin(p) >= -tol
    }

    /// Euclidean distance from `p` to the polygon (zero inside).
    pub fn distance(&self, p: &Vec2) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        if self.inner_margin(p) >= 0.0 {
            return 0.0;
        }
        self.edges()
            .map(|(a, b)| point_segment_distance(p, &a, &b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Outer parallel body at distance `delta`, polygonized so that the result
    /// contains the exact offset region. Arc vertices are spaced so the
    /// polygon stays within `arc_tol` of the true offset.
    pub fn inflate(&self, delta: f64, arc_tol: f64) -> Self {
        if delta <= 0.0 || self.is_empty() {
            return self.clone();
        }
        let step = arc_step(delta, arc_tol);
        let n = self.vertices.len();
        let normal = |i: usize| {
            let e = self.vertices[(i + 1) % n] - self.vertices[i];
            Vec2::new(e.y, -e.x).normalize()
        };
        let mut out = Vec::new();
        for i in 0..n {
            let v = self.vertices[i];
            let n_in = normal((i + n - 1) % n);
            let n_out = normal(i);
            let a0 = n_in.y.atan2(n_in.x);
            let mut sweep = n_out.y.atan2(n_out.x) - a0;
            while sweep < 0.0 {
                sweep += std::f64::consts::TAU;
            }
            if sweep > std::f64::consts::PI {
                sweep = 0.0;
            }
            let k = (sweep / step).ceil().max(1.0) as usize;
            let h = sweep / k as f64;
            // Tangent-line construction: endpoints on the circle, interior
            // vertices pushed out so every chord is tangent to the arc.
            out.push(v + n_in * delta);
            let scale = delta / (h / 2.0).cos();
            for j in 0..k {
                let a = a0 + (j as f64 + 0.5) * h;
                out.push(v + Vec2::new(a.cos(), a.sin()) * scale);
            }
            out.push(v + n_out * delta);
        }
        Self::hull(&out)
    }

    /// True when the open segment `a`-`b` passes through the interior by more
    /// than `eps`. Segments running along an edge do not count.
    pub fn segment_crosses_interior(&self, a: &Vec2, b: &Vec2, eps: f64) -> bool {
        if self.is_empty() {
            return false;
        }
        // Cyrus-Beck clip against the inward half-planes shrunk by eps.
        let dir = b - a;
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for (p, q) in self.edges() {
            let e = q - p;
            let len = e.norm();
            let num = cross(&e, &(a - p)) / len - eps;
            let den = cross(&e, &dir) / len;
            if den.abs() < 1e-15 {
                if num < 0.0 {
                    return false;
                }
                continue;
            }
            let t = -num / den;
            if den > 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
            if t0 > t1 {
                return false;
            }
        }
        t1 - t0 > 1e-12
    }

    pub fn bounds(&self) -> Option<(Vec2, Vec2)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), p| {
            (
                Vec2::new(lo.x.min(p.x), lo.y.min(p.y)),
                Vec2::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        }))
    }
}

/// Removes vertices where a convex ring runs straight on, which rounding can
/// leave behind. The exact orientation test in the hull keeps the ring
/// correct when coordinates differ by an ulp; this pass only tidies it.
fn drop_straight_vertices(mut ring: Vec<Vec2>) -> Vec<Vec2> {
    let mut i = 0;
    while ring.len() > 3 && i < ring.len() {
        let n = ring.len();
        let (a, b, c) = (ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
        let (u, v) = (b - a, c - b);
        if cross(&u, &v).abs() <= 1e-12 * u.norm() * v.norm() && u.dot(&v) > 0.0 {
            ring.remove(i);
        } else {
            i += 1;
        }
    }
    ring
}

pub fn point_segment_distance(p: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Angular step for a circumscribed polygon of an arc with the given radius
/// whose outward error stays below `tol`.
pub fn arc_step(radius: f64, tol: f64) -> f64 {
    let tol = tol.max(1e-9);
    if radius <= tol {
        return std::f64::consts::FRAC_PI_2;
    }
    (2.0 * (radius / (radius + tol)).acos()).min(std::f64::consts::FRAC_PI_2)
}
