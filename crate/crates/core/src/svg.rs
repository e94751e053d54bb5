//! Top-down SVG drawing of the regions on Plane H.

use std::fmt::Write as _;

use crate::format::sig6;
use crate::region::{RnaRegion, Vec2};
use crate::scene::Scene;

/// Default drawing scale, meters per pixel.
pub const DEFAULT_M_PER_PX: f64 = 0.01;

const PAD_PX: f64 = 20.0;

/// Plane H to image coordinates: x to the right, y up.
struct View {
    x0: f64,
    y1: f64,
    m_per_px: f64,
}

impl View {
    fn pt(&self, p: &Vec2) -> String {
        format!(
            "{},{}",
            sig6(PAD_PX + (p.x - self.x0) / self.m_per_px),
            sig6(PAD_PX + (self.y1 - p.y) / self.m_per_px)
        )
    }

    fn points(&self, ring: &[Vec2]) -> String {
        ring.iter().map(|p| self.pt(p)).collect::<Vec<_>>().join(" ")
    }
}

/// Draws the union filled, both parts outlined, the markers' footprints and
/// an optional path.
pub fn render_svg(scene: &Scene, rna: &RnaRegion, path: Option<&[Vec2]>, m_per_px: f64) -> String {
    let rnh = rna.rnh.polygon(rna.arc_tol).vertices;
    let rnv = if rna.rnv.exists {
        rna.rnv.polygon().vertices
    } else {
        Vec::new()
    };
    let markers: Vec<Vec<Vec2>> = scene
        .markers
        .iter()
        .map(|m| m.points.iter().map(|p| Vec2::new(p.x, p.y)).collect())
        .collect();

    let all = rna
        .rings
        .iter()
        .flatten()
        .chain(markers.iter().flatten())
        .chain(path.into_iter().flatten());
    let (mut lo, mut hi) = (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY));
    for p in all {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    if !lo.x.is_finite() {
        lo = Vec2::zeros();
        hi = Vec2::zeros();
    }
    let view = View {
        x0: lo.x,
        y1: hi.y,
        m_per_px,
    };
    let w = (hi.x - lo.x) / m_per_px + 2.0 * PAD_PX;
    let h = (hi.y - lo.y) / m_per_px + 2.0 * PAD_PX;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}">"#,
        sig6(w.ceil()),
        sig6(h.ceil())
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for ring in &rna.rings {
        let _ = writeln!(
            s,
            r##"<polygon id="rna" points="{}" fill="#f4b6b6" stroke="none"/>"##,
            view.points(ring)
        );
    }
    let _ = writeln!(
        s,
        r##"<polygon id="rnh" points="{}" fill="none" stroke="#c0392b" stroke-width="1.5"/>"##,
        view.points(&rnh)
    );
    if !rnv.is_empty() {
        let _ = writeln!(
            s,
            r##"<polygon id="rnv" points="{}" fill="none" stroke="#2c3e91" stroke-width="1.5" stroke-dasharray="6 3"/>"##,
            view.points(&rnv)
        );
    }
    for (m, pts) in scene.markers.iter().zip(&markers) {
        let _ = writeln!(
            s,
            r##"<polyline class="marker" data-id="{}" points="{}" fill="none" stroke="black" stroke-width="3"/>"##,
            escape(&m.id),
            view.points(pts)
        );
    }
    if let Some(p) = path {
        let _ = writeln!(
            s,
            r##"<polyline id="path" points="{}" fill="none" stroke="#1e8449" stroke-width="1.5"/>"##,
            view.points(p)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
