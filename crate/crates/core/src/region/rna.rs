//! Union of the horizontal and vertical no-view regions.

use geo::{BooleanOps, Coord, LineString, MultiPolygon, Polygon};
use serde::Serialize;

use super::check_plane;
use super::polygon::{ConvexPolygon, Vec2};
use super::rnh::{RnhExport, RnhRegion};
use super::rnv::{RnvExport, RnvRegion};
use crate::error::Result;
use crate::scene::Vec3;

#[derive(Debug, Clone)]
pub struct RnaRegion {
    pub rnh: RnhRegion,
    pub rnv: RnvRegion,
    pub arc_tol: f64,
    rnh_poly: ConvexPolygon,
    /// Outer rings of the polygonized union, counter-clockwise.
    pub rings: Vec<Vec<Vec2>>,
}

fn to_geo(p: &ConvexPolygon) -> Polygon<f64> {
    let coords: Vec<Coord<f64>> = p.vertices.iter().map(|v| Coord { x: v.x, y: v.y }).collect();
    Polygon::new(LineString::new(coords), vec![])
}

pub fn rna_union(rnh: RnhRegion, rnv: RnvRegion, arc_tol: f64) -> RnaRegion {
    let rnh_poly = rnh.polygon(arc_tol);
    let rings = if rnv.exists {
        let union: MultiPolygon<f64> = to_geo(&rnh_poly).union(&to_geo(&rnv.polygon()));
        union
            .0
            .iter()
            .map(|p| {
                let mut ring: Vec<Vec2> = p.exterior().coords().map(|c| Vec2::new(c.x, c.y)).collect();
                ring.pop();
                ring
            })
            .collect()
    } else {
        vec![rnh_poly.vertices.clone()]
    };
    RnaRegion {
        rnh,
        rnv,
        arc_tol,
        rnh_poly,
        rings,
    }
}

impl RnaRegion {
    pub fn h_c(&self) -> f64 {
        self.rnh.h_c
    }

    pub fn contains(&self, p: &Vec3) -> Result<bool> {
        check_plane(p, self.h_c())?;
        Ok(self.contains_xy(p.x, p.y))
    }

    pub fn contains_xy(&self, x: f64, y: f64) -> bool {
        self.rnh.contains_xy(x, y) || self.rnv.contains_xy(x, y)
    }

    /// Convex pieces whose union is the polygonized region. Each piece
    /// contains the exact region it stands for.
    pub fn pieces(&self) -> Vec<ConvexPolygon> {
        let mut out = vec![self.rnh_poly.clone()];
        if self.rnv.exists {
            out.push(self.rnv.polygon());
        }
        out
    }

    /// Area of the polygonized union.
    pub fn area(&self) -> f64 {
        self.rings.iter().map(|r| ring_area(r)).sum()
    }

    pub fn export(&self) -> RnaExport {
        RnaExport {
            h_c: self.h_c(),
            rnh: (&self.rnh).into(),
            rnv: (&self.rnv).into(),
            rna_polygon: self
                .rings
                .iter()
                .map(|r| r.iter().map(|p| [p.x, p.y]).collect())
                .collect(),
        }
    }
}

fn ring_area(r: &[Vec2]) -> f64 {
    let n = r.len();
    (0..n)
        .map(|i| r[i].x * r[(i + 1) % n].y - r[(i + 1) % n].x * r[i].y)
        .sum::<f64>()
        .abs()
        * 0.5
}

#[derive(Debug, Clone, Serialize)]
pub struct RnaExport {
    pub h_c: f64,
    pub rnh: RnhExport,
    pub rnv: RnvExport,
    /// One outer ring per connected component.
    pub rna_polygon: Vec<Vec<[f64; 2]>>,
}
