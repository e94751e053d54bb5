//! No-view regions on Plane H (z = h_c).

pub mod chord;
pub mod polygon;
pub mod rna;
pub mod rnh;
pub mod rnv;

use crate::boxes::{build_boxes, RectBox};
use crate::error::{Error, Result};
use crate::scene::{Scene, Vec3};

pub use chord::{chord_params, inclination, ChordParams};
pub use polygon::{ConvexPolygon, Vec2};
pub use rna::{rna_union, RnaRegion};
pub use rnh::{rnh_section, RnhRegion};
pub use rnv::{rnv_prism, rnv_section, Prism, RnvRegion, SectionCase};

/// Points within this distance of a region boundary count as inside.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Default outward error of the polygonized boundaries, in meters.
pub const DEFAULT_ARC_TOL: f64 = 1e-3;

pub(crate) fn check_plane(p: &Vec3, h_c: f64) -> Result<()> {
    if (p.z - h_c).abs() > BOUNDARY_TOL {
        return Err(Error::WrongPlane { z: p.z, h_c });
    }
    Ok(())
}

/// Everything derived from a scene, from the boxes to the union.
#[derive(Debug, Clone)]
pub struct Regions {
    pub bh: RectBox,
    pub bv: RectBox,
    pub prism: Prism,
    pub rna: RnaRegion,
}

impl Regions {
    pub fn rnh(&self) -> &RnhRegion {
        &self.rna.rnh
    }

    pub fn rnv(&self) -> &RnvRegion {
        &self.rna.rnv
    }
}

pub fn build_regions(scene: &Scene, arc_tol: f64) -> Result<Regions> {
    let (bh, bv) = build_boxes(scene)?;
    let rnh = rnh_section(&bh, &scene.camera)?;
    let prism = rnv_prism(&bv, &scene.camera)?;
    let rnv = rnv_section(&prism, scene.camera.h_c);
    if !rnv.exists {
        log::info!("Plane H misses Sv; the vertical region is empty");
    }
    Ok(Regions {
        bh,
        bv,
        prism,
        rna: rna_union(rnh, rnv, arc_tol),
    })
}
