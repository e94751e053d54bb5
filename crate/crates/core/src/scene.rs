//! Scene description: markers, camera model and the marker-aligned frame.
//!
//! All coordinates are in the robot frame (z up, origin at the robot base).

use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Maximum distance of a marker point from its marker plane.
pub const COPLANARITY_TOL: f64 = 1e-6;
/// Tolerance for unit-length and orthogonality checks.
pub const ORTHO_TOL: f64 = 1e-9;
/// Mean normals shorter than this are treated as cancelled out.
const MIN_MEAN_NORMAL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub id: String,
    pub points: Vec<Vec3>,
    pub unit_normal: Vec3,
}

impl Marker {
    /// Builds a marker, normalizing `normal` and checking that every point lies
    /// on the plane through the centroid.
    pub fn new(id: impl Into<String>, points: Vec<Vec3>, normal: Vec3) -> Result<Self> {
        let id = id.into();
        if points.len() < 3 {
            return Err(Error::InvalidScene(format!(
                "marker {id:?} has {} points, need at least 3",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidScene(format!("marker {id:?} has a non-finite point")));
        }
        let norm = normal.norm();
        if !norm.is_finite() || norm < MIN_MEAN_NORMAL {
            return Err(Error::InvalidScene(format!("marker {id:?} has a zero normal")));
        }
        let unit_normal = normal / norm;
        let centroid = centroid(&points);
        for p in &points {
            let off = (p - centroid).dot(&unit_normal).abs();
            if off > COPLANARITY_TOL {
                return Err(Error::InvalidScene(format!(
                    "marker {id:?} point {p:?} is {off:.3e} m off the marker plane"
                )));
            }
        }
        Ok(Self {
            id,
            points,
            unit_normal,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraModel {
    /// Full horizontal angular aperture, radians.
    pub theta: f64,
    /// Full vertical angular aperture, radians.
    pub phi: f64,
    pub width: u32,
    pub height: u32,
    /// Height of the optical center above the robot base; defines Plane H.
    pub h_c: f64,
}

impl CameraModel {
    pub fn new(theta: f64, phi: f64, width: u32, height: u32, h_c: f64) -> Result<Self> {
        let cam = Self {
            theta,
            phi,
            width,
            height,
            h_c,
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("theta", self.theta), ("phi", self.phi)] {
            if !(a > 0.0 && a < std::f64::consts::PI) {
                return Err(Error::InvalidScene(format!("{name} = {a} must lie in (0, pi)")));
            }
        }
        if self.width < 1 || self.height < 1 {
            return Err(Error::InvalidScene("image size must be at least 1x1".into()));
        }
        if !self.h_c.is_finite() {
            return Err(Error::InvalidScene("h_c must be finite".into()));
        }
        Ok(())
    }

    pub fn width_px(&self) -> f64 {
        self.width as f64
    }

    pub fn height_px(&self) -> f64 {
        self.height as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub markers: Vec<Marker>,
    pub camera: CameraModel,
    /// Optical center of the reference observation used to project points onto
    /// the box planes. Defaults to the robot origin lifted to `h_c`.
    pub reference_center: Option<Vec3>,
}

impl Scene {
    pub fn new(markers: Vec<Marker>, camera: CameraModel) -> Result<Self> {
        let scene = Self {
            markers,
            camera,
            reference_center: None,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn with_reference_center(mut self, center: Vec3) -> Self {
        self.reference_center = Some(center);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.markers.is_empty() {
            return Err(Error::InvalidScene("scene has no markers".into()));
        }
        if self.point_count() < 2 {
            return Err(Error::InvalidScene("scene needs at least two feature points".into()));
        }
        self.camera.validate()
    }

    pub fn points(&self) -> impl Iterator<Item = &Vec3> + '_ {
        self.markers.iter().flat_map(|m| m.points.iter())
    }

    pub fn point_count(&self) -> usize {
        self.markers.iter().map(|m| m.points.len()).sum()
    }

    pub fn optical_center(&self) -> Vec3 {
        self.reference_center
            .unwrap_or_else(|| Vec3::new(0.0, 0.0, self.camera.h_c))
    }

    /// Same scene with some camera parameters replaced.
    pub fn with_camera(&self, camera: CameraModel) -> Result<Self> {
        camera.validate()?;
        let mut s = self.clone();
        s.camera = camera;
        Ok(s)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: SceneFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidScene(format!("scene file: {e}")))?;
        file.into_scene()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::InvalidScene(format!("cannot read {}: {e}", path.as_ref().display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_file(&self) -> SceneFile {
        SceneFile {
            camera: CameraFile {
                theta: self.camera.theta,
                phi: self.camera.phi,
                width: self.camera.width,
                height: self.camera.height,
                h_c: self.camera.h_c,
            },
            markers: self
                .markers
                .iter()
                .map(|m| MarkerFile {
                    id: m.id.clone(),
                    points: m.points.iter().map(|p| [p.x, p.y, p.z]).collect(),
                    normal: [m.unit_normal.x, m.unit_normal.y, m.unit_normal.z],
                })
                .collect(),
            reference_center: self.reference_center.map(|c| [c.x, c.y, c.z]),
        }
    }
}

/// On-disk scene layout. Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub camera: CameraFile,
    pub markers: Vec<MarkerFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_center: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraFile {
    pub theta: f64,
    pub phi: f64,
    pub width: u32,
    pub height: u32,
    pub h_c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkerFile {
    pub id: String,
    pub points: Vec<[f64; 3]>,
    pub normal: [f64; 3],
}

impl SceneFile {
    pub fn into_scene(self) -> Result<Scene> {
        let camera = CameraModel::new(
            self.camera.theta,
            self.camera.phi,
            self.camera.width,
            self.camera.height,
            self.camera.h_c,
        )?;
        let markers = self
            .markers
            .into_iter()
            .map(|m| {
                Marker::new(
                    m.id,
                    m.points.iter().map(|p| Vec3::from(*p)).collect(),
                    Vec3::from(m.normal),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let mut scene = Scene::new(markers, camera)?;
        if let Some(c) = self.reference_center {
            let c = Vec3::from(c);
            if !c.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidScene("reference_center must be finite".into()));
            }
            scene.reference_center = Some(c);
        }
        Ok(scene)
    }
}

/// Orthonormal marker frame: `e0` is the averaged normal, `e1` is horizontal
/// and `e2 = e0 x e1` points up along the marker plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub e0: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub p_l: Vec3,
    pub p_r: Vec3,
    pub p_t: Vec3,
    pub p_b: Vec3,
}

pub fn centroid(points: &[Vec3]) -> Vec3 {
    let sum = points.iter().fold(Vec3::zeros(), |acc, p| acc + p);
    sum / points.len().max(1) as f64
}

/// Normalized mean of the marker normals, flipped if needed so that it points
/// into the half-space (relative to the feature-point centroid) that contains
/// the robot origin.
pub fn average_unit_normal(markers: &[Marker]) -> Result<Vec3> {
    if markers.is_empty() {
        return Err(Error::InvalidScene("no markers".into()));
    }
    let mean = markers.iter().fold(Vec3::zeros(), |acc, m| acc + m.unit_normal) / markers.len() as f64;
    let norm = mean.norm();
    if norm <= MIN_MEAN_NORMAL {
        return Err(Error::DegenerateNormal);
    }
    let n = mean / norm;
    let pts: Vec<Vec3> = markers.iter().flat_map(|m| m.points.iter().copied()).collect();
    let to_origin = -centroid(&pts);
    if to_origin.dot(&n) < 0.0 {
        Ok(-n)
    } else {
        Ok(n)
    }
}

pub fn compute_frame(n: &Vec3) -> Result<Frame> {
    let e0 = n.normalize();
    if e0.z.abs() >= 1.0 - ORTHO_TOL {
        return Err(Error::VerticalNormal);
    }
    let e1 = Vec3::z().cross(&e0).normalize();
    let e2 = e0.cross(&e1);
    Ok(Frame { e0, e1, e2 })
}

/// Extremal feature points along the marker-frame axes. Ties go to the point
/// that appears first in the scene.
pub fn compute_extrema(scene: &Scene) -> Result<Extrema> {
    let frame = compute_frame(&average_unit_normal(&scene.markers)?)?;
    Ok(extrema_in_frame(scene.points(), &frame))
}

pub fn extrema_in_frame<'a>(points: impl Iterator<Item = &'a Vec3>, frame: &Frame) -> Extrema {
    let mut it = points;
    let first = *it.next().expect("scene has points");
    let mut ex = Extrema {
        p_l: first,
        p_r: first,
        p_t: first,
        p_b: first,
    };
    let (mut lo1, mut hi1) = (first.dot(&frame.e1), first.dot(&frame.e1));
    let (mut lo2, mut hi2) = (first.dot(&frame.e2), first.dot(&frame.e2));
    for p in it {
        let s1 = p.dot(&frame.e1);
        let s2 = p.dot(&frame.e2);
        if s1 < lo1 {
            lo1 = s1;
            ex.p_l = *p;
        }
        if s1 > hi1 {
            hi1 = s1;
            ex.p_r = *p;
        }
        if s2 > hi2 {
            hi2 = s2;
            ex.p_t = *p;
        }
        if s2 < lo2 {
            lo2 = s2;
            ex.p_b = *p;
        }
    }
    ex
}
