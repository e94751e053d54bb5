use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("marker normals cancel out; average normal is degenerate")]
    DegenerateNormal,

    #[error("average marker normal is vertical; the horizontal box axis is undefined")]
    VerticalNormal,

    #[error("projection ray is parallel to the box plane")]
    RayParallelToPlane,

    #[error("degenerate box: {0}")]
    DegenerateBox(String),

    #[error("aperture {0} rad is outside (0, pi)")]
    BadAperture(f64),

    #[error("chord length must be positive and finite, got {0}")]
    BadChordLength(f64),

    #[error("plane z = {h_c} does not cross the box sides")]
    NoIntersection { h_c: f64 },

    #[error("point z = {z} is not on plane z = {h_c}")]
    WrongPlane { z: f64, h_c: f64 },

    #[error("point is behind the camera")]
    BehindCamera,

    #[error("unreachable: {0}")]
    Unreachable(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidScene(_)
            | Error::InvalidInput(_)
            | Error::Json(_)
            | Error::BadAperture(_)
            | Error::BadChordLength(_) => 2,
            Error::DegenerateNormal
            | Error::VerticalNormal
            | Error::RayParallelToPlane
            | Error::DegenerateBox(_)
            | Error::NoIntersection { .. }
            | Error::WrongPlane { .. }
            | Error::BehindCamera
            | Error::Unreachable(_) => 3,
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
