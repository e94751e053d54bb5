//! Field-of-view constraint regions for a pan-tilt camera that must keep a
//! set of planar markers in view, with a pinhole oracle and a path simulator.

pub mod boxes;
pub mod camera;
pub mod cli;
pub mod error;
pub mod format;
pub mod oracle;
pub mod path;
pub mod region;
pub mod scene;
pub mod svg;

pub use error::{Error, Result};
