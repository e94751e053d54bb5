use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::boxes::RectBox;
use crate::error::{Error, Result};

/// Circle through the ends of a chord on which the chord subtends `aperture`.
///
/// `r` is the circle radius and `d` the distance from the chord to the circle
/// center, measured toward the side where the chord is seen under the given
/// angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChordParams {
    pub l: f64,
    pub r: f64,
    pub d: f64,
    pub aperture: f64,
}

pub fn chord_params(l: f64, aperture: f64) -> Result<ChordParams> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::BadChordLength(l));
    }
    if !(aperture > 0.0 && aperture < PI) {
        return Err(Error::BadAperture(aperture));
    }
    let r = l / (2.0 * aperture.sin());
    // l / (2 tan) diverges from 0 at exactly pi/2 only by rounding; pin it.
    let d = if aperture == FRAC_PI_2 {
        0.0
    } else {
        l / (2.0 * aperture.tan())
    };
    Ok(ChordParams { l, r, d, aperture })
}

/// Angle between the box plane and the horizontal plane, in `(0, pi/2]`.
pub fn inclination(b: &RectBox) -> f64 {
    b.frame.e0.z.abs().min(1.0).acos()
}
