//! Circular arithmetic on head orientations, in degrees.
//!
//! The canonical range is `(-180, 180]`; the antipodal tie resolves to `+180`.

use crate::error::{Error, Result};

fn check_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite, got {value}")))
    }
}

/// Maps `theta` into `(-180, 180]`.
///
/// Values already inside the canonical range are returned unchanged, bit for
/// bit. Filters rely on this when they hold a value through a zero-velocity
/// prediction.
pub fn wrap_angle(theta: f64) -> Result<f64> {
    check_finite("angle", theta)?;
    Ok(wrap_unchecked(theta))
}

pub(crate) fn wrap_unchecked(theta: f64) -> f64 {
    if theta > -180.0 && theta <= 180.0 {
        return theta;
    }
    let r = theta.rem_euclid(360.0);
    // rem_euclid may round up to exactly 360; that lands on 0 here
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

/// Signed shortest-arc difference `a - b`, in `(-180, 180]`.
pub fn angular_diff(a: f64, b: f64) -> Result<f64> {
    check_finite("angle a", a)?;
    check_finite("angle b", b)?;
    Ok(wrap_unchecked(a - b))
}

/// Absolute shortest-arc distance between two angles, in `[0, 180]`.
pub fn angular_distance(a: f64, b: f64) -> Result<f64> {
    angular_diff(a, b).map(f64::abs)
}
