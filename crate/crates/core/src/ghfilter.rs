//! The g-h (alpha-beta) predict-update filter.
//!
//! Each step predicts `x~ = x + v*dt`, forms the residual `r = z - x~`, and
//! corrects `x = x~ + g*r`, `v = v + h*r/dt`. The state carries velocity in
//! units per second and the time of its last step, so irregular frame
//! timing and skipped observations go through the same path.
//!
//! Three variants share that loop: [`GHState`] for scalars,
//! [`AngularGHState`] for head orientations on the circle, and
//! [`PointGHState`] for 2D joints (two independent scalar filters).

use crate::angle::{angular_diff, wrap_angle, wrap_unchecked};
use crate::error::{Error, Result};
use crate::types::Point2;

/// Gains for the value (`g`) and derivative (`h`) corrections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GHParams {
    g: f64,
    h: f64,
}

impl GHParams {
    pub fn new(g: f64, h: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&g) {
            return Err(Error::InvalidArgument(format!("g must lie in [0, 1], got {g}")));
        }
        if !(h >= 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("h must be finite and >= 0, got {h}")));
        }
        Ok(GHParams { g, h })
    }

    /// `g = 1, h = 0`: every update snaps to the observation and velocity
    /// stays at zero, i.e. hold the last measurement.
    pub fn keep() -> Self {
        GHParams { g: 1.0, h: 0.0 }
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

/// Common predict-update interface of the filter variants.
pub trait GHFilter: Sized + Copy {
    type Obs: Copy;

    fn init(z0: Self::Obs, t0: f64) -> Result<Self>;

    fn predict(&self, t: f64) -> Result<Self>;

    fn update(&self, z: Self::Obs, t: f64, params: GHParams) -> Result<Self>;

    fn last_time(&self) -> f64;

    /// Update when an observation is present, predict otherwise.
    fn step(&self, z: Option<Self::Obs>, t: f64, params: GHParams) -> Result<Self> {
        match z {
            Some(z) => self.update(z, t, params),
            None => self.predict(t),
        }
    }
}

fn elapsed(last: f64, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite, got {t}")));
    }
    if t < last {
        return Err(Error::TimeRegression { t, last });
    }
    Ok(t - last)
}

fn finite(z: f64) -> Result<f64> {
    if z.is_finite() {
        Ok(z)
    } else {
        Err(Error::InvalidArgument(format!("observation must be finite, got {z}")))
    }
}

/// `x~ + g*r`, evaluated from whichever end carries more weight so that
/// `g = 0` yields `x~` and `g = 1` yields `z` without rounding.
fn correct(predicted: f64, z: f64, residual: f64, g: f64) -> f64 {
    if g >= 0.5 {
        z - (1.0 - g) * residual
    } else {
        predicted + g * residual
    }
}

fn velocity(v: f64, residual: f64, dt: f64, h: f64) -> f64 {
    // dt == 0: duplicate timestamp, r/dt undefined, velocity is left alone
    if dt > 0.0 {
        v + h * residual / dt
    } else {
        v
    }
}

/// Scalar filter state: value, velocity per second, time of last step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GHState {
    pub x: f64,
    pub v: f64,
    pub last_time: f64,
}

impl GHFilter for GHState {
    type Obs = f64;

    fn init(z0: f64, t0: f64) -> Result<Self> {
        Ok(GHState { x: finite(z0)?, v: 0.0, last_time: finite(t0)? })
    }

    fn predict(&self, t: f64) -> Result<Self> {
        let dt = elapsed(self.last_time, t)?;
        Ok(GHState { x: self.x + self.v * dt, v: self.v, last_time: t })
    }

    fn update(&self, z: f64, t: f64, params: GHParams) -> Result<Self> {
        let z = finite(z)?;
        let dt = elapsed(self.last_time, t)?;
        let predicted = self.x + self.v * dt;
        let residual = z - predicted;
        Ok(GHState {
            x: correct(predicted, z, residual, params.g),
            v: velocity(self.v, residual, dt, params.h),
            last_time: t,
        })
    }

    fn last_time(&self) -> f64 {
        self.last_time
    }
}

/// Filter state for an angle in degrees; `x` stays in `(-180, 180]` and
/// residuals take the shortest arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularGHState(GHState);

impl AngularGHState {
    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn v(&self) -> f64 {
        self.0.v
    }

    pub fn state(&self) -> GHState {
        self.0
    }
}

impl GHFilter for AngularGHState {
    type Obs = f64;

    fn init(z0: f64, t0: f64) -> Result<Self> {
        let z0 = wrap_angle(z0)?;
        GHState::init(z0, t0).map(AngularGHState)
    }

    fn predict(&self, t: f64) -> Result<Self> {
        let mut next = self.0.predict(t)?;
        next.x = wrap_unchecked(next.x);
        Ok(AngularGHState(next))
    }

    fn update(&self, z: f64, t: f64, params: GHParams) -> Result<Self> {
        let z = wrap_angle(z)?;
        let dt = elapsed(self.0.last_time, t)?;
        let predicted = wrap_unchecked(self.0.x + self.0.v * dt);
        let residual = angular_diff(z, predicted)?;
        Ok(AngularGHState(GHState {
            x: wrap_unchecked(correct(predicted, z, residual, params.g)),
            v: velocity(self.0.v, residual, dt, params.h),
            last_time: t,
        }))
    }

    fn last_time(&self) -> f64 {
        self.0.last_time
    }
}

/// One scalar filter per image axis, stepped together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointGHState {
    pub u: GHState,
    pub v: GHState,
}

impl PointGHState {
    pub fn position(&self) -> Point2 {
        Point2::new(self.u.x, self.v.x)
    }

    pub fn velocity(&self) -> Point2 {
        Point2::new(self.u.v, self.v.v)
    }
}

impl GHFilter for PointGHState {
    type Obs = Point2;

    fn init(z0: Point2, t0: f64) -> Result<Self> {
        Ok(PointGHState { u: GHState::init(z0.u, t0)?, v: GHState::init(z0.v, t0)? })
    }

    fn predict(&self, t: f64) -> Result<Self> {
        Ok(PointGHState { u: self.u.predict(t)?, v: self.v.predict(t)? })
    }

    fn update(&self, z: Point2, t: f64, params: GHParams) -> Result<Self> {
        Ok(PointGHState { u: self.u.update(z.u, t, params)?, v: self.v.update(z.v, t, params)? })
    }

    fn last_time(&self) -> f64 {
        self.u.last_time
    }
}
