//! Profile functions and rotationally symmetric model ends.
//!
//! An end is `[t0, ∞) × P` with metric `a(t)² dt² + g(t)² h_P`, where `P` has
//! volume `ω`. Revolution hypersurfaces `(v, t) ↦ (f(t) v, t)` in `ℝ^{m+1}`
//! have `a = √(1+f'²)`, `g = f` and `P` the unit sphere.

mod builtin;
mod end;
mod profile;
mod spline;

pub use builtin::{power_revolution_end, BuiltinEnd};
pub use end::{
    make_revolution_end, mean_curvature, sample_geometry, unit_sphere_volume, AbstractCurvature,
    EndKind, GeometricSample, ModelEnd, MAX_DIMENSION, MIN_DIMENSION,
};
pub use profile::{ProfileEval, ProfileFamily, ProfileFn, SampledProfile, SampledTail};
pub use spline::NaturalCubicSpline;

use thiserror::Error;

use crate::quadrature::QuadratureError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("t = {t} lies left of the domain start {t_min}")]
    Domain { t: f64, t_min: f64 },
    #[error("t = {t} lies outside the sampled knots [{lo}, {hi}]")]
    OutsideKnots { t: f64, lo: f64, hi: f64 },
    #[error("profile is not positive at t = {t} (value {value})")]
    NonPositive { t: f64, value: f64 },
    #[error("wrong kind of end: {0}")]
    KindMismatch(String),
    #[error("dimension {0} outside the supported range [2, 64]")]
    InvalidDimension(u32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}
