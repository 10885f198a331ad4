//! Rayleigh quotients, the `h_κ` integration-by-parts identity and
//! isoperimetric ratios on model ends.
//!
//! Only radial test functions are used. On a model end the bottom of the
//! Dirichlet spectrum on a slab is attained by a radial function, so this is
//! a modeling assumption rather than a restriction that changes the answer.

mod isoperimetric;
mod rayleigh;
mod test_function;

pub use isoperimetric::{
    default_domains, isoperimetric_scan, volume_lower_bound_check, IsoperimetricSample, IsoperimetricScan,
    VolumeBoundReport, VolumeBoundRow, DEFAULT_SCAN_DOMAINS,
};
pub use rayleigh::{
    default_test_functions, hk_identity_check, poincare_bound, rayleigh_minimize, rayleigh_quotient,
    rayleigh_report, rayleigh_sweep, HkResidual, RayleighReport, SweepEntry,
};
pub use test_function::{Shape, TestFunction};

use thiserror::Error;

use crate::capacity::CapacityError;
use crate::geometry::GeometryError;
use crate::quadrature::QuadratureError;

#[derive(Debug, Error)]
pub enum InequalityError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error("degenerate test function: {0}")]
    DegenerateTestFunction(String),
    #[error("interval [{lo}, {hi}] is not inside the end [{t0}, {t_max}]")]
    OutsideEnd { lo: f64, hi: f64, t0: f64, t_max: f64 },
    #[error("grid size {0} below 32")]
    GridTooSmall(usize),
    #[error("tridiagonal system is singular")]
    SingularSystem,
    #[error("inverse iteration did not converge in {0} steps")]
    NotConverged(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
