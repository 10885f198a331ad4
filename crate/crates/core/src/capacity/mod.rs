//! Annular Dirichlet problems, exhaustion, parabolicity and the energy trace.
//!
//! Balls `B_r` are replaced by radial sublevels `{t ≤ r}`: on a model end the
//! distance to the core is the arc length `s(t)`, which is increasing in `t`.

mod energy;
mod exhaustion;
mod fd;
mod growth;
mod harmonic;
mod parabolicity;

pub use energy::{energy_trace, EnergyRow, EnergyTrace};
pub use exhaustion::{exhaustion_limit, ExhaustionReport, LIMIT_ONE_THRESHOLD, MONOTONICITY_TOLERANCE};
pub use fd::{fd_oracle, FdProfile};
pub use growth::{volume_growth_test, GrowthSample, VolumeGrowth};
pub use harmonic::HarmonicProfile;
pub use parabolicity::{capacity_integral, parabolicity, ParabolicityReport, ParabolicityVerdict};

pub(crate) use growth::RadialTable;

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::quadrature::QuadratureError;

/// Convenience wrapper for [`HarmonicProfile::dirichlet`].
pub fn dirichlet_radial(
    end: &crate::geometry::ModelEnd,
    t_in: f64,
    t_out: f64,
    cfg: &crate::quadrature::QuadratureConfig,
) -> Result<HarmonicProfile, CapacityError> {
    HarmonicProfile::dirichlet(end, t_in, t_out, cfg)
}

#[derive(Debug, Error)]
pub enum CapacityError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("invalid radii: {0}")]
    InvalidRadii(String),
    #[error("degenerate end: {0}")]
    Degenerate(String),
    #[error("finite-difference system is singular")]
    SingularSystem,
    #[error(
        "maximum principle violated at t = {t}: f_{r_small} = {lower}, f_{r_large} = {upper}"
    )]
    MaximumPrinciple {
        t: f64,
        r_small: f64,
        r_large: f64,
        lower: f64,
        upper: f64,
    },
    #[error("energy trace needs m >= 3, got m = {0}")]
    DimensionTooSmall(u32),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}
