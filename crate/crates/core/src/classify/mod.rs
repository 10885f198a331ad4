//! Per-end signatures, consistency checks between the finiteness results, and
//! phase diagrams of the power family `f(t) = t^α`.

mod flags;
mod signature;
mod sweep;

pub use flags::{
    check_dichotomy, check_infinite_volume, consistency_flags, hunt_open_questions, sobolev_note, BandProbe,
    ConsistencyFlags, Flag, FlagStatus, RECHECK_FACTOR,
};
pub use signature::{end_signature, EndSignature, LpEntry, SupNormProbe, Thresholds, P_RANGE, SUP_SLOPE_THRESHOLD};
pub use sweep::{
    analytic_p_crit, sweep_power_family, Agreement, PhaseCell, PhaseTable, PowerEndFlags, Quantity, SweepSpec,
    SweepSummary, CSV_HEADER,
};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::quadrature::QuadratureError;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("could not format output: {0}")]
    Output(String),
}
