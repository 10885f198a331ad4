//! Adaptive quadrature on finite intervals and convergence classification of
//! improper integrals over half-lines.

mod gauss_kronrod;
mod improper;

pub use gauss_kronrod::integrate;
pub use improper::{
    classify_improper, classify_improper_capped, classify_improper_line, improper_value,
    improper_value_line, HalfLine, DEFAULT_TAIL_DOUBLINGS, LOG_TAIL_TOLERANCE,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections of any panel.
    pub max_depth: u32,
    /// Number of dyadic windows used to fit the tail.
    pub tail_windows: usize,
    /// Half-width of the inconclusive band around the critical tail exponent −1.
    pub tail_margin: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_depth: 48,
            tail_windows: 6,
            tail_margin: 0.05,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        let bad = |m: &str| Err(QuadratureError::InvalidConfig(m.to_string()));
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return bad("rel_tol must be positive");
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return bad("abs_tol must be positive");
        }
        if self.max_depth == 0 {
            return bad("max_depth must be at least 1");
        }
        if self.tail_windows < 3 {
            return bad("tail_windows must be at least 3");
        }
        if !(self.tail_margin > 0.0 && self.tail_margin < 0.5) {
            return bad("tail_margin must lie in (0, 0.5)");
        }
        Ok(())
    }

    /// Same configuration with both tolerances divided by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol / factor,
            abs_tol: self.abs_tol / factor,
            ..*self
        }
    }

    pub(crate) fn tolerance_for(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

/// A quadrature result with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error_bound: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error_bound: 0.0,
        }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;

    fn add(self, rhs: Self) -> Self {
        Estimate {
            value: self.value + rhs.value,
            error_bound: self.error_bound + rhs.error_bound,
        }
    }
}

/// Asymptotic model fitted to an integrand's tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum TailModel {
    /// integrand ~ c t^exponent
    PowerTail { exponent: f64 },
    /// integrand ~ c e^{rate t}
    ExpTail { rate: f64 },
    Unknown,
}

/// Outcome of classifying an improper integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConvergenceVerdict {
    Converges { value: f64, error_bound: f64 },
    Diverges { rate: TailModel },
    Inconclusive { reason: String },
}

impl ConvergenceVerdict {
    pub fn converges(&self) -> bool {
        matches!(self, ConvergenceVerdict::Converges { .. })
    }

    pub fn diverges(&self) -> bool {
        matches!(self, ConvergenceVerdict::Diverges { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, ConvergenceVerdict::Inconclusive { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            ConvergenceVerdict::Converges { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ConvergenceVerdict::Converges { .. } => "converges",
            ConvergenceVerdict::Diverges { .. } => "diverges",
            ConvergenceVerdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn inconclusive(reason: impl Into<String>) -> Self {
        ConvergenceVerdict::Inconclusive {
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("maximum subdivision depth exceeded (partial value {partial}, error {error_bound})")]
    MaxDepthExceeded { partial: f64, error_bound: f64 },
    #[error("integrand returned {value} at t = {t}")]
    NonFiniteSample { t: f64, value: f64 },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("improper value requested for a non-convergent integral: {0}")]
    NotConvergent(String),
    #[error("tail remainder not resolved within the truncation cap (value {value}, error {error_bound})")]
    TailUnresolved { value: f64, error_bound: f64 },
}
