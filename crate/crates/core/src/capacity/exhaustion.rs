use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::harmonic::HarmonicProfile;
use super::parabolicity::capacity_integral;
use super::CapacityError;
use crate::geometry::ModelEnd;
use crate::quadrature::{ConvergenceVerdict, QuadratureConfig};

/// Slack allowed in `f_r ≤ f_s` and `0 ≤ f_r ≤ 1`.
pub const MONOTONICITY_TOLERANCE: f64 = 1e-10;

/// Extrapolated values above this count as the limit `f ≡ 1`.
pub const LIMIT_ONE_THRESHOLD: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionReport {
    /// Outer radii `t_out`, increasing.
    pub radii: Vec<f64>,
    pub probes: Vec<f64>,
    /// `values[k][i] = f_{radii[k]}(probes[i])`
    pub values: Vec<Vec<f64>>,
    /// Largest increase `f_last − f_first` over the probes.
    pub sup_increase: f64,
    /// Smallest step `f_{r_{k+1}} − f_{r_k}` seen; nonnegative up to tolerance.
    pub min_step: f64,
    /// `Q(t,∞)/Q(t0,∞)` when the capacity integral converges, 1 when it
    /// diverges, `None` when its tail is inconclusive.
    pub limit: Option<Vec<f64>>,
    pub limit_is_one: Option<bool>,
    pub capacity_integral: ConvergenceVerdict,
}

/// Solves the annular problems for increasing outer radii and checks the
/// maximum-principle ordering `0 ≤ f_r ≤ f_s ≤ 1` for `r ≤ s` at the probes.
///
/// Probes beyond an outer radius read 0 (the solution is extended by zero).
/// A violation beyond [`MONOTONICITY_TOLERANCE`] is an internal-consistency
/// error, not a verdict. An inconclusive capacity tail leaves the limit unset
/// but still reports the ordering.
pub fn exhaustion_limit(
    end: &ModelEnd,
    radii: &[f64],
    probes: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ExhaustionReport, CapacityError> {
    if radii.is_empty() || probes.is_empty() {
        return Err(CapacityError::InvalidRadii("radii and probes must be nonempty".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CapacityError::InvalidRadii("radii must be strictly increasing".into()));
    }
    if let Some(p) = probes.iter().find(|&&p| !(p >= end.t0())) {
        return Err(CapacityError::InvalidRadii(format!("probe {p} lies before t0 = {}", end.t0())));
    }
    let values = radii
        .par_iter()
        .map(|&r| HarmonicProfile::dirichlet(end, end.t0(), r, cfg)?.eval_many(probes))
        .collect::<Result<Vec<_>, _>>()?;

    let mut min_step = f64::INFINITY;
    for (k, row) in values.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            if !(-MONOTONICITY_TOLERANCE..=1.0 + MONOTONICITY_TOLERANCE).contains(&v) {
                return Err(CapacityError::MaximumPrinciple {
                    t: probes[i],
                    r_small: radii[k],
                    r_large: radii[k],
                    lower: v,
                    upper: v,
                });
            }
            if k > 0 {
                let step = v - values[k - 1][i];
                min_step = min_step.min(step);
                if step < -MONOTONICITY_TOLERANCE {
                    return Err(CapacityError::MaximumPrinciple {
                        t: probes[i],
                        r_small: radii[k - 1],
                        r_large: radii[k],
                        lower: values[k - 1][i],
                        upper: v,
                    });
                }
            }
        }
    }
    let first = &values[0];
    let last = &values[values.len() - 1];
    let sup_increase = first
        .iter()
        .zip(last)
        .map(|(a, b)| b - a)
        .fold(f64::NEG_INFINITY, f64::max);

    let capacity_integral = capacity_integral(end, cfg);
    let limit = match &capacity_integral {
        ConvergenceVerdict::Converges { .. } => Some(HarmonicProfile::limit(end, end.t0(), cfg)?.eval_many(probes)?),
        ConvergenceVerdict::Diverges { .. } => Some(vec![1.0; probes.len()]),
        ConvergenceVerdict::Inconclusive { .. } => None,
    };
    // f(t0) = 1 by the boundary condition, so only interior probes carry information
    let limit_is_one = limit.as_ref().map(|limit| {
        let mut interior = probes.iter().zip(limit).filter(|(p, _)| **p > end.t0()).peekable();
        if interior.peek().is_none() {
            capacity_integral.diverges()
        } else {
            interior.all(|(_, &v)| v > LIMIT_ONE_THRESHOLD)
        }
    });
    Ok(ExhaustionReport {
        radii: radii.to_vec(),
        probes: probes.to_vec(),
        values,
        sup_increase,
        min_step: if min_step.is_finite() { min_step } else { 0.0 },
        limit,
        limit_is_one,
        capacity_integral,
    })
}
