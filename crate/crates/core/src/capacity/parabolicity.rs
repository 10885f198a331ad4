use serde::{Deserialize, Serialize};

use super::growth::{volume_growth_test, VolumeGrowth};
use super::harmonic::HarmonicProfile;
use super::CapacityError;
use crate::geometry::ModelEnd;
use crate::integrand;
use crate::quadrature::{ConvergenceVerdict, HalfLine, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParabolicityVerdict {
    Parabolic,
    NonParabolic,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParabolicityReport {
    pub verdict: ParabolicityVerdict,
    /// `∫_{t0}^∞ a / g^{m-1}`
    pub capacity_integral: ConvergenceVerdict,
    /// `ω / ∫ a / g^{m-1}`; zero for parabolic ends.
    pub capacity: Option<f64>,
    /// Present iff the end is non-parabolic.
    pub harmonic_limit: Option<HarmonicProfile>,
    pub volume_growth: Option<VolumeGrowth>,
    /// Reason the volume-growth test could not run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume_growth_error: Option<String>,
    /// False only when the volume test proves parabolicity but the
    /// capacity integral says otherwise.
    pub agreement: bool,
}

/// Classifies `∫_{t0}^∞ a / g^{m-1}`.
pub fn capacity_integral(end: &ModelEnd, cfg: &QuadratureConfig) -> ConvergenceVerdict {
    if end.lacks_tail_model() {
        return ConvergenceVerdict::inconclusive("sampled profile has no tail model");
    }
    integrand::classify(
        |t| end.ln_capacity_density(t).map(f64::exp),
        HalfLine::Upper(end.t0()),
        cfg,
    )
}

/// Decides parabolicity from the capacity integral and cross-checks it with
/// the volume-growth criterion.
pub fn parabolicity(end: &ModelEnd, cfg: &QuadratureConfig) -> Result<ParabolicityReport, CapacityError> {
    let capacity_integral = capacity_integral(end, cfg);
    let (verdict, capacity, harmonic_limit) = match &capacity_integral {
        ConvergenceVerdict::Diverges { .. } => (ParabolicityVerdict::Parabolic, Some(0.0), None),
        ConvergenceVerdict::Converges { .. } => {
            let limit = HarmonicProfile::limit(end, end.t0(), cfg)?;
            let cap = limit.capacity()?;
            (ParabolicityVerdict::NonParabolic, Some(cap), Some(limit))
        }
        ConvergenceVerdict::Inconclusive { .. } => (ParabolicityVerdict::Inconclusive, None, None),
    };
    let (volume_growth, volume_growth_error) = if end.lacks_tail_model() {
        (None, Some("sampled profile has no tail model".to_string()))
    } else {
        match volume_growth_test(end, cfg) {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let agreement = !(verdict == ParabolicityVerdict::NonParabolic
        && volume_growth.as_ref().is_some_and(|v| v.implies_parabolic));
    Ok(ParabolicityReport {
        verdict,
        capacity_integral,
        capacity,
        harmonic_limit,
        volume_growth,
        volume_growth_error,
        agreement,
    })
}
