use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::harmonic::HarmonicProfile;
use super::CapacityError;
use crate::geometry::ModelEnd;
use crate::integrand;
use crate::quadrature::QuadratureConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub r: f64,
    /// `h(r) = ∫_{r0}^{r} f_r^{2m/(m-2)} dV`
    pub h: f64,
    /// `S^{-1} h(r)^{(m-2)/m}`
    pub sobolev_side: f64,
    /// `∫_{r0}^{r} f_r² |H|² dV`; `None` without an immersion.
    pub curvature_side: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub r0: f64,
    pub sobolev_constant: f64,
    pub rows: Vec<EnergyRow>,
}

impl EnergyTrace {
    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].h >= w[0].h - tol * w[0].h.abs().max(1.0))
    }
}

/// Replays the energy bookkeeping on the annuli `[r0, r]`.
///
/// Each `f_r` solves the Dirichlet problem on `[t0, r]`. The two sides of
/// the Sobolev bound are reported next to each other; no inequality is
/// asserted since the constant `S` is an input.
pub fn energy_trace(
    end: &ModelEnd,
    r0: f64,
    radii: &[f64],
    sobolev_constant: f64,
    cfg: &QuadratureConfig,
) -> Result<EnergyTrace, CapacityError> {
    let m = end.dimension();
    if m < 3 {
        return Err(CapacityError::DimensionTooSmall(m));
    }
    if !(sobolev_constant.is_finite() && sobolev_constant > 0.0) {
        return Err(CapacityError::InvalidRadii(format!(
            "Sobolev constant must be positive, got {sobolev_constant}"
        )));
    }
    if !r0.is_finite() || r0 < end.t0() {
        return Err(CapacityError::InvalidRadii(format!("r0 = {r0} lies before t0 = {}", end.t0())));
    }
    if radii.iter().any(|r| !r.is_finite()) {
        return Err(CapacityError::InvalidRadii("radii must be finite".into()));
    }
    let exponent = 2.0 * m as f64 / (m as f64 - 2.0);
    let sobolev_power = (m as f64 - 2.0) / m as f64;
    let cfg = QuadratureConfig {
        abs_tol: f64::MIN_POSITIVE,
        ..*cfg
    };
    let rows = radii
        .par_iter()
        .map(|&r| -> Result<EnergyRow, CapacityError> {
            if r <= r0 {
                return Ok(EnergyRow {
                    r,
                    h: 0.0,
                    sobolev_side: 0.0,
                    curvature_side: end.has_immersion().then_some(0.0),
                });
            }
            let f = HarmonicProfile::dirichlet(end, end.t0(), r, &cfg)?;
            let h = integrand::integrate(
                |t| -> Result<f64, CapacityError> {
                    let v = f.eval(t)?;
                    if v == 0.0 {
                        return Ok(0.0);
                    }
                    Ok((exponent * v.ln() + end.ln_volume_element(t)?).exp())
                },
                r0,
                r,
                &cfg,
            )?
            .value;
            let curvature_side = if end.has_immersion() {
                Some(
                    integrand::integrate(
                        |t| -> Result<f64, CapacityError> {
                            let v = f.eval(t)?;
                            let ln_h = end.ln_mean_curvature_norm(t)?.unwrap_or(f64::NEG_INFINITY);
                            if v == 0.0 || ln_h == f64::NEG_INFINITY {
                                return Ok(0.0);
                            }
                            Ok((2.0 * v.ln() + 2.0 * ln_h + end.ln_volume_element(t)?).exp())
                        },
                        r0,
                        r,
                        &cfg,
                    )?
                    .value,
                )
            } else {
                None
            };
            Ok(EnergyRow {
                r,
                h,
                sobolev_side: h.powf(sobolev_power) / sobolev_constant,
                curvature_side,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EnergyTrace {
        r0,
        sobolev_constant,
        rows,
    })
}
