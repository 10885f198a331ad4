use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::InequalityError;
use crate::capacity::RadialTable;
use crate::geometry::ModelEnd;
use crate::integrand;
use crate::quadrature::QuadratureConfig;

/// Number of slabs in the default scan.
pub const DEFAULT_SCAN_DOMAINS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoperimetricSample {
    pub t_a: f64,
    pub t_b: f64,
    pub volume: f64,
    /// `A(t_a) + A(t_b)`
    pub boundary_area: f64,
    /// `∫_N |H| dV`; `None` when the end has no immersion (counted as 0 in the ratio).
    pub curvature_integral: Option<f64>,
    /// `(vol(∂N) + ∫|H|) / vol(N)^{(m-1)/m}`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoperimetricScan {
    pub samples: Vec<IsoperimetricSample>,
    pub inf_ratio: f64,
    /// Index of the sample attaining `inf_ratio`.
    pub argmin: usize,
    /// `1 / inf_ratio`, the observed Sobolev-type constant.
    pub sobolev_observed: f64,
}

/// Slabs `[t0, t0 + L]` with `L` log-spaced from `1e-2` to `1e3`, clipped to the end.
pub fn default_domains(end: &ModelEnd) -> Vec<(f64, f64)> {
    let t0 = end.t0();
    let n = DEFAULT_SCAN_DOMAINS;
    (0..n)
        .map(|k| {
            let l = 10f64.powf(-2.0 + 5.0 * k as f64 / (n - 1) as f64);
            (t0, t0 + l)
        })
        .filter(|&(_, b)| b <= end.t_max())
        .collect()
}

fn sample(end: &ModelEnd, t_a: f64, t_b: f64, cfg: &QuadratureConfig) -> Result<IsoperimetricSample, InequalityError> {
    if !(t_b > t_a) || t_a < end.t0() || t_b > end.t_max() {
        return Err(InequalityError::OutsideEnd {
            lo: t_a,
            hi: t_b,
            t0: end.t0(),
            t_max: end.t_max(),
        });
    }
    let volume = integrand::integrate(
        |t| -> Result<f64, InequalityError> { Ok(end.volume_element(t)?) },
        t_a,
        t_b,
        cfg,
    )?
    .value;
    let curvature_integral = if end.has_immersion() {
        Some(
            integrand::integrate(
                |t| -> Result<f64, InequalityError> {
                    let ln_h = end.ln_mean_curvature_norm(t)?.unwrap_or(f64::NEG_INFINITY);
                    Ok((ln_h + end.ln_volume_element(t)?).exp())
                },
                t_a,
                t_b,
                cfg,
            )?
            .value,
        )
    } else {
        None
    };
    let boundary_area = end.area(t_a)? + end.area(t_b)?;
    let m = end.dimension() as f64;
    let ratio = (boundary_area + curvature_integral.unwrap_or(0.0)) / volume.powf((m - 1.0) / m);
    Ok(IsoperimetricSample {
        t_a,
        t_b,
        volume,
        boundary_area,
        curvature_integral,
        ratio,
    })
}

/// Isoperimetric ratios of radial slabs and their infimum.
///
/// Ties in the infimum go to the smallest `t_a`, then the earliest domain.
pub fn isoperimetric_scan(
    end: &ModelEnd,
    domains: &[(f64, f64)],
    cfg: &QuadratureConfig,
) -> Result<IsoperimetricScan, InequalityError> {
    if domains.is_empty() {
        return Err(InequalityError::InvalidParameter("no domains to scan".into()));
    }
    let cfg = QuadratureConfig {
        abs_tol: f64::MIN_POSITIVE,
        ..*cfg
    };
    let samples = domains
        .par_iter()
        .map(|&(a, b)| sample(end, a, b, &cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut argmin = 0;
    for (i, s) in samples.iter().enumerate() {
        let best = &samples[argmin];
        if s.ratio < best.ratio || (s.ratio == best.ratio && s.t_a < best.t_a) {
            argmin = i;
        }
    }
    let inf_ratio = samples[argmin].ratio;
    Ok(IsoperimetricScan {
        samples,
        inf_ratio,
        argmin,
        sobolev_observed: 1.0 / inf_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeBoundRow {
    pub radius: f64,
    pub volume: f64,
    /// `R^m / (2 S m)`
    pub bound: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeBoundReport {
    pub t_q: f64,
    pub sobolev_constant: f64,
    pub rows: Vec<VolumeBoundRow>,
    pub violations: Vec<f64>,
}

/// Checks `vol(B_R(q)) ≥ R^m / (2 S m)` with balls replaced by radial slabs
/// `{t : |s(t) − s(t_q)| ≤ R}` (`s` the arc length from `t0`).
pub fn volume_lower_bound_check(
    end: &ModelEnd,
    sobolev_constant: f64,
    radii: &[f64],
    t_q: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<VolumeBoundReport, InequalityError> {
    if !(sobolev_constant.is_finite() && sobolev_constant > 0.0) {
        return Err(InequalityError::InvalidParameter(format!(
            "Sobolev constant must be positive, got {sobolev_constant}"
        )));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(InequalityError::InvalidParameter("radii must be finite and nonnegative".into()));
    }
    let t_q = t_q.unwrap_or(end.t0());
    if t_q < end.t0() {
        return Err(InequalityError::InvalidParameter(format!("t_q = {t_q} lies before t0")));
    }
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    let mut extent = (t_q - end.t0()) + r_max + 1.0;
    let (table, s_q) = loop {
        let table = RadialTable::new(end, end.t0() + extent, cfg)?;
        let (s_q, _) = table.at(t_q)?;
        let (s_last, _) = table.at(table.t_last())?;
        if s_last >= s_q + r_max || table.t_last() >= end.t_max() || extent > 1e15 {
            break (table, s_q);
        }
        extent *= 2.0;
    };
    let m = end.dimension() as i32;
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let t_lo = table.invert_arc((s_q - r).max(0.0))?;
        let t_hi = table.invert_arc(s_q + r)?;
        let volume = table.at(t_hi)?.1 - table.at(t_lo)?.1;
        let bound = r.powi(m) / (2.0 * sobolev_constant * m as f64);
        rows.push(VolumeBoundRow {
            radius: r,
            volume,
            bound,
            violated: volume < bound,
        });
    }
    let violations = rows.iter().filter(|r| r.violated).map(|r| r.radius).collect();
    Ok(VolumeBoundReport {
        t_q,
        sobolev_constant,
        rows,
        violations,
    })
}
