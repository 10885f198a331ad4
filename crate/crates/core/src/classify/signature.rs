use serde::{Deserialize, Serialize};

use super::ClassifyError;
use crate::capacity::{parabolicity, ParabolicityReport, ParabolicityVerdict};
use crate::geometry::{GeometryError, ModelEnd};
use crate::inequalities::{default_domains, isoperimetric_scan};
use crate::integrand;
use crate::quadrature::{ConvergenceVerdict, HalfLine, QuadratureConfig};

/// Allowed range for exponents in a p grid.
pub const P_RANGE: (f64, f64) = (1.0, 64.0);

/// Log-log slope of `|H|` above which the sup-norm probe calls `|H|` unbounded.
pub const SUP_SLOPE_THRESHOLD: f64 = 0.01;

/// Octaves beyond the anchor reached by the tail probes.
const TAIL_OCTAVES: i32 = 21;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpEntry {
    pub p: f64,
    /// Classification of `∫ |H|^p dV`.
    pub verdict: ConvergenceVerdict,
    /// Set when `p` sits inside the classifier's band around the fitted threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// The `p = ∞` probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupNormProbe {
    /// `None` when the tail could not be probed.
    pub bounded: Option<bool>,
    /// Largest `|H|` seen on the probe grid, when bounded.
    pub sup: Option<f64>,
    /// Log-log slope of `|H|` over the last octave.
    pub tail_slope: Option<f64>,
}

/// Critical exponents read off the far tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `p` at which `|H|^p dV` crosses the integrability boundary.
    pub p_crit: Option<f64>,
    /// True when the finite norms lie below `p_crit`, false when above.
    pub finite_below: Option<bool>,
    /// Log-log slope of `|H|`.
    pub curvature_exponent: Option<f64>,
    /// Log-log slope of the volume element.
    pub volume_exponent: Option<f64>,
    /// Log-log slope of the capacity density `a / g^{m-1}`.
    pub capacity_exponent: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndSignature {
    pub end: ModelEnd,
    pub volume: ConvergenceVerdict,
    /// Sorted by `p`; empty when the end carries no immersion.
    pub lp_map: Vec<LpEntry>,
    pub sup_norm: Option<SupNormProbe>,
    pub parabolicity: ParabolicityReport,
    pub thresholds: Thresholds,
    /// Infimum of the isoperimetric ratio over radial slabs.
    pub isoperimetric_inf: Option<f64>,
}

impl EndSignature {
    pub fn dimension(&self) -> u32 {
        self.end.dimension()
    }

    pub fn has_immersion(&self) -> bool {
        self.end.has_immersion()
    }

    pub fn lp(&self, p: f64) -> Option<&ConvergenceVerdict> {
        self.lp_map.iter().find(|e| e.p == p).map(|e| &e.verdict)
    }

    /// On a finite-volume end a finite `L^q` norm forces every `L^p`, `p < q`,
    /// to be finite. Returns false if the conclusive verdicts break this.
    pub fn lp_downward_closed(&self) -> bool {
        if !self.volume.converges() {
            return true;
        }
        let mut seen_divergent = false;
        for e in &self.lp_map {
            match &e.verdict {
                ConvergenceVerdict::Diverges { .. } => seen_divergent = true,
                ConvergenceVerdict::Converges { .. } if seen_divergent => return false,
                _ => {}
            }
        }
        true
    }

    /// Every verdict that fed into the signature, with a label.
    pub fn verdicts(&self) -> Vec<(String, &ConvergenceVerdict)> {
        let mut out = vec![
            ("volume".to_string(), &self.volume),
            ("capacity".to_string(), &self.parabolicity.capacity_integral),
        ];
        out.extend(self.lp_map.iter().map(|e| (format!("L^{}", e.p), &e.verdict)));
        out
    }

    pub fn has_inconclusive(&self) -> bool {
        self.verdicts().iter().any(|(_, v)| v.is_inconclusive())
            || self.parabolicity.verdict == ParabolicityVerdict::Inconclusive
            || self.sup_norm.as_ref().is_some_and(|s| s.bounded.is_none())
    }
}

pub(crate) fn validate_p_grid(p_grid: &[f64]) -> Result<Vec<f64>, ClassifyError> {
    if p_grid.is_empty() {
        return Err(ClassifyError::InvalidGrid("p grid is empty".into()));
    }
    let (lo, hi) = P_RANGE;
    if let Some(p) = p_grid.iter().find(|p| !(**p >= lo && **p <= hi)) {
        return Err(ClassifyError::InvalidGrid(format!("p = {p} outside [{lo}, {hi}]")));
    }
    let mut ps = p_grid.to_vec();
    ps.sort_by(f64::total_cmp);
    if ps.windows(2).any(|w| w[0] == w[1]) {
        return Err(ClassifyError::InvalidGrid("p grid has duplicate entries".into()));
    }
    Ok(ps)
}

fn anchor(end: &ModelEnd) -> f64 {
    end.t0().max(1.0)
}

pub(crate) fn volume_verdict(end: &ModelEnd, cfg: &QuadratureConfig) -> ConvergenceVerdict {
    if end.lacks_tail_model() {
        return ConvergenceVerdict::inconclusive("sampled profile has no tail model");
    }
    integrand::classify(
        |t| end.ln_volume_element(t).map(f64::exp),
        HalfLine::Upper(end.t0()),
        cfg,
    )
}

/// `∫ |H|^p dV`; `None` without an immersion.
pub(crate) fn lp_verdict(end: &ModelEnd, p: f64, cfg: &QuadratureConfig) -> Option<ConvergenceVerdict> {
    if !end.has_immersion() {
        return None;
    }
    if end.lacks_tail_model() {
        return Some(ConvergenceVerdict::inconclusive("sampled profile has no tail model"));
    }
    Some(integrand::classify(
        |t| -> Result<f64, GeometryError> {
            let ln_h = end.ln_mean_curvature_norm(t)?.unwrap_or(f64::NEG_INFINITY);
            Ok((p * ln_h + end.ln_volume_element(t)?).exp())
        },
        HalfLine::Upper(end.t0()),
        cfg,
    ))
}

pub(crate) fn parabolicity_or_inconclusive(end: &ModelEnd, cfg: &QuadratureConfig) -> ParabolicityReport {
    parabolicity(end, cfg).unwrap_or_else(|e| ParabolicityReport {
        verdict: ParabolicityVerdict::Inconclusive,
        capacity_integral: ConvergenceVerdict::inconclusive(e.to_string()),
        capacity: None,
        harmonic_limit: None,
        volume_growth: None,
        volume_growth_error: None,
        agreement: true,
    })
}

/// Slope of `ln φ` against `ln t` between `anchor·2^{K-1}` and `anchor·2^K`.
fn tail_slope(end: &ModelEnd, ln_phi: impl Fn(f64) -> Result<f64, GeometryError>) -> Option<f64> {
    if end.lacks_tail_model() {
        return None;
    }
    let t2 = anchor(end) * 2f64.powi(TAIL_OCTAVES);
    let t1 = t2 / 2.0;
    let (y1, y2) = (ln_phi(t1).ok()?, ln_phi(t2).ok()?);
    let slope = (y2 - y1) / std::f64::consts::LN_2;
    slope.is_finite().then_some(slope)
}

fn thresholds(end: &ModelEnd) -> Thresholds {
    let curvature_exponent = if end.has_immersion() {
        tail_slope(end, |t| end.ln_mean_curvature_norm(t).map(|h| h.unwrap_or(f64::NAN)))
    } else {
        None
    };
    let volume_exponent = tail_slope(end, |t| end.ln_volume_element(t));
    let capacity_exponent = tail_slope(end, |t| end.ln_capacity_density(t));
    let (p_crit, finite_below) = match (curvature_exponent, volume_exponent) {
        (Some(gamma), Some(delta)) if gamma.abs() > 1e-9 => {
            let p = -(1.0 + delta) / gamma;
            if p.is_finite() {
                (Some(p), Some(gamma > 0.0))
            } else {
                (None, None)
            }
        }
        _ => (None, None),
    };
    Thresholds {
        p_crit,
        finite_below,
        curvature_exponent,
        volume_exponent,
        capacity_exponent,
    }
}

/// Sup of `|H|` over a grid that is uniform near `t0` and has eight points per
/// octave out to `anchor·2^21`; unbounded when the last octave still grows.
fn sup_norm_probe(end: &ModelEnd) -> Option<SupNormProbe> {
    if !end.has_immersion() {
        return None;
    }
    let undetermined = SupNormProbe {
        bounded: None,
        sup: None,
        tail_slope: None,
    };
    if end.lacks_tail_model() {
        return Some(undetermined);
    }
    let t0 = end.t0();
    let a = anchor(end);
    let mut grid: Vec<f64> = (0..64).map(|j| t0 + (a + 1.0 - t0) * j as f64 / 64.0).collect();
    grid.extend((0..=8 * TAIL_OCTAVES).map(|k| a + 1.0 + a * (2f64.powf(k as f64 / 8.0) - 1.0)));
    let mut ln_sup = f64::NEG_INFINITY;
    for &t in &grid {
        match end.ln_mean_curvature_norm(t) {
            Ok(Some(v)) if !v.is_nan() => ln_sup = ln_sup.max(v),
            _ => return Some(undetermined),
        }
    }
    let ln_h = |t: f64| end.ln_mean_curvature_norm(t).map(|h| h.unwrap_or(f64::NAN));
    let t2 = a * 2f64.powi(TAIL_OCTAVES);
    let slope = match (ln_h(t2 / 2.0), ln_h(t2)) {
        (Ok(y1), Ok(y2)) if y1 == f64::NEG_INFINITY && y2 == f64::NEG_INFINITY => 0.0,
        (Ok(y1), Ok(y2)) => (y2 - y1) / std::f64::consts::LN_2,
        _ => return Some(undetermined),
    };
    if slope.is_nan() {
        return Some(undetermined);
    }
    let bounded = slope <= SUP_SLOPE_THRESHOLD && ln_sup.is_finite() || ln_sup == f64::NEG_INFINITY;
    Some(SupNormProbe {
        bounded: Some(bounded),
        sup: bounded.then(|| ln_sup.exp()),
        tail_slope: Some(slope),
    })
}

/// Volume, `L^p` norms of `H`, parabolicity, tail exponents and the
/// isoperimetric infimum of one end.
///
/// Individual analyses that fail are recorded as inconclusive; only an
/// invalid p grid is an error.
pub fn end_signature(end: &ModelEnd, p_grid: &[f64], cfg: &QuadratureConfig) -> Result<EndSignature, ClassifyError> {
    let ps = validate_p_grid(p_grid)?;
    cfg.validate()?;
    let thresholds = thresholds(end);
    let margin = cfg.tail_margin;
    let lp_map = if end.has_immersion() {
        ps.iter()
            .map(|&p| {
                let verdict = lp_verdict(end, p, cfg).expect("end has an immersion");
                let note = match (thresholds.p_crit, thresholds.curvature_exponent) {
                    (Some(pc), Some(gamma)) if (gamma * (p - pc)).abs() <= margin => Some(format!(
                        "p is within the tail margin of the fitted threshold {pc:.6}"
                    )),
                    _ => None,
                };
                LpEntry { p, verdict, note }
            })
            .collect()
    } else {
        Vec::new()
    };
    let isoperimetric_inf = if end.lacks_tail_model() {
        None
    } else {
        let domains = default_domains(end);
        if domains.is_empty() {
            None
        } else {
            isoperimetric_scan(end, &domains, cfg).ok().map(|s| s.inf_ratio)
        }
    };
    Ok(EndSignature {
        end: end.clone(),
        volume: volume_verdict(end, cfg),
        lp_map,
        sup_norm: sup_norm_probe(end),
        parabolicity: parabolicity_or_inconclusive(end, cfg),
        thresholds,
        isoperimetric_inf,
    })
}
