use serde::{Deserialize, Serialize};

use super::signature::{lp_verdict, parabolicity_or_inconclusive, volume_verdict, EndSignature};
use crate::capacity::ParabolicityVerdict;
use crate::quadrature::{ConvergenceVerdict, QuadratureConfig};

/// Tolerance divisor for the recheck of an open-band hit.
pub const RECHECK_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagStatus {
    /// The hypothesis holds and so does the conclusion.
    Ok,
    /// The hypothesis does not hold.
    Vacuous,
    /// The hypothesis holds and the conclusion fails.
    Violated,
    /// Some verdict needed to decide was inconclusive.
    Untestable,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flag {
    pub status: FlagStatus,
    pub detail: String,
}

impl Flag {
    fn new(status: FlagStatus, detail: impl Into<String>) -> Self {
        Self {
            status,
            detail: detail.into(),
        }
    }

    pub fn is_violation(&self) -> bool {
        self.status == FlagStatus::Violated
    }
}

/// Advisory search result for one of the unresolved ranges of `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandProbe {
    /// Confirmed at the tightened tolerance.
    pub hit: bool,
    /// Every relevant verdict was conclusive.
    pub conclusive: bool,
    /// Exponents in the band whose norm was found finite.
    pub p_values: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyFlags {
    /// A finite `L^p` norm of `H` for some `p ∈ [2, m]` forces finite volume
    /// or non-parabolicity.
    pub dichotomy: Flag,
    /// A finite `L^p` norm for some `p ∈ [m, ∞]` forces infinite volume.
    pub infinite_volume: Flag,
    /// Present when the isoperimetric scan sees a positive Sobolev-type constant.
    pub sobolev_note: Option<String>,
    /// Finite volume with a finite norm for some `p ∈ [m−1, m)`.
    pub finite_volume_band: BandProbe,
    /// Parabolic with a finite norm for some `p ∈ (m, 2(m−1)]`.
    pub parabolic_band: BandProbe,
}

impl ConsistencyFlags {
    pub fn has_violation(&self) -> bool {
        self.dichotomy.is_violation() || self.infinite_volume.is_violation()
    }

    pub fn has_hit(&self) -> bool {
        self.finite_volume_band.hit || self.parabolic_band.hit
    }
}

fn in_range(p: f64, lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> bool {
    (p > lo || lo_closed && p == lo) && (p < hi || hi_closed && p == hi)
}

fn finite_ps(sig: &EndSignature, keep: impl Fn(f64) -> bool) -> (Vec<f64>, bool) {
    let relevant: Vec<_> = sig.lp_map.iter().filter(|e| keep(e.p)).collect();
    let finite = relevant.iter().filter(|e| e.verdict.converges()).map(|e| e.p).collect();
    let inconclusive = relevant.iter().any(|e| e.verdict.is_inconclusive());
    (finite, inconclusive)
}

fn list(ps: &[f64]) -> String {
    ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

/// Finite `∥H∥_p` for some `p ∈ [2, m]` must come with finite volume or a
/// non-parabolic end.
pub fn check_dichotomy(sig: &EndSignature) -> Flag {
    let m = sig.dimension() as f64;
    if sig.dimension() < 3 {
        return Flag::new(FlagStatus::NotApplicable, "needs m ≥ 3");
    }
    if !sig.has_immersion() {
        return Flag::new(FlagStatus::NotApplicable, "end carries no immersion");
    }
    let (finite, inconclusive) = finite_ps(sig, |p| in_range(p, 2.0, m, true, true));
    if finite.is_empty() {
        return if inconclusive {
            Flag::new(FlagStatus::Untestable, "an L^p verdict for p in [2, m] is inconclusive")
        } else {
            Flag::new(FlagStatus::Vacuous, "no p in [2, m] on the grid has a finite norm")
        };
    }
    let ps = list(&finite);
    if sig.volume.converges() {
        return Flag::new(FlagStatus::Ok, format!("finite norm at p = {ps}; volume is finite"));
    }
    match sig.parabolicity.verdict {
        ParabolicityVerdict::NonParabolic => {
            Flag::new(FlagStatus::Ok, format!("finite norm at p = {ps}; end is non-parabolic"))
        }
        ParabolicityVerdict::Inconclusive => {
            Flag::new(FlagStatus::Untestable, format!("finite norm at p = {ps}; parabolicity is inconclusive"))
        }
        ParabolicityVerdict::Parabolic if sig.volume.is_inconclusive() => {
            Flag::new(FlagStatus::Untestable, format!("finite norm at p = {ps}; volume is inconclusive"))
        }
        ParabolicityVerdict::Parabolic => Flag::new(
            FlagStatus::Violated,
            format!("finite norm at p = {ps} on a parabolic end of infinite volume"),
        ),
    }
}

/// Finite `∥H∥_p` for some `p ∈ [m, ∞]` must come with infinite volume.
pub fn check_infinite_volume(sig: &EndSignature) -> Flag {
    let m = sig.dimension() as f64;
    if !sig.has_immersion() {
        return Flag::new(FlagStatus::NotApplicable, "end carries no immersion");
    }
    let (mut finite, inconclusive) = finite_ps(sig, |p| p >= m);
    let mut reasons: Vec<String> = Vec::new();
    if !finite.is_empty() {
        reasons.push(format!("finite norm at p = {}", list(&finite)));
    }
    let sup_unknown = match sig.sup_norm.as_ref().and_then(|s| s.bounded) {
        Some(true) => {
            finite.push(f64::INFINITY);
            reasons.push("|H| is bounded".into());
            false
        }
        Some(false) => false,
        None => true,
    };
    if finite.is_empty() {
        return if inconclusive || sup_unknown {
            Flag::new(FlagStatus::Untestable, "an L^p verdict for p ≥ m is inconclusive")
        } else {
            Flag::new(FlagStatus::Vacuous, "no p ≥ m has a finite norm")
        };
    }
    let why = reasons.join("; ");
    match &sig.volume {
        ConvergenceVerdict::Diverges { .. } => Flag::new(FlagStatus::Ok, format!("{why}; volume is infinite")),
        ConvergenceVerdict::Converges { .. } => Flag::new(FlagStatus::Violated, format!("{why} but volume is finite")),
        ConvergenceVerdict::Inconclusive { .. } => {
            Flag::new(FlagStatus::Untestable, format!("{why}; volume is inconclusive"))
        }
    }
}

pub fn sobolev_note(sig: &EndSignature) -> Option<String> {
    let inf = sig.isoperimetric_inf?;
    (inf.is_finite() && inf > 0.0).then(|| {
        format!(
            "radial slabs satisfy an isoperimetric inequality with ratio ≥ {inf:.6} (Sobolev-type constant {:.6}); \
             checked on slabs only, not on all functions",
            1.0 / inf
        )
    })
}

struct Band {
    lo: f64,
    hi: f64,
    lo_closed: bool,
    hi_closed: bool,
}

impl Band {
    fn contains(&self, p: f64) -> bool {
        in_range(p, self.lo, self.hi, self.lo_closed, self.hi_closed)
    }
}

/// Looks for a finite norm inside `band` on an end that also satisfies
/// `precondition`; candidates are recomputed at tolerance `÷ RECHECK_FACTOR`.
fn probe_band(
    sig: &EndSignature,
    band: Band,
    precondition: (&str, Option<bool>),
    cfg: &QuadratureConfig,
    recheck: impl Fn(&QuadratureConfig) -> Option<bool>,
) -> BandProbe {
    let (what, holds) = precondition;
    let none = |conclusive, detail: String| BandProbe {
        hit: false,
        conclusive,
        p_values: Vec::new(),
        detail,
    };
    if !sig.has_immersion() {
        return none(true, "end carries no immersion".into());
    }
    let (finite, inconclusive) = finite_ps(sig, |p| band.contains(p));
    match holds {
        None => return none(false, format!("{what} is inconclusive")),
        Some(false) => return none(!inconclusive, format!("end is not {what}")),
        Some(true) => {}
    }
    if inconclusive {
        return none(false, "an L^p verdict in the band is inconclusive".into());
    }
    if finite.is_empty() {
        return none(true, "no finite norm in the band".into());
    }
    let tight = cfg.tightened(RECHECK_FACTOR);
    let p_values: Vec<f64> = finite
        .into_iter()
        .filter(|&p| lp_verdict(&sig.end, p, &tight).is_some_and(|v| v.converges()))
        .collect();
    let confirmed = !p_values.is_empty() && recheck(&tight) == Some(true);
    BandProbe {
        hit: confirmed,
        conclusive: true,
        detail: if confirmed {
            format!("candidate at p = {}; requires manual verification", list(&p_values))
        } else {
            "candidate did not survive the tightened recheck".into()
        },
        p_values,
    }
}

/// Probes `p ∈ [m−1, m)` on finite-volume ends and `p ∈ (m, 2(m−1)]` on
/// parabolic ends. Hits are advisory.
pub fn hunt_open_questions(sig: &EndSignature, cfg: &QuadratureConfig) -> (BandProbe, BandProbe) {
    let m = sig.dimension() as f64;
    let volume_finite = match &sig.volume {
        ConvergenceVerdict::Converges { .. } => Some(true),
        ConvergenceVerdict::Diverges { .. } => Some(false),
        ConvergenceVerdict::Inconclusive { .. } => None,
    };
    let parabolic = match sig.parabolicity.verdict {
        ParabolicityVerdict::Parabolic => Some(true),
        ParabolicityVerdict::NonParabolic => Some(false),
        ParabolicityVerdict::Inconclusive => None,
    };
    let finite_volume_band = probe_band(
        sig,
        Band {
            lo: m - 1.0,
            hi: m,
            lo_closed: true,
            hi_closed: false,
        },
        ("of finite volume", volume_finite),
        cfg,
        |c| Some(volume_verdict(&sig.end, c).converges()),
    );
    let parabolic_band = probe_band(
        sig,
        Band {
            lo: m,
            hi: 2.0 * (m - 1.0),
            lo_closed: false,
            hi_closed: true,
        },
        ("parabolic", parabolic),
        cfg,
        |c| Some(parabolicity_or_inconclusive(&sig.end, c).verdict == ParabolicityVerdict::Parabolic),
    );
    (finite_volume_band, parabolic_band)
}

pub fn consistency_flags(sig: &EndSignature, cfg: &QuadratureConfig) -> ConsistencyFlags {
    let (finite_volume_band, parabolic_band) = hunt_open_questions(sig, cfg);
    ConsistencyFlags {
        dichotomy: check_dichotomy(sig),
        infinite_volume: check_infinite_volume(sig),
        sobolev_note: sobolev_note(sig),
        finite_volume_band,
        parabolic_band,
    }
}
