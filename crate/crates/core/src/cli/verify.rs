//! Pinned outcomes on the reference ends.

use serde::Serialize;

use crate::capacity::{parabolicity, ParabolicityVerdict};
use crate::classify::end_signature;
use crate::geometry::BuiltinEnd;
use crate::inequalities::{poincare_bound, rayleigh_report};
use crate::quadrature::QuadratureConfig;

/// Width of the support used for the spectral check on the exponential end.
pub const SPECTRAL_WIDTH: f64 = 20.0;
/// Half-width of the `L^p` probes around a threshold.
pub const THRESHOLD_PROBE: f64 = 0.5;
/// Allowed distance of a fitted threshold from the closed form.
pub const THRESHOLD_BAND: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub end: String,
    pub m: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

struct Checks {
    out: Vec<Check>,
    end: &'static str,
    m: u32,
}

impl Checks {
    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.out.push(Check {
            end: self.end.to_string(),
            m: self.m,
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

fn exp_warp(c: &mut Checks, cfg: &QuadratureConfig) {
    let m = c.m;
    let end = match BuiltinEnd::ExpWarp.build(m) {
        Ok(e) => e,
        Err(e) => return c.push("build", false, e.to_string()),
    };
    let expected = 1.0 / (m - 1) as f64;
    match end_signature(&end, &[2.0], cfg) {
        Ok(sig) => {
            let v = sig.volume.value();
            let ok = v.is_some_and(|v| (v - expected).abs() <= 1e-10);
            c.push("volume = 1/(m-1)", ok, format!("{v:?} vs {expected}"));
        }
        Err(e) => c.push("volume = 1/(m-1)", false, e.to_string()),
    }
    let bound = poincare_bound(&end).unwrap_or(f64::NAN);
    match rayleigh_report(&end, (0.0, SPECTRAL_WIDTH), 2000, cfg) {
        Ok(r) => {
            let min = r.overall_minimum();
            c.push(
                "Rayleigh minimum >= (m-1)^2/4 - 1e-3",
                min - bound >= -1e-3,
                format!("minimum {min}, bound {bound}"),
            );
            c.push(
                "Rayleigh minimum within 0.05 of (m-1)^2/4",
                (min - bound).abs() <= 0.05,
                format!("gap {}", min - bound),
            );
        }
        Err(e) => c.push("Rayleigh minimum", false, e.to_string()),
    }
}

fn threshold_probe(c: &mut Checks, end: BuiltinEnd, expected_p: f64, finite_above: bool, cfg: &QuadratureConfig) {
    let m = c.m;
    let model = match end.build(m) {
        Ok(e) => e,
        Err(e) => return c.push("build", false, e.to_string()),
    };
    let (below, above) = (expected_p - THRESHOLD_PROBE, expected_p + THRESHOLD_PROBE);
    let sig = match end_signature(&model, &[below, above], cfg) {
        Ok(s) => s,
        Err(e) => return c.push("signature", false, e.to_string()),
    };
    let (vb, va) = (sig.lp(below).unwrap(), sig.lp(above).unwrap());
    let ok = if finite_above {
        vb.diverges() && va.converges()
    } else {
        vb.converges() && va.diverges()
    };
    c.push(
        "L^p verdicts on both sides of the threshold",
        ok,
        format!("p={below}: {}, p={above}: {}", vb.label(), va.label()),
    );
    let pc = sig.thresholds.p_crit;
    c.push(
        "fitted L^p threshold",
        pc.is_some_and(|p| (p - expected_p).abs() <= THRESHOLD_BAND),
        format!("{pc:?} vs {expected_p}"),
    );
    if end == BuiltinEnd::GaussianNeck {
        c.push("finite volume", sig.volume.converges(), sig.volume.label().to_string());
    }
    c.push(
        "parabolic",
        sig.parabolicity.verdict == ParabolicityVerdict::Parabolic,
        format!("{:?}", sig.parabolicity.verdict),
    );
}

fn slow_power_growth(c: &mut Checks, cfg: &QuadratureConfig) {
    let end = match BuiltinEnd::SlowPower.build(c.m) {
        Ok(e) => e,
        Err(e) => return c.push("build", false, e.to_string()),
    };
    match parabolicity(&end, cfg) {
        Ok(rep) => {
            let growth = rep.volume_growth.as_ref();
            c.push(
                "volume-growth criterion implies parabolic",
                growth.is_some_and(|g| g.implies_parabolic),
                format!("{:?}", growth.map(|g| g.criterion.label())),
            );
            let x = growth.and_then(|g| g.exponent);
            c.push("V(s) exponent 2 ± 0.1", x.is_some_and(|x| (x - 2.0).abs() <= 0.1), format!("{x:?}"));
        }
        Err(e) => c.push("parabolicity", false, e.to_string()),
    }
}

/// Runs the pinned checks for every dimension in `dims`.
pub fn verify_examples(dims: &[u32], cfg: &QuadratureConfig) -> Vec<Check> {
    let mut all = Vec::new();
    for &m in dims {
        let mut c = Checks {
            out: Vec::new(),
            end: BuiltinEnd::ExpWarp.name(),
            m,
        };
        exp_warp(&mut c, cfg);
        c.end = BuiltinEnd::SlowPower.name();
        slow_power_growth(&mut c, cfg);
        threshold_probe(&mut c, BuiltinEnd::SlowPower, 2.0 * (m - 1) as f64, true, cfg);
        c.end = BuiltinEnd::GaussianNeck.name();
        threshold_probe(&mut c, BuiltinEnd::GaussianNeck, (m - 1) as f64, false, cfg);
        all.extend(c.out);
    }
    all
}
