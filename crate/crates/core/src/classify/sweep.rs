use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::flags::{consistency_flags, ConsistencyFlags};
use super::signature::{end_signature, validate_p_grid};
use super::ClassifyError;
use crate::capacity::ParabolicityVerdict;
use crate::geometry::power_revolution_end;
use crate::quadrature::QuadratureConfig;

pub const CSV_HEADER: [&str; 7] = ["m", "α", "p", "analytic_verdict", "numeric_verdict", "agreement", "notes"];

/// Grid of the power family `f(t) = t^α`, `t ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub dimensions: Vec<u32>,
    pub alphas: Vec<f64>,
    pub p_grid: Vec<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            dimensions: vec![3, 4, 5],
            alphas: vec![0.2, 0.3, 0.45, 0.6, 0.8, 1.0],
            p_grid: vec![2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 12.0, 16.0],
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        if self.dimensions.is_empty() {
            return Err(ClassifyError::InvalidGrid("dimension list is empty".into()));
        }
        if let Some(m) = self.dimensions.iter().find(|&&m| !(3..=64).contains(&m)) {
            return Err(ClassifyError::InvalidGrid(format!("dimension {m} outside [3, 64]")));
        }
        if self.alphas.is_empty() {
            return Err(ClassifyError::InvalidGrid("α grid is empty".into()));
        }
        if let Some(a) = self.alphas.iter().find(|&&a| !(a > 0.0 && a <= 1.0)) {
            return Err(ClassifyError::InvalidGrid(format!("α = {a} outside (0, 1]")));
        }
        validate_p_grid(&self.p_grid)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Volume,
    Parabolicity,
    /// `∥H∥_p`
    MeanCurvature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Agree,
    Disagree,
    /// Within the tail margin of the analytic boundary.
    Excluded,
    Inconclusive,
}

impl Agreement {
    pub fn label(&self) -> &'static str {
        match self {
            Agreement::Agree => "agree",
            Agreement::Disagree => "disagree",
            Agreement::Excluded => "boundary-excluded",
            Agreement::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub m: u32,
    pub alpha: f64,
    pub quantity: Quantity,
    /// Only for `MeanCurvature` cells.
    pub p: Option<f64>,
    pub analytic: String,
    pub numeric: String,
    pub agreement: Agreement,
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerEndFlags {
    pub m: u32,
    pub alpha: f64,
    pub p_crit_fitted: Option<f64>,
    pub flags: ConsistencyFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SweepSummary {
    pub cells: usize,
    pub agreements: usize,
    pub disagreements: usize,
    pub excluded: usize,
    pub inconclusive: usize,
    pub flag_violations: usize,
    pub open_band_hits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTable {
    pub spec: SweepSpec,
    pub cells: Vec<PhaseCell>,
    pub ends: Vec<PowerEndFlags>,
    pub summary: SweepSummary,
}

/// `(m − 1) + 1/α`
pub fn analytic_p_crit(m: u32, alpha: f64) -> f64 {
    (m - 1) as f64 + 1.0 / alpha
}

fn compare(analytic: &str, numeric: &str, excluded: bool) -> Agreement {
    if excluded {
        Agreement::Excluded
    } else if numeric == "inconclusive" {
        Agreement::Inconclusive
    } else if analytic == numeric {
        Agreement::Agree
    } else {
        Agreement::Disagree
    }
}

fn sweep_one(m: u32, alpha: f64, ps: &[f64], cfg: &QuadratureConfig) -> Result<(Vec<PhaseCell>, PowerEndFlags), ClassifyError> {
    let end = power_revolution_end(m, alpha)?;
    let sig = end_signature(&end, ps, cfg)?;
    let margin = cfg.tail_margin;
    let mut cells = Vec::with_capacity(ps.len() + 2);

    // ∫ t^{α(m−1)} dt always diverges for α > 0.
    let numeric = sig.volume.label().to_string();
    cells.push(PhaseCell {
        m,
        alpha,
        quantity: Quantity::Volume,
        p: None,
        agreement: compare("diverges", &numeric, false),
        analytic: "diverges".into(),
        numeric,
        notes: "volume".into(),
    });

    // Capacity density ~ t^{−α(m−1)}.
    let exponent_gap = alpha * (m - 1) as f64 - 1.0;
    let analytic = if exponent_gap <= 0.0 { "parabolic" } else { "non_parabolic" };
    let numeric = match sig.parabolicity.verdict {
        ParabolicityVerdict::Parabolic => "parabolic",
        ParabolicityVerdict::NonParabolic => "non_parabolic",
        ParabolicityVerdict::Inconclusive => "inconclusive",
    };
    let excluded = exponent_gap.abs() <= margin;
    let mut notes = "parabolicity".to_string();
    if excluded {
        notes.push_str("; α(m−1) within the tail margin of 1");
    }
    if !sig.parabolicity.agreement {
        notes.push_str("; volume-growth test disagrees with the capacity integral");
    }
    cells.push(PhaseCell {
        m,
        alpha,
        quantity: Quantity::Parabolicity,
        p: None,
        analytic: analytic.into(),
        numeric: numeric.into(),
        agreement: compare(analytic, numeric, excluded),
        notes,
    });

    // |H|^p dV ~ t^{α(m−1−p)}: integrable iff p > p_crit.
    let p_crit = analytic_p_crit(m, alpha);
    for e in &sig.lp_map {
        let analytic = if e.p > p_crit { "converges" } else { "diverges" };
        let numeric = e.verdict.label();
        let excluded = (alpha * (e.p - p_crit)).abs() <= margin;
        let notes = if excluded {
            format!("L^p; within the tail margin of p_crit = {p_crit}")
        } else {
            "L^p".to_string()
        };
        cells.push(PhaseCell {
            m,
            alpha,
            quantity: Quantity::MeanCurvature,
            p: Some(e.p),
            analytic: analytic.into(),
            numeric: numeric.into(),
            agreement: compare(analytic, numeric, excluded),
            notes,
        });
    }
    let flags = consistency_flags(&sig, cfg);
    Ok((
        cells,
        PowerEndFlags {
            m,
            alpha,
            p_crit_fitted: sig.thresholds.p_crit,
            flags,
        },
    ))
}

/// Numeric phase diagram of the power family against the closed-form
/// thresholds. Ends are analysed in parallel; the table is in grid order.
pub fn sweep_power_family(spec: &SweepSpec, cfg: &QuadratureConfig) -> Result<PhaseTable, ClassifyError> {
    spec.validate()?;
    cfg.validate()?;
    let ps = validate_p_grid(&spec.p_grid)?;
    let pairs: Vec<(u32, f64)> = spec
        .dimensions
        .iter()
        .flat_map(|&m| spec.alphas.iter().map(move |&a| (m, a)))
        .collect();
    let results = pairs
        .par_iter()
        .map(|&(m, a)| sweep_one(m, a, &ps, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cells = Vec::new();
    let mut ends = Vec::new();
    for (c, e) in results {
        cells.extend(c);
        ends.push(e);
    }
    let mut summary = SweepSummary {
        cells: cells.len(),
        ..Default::default()
    };
    for c in &cells {
        match c.agreement {
            Agreement::Agree => summary.agreements += 1,
            Agreement::Disagree => summary.disagreements += 1,
            Agreement::Excluded => summary.excluded += 1,
            Agreement::Inconclusive => summary.inconclusive += 1,
        }
    }
    summary.flag_violations = ends.iter().filter(|e| e.flags.has_violation()).count();
    summary.open_band_hits = ends.iter().filter(|e| e.flags.has_hit()).count();
    Ok(PhaseTable {
        spec: spec.clone(),
        cells,
        ends,
        summary,
    })
}

impl PhaseTable {
    pub fn to_csv(&self) -> Result<String, ClassifyError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| ClassifyError::Output(e.to_string());
        w.write_record(CSV_HEADER).map_err(io)?;
        for c in &self.cells {
            w.write_record([
                c.m.to_string(),
                c.alpha.to_string(),
                c.p.map(|p| p.to_string()).unwrap_or_default(),
                c.analytic.clone(),
                c.numeric.clone(),
                c.agreement.label().to_string(),
                c.notes.clone(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| ClassifyError::Output(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| ClassifyError::Output(e.to_string()))
    }

    pub fn all_conclusive_agree(&self) -> bool {
        self.summary.disagreements == 0
    }
}
