use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{EndConfig, RunConfig};
use crate::capacity::{energy_trace, exhaustion_limit, EnergyTrace, ExhaustionReport};
use crate::classify::{consistency_flags, end_signature, ConsistencyFlags, EndSignature, PhaseTable};
use crate::inequalities::{rayleigh_report, volume_lower_bound_check, RayleighReport, VolumeBoundReport};
use crate::quadrature::QuadratureConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// Probes per harmonic-profile table.
const PROFILE_PROBES: usize = 65;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndReport {
    pub name: String,
    pub signature: EndSignature,
    pub flags: ConsistencyFlags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rayleigh: Option<RayleighReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustion: Option<ExhaustionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyTrace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume_bound: Option<VolumeBoundReport>,
    /// Analyses that failed outright.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

impl EndReport {
    pub fn has_inconclusive(&self) -> bool {
        self.signature.has_inconclusive() || !self.errors.is_empty()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub schema_version: u32,
    /// SHA-256 of the effective configuration.
    pub config_hash: String,
    pub ends: Vec<EndReport>,
    pub sweep: Option<PhaseTable>,
}

/// Wall time per stage, kept out of the report so that reports are
/// byte-identical across runs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Timing {
    pub stages: Vec<(String, f64)>,
}

impl Timing {
    pub fn time<T>(&mut self, stage: impl Into<String>, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.stages.push((stage.into(), start.elapsed().as_secs_f64()));
        out
    }
}

pub fn config_hash(cfg: &RunConfig) -> String {
    let canonical = serde_json::to_vec(cfg).expect("config serializes");
    Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn new(cfg: &RunConfig) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            schema_version: SCHEMA_VERSION,
            config_hash: config_hash(cfg),
            ends: Vec::new(),
            sweep: None,
        }
    }
}

fn analyze_end(e: &EndConfig, run: &RunConfig, qcfg: &QuadratureConfig) -> Result<EndReport, String> {
    let end = e.build()?;
    let signature = end_signature(&end, &run.p_grid, qcfg).map_err(|err| err.to_string())?;
    let flags = consistency_flags(&signature, qcfg);
    let mut errors = Vec::new();
    let t0 = end.t0();

    let rayleigh = run.rayleigh.as_ref().and_then(|r| {
        rayleigh_report(&end, (t0, t0 + r.width), r.n, qcfg)
            .map_err(|err| errors.push(format!("rayleigh: {err}")))
            .ok()
    });

    let outer: Vec<f64> = run.radii.iter().map(|r| t0 + r).collect();
    let exhaustion = if outer.is_empty() {
        None
    } else {
        let span = outer[outer.len() - 1] - t0;
        let probes: Vec<f64> = (0..PROFILE_PROBES)
            .map(|i| t0 + span * i as f64 / (PROFILE_PROBES - 1) as f64)
            .collect();
        exhaustion_limit(&end, &outer, &probes, qcfg)
            .map_err(|err| errors.push(format!("exhaustion: {err}")))
            .ok()
    };

    let (energy, volume_bound) = match run.sobolev_constant {
        Some(s) if !outer.is_empty() => {
            let energy = if end.dimension() >= 3 {
                energy_trace(&end, t0, &outer, s, qcfg)
                    .map_err(|err| errors.push(format!("energy trace: {err}")))
                    .ok()
            } else {
                None
            };
            let bound = volume_lower_bound_check(&end, s, &run.radii, None, qcfg)
                .map_err(|err| errors.push(format!("volume bound: {err}")))
                .ok();
            (energy, bound)
        }
        _ => (None, None),
    };

    Ok(EndReport {
        name: e.name.clone(),
        signature,
        flags,
        rayleigh,
        exhaustion,
        energy,
        volume_bound,
        errors,
    })
}

/// Runs every per-end analysis, ends in parallel, results in config order.
pub fn analyze_ends(run: &RunConfig) -> Result<Vec<EndReport>, String> {
    let qcfg = run.quadrature;
    run.ends
        .par_iter()
        .map(|e| analyze_end(e, run, &qcfg).map_err(|msg| format!("end '{}': {msg}", e.name)))
        .collect()
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report serializes");
    out.push(b'\n');
    out
}
