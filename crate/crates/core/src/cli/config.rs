//! Run configuration, read from TOML.
//!
//! ```toml
//! p_grid = [2.0, 3.0, 4.0]
//! radii = [1.0, 2.0, 4.0]        # outer radii, measured from t0
//! sobolev_constant = 1.0         # enables the energy trace and volume bound
//! inconclusive = "warn"          # or "fail" (default)
//!
//! [quadrature]
//! rel_tol = 1e-10
//!
//! [rayleigh]
//! width = 20.0
//! n = 2000
//!
//! [[ends]]
//! name = "neck"
//! m = 4
//! builtin = "gaussian_neck"
//!
//! [[ends]]
//! name = "paraboloid"
//! m = 3
//! t0 = 1.0
//! profile = { family = "power", params = { exponent = 0.5 } }
//!
//! [sweep]
//! dimensions = [3]
//! alphas = [0.45, 1.0]
//! p_grid = [2.0, 4.5]
//! ```
//!
//! An end is either `builtin`, or a `profile` for a revolution hypersurface,
//! or a `profile` (the warp `g`) together with `radial` (`a`) and `omega` for
//! an abstract warped end.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{SweepSpec, P_RANGE};
use crate::geometry::{AbstractCurvature, BuiltinEnd, ModelEnd, ProfileFn};
use crate::quadrature::QuadratureConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    /// Semantic error; `line` is 1-based when the offending key could be located.
    #[error("{path}{}: {message}", line.map(|l| format!(":{l}")).unwrap_or_default())]
    Invalid {
        path: String,
        line: Option<usize>,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InconclusivePolicy {
    #[default]
    Fail,
    Warn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayleighSpec {
    /// Support `[t0, t0 + width]`.
    pub width: f64,
    #[serde(default = "default_rayleigh_n")]
    pub n: usize,
}

fn default_rayleigh_n() -> usize {
    2000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndConfig {
    pub name: String,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<BuiltinEnd>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial: Option<ProfileFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curvature: Option<AbstractCurvature>,
}

impl EndConfig {
    pub fn builtin(name: &str, end: BuiltinEnd, m: u32) -> Self {
        Self {
            name: name.to_string(),
            m,
            t0: None,
            builtin: Some(end),
            profile: None,
            radial: None,
            omega: None,
            curvature: None,
        }
    }

    pub fn build(&self) -> Result<ModelEnd, String> {
        let end = match (&self.builtin, &self.profile, &self.radial) {
            (Some(b), None, None) => {
                if self.omega.is_some() || self.curvature.is_some() {
                    return Err("builtin ends take no omega or curvature".into());
                }
                let e = b.build(self.m).map_err(|e| e.to_string())?;
                match self.t0 {
                    Some(t0) => e.with_t0(t0).map_err(|e| e.to_string())?,
                    None => e,
                }
            }
            (None, Some(f), None) => {
                if self.omega.is_some() || self.curvature.is_some() {
                    return Err("omega and curvature need a radial profile".into());
                }
                let t0 = self.t0.unwrap_or(f.t_min().max(0.0));
                ModelEnd::revolution(f.clone(), self.m, t0).map_err(|e| e.to_string())?
            }
            (None, Some(g), Some(a)) => {
                let omega = self.omega.ok_or("warped ends need omega")?;
                let t0 = self.t0.unwrap_or(g.t_min().max(a.t_min()).max(0.0));
                ModelEnd::warped(a.clone(), g.clone(), omega, self.m, t0, self.curvature.unwrap_or_default())
                    .map_err(|e| e.to_string())?
            }
            (None, None, _) => return Err("end needs either builtin or profile".into()),
            (Some(_), _, _) => return Err("builtin cannot be combined with profile or radial".into()),
        };
        Ok(end)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: ".".into() }
    }
}

pub fn default_p_grid() -> Vec<f64> {
    vec![2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 8.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_p_grid")]
    pub p_grid: Vec<f64>,
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sobolev_constant: Option<f64>,
    #[serde(default)]
    pub inconclusive: InconclusivePolicy,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rayleigh: Option<RayleighSpec>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub ends: Vec<EndConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            p_grid: default_p_grid(),
            radii: Vec::new(),
            sobolev_constant: None,
            inconclusive: InconclusivePolicy::default(),
            quadrature: QuadratureConfig::default(),
            rayleigh: None,
            output: OutputConfig::default(),
            ends: Vec::new(),
            sweep: None,
        }
    }
}

/// 1-based line of the first line in `src` whose trimmed text starts with
/// `prefix`, skipping `skip` earlier matches.
fn find_line(src: &str, prefix: &str, skip: usize) -> Option<usize> {
    src.lines()
        .enumerate()
        .filter(|(_, l)| l.trim_start().starts_with(prefix))
        .nth(skip)
        .map(|(i, _)| i + 1)
}

/// Line of `key` inside the `table` section (or at top level for `None`).
fn find_key(src: &str, table: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, line) in src.lines().enumerate() {
        let l = line.trim_start();
        if l.starts_with('[') {
            current = Some(l.trim_matches(|c| c == '[' || c == ']' || c == ' ').to_string());
            continue;
        }
        let in_table = match (table, &current) {
            (None, None) => true,
            (Some(t), Some(c)) => t == c,
            _ => false,
        };
        if in_table && l.starts_with(key) && l[key.len()..].trim_start().starts_with('=') {
            return Some(i + 1);
        }
        // dotted or inline form, e.g. `sweep.alphas = ...`
        if table.is_some_and(|t| l.starts_with(&format!("{t}.{key}"))) {
            return Some(i + 1);
        }
    }
    None
}

impl RunConfig {
    pub fn from_toml(src: &str, path: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(src).map_err(|e| ConfigError::Parse {
            path: path.to_string(),
            message: e.to_string(),
        })?;
        cfg.validate_with_source(src, path)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let shown = path.display().to_string();
        let src = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: shown.clone(),
            message: e.to_string(),
        })?;
        Self::from_toml(&src, &shown)
    }

    pub fn to_toml(&self) -> Result<String, toml::ser::Error> {
        toml::to_string(self)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.validate_with_source("", "<config>")
    }

    /// Checks everything that can be checked before any computation.
    /// Line numbers are looked up in `src` when it is available.
    pub fn validate_with_source(&self, src: &str, path: &str) -> Result<(), ConfigError> {
        let err = |line: Option<usize>, message: String| ConfigError::Invalid {
            path: path.to_string(),
            line,
            message,
        };
        let top = |key: &str| find_key(src, None, key);

        if let Err(e) = self.quadrature.validate() {
            return Err(err(find_line(src, "[quadrature]", 0), e.to_string()));
        }
        if self.p_grid.is_empty() {
            return Err(err(top("p_grid"), "p_grid is empty".into()));
        }
        let (lo, hi) = P_RANGE;
        if let Some(p) = self.p_grid.iter().find(|p| !(**p >= lo && **p <= hi)) {
            return Err(err(top("p_grid"), format!("p = {p} outside [{lo}, {hi}]")));
        }
        let mut sorted = self.p_grid.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(err(top("p_grid"), "p_grid has duplicate entries".into()));
        }
        if self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(err(top("radii"), "radii must be positive and finite".into()));
        }
        if self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(err(top("radii"), "radii must be strictly increasing".into()));
        }
        if let Some(s) = self.sobolev_constant {
            if !(s.is_finite() && s > 0.0) {
                return Err(err(top("sobolev_constant"), "sobolev_constant must be positive".into()));
            }
        }
        if let Some(r) = &self.rayleigh {
            if !(r.width.is_finite() && r.width > 0.0) {
                return Err(err(find_key(src, Some("rayleigh"), "width"), "rayleigh width must be positive".into()));
            }
            if r.n < 32 {
                return Err(err(find_key(src, Some("rayleigh"), "n"), "rayleigh n must be at least 32".into()));
            }
        }
        if self.output.dir.is_empty() {
            return Err(err(find_key(src, Some("output"), "dir"), "output dir is empty".into()));
        }
        if self.ends.is_empty() && self.sweep.is_none() {
            return Err(err(None, "no ends defined".into()));
        }
        let mut names = HashSet::new();
        for (i, e) in self.ends.iter().enumerate() {
            let line = find_line(src, "[[ends]]", i);
            if e.name.trim().is_empty() {
                return Err(err(line, format!("end #{} has an empty name", i + 1)));
            }
            if !names.insert(e.name.as_str()) {
                return Err(err(line, format!("duplicate end name '{}'", e.name)));
            }
            if let Err(msg) = e.build() {
                return Err(err(line, format!("end '{}': {msg}", e.name)));
            }
        }
        if let Some(s) = &self.sweep {
            if let Err(e) = s.validate() {
                let key = match e.to_string() {
                    m if m.contains('α') => "alphas",
                    m if m.contains("dimension") => "dimensions",
                    _ => "p_grid",
                };
                let line = find_key(src, Some("sweep"), key).or_else(|| find_line(src, "[sweep]", 0));
                return Err(err(line, format!("sweep: {e}")));
            }
        }
        Ok(())
    }

    /// Tolerances can only be tightened from the command line.
    pub fn apply_tolerance(&mut self, tol: f64) {
        if tol.is_finite() && tol > 0.0 {
            self.quadrature.rel_tol = self.quadrature.rel_tol.min(tol);
            self.quadrature.abs_tol = self.quadrature.abs_tol.min(tol);
        }
    }
}
