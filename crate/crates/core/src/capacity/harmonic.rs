use serde::{Deserialize, Serialize};

use super::CapacityError;
use crate::geometry::ModelEnd;
use crate::integrand;
use crate::quadrature::{ConvergenceVerdict, HalfLine, QuadratureConfig};

/// Tolerance used for the resistance integrals behind every profile.
pub(crate) const PROFILE_REL_TOL: f64 = 1e-13;

fn profile_cfg(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig {
        rel_tol: cfg.rel_tol.min(PROFILE_REL_TOL),
        // values are rescaled, so only relative accuracy is meaningful
        abs_tol: f64::MIN_POSITIVE,
        ..*cfg
    }
}

/// Radial solution of `Δf = 0` on `t_in < t < t_out` with `f(t_in) = 1` and
/// `f(t_out) = 0` (or `f → 0` at infinity).
///
/// With `Q(u, v) = ∫_u^v a / g^{m-1}` the solution is
/// `f(t) = Q(t, t_out) / Q(t_in, t_out)`. `Q` is tabulated on a node set and
/// scaled by `e^{-shift}` so that ends with fast-growing capacity density stay
/// representable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarmonicProfile {
    t_in: f64,
    /// `None` for the limit profile on the whole end.
    t_out: Option<f64>,
    /// Natural log of the total resistance `Q(t_in, t_out)`.
    ln_resistance: f64,
    #[serde(skip)]
    table: Option<ProfileTable>,
}

#[derive(Debug, Clone)]
struct ProfileTable {
    end: ModelEnd,
    cfg: QuadratureConfig,
    nodes: Vec<f64>,
    /// `Q(t_in, nodes[j])`, scaled
    left: Vec<f64>,
    /// `Q(nodes[j], t_out)`, scaled
    right: Vec<f64>,
    shift: f64,
}

fn node_set(t_in: f64, t_out: f64) -> Vec<f64> {
    let span = t_out - t_in;
    let mut nodes: Vec<f64> = (0..=64).map(|k| t_in + span * k as f64 / 64.0).collect();
    let mut j = 0;
    loop {
        let t = t_in + (2f64.powi(j) - 1.0) * span.min(1.0) / 64.0;
        if t >= t_out {
            break;
        }
        nodes.push(t);
        j += 1;
    }
    nodes.push(t_out);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    nodes
}

impl ProfileTable {
    fn piece(&self, a: f64, b: f64) -> Result<f64, CapacityError> {
        if a == b {
            return Ok(0.0);
        }
        let shift = self.shift;
        let est = integrand::integrate(
            |t| -> Result<f64, CapacityError> { Ok((self.end.ln_capacity_density(t)? - shift).exp()) },
            a,
            b,
            &self.cfg,
        )?;
        Ok(est.value)
    }

    fn tail(&self, t: f64) -> Result<f64, CapacityError> {
        let shift = self.shift;
        let verdict = integrand::classify(
            |x| -> Result<f64, CapacityError> { Ok((self.end.ln_capacity_density(x)? - shift).exp()) },
            HalfLine::Upper(t),
            &self.cfg,
        );
        match verdict {
            ConvergenceVerdict::Converges { value, .. } => Ok(value),
            v => Err(CapacityError::Inconclusive(format!(
                "capacity tail beyond {t} is not convergent: {}",
                v.label()
            ))),
        }
    }

    /// Scaled `(Q(t_in, t), Q(t, t_out))`.
    fn split(&self, t: f64) -> Result<(f64, f64), CapacityError> {
        let last = self.nodes.len() - 1;
        if t >= self.nodes[last] {
            // only reachable for the unbounded profile
            let right = self.tail(t)?;
            let total = self.left[last] + self.right[last];
            return Ok(((total - right).max(0.0), right));
        }
        let j = self.nodes.partition_point(|&x| x <= t) - 1;
        let (x0, x1) = (self.nodes[j], self.nodes[j + 1]);
        let cell = self.left[j + 1] - self.left[j];
        if t - x0 <= x1 - t {
            let p = self.piece(x0, t)?;
            Ok((self.left[j] + p, self.right[j + 1] + (cell - p).max(0.0)))
        } else {
            let q = self.piece(t, x1)?;
            Ok((self.left[j] + (cell - q).max(0.0), self.right[j + 1] + q))
        }
    }
}

impl HarmonicProfile {
    /// Solves the annular problem on `[t_in, t_out]`.
    pub fn dirichlet(
        end: &ModelEnd,
        t_in: f64,
        t_out: f64,
        cfg: &QuadratureConfig,
    ) -> Result<Self, CapacityError> {
        if !(t_in.is_finite() && t_out.is_finite()) || t_in < end.t0() || t_out <= t_in {
            return Err(CapacityError::InvalidRadii(format!(
                "need t0 = {} <= t_in < t_out < inf, got t_in = {t_in}, t_out = {t_out}",
                end.t0()
            )));
        }
        Self::build(end, t_in, Some(t_out), cfg)
    }

    /// Limit profile `Q(t, ∞) / Q(t_in, ∞)`; requires a convergent capacity integral.
    pub fn limit(end: &ModelEnd, t_in: f64, cfg: &QuadratureConfig) -> Result<Self, CapacityError> {
        if !t_in.is_finite() || t_in < end.t0() {
            return Err(CapacityError::InvalidRadii(format!(
                "inner radius {t_in} outside the end"
            )));
        }
        Self::build(end, t_in, None, cfg)
    }

    fn build(
        end: &ModelEnd,
        t_in: f64,
        t_out: Option<f64>,
        cfg: &QuadratureConfig,
    ) -> Result<Self, CapacityError> {
        let cfg = profile_cfg(cfg);
        let hi = t_out.unwrap_or(t_in + 2f64.powi(20));
        let nodes = node_set(t_in, hi);
        let mut shift = f64::NEG_INFINITY;
        for &t in &nodes {
            shift = shift.max(end.ln_capacity_density(t)?);
        }
        let mut table = ProfileTable {
            end: end.clone(),
            cfg,
            nodes,
            left: Vec::new(),
            right: Vec::new(),
            shift,
        };
        let mut cells = Vec::with_capacity(table.nodes.len() - 1);
        for w in table.nodes.windows(2) {
            cells.push(table.piece(w[0], w[1])?);
        }
        let beyond = match t_out {
            Some(_) => 0.0,
            None => table.tail(hi)?,
        };
        let n = table.nodes.len();
        let mut left = vec![0.0; n];
        for j in 1..n {
            left[j] = left[j - 1] + cells[j - 1];
        }
        let mut right = vec![0.0; n];
        right[n - 1] = beyond;
        for j in (0..n - 1).rev() {
            right[j] = right[j + 1] + cells[j];
        }
        let total = right[0];
        if !(total > 0.0 && total.is_finite()) {
            return Err(CapacityError::Degenerate(format!(
                "resistance integral on [{t_in}, {hi}] is {total} after scaling"
            )));
        }
        table.left = left;
        table.right = right;
        Ok(Self {
            t_in,
            t_out,
            ln_resistance: total.ln() + shift,
            table: Some(table),
        })
    }

    fn table(&self) -> Result<&ProfileTable, CapacityError> {
        self.table.as_ref().ok_or_else(|| {
            CapacityError::Degenerate("profile was deserialized without its end".into())
        })
    }

    pub fn t_in(&self) -> f64 {
        self.t_in
    }

    /// Outer radius; `None` for the limit profile.
    pub fn t_out(&self) -> Option<f64> {
        self.t_out
    }

    /// `ln Q(t_in, t_out)`.
    pub fn ln_resistance(&self) -> f64 {
        self.ln_resistance
    }

    /// Capacity `ω / Q(t_in, t_out)` of the annulus, equal to the Dirichlet energy of `f`.
    pub fn capacity(&self) -> Result<f64, CapacityError> {
        Ok((self.table()?.end.omega().ln() - self.ln_resistance).exp())
    }

    /// `f(t)`, extended by 0 past `t_out`.
    pub fn eval(&self, t: f64) -> Result<f64, CapacityError> {
        if t < self.t_in {
            return Err(CapacityError::InvalidRadii(format!(
                "t = {t} lies inside the inner boundary {}",
                self.t_in
            )));
        }
        if t == self.t_in {
            return Ok(1.0);
        }
        if let Some(out) = self.t_out {
            if t >= out {
                return Ok(0.0);
            }
        }
        let (l, r) = self.table()?.split(t)?;
        Ok((r / (l + r)).clamp(0.0, 1.0))
    }

    pub fn eval_many(&self, ts: &[f64]) -> Result<Vec<f64>, CapacityError> {
        ts.iter().map(|&t| self.eval(t)).collect()
    }

    /// `f'(t) = -(a / g^{m-1})(t) / Q`.
    pub fn derivative(&self, t: f64) -> Result<f64, CapacityError> {
        let table = self.table()?;
        if t < self.t_in || self.t_out.is_some_and(|o| t > o) {
            return Err(CapacityError::InvalidRadii(format!("t = {t} outside the annulus")));
        }
        Ok(-(table.end.ln_capacity_density(t)? - self.ln_resistance).exp())
    }
}
