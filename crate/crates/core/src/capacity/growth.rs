use serde::{Deserialize, Serialize};

use super::CapacityError;
use crate::geometry::ModelEnd;
use crate::integrand;
use crate::quadrature::{ConvergenceVerdict, HalfLine, QuadratureConfig, DEFAULT_TAIL_DOUBLINGS};

/// Nodes per octave of the cumulative table.
const NODES_PER_OCTAVE: i32 = 8;

/// Octaves of `t - t0` covered by the reported `V(s)` samples.
const SAMPLE_OCTAVES: i32 = 22;

/// Cumulative arc length `s(t)` and volume `V(t)` from `t0`, tabulated at
/// `t0 + 2^{j/8} - 1` and refined by one local integral per lookup.
#[derive(Debug, Clone)]
pub(crate) struct RadialTable {
    end: ModelEnd,
    cfg: QuadratureConfig,
    nodes: Vec<f64>,
    arc: Vec<f64>,
    volume: Vec<f64>,
}

impl RadialTable {
    pub(crate) fn new(end: &ModelEnd, t_last: f64, cfg: &QuadratureConfig) -> Result<Self, CapacityError> {
        let t0 = end.t0();
        let t_last = t_last.min(end.t_max());
        let mut nodes = vec![t0];
        let mut j = 1;
        loop {
            let t = t0 + 2f64.powf(j as f64 / NODES_PER_OCTAVE as f64) - 1.0;
            if t >= t_last {
                if *nodes.last().unwrap() < t_last {
                    nodes.push(t_last);
                }
                break;
            }
            nodes.push(t);
            j += 1;
        }
        let mut table = Self {
            end: end.clone(),
            cfg: QuadratureConfig {
                abs_tol: f64::MIN_POSITIVE,
                ..*cfg
            },
            nodes,
            arc: vec![0.0],
            volume: vec![0.0],
        };
        for i in 1..table.nodes.len() {
            let (a, b) = (table.nodes[i - 1], table.nodes[i]);
            let (ds, dv) = table.pieces(a, b)?;
            table.arc.push(table.arc[i - 1] + ds);
            table.volume.push(table.volume[i - 1] + dv);
        }
        Ok(table)
    }

    fn pieces(&self, a: f64, b: f64) -> Result<(f64, f64), CapacityError> {
        if a == b {
            return Ok((0.0, 0.0));
        }
        let ds = integrand::integrate(
            |t| -> Result<f64, CapacityError> { Ok(self.end.radial_factor(t)?) },
            a,
            b,
            &self.cfg,
        )?;
        let dv = integrand::integrate(
            |t| -> Result<f64, CapacityError> { Ok(self.end.volume_element(t)?) },
            a,
            b,
            &self.cfg,
        )?;
        Ok((ds.value, dv.value))
    }

    pub(crate) fn t_last(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// `(s(t), V(t))`.
    pub(crate) fn at(&self, t: f64) -> Result<(f64, f64), CapacityError> {
        if t < self.nodes[0] || t > self.t_last() {
            return Err(CapacityError::InvalidRadii(format!(
                "t = {t} outside the tabulated range [{}, {}]",
                self.nodes[0],
                self.t_last()
            )));
        }
        let j = (self.nodes.partition_point(|&x| x <= t) - 1).min(self.nodes.len() - 1);
        let (ds, dv) = self.pieces(self.nodes[j], t)?;
        Ok((self.arc[j] + ds, self.volume[j] + dv))
    }

    /// Smallest `t` with `s(t) = s`, by safeguarded Newton on the table.
    pub(crate) fn invert_arc(&self, s: f64) -> Result<f64, CapacityError> {
        if s <= 0.0 {
            return Ok(self.nodes[0]);
        }
        let j = self.arc.partition_point(|&x| x < s);
        if j >= self.arc.len() {
            return Err(CapacityError::InvalidRadii(format!(
                "arc length {s} beyond the tabulated range {}",
                self.arc[self.arc.len() - 1]
            )));
        }
        let (mut lo, mut hi) = (self.nodes[j - 1], self.nodes[j]);
        let mut t = 0.5 * (lo + hi);
        for _ in 0..100 {
            let (st, _) = self.at(t)?;
            let r = st - s;
            if r.abs() <= 1e-14 * s.max(1.0) {
                break;
            }
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let step = t - r / self.end.radial_factor(t)?;
            t = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
            if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
                break;
            }
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub t: f64,
    pub arc_length: f64,
    pub volume: f64,
}

/// `V(s)` along the end and the `∫^∞ s / V(s) ds` criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeGrowth {
    pub samples: Vec<GrowthSample>,
    /// Slope of `ln V` against `ln s` over the last dyadic windows.
    pub exponent: Option<f64>,
    pub criterion: ConvergenceVerdict,
    /// The criterion integral diverges, which forces parabolicity.
    pub implies_parabolic: bool,
}

fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Measures the growth of `V(s)` and classifies `∫^∞ s / V(s) ds`.
///
/// The criterion is integrated in `t` as `∫ s(t) a(t) / V(t) dt` from
/// `t0 + 1`, where `V` is already positive. Divergence implies the end is
/// parabolic; convergence says nothing.
pub fn volume_growth_test(end: &ModelEnd, cfg: &QuadratureConfig) -> Result<VolumeGrowth, CapacityError> {
    let t0 = end.t0();
    let t_start = t0 + 1.0;
    let anchor = t_start.max(1.0);
    let reach = (anchor * 2f64.powi(DEFAULT_TAIL_DOUBLINGS as i32 + 1)).max(t0 + 2f64.powi(SAMPLE_OCTAVES));
    let table = RadialTable::new(end, reach, cfg)?;

    let mut samples = Vec::new();
    for k in 0..=SAMPLE_OCTAVES {
        let t = t0 + 2f64.powi(k) - 1.0;
        if t > table.t_last() {
            break;
        }
        let (s, v) = table.at(t)?;
        samples.push(GrowthSample {
            t,
            arc_length: s,
            volume: v,
        });
    }
    let fit: Vec<(f64, f64)> = samples
        .iter()
        .filter(|p| p.arc_length > 0.0 && p.volume > 0.0)
        .map(|p| (p.arc_length.ln(), p.volume.ln()))
        .collect();
    let keep = (cfg.tail_windows + 1).min(fit.len());
    let exponent = if fit.len() >= 3 {
        fit_slope(&fit[fit.len() - keep..])
    } else {
        None
    };

    let criterion = integrand::classify(
        |t| -> Result<f64, CapacityError> {
            let (s, v) = table.at(t)?;
            Ok(s * end.radial_factor(t)? / v)
        },
        HalfLine::Upper(t_start),
        cfg,
    );
    let implies_parabolic = criterion.diverges();
    Ok(VolumeGrowth {
        samples,
        exponent,
        criterion,
        implies_parabolic,
    })
}
