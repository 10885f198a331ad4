use serde::{Deserialize, Serialize};

use super::{integrate, ConvergenceVerdict, Estimate, QuadratureConfig, QuadratureError, TailModel};

/// Number of dyadic windows scanned past the anchor (truncation cap `2^20 · a`).
pub const DEFAULT_TAIL_DOUBLINGS: u32 = 20;

/// Window-exponent distance from −1 below which a tail is read as `c/t`.
pub const LOG_TAIL_TOLERANCE: f64 = 2e-3;

/// Consecutive zero windows after which the integrand counts as eventually zero.
const ZERO_RUN: usize = 3;

/// Slack for calling a sequence of window exponents monotone.
const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfLine {
    /// `[a, ∞)`
    Upper(f64),
    /// `(-∞, b]`
    Lower(f64),
}

#[derive(Debug, Clone, Copy)]
struct Window {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

enum ScanEnd {
    Complete,
    Overflow,
}

struct TailScan {
    finite: Estimate,
    windows: Vec<Window>,
    end: ScanEnd,
}

/// Integrates `[a, anchor]` directly and then `[anchor 2^k, anchor 2^{k+1}]`
/// window by window.
fn scan<F>(f: &mut F, a: f64, cfg: &QuadratureConfig, doublings: u32) -> Result<TailScan, String>
where
    F: FnMut(f64) -> f64,
{
    let anchor = if a >= 1.0 { a } else { 1.0 };
    let finite = if anchor > a {
        match integrate(&mut *f, a, anchor, cfg) {
            Ok(e) => e,
            Err(QuadratureError::MaxDepthExceeded {
                partial,
                error_bound,
            }) => Estimate {
                value: partial,
                error_bound,
            },
            Err(e) => return Err(format!("finite part [{a}, {anchor}]: {e}")),
        }
    } else {
        Estimate::exact(0.0)
    };

    // windows are resolved to relative accuracy only: their ratios drive the fit
    let win_cfg = QuadratureConfig {
        abs_tol: f64::MIN_POSITIVE,
        ..*cfg
    };
    let mut windows = Vec::with_capacity(doublings as usize);
    let mut zeros = 0;
    for k in 0..doublings {
        let lo = anchor * 2f64.powi(k as i32);
        let hi = 2.0 * lo;
        let est = match integrate(&mut *f, lo, hi, &win_cfg) {
            Ok(e) => e,
            Err(QuadratureError::MaxDepthExceeded {
                partial,
                error_bound,
            }) => Estimate {
                value: partial,
                error_bound,
            },
            Err(QuadratureError::NonFiniteSample { value, .. }) if value == f64::INFINITY => {
                return Ok(TailScan {
                    finite,
                    windows,
                    end: ScanEnd::Overflow,
                })
            }
            Err(e) => return Err(format!("window [{lo}, {hi}]: {e}")),
        };
        if est.value < 0.0 && est.value.abs() > est.error_bound {
            return Err(format!(
                "integrand is not eventually nonnegative (window [{lo}, {hi}] integrates to {})",
                est.value
            ));
        }
        let value = est.value.max(0.0);
        windows.push(Window {
            lo,
            hi,
            value,
            error: est.error_bound,
        });
        zeros = if value == 0.0 { zeros + 1 } else { 0 };
        if zeros >= ZERO_RUN {
            break;
        }
    }
    Ok(TailScan {
        finite,
        windows,
        end: ScanEnd::Complete,
    })
}

/// Exponential rate from the last window pairs, accepted when the two most
/// recent slopes of `ln W` agree to 5%.
fn exp_fit(windows: &[Window]) -> TailModel {
    let pos: Vec<&Window> = windows.iter().filter(|w| w.value > 0.0).collect();
    if pos.len() < 3 {
        return TailModel::Unknown;
    }
    let tail = &pos[pos.len() - 3..];
    // growth concentrates at the right end of each window, decay at the left
    let growing = tail[2].value > tail[1].value;
    let x = |w: &Window| if growing { w.hi } else { w.lo };
    let slope = |p: &Window, q: &Window| (q.value.ln() - p.value.ln()) / (x(q) - x(p));
    let s1 = slope(tail[0], tail[1]);
    let s2 = slope(tail[1], tail[2]);
    if s2 != 0.0 && ((s2 - s1) / s2).abs() <= 0.05 {
        TailModel::ExpTail { rate: s2 }
    } else {
        TailModel::Unknown
    }
}

fn geometric_remainder(last: f64, ratio: f64) -> f64 {
    if ratio < 1.0 {
        last * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

fn decide(scan: TailScan, cfg: &QuadratureConfig) -> ConvergenceVerdict {
    let TailScan {
        finite,
        windows,
        end,
    } = scan;

    if let ScanEnd::Overflow = end {
        return ConvergenceVerdict::Diverges {
            rate: exp_fit(&windows),
        };
    }

    let summed = windows.iter().fold(finite, |acc, w| {
        acc + Estimate {
            value: w.value,
            error_bound: w.error,
        }
    });
    let last_positive = windows.iter().rposition(|w| w.value > 0.0);
    match last_positive {
        None => {
            return ConvergenceVerdict::Converges {
                value: summed.value,
                error_bound: summed.error_bound,
            }
        }
        Some(i) if i + 1 < windows.len() => {
            // trailing zero windows: the tail has vanished (or underflowed)
            return ConvergenceVerdict::Converges {
                value: summed.value,
                error_bound: summed.error_bound,
            };
        }
        Some(_) => {}
    }

    let n = (cfg.tail_windows + 1).min(windows.len());
    if n < 3 {
        return ConvergenceVerdict::inconclusive("too few tail windows to fit an exponent");
    }
    let tail = &windows[windows.len() - n..];
    if tail.iter().any(|w| w.value <= 0.0) {
        return ConvergenceVerdict::inconclusive("intermittent zero windows in the tail");
    }
    let ratios: Vec<f64> = tail.windows(2).map(|p| p[1].value / p[0].value).collect();
    let betas: Vec<f64> = ratios.iter().map(|r| r.log2() - 1.0).collect();
    let beta = *betas.last().unwrap();
    let spread = betas.iter().cloned().fold(f64::MIN, f64::max)
        - betas.iter().cloned().fold(f64::MAX, f64::min);
    let stable = spread <= 0.25 * cfg.tail_margin;
    let non_increasing = betas.windows(2).all(|p| p[1] <= p[0] + MONOTONE_SLACK);
    let non_decreasing = betas.windows(2).all(|p| p[1] >= p[0] - MONOTONE_SLACK);

    let w_last = tail[n - 1].value;
    let rho_last = ratios[ratios.len() - 1];
    let rho_prev = ratios[ratios.len() - 2];
    let converges = |tail_error: f64| {
        let remainder = geometric_remainder(w_last, rho_last);
        ConvergenceVerdict::Converges {
            value: summed.value + remainder,
            error_bound: summed.error_bound + tail_error + 4.0 * f64::EPSILON * remainder,
        }
    };

    if stable {
        if (beta + 1.0).abs() <= LOG_TAIL_TOLERANCE {
            return ConvergenceVerdict::Diverges {
                rate: TailModel::PowerTail { exponent: -1.0 },
            };
        }
        if beta < -1.0 - cfg.tail_margin {
            let r_last = geometric_remainder(w_last, rho_last);
            let r_prev = geometric_remainder(w_last, rho_prev);
            let drift = if r_prev.is_finite() {
                2.0 * (r_last - r_prev).abs()
            } else {
                r_last
            };
            return converges(drift);
        }
        if beta > -1.0 + cfg.tail_margin {
            return ConvergenceVerdict::Diverges {
                rate: TailModel::PowerTail { exponent: beta },
            };
        }
        return ConvergenceVerdict::inconclusive(format!(
            "tail exponent {beta:.4} lies in the critical band around -1"
        ));
    }

    if non_increasing && beta < -1.0 - cfg.tail_margin {
        // decay accelerating past every power: remainder bounded by the geometric one
        return converges(geometric_remainder(w_last, rho_last));
    }
    if non_decreasing && beta > -1.0 + cfg.tail_margin {
        return ConvergenceVerdict::Diverges {
            rate: exp_fit(tail),
        };
    }
    if non_decreasing || non_increasing {
        ConvergenceVerdict::inconclusive(format!(
            "tail exponent still drifting (last {beta:.4}, spread {spread:.4})"
        ))
    } else {
        ConvergenceVerdict::inconclusive(format!(
            "window exponents disagree (spread {spread:.4})"
        ))
    }
}

fn classify_upper<F>(mut f: F, a: f64, cfg: &QuadratureConfig, doublings: u32) -> ConvergenceVerdict
where
    F: FnMut(f64) -> f64,
{
    if let Err(e) = cfg.validate() {
        return ConvergenceVerdict::inconclusive(e.to_string());
    }
    if !a.is_finite() {
        return ConvergenceVerdict::inconclusive("half-line start must be finite");
    }
    match scan(&mut f, a, cfg, doublings) {
        Ok(s) => decide(s, cfg),
        Err(reason) => ConvergenceVerdict::Inconclusive { reason },
    }
}

/// Classifies `∫ f` over a half-line as convergent, divergent or inconclusive.
///
/// The integral is split at the anchor `max(a, 1)` into a finite part and
/// dyadic windows `[2^k anchor, 2^{k+1} anchor]`, `k < 20`. Ratios of
/// successive window integrals give local tail exponents `β`
/// (`W_{k+1}/W_k = 2^{β+1}` for `f ~ t^β`). A stable exponent at −1 is a
/// logarithmic tail and diverges; stable exponents outside
/// `−1 ± tail_margin` decide by sign; exponents that keep falling (rising)
/// past the band are read as exponential decay (growth). Anything else is
/// `Inconclusive` with a reason.
///
/// Convergent values add a geometric extrapolation of the last window ratio
/// for the part beyond the cap; its drift enters the error bound.
pub fn classify_improper<F>(f: F, half_line: HalfLine, cfg: &QuadratureConfig) -> ConvergenceVerdict
where
    F: FnMut(f64) -> f64,
{
    classify_improper_capped(f, half_line, cfg, DEFAULT_TAIL_DOUBLINGS)
}

/// [`classify_improper`] with an explicit number of dyadic windows.
pub fn classify_improper_capped<F>(
    mut f: F,
    half_line: HalfLine,
    cfg: &QuadratureConfig,
    doublings: u32,
) -> ConvergenceVerdict
where
    F: FnMut(f64) -> f64,
{
    match half_line {
        HalfLine::Upper(a) => classify_upper(f, a, cfg, doublings),
        HalfLine::Lower(b) => classify_upper(|t| f(-t), -b, cfg, doublings),
    }
}

/// Classifies `∫_ℝ f` as the sum of the two half-lines split at `split`.
pub fn classify_improper_line<F>(mut f: F, split: f64, cfg: &QuadratureConfig) -> ConvergenceVerdict
where
    F: FnMut(f64) -> f64,
{
    let upper = classify_improper(&mut f, HalfLine::Upper(split), cfg);
    let lower = classify_improper(&mut f, HalfLine::Lower(split), cfg);
    match (upper, lower) {
        (
            ConvergenceVerdict::Converges {
                value: v1,
                error_bound: e1,
            },
            ConvergenceVerdict::Converges {
                value: v2,
                error_bound: e2,
            },
        ) => ConvergenceVerdict::Converges {
            value: v1 + v2,
            error_bound: e1 + e2,
        },
        (d @ ConvergenceVerdict::Diverges { .. }, _) | (_, d @ ConvergenceVerdict::Diverges { .. }) => d,
        (i @ ConvergenceVerdict::Inconclusive { .. }, _)
        | (_, i @ ConvergenceVerdict::Inconclusive { .. }) => i,
    }
}

fn accept(verdict: ConvergenceVerdict, cfg: &QuadratureConfig) -> Result<Estimate, QuadratureError> {
    match verdict {
        ConvergenceVerdict::Converges { value, error_bound } => {
            if error_bound <= cfg.tolerance_for(value) {
                Ok(Estimate { value, error_bound })
            } else {
                Err(QuadratureError::TailUnresolved { value, error_bound })
            }
        }
        ConvergenceVerdict::Diverges { rate } => Err(QuadratureError::NotConvergent(format!(
            "integral diverges ({rate:?})"
        ))),
        ConvergenceVerdict::Inconclusive { reason } => Err(QuadratureError::NotConvergent(reason)),
    }
}

/// Value of a convergent improper integral.
///
/// Refuses divergent and inconclusive integrals, and reports
/// `TailUnresolved` when the tail extrapolation cannot meet the configured
/// tolerance within the truncation cap.
pub fn improper_value<F>(f: F, half_line: HalfLine, cfg: &QuadratureConfig) -> Result<Estimate, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    accept(classify_improper(f, half_line, cfg), cfg)
}

/// Whole-line counterpart of [`improper_value`].
pub fn improper_value_line<F>(f: F, split: f64, cfg: &QuadratureConfig) -> Result<Estimate, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    accept(classify_improper_line(f, split, cfg), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn inverse_square_converges_to_one() {
        match classify_improper(|t| t.powi(-2), HalfLine::Upper(1.0), &cfg()) {
            ConvergenceVerdict::Converges { value, error_bound } => {
                assert!((value - 1.0).abs() < 1e-12);
                assert!(error_bound < 1e-10);
            }
            v => panic!("{v:?}"),
        }
        let e = improper_value(|t| t.powi(-2), HalfLine::Upper(1.0), &cfg()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn harmonic_tail_diverges_with_exponent_minus_one() {
        let v = classify_improper(|t| 1.0 / t, HalfLine::Upper(1.0), &cfg());
        assert_eq!(
            v,
            ConvergenceVerdict::Diverges {
                rate: TailModel::PowerTail { exponent: -1.0 }
            }
        );
    }

    #[test]
    fn lower_half_line_exponential() {
        // ∫_{-∞}^0 e^{2t} dt = 1/2
        let e = improper_value(|t: f64| (2.0 * t).exp(), HalfLine::Lower(0.0), &cfg()).unwrap();
        assert!((e.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exponential_growth_diverges() {
        let v = classify_improper(|t: f64| (0.5 * t).exp(), HalfLine::Upper(0.0), &cfg());
        assert!(v.diverges(), "{v:?}");
    }

    #[test]
    fn super_exponential_decay_and_growth() {
        let v = classify_improper(|t: f64| (-0.5 * t * t).exp(), HalfLine::Upper(0.0), &cfg());
        let expect = (std::f64::consts::PI / 2.0).sqrt();
        assert!((v.value().unwrap() - expect).abs() < 1e-10, "{v:?}");
        let g = classify_improper(|t: f64| (0.5 * t * t).exp(), HalfLine::Upper(0.0), &cfg());
        assert!(g.diverges());
    }

    #[test]
    fn identically_zero_converges_to_zero() {
        let v = classify_improper(|_| 0.0, HalfLine::Upper(1.0), &cfg());
        assert_eq!(
            v,
            ConvergenceVerdict::Converges {
                value: 0.0,
                error_bound: 0.0
            }
        );
    }

    #[test]
    fn critical_band_is_inconclusive() {
        let v = classify_improper(|t: f64| t.powf(-1.02), HalfLine::Upper(1.0), &cfg());
        assert!(v.is_inconclusive(), "{v:?}");
    }

    #[test]
    fn refuses_divergent_value() {
        assert!(matches!(
            improper_value(|t| 1.0 / t, HalfLine::Upper(1.0), &cfg()),
            Err(QuadratureError::NotConvergent(_))
        ));
    }

    #[test]
    fn nan_integrand_is_inconclusive() {
        let v = classify_improper(|t: f64| if t > 100.0 { f64::NAN } else { 1.0 }, HalfLine::Upper(1.0), &cfg());
        assert!(v.is_inconclusive());
    }

    #[test]
    fn whole_line_gaussian() {
        let e = improper_value_line(|t: f64| (-t * t).exp(), 0.0, &cfg()).unwrap();
        assert!((e.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn power_exponent_reported_for_divergence() {
        match classify_improper(|t: f64| t.powf(-0.5), HalfLine::Upper(1.0), &cfg()) {
            ConvergenceVerdict::Diverges {
                rate: TailModel::PowerTail { exponent },
            } => assert!((exponent + 0.5).abs() < 1e-9),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn exponential_rate_fitted() {
        match classify_improper(|t: f64| (0.01 * t).exp(), HalfLine::Upper(1.0), &cfg()) {
            ConvergenceVerdict::Diverges {
                rate: TailModel::ExpTail { rate },
            } => assert!((rate - 0.01).abs() < 1e-3, "{rate}"),
            v => panic!("{v:?}"),
        }
    }
}
