use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::test_function::TestFunction;
use super::InequalityError;
use crate::geometry::{EndKind, ModelEnd, ProfileFamily};
use crate::integrand;
use crate::linalg::{smallest_eigenvalue_bisect, solve_tridiagonal};
use crate::quadrature::QuadratureConfig;

const INVERSE_ITERATION_MAX_STEPS: usize = 200;

fn tight(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig {
        rel_tol: cfg.rel_tol.min(1e-12),
        abs_tol: f64::MIN_POSITIVE,
        ..*cfg
    }
}

fn check_support(end: &ModelEnd, lo: f64, hi: f64) -> Result<(), InequalityError> {
    if lo < end.t0() || hi > end.t_max() || !(hi > lo) {
        return Err(InequalityError::OutsideEnd {
            lo,
            hi,
            t0: end.t0(),
            t_max: end.t_max(),
        });
    }
    Ok(())
}

/// Largest `ln dV` on a probe grid of `[lo, hi]`, used to rescale integrands.
fn ln_scale(end: &ModelEnd, lo: f64, hi: f64) -> Result<f64, InequalityError> {
    let mut s = f64::NEG_INFINITY;
    for k in 0..=32 {
        s = s.max(end.ln_volume_element(lo + (hi - lo) * k as f64 / 32.0)?);
    }
    Ok(s)
}

/// Integral over the support of `eta`, split at its breakpoints.
fn over_support<F>(eta: &TestFunction, mut f: F, cfg: &QuadratureConfig) -> Result<f64, InequalityError>
where
    F: FnMut(f64) -> Result<f64, InequalityError>,
{
    let b = eta.breakpoints();
    let mut total = 0.0;
    for w in b.windows(2) {
        total += integrand::integrate(&mut f, w[0], w[1], cfg)?.value;
    }
    Ok(total)
}

/// `∫ |∇η|² dV / ∫ η² dV` for a radial `η`, with `|∇η| = |η'| / a`.
pub fn rayleigh_quotient(end: &ModelEnd, eta: &TestFunction, cfg: &QuadratureConfig) -> Result<f64, InequalityError> {
    eta.validate()?;
    let (lo, hi) = eta.support();
    check_support(end, lo, hi)?;
    let cfg = tight(cfg);
    let shift = ln_scale(end, lo, hi)?;
    let num = over_support(
        eta,
        |t| {
            let (_, d) = eta.eval(t);
            Ok((2.0 * d.abs().ln() + end.ln_flux_weight(t)? - shift).exp())
        },
        &cfg,
    )?;
    let den = over_support(
        eta,
        |t| {
            let (v, _) = eta.eval(t);
            Ok((2.0 * v.abs().ln() + end.ln_volume_element(t)? - shift).exp())
        },
        &cfg,
    )?;
    if !(den > 0.0) {
        return Err(InequalityError::DegenerateTestFunction(format!(
            "{} has zero weighted L² norm",
            eta.label()
        )));
    }
    Ok(num / den)
}

/// Bottom-of-spectrum bound `(m−1)² r² / (4 c²)` for exponential warps
/// `c² dt² + e^{2rt} h_P`; `None` for other ends.
pub fn poincare_bound(end: &ModelEnd) -> Option<f64> {
    let EndKind::AbstractWarped { radial, .. } = end.kind() else {
        return None;
    };
    let (ProfileFamily::Constant { c }, ProfileFamily::ExpWarp { rate }) = (&radial.family, &end.warp().family) else {
        return None;
    };
    let k = (end.dimension() - 1) as f64 * rate.abs() / c;
    Some(k * k / 4.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub label: String,
    pub quotient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayleighReport {
    pub support: (f64, f64),
    pub grid: usize,
    /// Smallest eigenvalue of the discrete weighted problem.
    pub minimum: f64,
    pub iterations: usize,
    pub bound: Option<f64>,
    /// `minimum − bound`
    pub margin: Option<f64>,
    #[serde(default)]
    pub sweep: Vec<SweepEntry>,
    pub sweep_minimum: Option<f64>,
}

impl RayleighReport {
    /// Smallest quotient seen, over the eigen-solve and the parametric sweep.
    pub fn overall_minimum(&self) -> f64 {
        self.sweep_minimum.map_or(self.minimum, |s| s.min(self.minimum))
    }
}

/// Smallest discrete Rayleigh quotient over node functions on `support`
/// vanishing at both ends.
///
/// Stiffness uses the flux weight `W = ω g^{m-1}/a` at cell midpoints, mass
/// is lumped at nodes. The symmetric form `M^{-1/2} K M^{-1/2}` is
/// tridiagonal; its bottom eigenvalue is bracketed by Sturm bisection and then
/// polished by shifted inverse iteration.
pub fn rayleigh_minimize(end: &ModelEnd, support: (f64, f64), n: usize) -> Result<RayleighReport, InequalityError> {
    let (lo, hi) = support;
    if n < 32 {
        return Err(InequalityError::GridTooSmall(n));
    }
    check_support(end, lo, hi)?;
    let h = (hi - lo) / n as f64;
    let ln_w: Vec<f64> = (0..n)
        .map(|i| end.ln_flux_weight(lo + h * (i as f64 + 0.5)))
        .collect::<Result<_, _>>()?;
    let ln_rho: Vec<f64> = (1..n)
        .map(|i| end.ln_volume_element(lo + h * i as f64))
        .collect::<Result<_, _>>()?;
    // Entries are ratios W / ρ, formed in log space so that weights spanning
    // many orders of magnitude neither underflow nor overflow.
    let k = n - 1;
    let h2 = h * h;
    let diag: Vec<f64> = (0..k)
        .map(|j| ((ln_w[j] - ln_rho[j]).exp() + (ln_w[j + 1] - ln_rho[j]).exp()) / h2)
        .collect();
    let off: Vec<f64> = (0..k - 1)
        .map(|j| -(ln_w[j + 1] - 0.5 * (ln_rho[j] + ln_rho[j + 1])).exp() / h2)
        .collect();

    let estimate = smallest_eigenvalue_bisect(&diag, &off, 1e-9);
    // shift strictly below the spectrum keeps B − σI positive definite
    let sigma = estimate - 1e-6 * estimate.abs().max(f64::MIN_POSITIVE);
    let shifted: Vec<f64> = diag.iter().map(|d| d - sigma).collect();
    let mut lower = vec![0.0; k];
    lower[1..].copy_from_slice(&off);
    let mut upper = vec![0.0; k];
    upper[..k - 1].copy_from_slice(&off);

    let apply = |x: &[f64]| -> Vec<f64> {
        (0..k)
            .map(|j| {
                diag[j] * x[j]
                    + if j > 0 { off[j - 1] * x[j - 1] } else { 0.0 }
                    + if j + 1 < k { off[j] * x[j + 1] } else { 0.0 }
            })
            .collect()
    };
    let mut x = vec![1.0; k];
    let mut rq = f64::INFINITY;
    for step in 1..=INVERSE_ITERATION_MAX_STEPS {
        let y = solve_tridiagonal(&lower, &shifted, &upper, &x).ok_or(InequalityError::SingularSystem)?;
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y.iter().map(|v| v / norm).collect();
        let bx = apply(&x);
        let next = x.iter().zip(&bx).map(|(a, b)| a * b).sum::<f64>();
        if (next - rq).abs() <= 1e-14 * next.abs() {
            let bound = poincare_bound(end);
            return Ok(RayleighReport {
                support,
                grid: n,
                minimum: next,
                iterations: step,
                bound,
                margin: bound.map(|b| next - b),
                sweep: Vec::new(),
                sweep_minimum: None,
            });
        }
        rq = next;
    }
    Err(InequalityError::NotConverged(INVERSE_ITERATION_MAX_STEPS))
}

/// Parametric test functions covering `support`: bumps, tents and tilted
/// cosines at several widths and positions.
///
/// The cosine tilt follows `−½ (ln dV)'` averaged over the support, which is
/// the exponential weight that balances the volume element.
pub fn default_test_functions(end: &ModelEnd, support: (f64, f64)) -> Result<Vec<TestFunction>, InequalityError> {
    let (lo, hi) = support;
    check_support(end, lo, hi)?;
    let len = hi - lo;
    let tau = -(end.ln_volume_element(hi)? - end.ln_volume_element(lo)?) / (2.0 * len);
    let mut out = Vec::new();
    for frac in [1.0, 0.8, 0.6, 0.4, 0.2] {
        let w = frac * len;
        let centers: Vec<f64> = if frac == 1.0 {
            vec![lo + len / 2.0]
        } else {
            (0..3).map(|j| lo + w / 2.0 + j as f64 * (len - w) / 2.0).collect()
        };
        for c in centers {
            out.push(TestFunction::bump(c, w)?);
            out.push(TestFunction::tent(c, w)?);
            for k in [0.0, 0.5, 1.0, 1.5] {
                out.push(TestFunction::truncated_cosine(c, w, k * tau)?);
            }
        }
    }
    Ok(out)
}

/// Rayleigh quotients of `functions`, in input order.
pub fn rayleigh_sweep(
    end: &ModelEnd,
    functions: &[TestFunction],
    cfg: &QuadratureConfig,
) -> Result<Vec<SweepEntry>, InequalityError> {
    functions
        .par_iter()
        .map(|f| {
            Ok(SweepEntry {
                label: f.label(),
                quotient: rayleigh_quotient(end, f, cfg)?,
            })
        })
        .collect()
}

/// Discrete minimum on `support` together with the default parametric sweep.
pub fn rayleigh_report(
    end: &ModelEnd,
    support: (f64, f64),
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<RayleighReport, InequalityError> {
    let mut rep = rayleigh_minimize(end, support, n)?;
    let sweep = rayleigh_sweep(end, &default_test_functions(end, support)?, cfg)?;
    rep.sweep_minimum = sweep.iter().map(|e| e.quotient).min_by(f64::total_cmp);
    if let (Some(b), Some(s)) = (rep.bound, rep.sweep_minimum) {
        rep.margin = Some(rep.minimum.min(s) - b);
    }
    rep.sweep = sweep;
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HkResidual {
    /// `∫ η² Δh dV`
    pub laplacian_term: f64,
    /// `2 ∫ η ⟨∇η, ∇h⟩ dV`
    pub gradient_term: f64,
    pub residual: f64,
}

/// Integration by parts for `h(t) = κ t`: `∫ η² Δh + 2 ∫ η ⟨∇η, ∇h⟩ = 0`.
///
/// On the end `∇h = κ ∂_t / a²` and `Δh = κ Δt`; both terms are integrated
/// separately and the residual is the absolute value of their sum.
pub fn hk_identity_check(
    end: &ModelEnd,
    kappa: f64,
    eta: &TestFunction,
    cfg: &QuadratureConfig,
) -> Result<HkResidual, InequalityError> {
    if !kappa.is_finite() {
        return Err(InequalityError::InvalidParameter(format!("kappa = {kappa}")));
    }
    eta.validate()?;
    let (lo, hi) = eta.support();
    check_support(end, lo, hi)?;
    let cfg = tight(cfg);
    let lap = over_support(
        eta,
        |t| {
            let (v, _) = eta.eval(t);
            Ok(v * v * end.laplacian_of_radius(t)? * end.volume_element(t)?)
        },
        &cfg,
    )?;
    let grad = over_support(
        eta,
        |t| {
            let (v, d) = eta.eval(t);
            let a = end.radial_factor(t)?;
            Ok(v * d / (a * a) * end.volume_element(t)?)
        },
        &cfg,
    )?;
    let laplacian_term = kappa * lap;
    let gradient_term = 2.0 * kappa * grad;
    Ok(HkResidual {
        laplacian_term,
        gradient_term,
        residual: (laplacian_term + gradient_term).abs(),
    })
}
