//! Quadrature over integrands whose evaluation can fail.

use std::fmt::Display;

use crate::quadrature::{self, ConvergenceVerdict, Estimate, HalfLine, QuadratureConfig, QuadratureError};

/// Runs `body` with an infallible view of `f`: the first evaluation error is
/// kept and the sample becomes NaN, which stops the quadrature.
fn guarded<F, E, R>(mut f: F, body: impl FnOnce(&mut dyn FnMut(f64) -> f64) -> R) -> (R, Option<E>)
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let mut failure = None;
    let out = body(&mut |t| match f(t) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    });
    (out, failure)
}

pub(crate) fn integrate<F, E>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    let (est, failure) = guarded(f, |g| quadrature::integrate(g, a, b, cfg));
    match failure {
        Some(e) => Err(e),
        None => est.map_err(E::from),
    }
}

/// Improper classification; evaluation failures become `Inconclusive`.
pub(crate) fn classify<F, E>(f: F, half_line: HalfLine, cfg: &QuadratureConfig) -> ConvergenceVerdict
where
    F: FnMut(f64) -> Result<f64, E>,
    E: Display,
{
    let (verdict, failure) = guarded(f, |g| quadrature::classify_improper(g, half_line, cfg));
    match (failure, verdict) {
        (Some(e), ConvergenceVerdict::Inconclusive { .. }) => {
            ConvergenceVerdict::inconclusive(format!("profile evaluation failed: {e}"))
        }
        (_, v) => v,
    }
}
