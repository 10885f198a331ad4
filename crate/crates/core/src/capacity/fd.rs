use serde::{Deserialize, Serialize};

use super::CapacityError;
use crate::geometry::ModelEnd;
use crate::linalg::solve_tridiagonal;

/// Node values of the finite-difference solution on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdProfile {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

/// Conservative three-point discretization of `(W u')' = 0`, `W = ω g^{m-1}/a`,
/// with `u(t_in) = 1`, `u(t_out) = 0` and `W` taken at cell midpoints.
///
/// Independent of the quadrature path: it never integrates the capacity
/// density, only samples the flux weight.
pub fn fd_oracle(end: &ModelEnd, t_in: f64, t_out: f64, n: usize) -> Result<FdProfile, CapacityError> {
    if n < 16 {
        return Err(CapacityError::InvalidRadii(format!("grid size {n} below 16")));
    }
    if !(t_in.is_finite() && t_out.is_finite()) || t_in < end.t0() || t_out <= t_in {
        return Err(CapacityError::InvalidRadii(format!(
            "need t0 <= t_in < t_out < inf, got [{t_in}, {t_out}]"
        )));
    }
    let h = (t_out - t_in) / n as f64;
    let nodes: Vec<f64> = (0..=n).map(|i| t_in + h * i as f64).collect();
    let ln_w = (0..n)
        .map(|i| end.ln_flux_weight(t_in + h * (i as f64 + 0.5)))
        .collect::<Result<Vec<_>, _>>()?;
    let top = ln_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = ln_w.iter().map(|l| (l - top).exp()).collect();

    // unknowns u_1 .. u_{n-1}
    let k = n - 1;
    let mut lower = vec![0.0; k];
    let mut diag = vec![0.0; k];
    let mut upper = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    for j in 0..k {
        let (wl, wr) = (w[j], w[j + 1]);
        diag[j] = wl + wr;
        lower[j] = -wl;
        upper[j] = -wr;
    }
    rhs[0] = w[0];
    let interior = solve_tridiagonal(&lower, &diag, &upper, &rhs).ok_or(CapacityError::SingularSystem)?;

    let mut values = Vec::with_capacity(n + 1);
    values.push(1.0);
    values.extend(interior);
    values.push(0.0);
    Ok(FdProfile { nodes, values })
}
