use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Natural cubic spline through strictly increasing knots.
///
/// Second derivatives at the knots are obtained once at construction; the
/// interpolant is C² on `[knots[0], knots[n-1]]` and refuses to extrapolate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SplineData", into = "SplineData")]
pub struct NaturalCubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SplineData {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<SplineData> for NaturalCubicSpline {
    type Error = GeometryError;

    fn try_from(data: SplineData) -> Result<Self, Self::Error> {
        NaturalCubicSpline::new(data.knots, data.values)
    }
}

impl From<NaturalCubicSpline> for SplineData {
    fn from(s: NaturalCubicSpline) -> Self {
        SplineData {
            knots: s.knots,
            values: s.values,
        }
    }
}

impl NaturalCubicSpline {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self, GeometryError> {
        let n = knots.len();
        if n < 3 {
            return Err(GeometryError::InvalidParameter(
                "sampled profile needs at least 3 knots".into(),
            ));
        }
        if values.len() != n {
            return Err(GeometryError::InvalidParameter(format!(
                "sampled profile has {} knots but {} values",
                n,
                values.len()
            )));
        }
        if knots.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidParameter(
                "sampled profile contains non-finite data".into(),
            ));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GeometryError::InvalidParameter(
                "sampled profile knots must be strictly increasing".into(),
            ));
        }

        // Tridiagonal system for the interior second derivatives, natural ends.
        let mut second = vec![0.0; n];
        let m = n - 2;
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for i in 1..n - 1 {
            let h0 = knots[i] - knots[i - 1];
            let h1 = knots[i + 1] - knots[i];
            diag[i - 1] = 2.0 * (h0 + h1);
            upper[i - 1] = h1;
            rhs[i - 1] =
                6.0 * ((values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0);
        }
        // forward sweep; lower[i] == upper[i-1] by symmetry
        for i in 1..m {
            let w = upper[i - 1] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        if m > 0 {
            second[m] = rhs[m - 1] / diag[m - 1];
            for i in (0..m - 1).rev() {
                second[i + 1] = (rhs[i] - upper[i] * second[i + 2]) / diag[i];
            }
        }

        Ok(Self {
            knots,
            values,
            second,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn first_knot(&self) -> f64 {
        self.knots[0]
    }

    pub fn last_knot(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    /// Value, first and second derivative at `t`.
    pub fn eval(&self, t: f64) -> Result<[f64; 3], GeometryError> {
        let (lo, hi) = (self.first_knot(), self.last_knot());
        if !(lo..=hi).contains(&t) {
            return Err(GeometryError::OutsideKnots { t, lo, hi });
        }
        let i = match self.knots.partition_point(|&k| k <= t) {
            0 => 0,
            p if p >= self.knots.len() => self.knots.len() - 2,
            p => p - 1,
        };
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - t) / h;
        let b = (t - self.knots[i]) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        let d2 = a * m0 + b * m1;
        Ok([value, d1, d2])
    }
}
