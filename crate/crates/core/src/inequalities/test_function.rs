use serde::{Deserialize, Serialize};

use super::InequalityError;

/// Shape of a compactly supported radial test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// `exp(1 − 1/(1 − x²))` with `x = 2(t − center)/width`.
    Bump { center: f64, width: f64 },
    /// `1 − |x|`.
    Tent { center: f64, width: f64 },
    /// `e^{tilt (t − center)} cos(π (t − center) / width)`.
    TruncatedCosine { center: f64, width: f64, tilt: f64 },
    /// Piecewise linear through `(knots[i], values[i])`, zero at both ends.
    Nodes { knots: Vec<f64>, values: Vec<f64> },
}

/// `η(t) = amplitude · shape(t)`, zero outside its support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    #[serde(flatten)]
    pub shape: Shape,
    #[serde(default = "unit")]
    pub amplitude: f64,
}

fn unit() -> f64 {
    1.0
}

impl TestFunction {
    pub fn new(shape: Shape) -> Result<Self, InequalityError> {
        let f = Self {
            shape,
            amplitude: 1.0,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn bump(center: f64, width: f64) -> Result<Self, InequalityError> {
        Self::new(Shape::Bump { center, width })
    }

    pub fn tent(center: f64, width: f64) -> Result<Self, InequalityError> {
        Self::new(Shape::Tent { center, width })
    }

    pub fn truncated_cosine(center: f64, width: f64, tilt: f64) -> Result<Self, InequalityError> {
        Self::new(Shape::TruncatedCosine { center, width, tilt })
    }

    pub fn nodes(knots: Vec<f64>, values: Vec<f64>) -> Result<Self, InequalityError> {
        Self::new(Shape::Nodes { knots, values })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            amplitude: self.amplitude * factor,
        }
    }

    pub fn validate(&self) -> Result<(), InequalityError> {
        let bad = |msg: &str| Err(InequalityError::DegenerateTestFunction(msg.to_string()));
        if !(self.amplitude.is_finite() && self.amplitude != 0.0) {
            return bad("amplitude must be finite and nonzero");
        }
        match &self.shape {
            Shape::Bump { center, width } | Shape::Tent { center, width } => {
                if !(center.is_finite() && width.is_finite() && *width > 0.0) {
                    return bad("support must have positive finite width");
                }
            }
            Shape::TruncatedCosine { center, width, tilt } => {
                if !(center.is_finite() && width.is_finite() && *width > 0.0 && tilt.is_finite()) {
                    return bad("support must have positive finite width and finite tilt");
                }
            }
            Shape::Nodes { knots, values } => {
                if knots.len() < 3 || knots.len() != values.len() {
                    return bad("node function needs at least 3 knots with matching values");
                }
                if knots.windows(2).any(|w| !(w[1] > w[0])) || knots.iter().chain(values).any(|v| !v.is_finite()) {
                    return bad("knots must be finite and strictly increasing");
                }
                if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
                    return bad("node function must vanish at both ends");
                }
                if values.iter().all(|v| *v == 0.0) {
                    return bad("node function is identically zero");
                }
            }
        }
        Ok(())
    }

    /// Closed support `[lo, hi]`.
    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Bump { center, width }
            | Shape::Tent { center, width }
            | Shape::TruncatedCosine { center, width, .. } => (center - width / 2.0, center + width / 2.0),
            Shape::Nodes { knots, .. } => (knots[0], knots[knots.len() - 1]),
        }
    }

    /// Points where `η'` may jump; quadrature splits there.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.support();
        match &self.shape {
            Shape::Tent { center, .. } => vec![lo, *center, hi],
            Shape::Nodes { knots, .. } => knots.clone(),
            _ => vec![lo, hi],
        }
    }

    /// `(η(t), η'(t))`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let (lo, hi) = self.support();
        if t <= lo || t >= hi {
            return (0.0, 0.0);
        }
        let (v, d) = match &self.shape {
            Shape::Bump { center, width } => {
                let hw = width / 2.0;
                let x = (t - center) / hw;
                let q = 1.0 - x * x;
                let v = (1.0 - 1.0 / q).exp();
                (v, v * (-2.0 * x / (q * q)) / hw)
            }
            Shape::Tent { center, width } => {
                let hw = width / 2.0;
                let x = (t - center) / hw;
                (1.0 - x.abs(), -x.signum() / hw)
            }
            Shape::TruncatedCosine { center, width, tilt } => {
                let u = t - center;
                let k = std::f64::consts::PI / width;
                let e = (tilt * u).exp();
                let (s, c) = (k * u).sin_cos();
                (e * c, e * (tilt * c - k * s))
            }
            Shape::Nodes { knots, values } => {
                let j = (knots.partition_point(|&k| k <= t) - 1).min(knots.len() - 2);
                let slope = (values[j + 1] - values[j]) / (knots[j + 1] - knots[j]);
                (values[j] + slope * (t - knots[j]), slope)
            }
        };
        (self.amplitude * v, self.amplitude * d)
    }

    pub fn label(&self) -> String {
        match &self.shape {
            Shape::Bump { center, width } => format!("bump(c={center}, w={width})"),
            Shape::Tent { center, width } => format!("tent(c={center}, w={width})"),
            Shape::TruncatedCosine { center, width, tilt } => {
                format!("cosine(c={center}, w={width}, tilt={tilt})")
            }
            Shape::Nodes { knots, .. } => format!("nodes(n={})", knots.len()),
        }
    }
}
