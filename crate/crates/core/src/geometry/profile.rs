use serde::{Deserialize, Serialize};

use super::spline::NaturalCubicSpline;
use super::GeometryError;

/// Asymptotic continuation attached to a sampled profile past its last knot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SampledTail {
    /// `f(t) = f(t_n) (t / t_n)^exponent` for `t > t_n`.
    Power { exponent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledProfile {
    #[serde(flatten)]
    pub spline: NaturalCubicSpline,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<SampledTail>,
}

/// The analytic families a profile can belong to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum ProfileFamily {
    /// `f(t) = (t + offset)^exponent`
    #[serde(rename = "power")]
    PowerLaw {
        exponent: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `f(t) = exp(-scale t²)`
    GaussianNeck { scale: f64 },
    /// `f(t) = exp(rate t)`
    ExpWarp { rate: f64 },
    Constant { c: f64 },
    Sampled(SampledProfile),
}

/// A positive C² function on a half-line `[t_min, ∞)`.
///
/// `t_min` may be omitted, in which case the family default applies: 1 for
/// power laws, the first knot for sampled data, and -∞ for the entire
/// families (Gaussian neck, exponential warp, constant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileFn {
    #[serde(flatten)]
    pub family: ProfileFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
}

/// Evaluation of a profile in logarithmic form.
///
/// Derivatives are stored relative to the value (`f'/f`, `f''/f`) so that
/// profiles whose values under- or overflow in the tails still produce usable
/// geometry; `value()` and friends recover the plain quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileEval {
    pub ln_value: f64,
    pub rel_d1: f64,
    pub rel_d2: f64,
}

impl ProfileEval {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }

    pub fn d1(&self) -> f64 {
        self.rel_d1 * self.value()
    }

    pub fn d2(&self) -> f64 {
        self.rel_d2 * self.value()
    }

    /// `ln(1 + f'²)`, computed without forming `f'²` when it would overflow.
    pub fn ln_one_plus_d1_sq(&self) -> f64 {
        if self.rel_d1 == 0.0 {
            return 0.0;
        }
        let x = 2.0 * (self.ln_value + self.rel_d1.abs().ln());
        ln1p_exp(x)
    }
}

/// `ln(1 + e^x)` without overflow.
pub(crate) fn ln1p_exp(x: f64) -> f64 {
    if x > 36.0 {
        x + (-x).exp()
    } else {
        x.exp().ln_1p()
    }
}

impl ProfileFn {
    pub fn new(family: ProfileFamily, t_min: Option<f64>) -> Result<Self, GeometryError> {
        let p = Self { family, t_min };
        p.validate()?;
        Ok(p)
    }

    pub fn power(exponent: f64, offset: f64, t_min: f64) -> Result<Self, GeometryError> {
        Self::new(ProfileFamily::PowerLaw { exponent, offset }, Some(t_min))
    }

    pub fn gaussian_neck(scale: f64) -> Result<Self, GeometryError> {
        Self::new(ProfileFamily::GaussianNeck { scale }, None)
    }

    pub fn exp_warp(rate: f64) -> Result<Self, GeometryError> {
        Self::new(ProfileFamily::ExpWarp { rate }, None)
    }

    pub fn constant(c: f64) -> Result<Self, GeometryError> {
        Self::new(ProfileFamily::Constant { c }, None)
    }

    pub fn sampled(
        knots: Vec<f64>,
        values: Vec<f64>,
        tail: Option<SampledTail>,
    ) -> Result<Self, GeometryError> {
        let spline = NaturalCubicSpline::new(knots, values)?;
        Self::new(ProfileFamily::Sampled(SampledProfile { spline, tail }), None)
    }

    /// Left end of the domain, with family defaults resolved.
    pub fn t_min(&self) -> f64 {
        if let Some(t) = self.t_min {
            return t;
        }
        match &self.family {
            ProfileFamily::PowerLaw { .. } => 1.0,
            ProfileFamily::Sampled(s) => s.spline.first_knot(),
            _ => f64::NEG_INFINITY,
        }
    }

    /// Right end of the domain: finite only for sampled data without a tail.
    pub fn t_max(&self) -> f64 {
        match &self.family {
            ProfileFamily::Sampled(s) if s.tail.is_none() => s.spline.last_knot(),
            _ => f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |msg: String| Err(GeometryError::InvalidParameter(msg));
        if let Some(t) = self.t_min {
            if !t.is_finite() {
                return bad("t_min must be finite when given".into());
            }
        }
        match &self.family {
            ProfileFamily::PowerLaw { exponent, offset } => {
                if !exponent.is_finite() || !offset.is_finite() {
                    return bad("power profile parameters must be finite".into());
                }
                // base must stay positive on the whole domain; for exponent < 1
                // this also keeps the derivative singularity out.
                if self.t_min() + offset <= 0.0 {
                    return bad(format!(
                        "power profile needs t_min + offset > 0 (got {} + {})",
                        self.t_min(),
                        offset
                    ));
                }
            }
            ProfileFamily::GaussianNeck { scale } => {
                if !(scale.is_finite() && *scale > 0.0) {
                    return bad("gaussian_neck scale must be positive".into());
                }
            }
            ProfileFamily::ExpWarp { rate } => {
                if !rate.is_finite() {
                    return bad("exp_warp rate must be finite".into());
                }
            }
            ProfileFamily::Constant { c } => {
                if !(c.is_finite() && *c > 0.0) {
                    return bad("constant profile must be positive".into());
                }
            }
            ProfileFamily::Sampled(s) => {
                if let Some(t) = self.t_min {
                    if t < s.spline.first_knot() {
                        return bad("sampled profile t_min precedes the first knot".into());
                    }
                }
                if s.spline.values().iter().any(|v| *v <= 0.0) {
                    return bad("sampled profile values must be positive".into());
                }
                if let Some(SampledTail::Power { exponent }) = s.tail {
                    if !exponent.is_finite() || s.spline.last_knot() <= 0.0 {
                        return bad(
                            "power tail needs a finite exponent and a positive last knot".into(),
                        );
                    }
                }
            }
        }
        Ok(())
    }

    /// Evaluate at `t`; errors outside the domain or where the value is not positive.
    pub fn eval(&self, t: f64) -> Result<ProfileEval, GeometryError> {
        let t_min = self.t_min();
        if t.is_nan() || t < t_min {
            return Err(GeometryError::Domain { t, t_min });
        }
        let e = match &self.family {
            ProfileFamily::PowerLaw { exponent, offset } => {
                let base = t + offset;
                ProfileEval {
                    ln_value: exponent * base.ln(),
                    rel_d1: exponent / base,
                    rel_d2: exponent * (exponent - 1.0) / (base * base),
                }
            }
            ProfileFamily::GaussianNeck { scale } => ProfileEval {
                ln_value: -scale * t * t,
                rel_d1: -2.0 * scale * t,
                rel_d2: 4.0 * scale * scale * t * t - 2.0 * scale,
            },
            ProfileFamily::ExpWarp { rate } => ProfileEval {
                ln_value: rate * t,
                rel_d1: *rate,
                rel_d2: rate * rate,
            },
            ProfileFamily::Constant { c } => ProfileEval {
                ln_value: c.ln(),
                rel_d1: 0.0,
                rel_d2: 0.0,
            },
            ProfileFamily::Sampled(s) => {
                let last = s.spline.last_knot();
                if t > last {
                    match s.tail {
                        Some(SampledTail::Power { exponent }) => {
                            let [v, _, _] = s.spline.eval(last)?;
                            if v <= 0.0 {
                                return Err(GeometryError::NonPositive { t: last, value: v });
                            }
                            ProfileEval {
                                ln_value: v.ln() + exponent * (t / last).ln(),
                                rel_d1: exponent / t,
                                rel_d2: exponent * (exponent - 1.0) / (t * t),
                            }
                        }
                        None => {
                            return Err(GeometryError::OutsideKnots {
                                t,
                                lo: s.spline.first_knot(),
                                hi: last,
                            })
                        }
                    }
                } else {
                    let [v, d1, d2] = s.spline.eval(t)?;
                    if v <= 0.0 {
                        return Err(GeometryError::NonPositive { t, value: v });
                    }
                    ProfileEval {
                        ln_value: v.ln(),
                        rel_d1: d1 / v,
                        rel_d2: d2 / v,
                    }
                }
            }
        };
        if e.ln_value.is_nan() || e.ln_value == f64::NEG_INFINITY {
            return Err(GeometryError::NonPositive {
                t,
                value: e.ln_value.exp(),
            });
        }
        Ok(e)
    }

    pub fn value(&self, t: f64) -> Result<f64, GeometryError> {
        Ok(self.eval(t)?.value())
    }

    pub fn is_sampled_without_tail(&self) -> bool {
        matches!(&self.family, ProfileFamily::Sampled(s) if s.tail.is_none())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn families() -> Vec<ProfileFn> {
        vec![
            ProfileFn::power(0.5, 0.0, 1.0).unwrap(),
            ProfileFn::power(1.0 / 3.0, 0.5, 1.0).unwrap(),
            ProfileFn::power(1.0, 0.0, 0.5).unwrap(),
            ProfileFn::gaussian_neck(1.0).unwrap(),
            ProfileFn::exp_warp(-1.0).unwrap(),
            ProfileFn::constant(2.0).unwrap(),
            ProfileFn::sampled(
                (0..12).map(|i| 1.0 + i as f64).collect(),
                (0..12).map(|i| (1.0 + i as f64).sqrt()).collect(),
                Some(SampledTail::Power { exponent: 0.5 }),
            )
            .unwrap(),
        ]
    }

    // Three-point central differences: error ~ h², so halving h quarters it.
    #[test]
    fn analytic_derivatives_match_central_differences() {
        for p in families() {
            let start = p.t_min().max(-2.0);
            for k in 0..10 {
                let t = start + 0.3 + 0.37 * k as f64;
                let e = p.eval(t).unwrap();
                let fd = |h: f64| {
                    let (l, c, r) = (p.value(t - h).unwrap(), e.value(), p.value(t + h).unwrap());
                    ((r - l) / (2.0 * h), (r - 2.0 * c + l) / (h * h))
                };
                let (d1a, d2a) = fd(1e-3);
                let (d1b, _) = fd(5e-4);
                let err_a = (d1a - e.d1()).abs();
                let err_b = (d1b - e.d1()).abs();
                let scale = e.value().abs().max(1e-300);
                assert!(err_a <= 1e-5 * scale.max(e.d1().abs()) + 1e-12, "{p:?} t={t}");
                if err_a > 1e-10 {
                    assert!(err_b < 0.35 * err_a, "not second order for {p:?} at {t}");
                }
                // sampled data is only C² with piecewise-linear f'', skip the knots there
                if !matches!(p.family, ProfileFamily::Sampled(_)) {
                    assert!((d2a - e.d2()).abs() <= 1e-4 * (1.0 + e.d2().abs()), "{p:?}");
                }
            }
        }
    }

    #[test]
    fn rejects_points_left_of_domain() {
        let p = ProfileFn::power(0.5, 0.0, 1.0).unwrap();
        assert!(matches!(p.eval(0.5), Err(GeometryError::Domain { .. })));
    }

    #[test]
    fn power_below_one_requires_positive_start() {
        assert!(ProfileFn::power(0.5, 0.0, 0.0).is_err());
        assert_eq!(
            ProfileFn::new(
                ProfileFamily::PowerLaw {
                    exponent: 0.5,
                    offset: 0.0
                },
                None
            )
            .unwrap()
            .t_min(),
            1.0
        );
    }

    #[test]
    fn gaussian_log_value_survives_underflow() {
        let p = ProfileFn::gaussian_neck(1.0).unwrap();
        let e = p.eval(40.0).unwrap();
        assert_eq!(e.value(), 0.0);
        assert_eq!(e.ln_value, -1600.0);
        assert_eq!(e.ln_one_plus_d1_sq(), 0.0);
    }

    #[test]
    fn sampled_without_tail_refuses_extrapolation() {
        let p = ProfileFn::sampled(vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0], None).unwrap();
        assert!(p.eval(3.5).is_err());
        assert_eq!(p.t_max(), 3.0);
    }

    #[test]
    fn negative_spline_value_is_domain_error() {
        let p = ProfileFn::sampled(vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 0.01, 0.01, 1.0], None)
            .unwrap();
        let dipped = (0..300)
            .map(|i| i as f64 * 0.01)
            .any(|t| matches!(p.eval(t), Err(GeometryError::NonPositive { .. })));
        assert!(dipped);
    }

    #[test]
    fn config_record_shape() {
        let p = ProfileFn::power(0.5, 0.0, 1.0).unwrap();
        let json = serde_json::to_value(&p).unwrap();
        assert_eq!(json["family"], "power");
        assert_eq!(json["params"]["exponent"], 0.5);
        assert_eq!(json["t_min"], 1.0);
        let back: ProfileFn = serde_json::from_value(json).unwrap();
        assert_eq!(back, p);

        let g: ProfileFn =
            serde_json::from_str(r#"{"family":"gaussian_neck","params":{"scale":1.0}}"#).unwrap();
        assert_eq!(g.t_min(), f64::NEG_INFINITY);
    }
}
