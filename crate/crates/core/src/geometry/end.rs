use serde::{Deserialize, Serialize};

use super::profile::{ProfileEval, ProfileFn};
use super::GeometryError;
use crate::quadrature::{self, Estimate, QuadratureConfig};

pub const MIN_DIMENSION: u32 = 2;
pub const MAX_DIMENSION: u32 = 64;

/// Mean-curvature information available for an abstract warped product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AbstractCurvature {
    /// No immersion is attached; L^p statements about `H` are not available.
    #[default]
    Unknown,
    /// Realised as a minimal immersion (for instance the flat end of a hyperplane).
    Minimal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EndKind {
    /// `(v, t) ↦ (f(t) v, t)` in Euclidean space; `a = √(1+f'²)`, `g = f`.
    RevolutionHypersurface,
    /// Metric `a(t)² dt² + g(t)² h_P`, with `a` given explicitly.
    AbstractWarped {
        radial: ProfileFn,
        #[serde(default)]
        curvature: AbstractCurvature,
    },
}

/// A rotationally symmetric end `[t0, ∞) × P` with metric `a² dt² + g² h_P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEnd {
    m: u32,
    t0: f64,
    warp: ProfileFn,
    omega: f64,
    kind: EndKind,
}

/// Pointwise geometry at one radial position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricSample {
    pub t: f64,
    pub area: f64,
    pub volume_element: f64,
    /// `None` when the end carries no immersion.
    pub mean_curvature_norm: Option<f64>,
    pub arc_length: f64,
    pub arc_length_error: f64,
}

/// Evaluated metric data, kept in logarithmic form.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MetricEval {
    pub ln_a: f64,
    /// `a'/a`
    pub rel_da: f64,
    pub warp: ProfileEval,
}

/// Volume of the unit sphere `S^k ⊂ ℝ^{k+1}`.
pub fn unit_sphere_volume(k: u32) -> f64 {
    use std::f64::consts::PI;
    let (mut vol, start) = if k % 2 == 0 { (2.0, 0) } else { (2.0 * PI, 1) };
    let mut j = start;
    while j < k {
        j += 2;
        vol *= 2.0 * PI / (j as f64 - 1.0);
    }
    vol
}

fn probe_points(t0: f64, t_max: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..=64).map(|i| t0 + i as f64 / 16.0).collect();
    pts.extend((0..=30).map(|k| t0 + 2f64.powi(k)));
    pts.retain(|t| *t <= t_max);
    if t_max.is_finite() {
        pts.extend((0..=64).map(|i| t0 + (t_max - t0) * i as f64 / 64.0));
    }
    pts
}

impl ModelEnd {
    /// Revolution hypersurface end generated by the profile `f`, `t ≥ t0`.
    pub fn revolution(f: ProfileFn, m: u32, t0: f64) -> Result<Self, GeometryError> {
        let end = Self {
            m,
            t0,
            warp: f,
            omega: unit_sphere_volume(m.saturating_sub(1)),
            kind: EndKind::RevolutionHypersurface,
        };
        end.validate()?;
        Ok(end)
    }

    /// Abstract warped end `a² dt² + g² h_P` with cross-section volume `omega`.
    pub fn warped(
        radial: ProfileFn,
        warp: ProfileFn,
        omega: f64,
        m: u32,
        t0: f64,
        curvature: AbstractCurvature,
    ) -> Result<Self, GeometryError> {
        let end = Self {
            m,
            t0,
            warp,
            omega,
            kind: EndKind::AbstractWarped { radial, curvature },
        };
        end.validate()?;
        Ok(end)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&self.m) {
            return Err(GeometryError::InvalidDimension(self.m));
        }
        if !self.t0.is_finite() {
            return Err(GeometryError::InvalidParameter("t0 must be finite".into()));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(GeometryError::InvalidParameter(
                "cross-section volume must be positive".into(),
            ));
        }
        self.warp.validate()?;
        if let EndKind::AbstractWarped { radial, .. } = &self.kind {
            radial.validate()?;
        }
        for p in self.profiles() {
            if self.t0 < p.t_min() {
                return Err(GeometryError::Domain {
                    t: self.t0,
                    t_min: p.t_min(),
                });
            }
        }
        // positivity probe; catches pinch-off of g and sign changes of sampled data
        for t in probe_points(self.t0, self.t_max()) {
            self.metric(t)?;
        }
        Ok(())
    }

    fn profiles(&self) -> Vec<&ProfileFn> {
        match &self.kind {
            EndKind::RevolutionHypersurface => vec![&self.warp],
            EndKind::AbstractWarped { radial, .. } => vec![&self.warp, radial],
        }
    }

    pub fn dimension(&self) -> u32 {
        self.m
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn kind(&self) -> &EndKind {
        &self.kind
    }

    pub fn warp(&self) -> &ProfileFn {
        &self.warp
    }

    pub fn is_revolution(&self) -> bool {
        matches!(self.kind, EndKind::RevolutionHypersurface)
    }

    /// Whether `|H|` is available (revolution, or abstract with a known immersion).
    pub fn has_immersion(&self) -> bool {
        !matches!(
            self.kind,
            EndKind::AbstractWarped {
                curvature: AbstractCurvature::Unknown,
                ..
            }
        )
    }

    /// Largest radial coordinate the profiles can be evaluated at.
    pub fn t_max(&self) -> f64 {
        self.profiles()
            .iter()
            .map(|p| p.t_max())
            .fold(f64::INFINITY, f64::min)
    }

    /// True when some profile is sampled data with no tail model attached.
    pub fn lacks_tail_model(&self) -> bool {
        self.profiles().iter().any(|p| p.is_sampled_without_tail())
    }

    /// Same end with `t0` moved (used for sub-ends and sweeps).
    pub fn with_t0(&self, t0: f64) -> Result<Self, GeometryError> {
        let mut e = self.clone();
        e.t0 = t0;
        e.validate()?;
        Ok(e)
    }

    pub(crate) fn metric(&self, t: f64) -> Result<MetricEval, GeometryError> {
        let warp = self.warp.eval(t)?;
        let (ln_a, rel_da) = match &self.kind {
            EndKind::RevolutionHypersurface => {
                let l = warp.ln_one_plus_d1_sq();
                // a'/a = f' f'' / (1 + f'²)
                let rel = if warp.rel_d1 == 0.0 {
                    0.0
                } else {
                    warp.rel_d1 * warp.rel_d2 * (2.0 * warp.ln_value - l).exp()
                };
                (0.5 * l, rel)
            }
            EndKind::AbstractWarped { radial, .. } => {
                let r = radial.eval(t)?;
                (r.ln_value, r.rel_d1)
            }
        };
        Ok(MetricEval { ln_a, rel_da, warp })
    }

    fn area_exponent(&self) -> f64 {
        (self.m - 1) as f64
    }

    /// Radial metric factor `a(t)`.
    pub fn radial_factor(&self, t: f64) -> Result<f64, GeometryError> {
        Ok(self.metric(t)?.ln_a.exp())
    }

    pub fn ln_area(&self, t: f64) -> Result<f64, GeometryError> {
        let g = self.metric(t)?;
        Ok(self.omega.ln() + self.area_exponent() * g.warp.ln_value)
    }

    /// `A(t) = ω g^{m-1}`, the volume of the level cross-section.
    pub fn area(&self, t: f64) -> Result<f64, GeometryError> {
        Ok(self.ln_area(t)?.exp())
    }

    pub fn ln_volume_element(&self, t: f64) -> Result<f64, GeometryError> {
        let g = self.metric(t)?;
        Ok(self.omega.ln() + g.ln_a + self.area_exponent() * g.warp.ln_value)
    }

    /// `ω a g^{m-1}`
    pub fn volume_element(&self, t: f64) -> Result<f64, GeometryError> {
        Ok(self.ln_volume_element(t)?.exp())
    }

    pub fn ln_capacity_density(&self, t: f64) -> Result<f64, GeometryError> {
        let g = self.metric(t)?;
        Ok(g.ln_a - self.area_exponent() * g.warp.ln_value)
    }

    /// `a / g^{m-1}`, whose integral over the end decides parabolicity.
    pub fn capacity_density(&self, t: f64) -> Result<f64, GeometryError> {
        Ok(self.ln_capacity_density(t)?.exp())
    }

    pub fn ln_flux_weight(&self, t: f64) -> Result<f64, GeometryError> {
        let g = self.metric(t)?;
        Ok(self.omega.ln() - g.ln_a + self.area_exponent() * g.warp.ln_value)
    }

    /// Flux weight `ω g^{m-1} / a` of the radial Laplacian in divergence form.
    pub fn flux_weight(&self, t: f64) -> Result<f64, GeometryError> {
        Ok(self.ln_flux_weight(t)?.exp())
    }

    /// `Δ t = (1/a²)((m-1) g'/g − a'/a)`, the Laplacian of the radial coordinate.
    pub fn laplacian_of_radius(&self, t: f64) -> Result<f64, GeometryError> {
        let g = self.metric(t)?;
        Ok((-2.0 * g.ln_a).exp() * (self.area_exponent() * g.warp.rel_d1 - g.rel_da))
    }

    /// `ln |H|`; `None` without an immersion, `-∞` for minimal ends.
    pub fn ln_mean_curvature_norm(&self, t: f64) -> Result<Option<f64>, GeometryError> {
        match &self.kind {
            EndKind::RevolutionHypersurface => {
                let f = self.warp.eval(t)?;
                Ok(Some(ln_revolution_mean_curvature(self.m, &f)))
            }
            EndKind::AbstractWarped { curvature, .. } => {
                self.metric(t)?;
                Ok(match curvature {
                    AbstractCurvature::Unknown => None,
                    AbstractCurvature::Minimal => Some(f64::NEG_INFINITY),
                })
            }
        }
    }

    /// `|H|(t)` for any end with an immersion.
    pub fn mean_curvature_norm(&self, t: f64) -> Result<Option<f64>, GeometryError> {
        Ok(self.ln_mean_curvature_norm(t)?.map(f64::exp))
    }

    /// Arc length `s(t) = ∫_{t0}^t a`.
    pub fn arc_length(&self, t: f64, cfg: &QuadratureConfig) -> Result<Estimate, GeometryError> {
        if t < self.t0 {
            return Err(GeometryError::Domain { t, t_min: self.t0 });
        }
        if t == self.t0 {
            return Ok(Estimate::exact(0.0));
        }
        let mut failure = None;
        let est = quadrature::integrate(
            |x| match self.radial_factor(x) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            self.t0,
            t,
            cfg,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        est.map_err(GeometryError::Quadrature)
    }
}

/// `ln |H|` for the revolution hypersurface generated by `f`:
/// `m|H| = |(m-1) / (f √(1+f'²)) − f'' / (1+f'²)^{3/2}|`.
fn ln_revolution_mean_curvature(m: u32, f: &ProfileEval) -> f64 {
    let l = f.ln_one_plus_d1_sq();
    // f f'' / (1 + f'²)
    let q = if f.rel_d2 == 0.0 {
        0.0
    } else {
        f.rel_d2 * (2.0 * f.ln_value - l).exp()
    };
    let bracket = ((m - 1) as f64 - q).abs();
    bracket.ln() - (m as f64).ln() - f.ln_value - 0.5 * l
}

/// `|H|(t)` of a revolution end.
pub fn mean_curvature(end: &ModelEnd, t: f64) -> Result<f64, GeometryError> {
    if !end.is_revolution() {
        return Err(GeometryError::KindMismatch(
            "mean_curvature needs a revolution hypersurface end".into(),
        ));
    }
    let f = end.warp.eval(t)?;
    Ok(ln_revolution_mean_curvature(end.m, &f).exp())
}

pub fn sample_geometry(
    end: &ModelEnd,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<GeometricSample, GeometryError> {
    if t < end.t0 {
        return Err(GeometryError::Domain { t, t_min: end.t0 });
    }
    let s = end.arc_length(t, cfg)?;
    Ok(GeometricSample {
        t,
        area: end.area(t)?,
        volume_element: end.volume_element(t)?,
        mean_curvature_norm: end.mean_curvature_norm(t)?,
        arc_length: s.value,
        arc_length_error: s.error_bound,
    })
}

/// Sets up a revolution end (`make_revolution_end`).
pub fn make_revolution_end(f: ProfileFn, m: u32, t0: f64) -> Result<ModelEnd, GeometryError> {
    ModelEnd::revolution(f, m, t0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn sphere_volumes() {
        assert!((unit_sphere_volume(0) - 2.0).abs() < 1e-15);
        assert!((unit_sphere_volume(1) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_volume(2) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_volume(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn cylinder_mean_curvature_is_two_thirds() {
        let end = ModelEnd::revolution(ProfileFn::constant(1.0).unwrap(), 3, 0.0).unwrap();
        for t in [0.0, 1.0, 7.5, 1e6] {
            assert!((mean_curvature(&end, t).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_neck_blowup_rate() {
        let end = ModelEnd::revolution(ProfileFn::gaussian_neck(1.0).unwrap(), 3, 0.0).unwrap();
        let v = mean_curvature(&end, 3.0).unwrap();
        assert!((v * (-9.0f64).exp() - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn slow_power_decay_bound() {
        let f = ProfileFn::power(1.0 / 3.0, 0.0, 1.0).unwrap();
        let end = ModelEnd::revolution(f, 4, 1.0).unwrap();
        // C = sup_{t ≥ 1} |H| t^{1/3}, scanned on a log grid
        let c = (0..=600)
            .map(|i| 10f64.powf(i as f64 / 100.0))
            .map(|t| mean_curvature(&end, t).unwrap() * t.powf(1.0 / 3.0))
            .fold(0.0, f64::max);
        let h10 = mean_curvature(&end, 10.0).unwrap();
        assert!(h10 <= c * 10f64.powf(-1.0 / 3.0) * (1.0 + 1e-12));
        // the scaled curvature tends to (m-1)/m
        let far = mean_curvature(&end, 1e8).unwrap() * 1e8f64.powf(1.0 / 3.0);
        assert!((far - 0.75).abs() < 1e-4);
    }

    #[test]
    fn euclidean_sample() {
        let end = ModelEnd::warped(
            ProfileFn::constant(1.0).unwrap(),
            ProfileFn::power(1.0, 0.0, 0.5).unwrap(),
            1.0,
            3,
            1.0,
            AbstractCurvature::Minimal,
        )
        .unwrap();
        let s = sample_geometry(&end, 2.0, &cfg()).unwrap();
        assert!((s.area - 4.0).abs() < 1e-14);
        assert!((s.volume_element - 4.0).abs() < 1e-14);
        assert!((s.arc_length - 1.0).abs() < 1e-14);
        assert_eq!(s.mean_curvature_norm, Some(0.0));
    }

    #[test]
    fn gaussian_volume_element_at_origin() {
        let end = ModelEnd::revolution(ProfileFn::gaussian_neck(1.0).unwrap(), 3, 0.0).unwrap();
        let s = sample_geometry(&end, 0.0, &cfg()).unwrap();
        assert!((s.volume_element - 4.0 * PI).abs() < 1e-13);
        assert_eq!(s.arc_length, 0.0);
    }

    #[test]
    fn exp_warp_area() {
        let end = ModelEnd::warped(
            ProfileFn::constant(1.0).unwrap(),
            ProfileFn::exp_warp(1.0).unwrap(),
            1.0,
            3,
            0.0,
            AbstractCurvature::Unknown,
        )
        .unwrap();
        assert!((end.area(1.0).unwrap() - 1f64.exp().powi(2)).abs() < 1e-13);
        assert_eq!(end.mean_curvature_norm(1.0).unwrap(), None);
    }

    #[test]
    fn revolution_radial_factor() {
        let cyl = make_revolution_end(ProfileFn::constant(1.0).unwrap(), 3, 0.0).unwrap();
        assert_eq!(cyl.radial_factor(3.0).unwrap(), 1.0);
        assert!((cyl.omega() - 4.0 * PI).abs() < 1e-14);

        let root = make_revolution_end(ProfileFn::power(0.5, 0.0, 1.0).unwrap(), 3, 1.0).unwrap();
        assert!((root.radial_factor(1.0).unwrap() - 1.25f64.sqrt()).abs() < 1e-15);

        let neck = make_revolution_end(ProfileFn::gaussian_neck(1.0).unwrap(), 3, 0.0).unwrap();
        for t in [0.0, 0.5, 1.0, 2.0] {
            let expect = (1.0 + 4.0 * t * t * (-2.0 * t * t as f64).exp()).sqrt();
            assert!((neck.radial_factor(t).unwrap() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn mean_curvature_rejects_abstract_and_out_of_domain() {
        let end = ModelEnd::warped(
            ProfileFn::constant(1.0).unwrap(),
            ProfileFn::exp_warp(-1.0).unwrap(),
            1.0,
            3,
            0.0,
            AbstractCurvature::Unknown,
        )
        .unwrap();
        assert!(matches!(
            mean_curvature(&end, 1.0),
            Err(GeometryError::KindMismatch(_))
        ));
        let rev = make_revolution_end(ProfileFn::power(0.5, 0.0, 1.0).unwrap(), 3, 1.0).unwrap();
        assert!(matches!(
            mean_curvature(&rev, 0.5),
            Err(GeometryError::Domain { .. })
        ));
    }

    #[test]
    fn rejects_bad_dimension_and_start() {
        let f = ProfileFn::constant(1.0).unwrap();
        assert!(ModelEnd::revolution(f.clone(), 1, 0.0).is_err());
        assert!(ModelEnd::revolution(f.clone(), 65, 0.0).is_err());
        let p = ProfileFn::power(0.5, 0.0, 1.0).unwrap();
        assert!(ModelEnd::revolution(p, 3, 0.5).is_err());
    }

    #[test]
    fn pinching_sampled_warp_is_rejected() {
        let f = ProfileFn::sampled(vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 0.02, 0.02, 1.0], None);
        if let Ok(f) = f {
            // the natural spline through these values dips below zero
            assert!(ModelEnd::revolution(f, 3, 0.0).is_err());
        }
    }
}
