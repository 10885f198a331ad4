use serde::{Deserialize, Serialize};

use super::{unit_sphere_volume, AbstractCurvature, GeometryError, ModelEnd, ProfileFn};

/// Reference ends with known behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinEnd {
    /// Flat `ℝ^m` outside the unit ball, realised as a hyperplane (`H ≡ 0`).
    Euclidean,
    /// `S^{m-1} × [0, ∞)` in `ℝ^{m+1}`, `f ≡ 1`.
    Cylinder,
    /// Revolution end with `f(t) = t^{1/(m-1)}`, `t ≥ 1`: parabolic, infinite volume.
    SlowPower,
    /// Revolution end with `f(t) = e^{-t²}`, `t ≥ 0`: finite volume.
    GaussianNeck,
    /// `[0, ∞) × P` with metric `dt² + e^{-2t} h_P`, `vol(P) = 1`: finite volume,
    /// bottom of spectrum `(m-1)²/4`.
    ExpWarp,
}

impl BuiltinEnd {
    pub const ALL: [BuiltinEnd; 5] = [
        BuiltinEnd::Euclidean,
        BuiltinEnd::Cylinder,
        BuiltinEnd::SlowPower,
        BuiltinEnd::GaussianNeck,
        BuiltinEnd::ExpWarp,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinEnd::Euclidean => "euclidean",
            BuiltinEnd::Cylinder => "cylinder",
            BuiltinEnd::SlowPower => "slow_power",
            BuiltinEnd::GaussianNeck => "gaussian_neck",
            BuiltinEnd::ExpWarp => "exp_warp",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn build(&self, m: u32) -> Result<ModelEnd, GeometryError> {
        match self {
            BuiltinEnd::Euclidean => ModelEnd::warped(
                ProfileFn::constant(1.0)?,
                ProfileFn::power(1.0, 0.0, 1.0)?,
                unit_sphere_volume(m.saturating_sub(1)),
                m,
                1.0,
                AbstractCurvature::Minimal,
            ),
            BuiltinEnd::Cylinder => ModelEnd::revolution(ProfileFn::constant(1.0)?, m, 0.0),
            BuiltinEnd::SlowPower => {
                if m < 2 {
                    return Err(GeometryError::InvalidDimension(m));
                }
                power_revolution_end(m, 1.0 / (m - 1) as f64)
            }
            BuiltinEnd::GaussianNeck => {
                ModelEnd::revolution(ProfileFn::gaussian_neck(1.0)?, m, 0.0)
            }
            BuiltinEnd::ExpWarp => ModelEnd::warped(
                ProfileFn::constant(1.0)?,
                ProfileFn::exp_warp(-1.0)?,
                1.0,
                m,
                0.0,
                AbstractCurvature::Unknown,
            ),
        }
    }
}

/// Revolution end generated by `f(t) = t^alpha`, `t ≥ 1`.
pub fn power_revolution_end(m: u32, alpha: f64) -> Result<ModelEnd, GeometryError> {
    ModelEnd::revolution(ProfileFn::power(alpha, 0.0, 1.0)?, m, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_build_for_small_dimensions() {
        for b in BuiltinEnd::ALL {
            for m in 2..=6 {
                let e = b.build(m).unwrap();
                assert_eq!(e.dimension(), m);
                assert_eq!(BuiltinEnd::from_name(b.name()), Some(b));
            }
        }
    }

    #[test]
    fn slow_power_cross_section_grows_linearly() {
        for m in 3..=5 {
            let e = BuiltinEnd::SlowPower.build(m).unwrap();
            let ratio = e.area(1000.0).unwrap() / e.area(10.0).unwrap();
            assert!((ratio - 100.0).abs() < 1e-9);
        }
    }
}
