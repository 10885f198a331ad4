use endscope::classify::SweepSpec;
use endscope::cli::config::{EndConfig, InconclusivePolicy, OutputConfig, RayleighSpec, RunConfig};
use endscope::geometry::{BuiltinEnd, ProfileFn};
use endscope::quadrature::QuadratureConfig;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

const SEED: u64 = 0x5eed_0e5c;
static LOG_SEED: std::sync::Once = std::sync::Once::new();

fn end_config() -> impl Strategy<Value = EndConfig> {
    let builtin = (0usize..5, 3u32..7).prop_map(|(i, m)| EndConfig::builtin("x", BuiltinEnd::ALL[i], m));
    let power = (0.05f64..1.5, 3u32..7, 1.0f64..3.0).prop_map(|(a, m, t0)| EndConfig {
        builtin: None,
        t0: Some(t0),
        profile: Some(ProfileFn::power(a, 0.0, 1.0).unwrap()),
        ..EndConfig::builtin("x", BuiltinEnd::Cylinder, m)
    });
    let warped = (0.1f64..3.0, 0.2f64..4.0, 3u32..7).prop_map(|(rate, omega, m)| EndConfig {
        builtin: None,
        t0: Some(0.0),
        profile: Some(ProfileFn::exp_warp(-rate).unwrap()),
        radial: Some(ProfileFn::constant(1.0).unwrap()),
        omega: Some(omega),
        ..EndConfig::builtin("x", BuiltinEnd::Cylinder, m)
    });
    prop_oneof![builtin, power, warped]
}

fn run_config() -> impl Strategy<Value = RunConfig> {
    (
        prop::collection::btree_set(2u32..=128, 1..6),
        prop::collection::vec(end_config(), 1..4),
        any::<bool>(),
        prop::option::of((1.0f64..50.0, 32usize..4000)),
        prop::option::of(0.01f64..10.0),
        1e-13f64..1e-6,
        prop::option::of((prop::collection::btree_set(1u32..20, 1..4), prop::collection::btree_set(1u32..=20, 1..4))),
    )
        .prop_map(|(ps, mut ends, warn, rayleigh, s, rel_tol, sweep)| {
            for (i, e) in ends.iter_mut().enumerate() {
                e.name = format!("end{i}");
            }
            RunConfig {
                p_grid: ps.into_iter().map(|p| p as f64 / 2.0).collect(),
                radii: vec![0.5, 1.0, 2.0],
                sobolev_constant: s,
                inconclusive: if warn { InconclusivePolicy::Warn } else { InconclusivePolicy::Fail },
                quadrature: QuadratureConfig {
                    rel_tol,
                    ..Default::default()
                },
                rayleigh: rayleigh.map(|(width, n)| RayleighSpec { width, n }),
                output: OutputConfig { dir: "out".into() },
                ends,
                sweep: sweep.map(|(ps, alphas)| SweepSpec {
                    dimensions: vec![3, 4],
                    alphas: alphas.into_iter().map(|a| a as f64 / 20.0).collect(),
                    p_grid: ps.into_iter().map(|p| p as f64).collect(),
                }),
            }
        })
}

proptest! {
    #![proptest_config(Config { cases: 50, rng_seed: RngSeed::Fixed(SEED), ..Config::default() })]

    #[test]
    fn parse_of_emit_is_identity(cfg in run_config()) {
        LOG_SEED.call_once(|| eprintln!("proptest seed {SEED:#x}"));
        cfg.validate().unwrap();
        let text = cfg.to_toml().unwrap();
        let back = RunConfig::from_toml(&text, "<emitted>").unwrap();
        prop_assert_eq!(back, cfg);
    }
}
