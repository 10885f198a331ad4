use std::f64::consts::PI;

use endscope::geometry::{BuiltinEnd, ModelEnd};
use endscope::inequalities::{
    default_domains, default_test_functions, hk_identity_check, isoperimetric_scan, poincare_bound,
    rayleigh_minimize, rayleigh_quotient, rayleigh_report, volume_lower_bound_check, InequalityError,
    TestFunction,
};
use endscope::quadrature::QuadratureConfig;
use nalgebra::DMatrix;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn exp_warp(m: u32) -> ModelEnd {
    BuiltinEnd::ExpWarp.build(m).unwrap()
}

/// Dense symmetric eigen-solve of the same weighted problem, assembled from
/// closed-form weights (no shared code with the library discretization).
fn dense_bottom(w: impl Fn(f64) -> f64, rho: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let k = n - 1;
    let mut b = DMatrix::<f64>::zeros(k, k);
    let mu: Vec<f64> = (1..n).map(|i| h * rho(lo + h * i as f64)).collect();
    for j in 0..k {
        let wl = w(lo + h * (j as f64 + 0.5)) / h;
        let wr = w(lo + h * (j as f64 + 1.5)) / h;
        b[(j, j)] = (wl + wr) / mu[j];
        if j + 1 < k {
            let v = -wr / (mu[j] * mu[j + 1]).sqrt();
            b[(j, j + 1)] = v;
            b[(j + 1, j)] = v;
        }
    }
    b.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

#[test]
fn exp_warp_bottom_matches_dense_oracle_and_closed_form() {
    let end = exp_warp(3);
    let rep = rayleigh_minimize(&end, (0.0, 20.0), 512).unwrap();
    let oracle = dense_bottom(|t| (-2.0 * t).exp(), |t| (-2.0 * t).exp(), 0.0, 20.0, 512);
    assert!((rep.minimum - oracle).abs() < 1e-9 * oracle, "{} vs {oracle}", rep.minimum);
    // continuum value (m-1)²/4 + (π/T)²
    let exact = 1.0 + (PI / 20.0).powi(2);
    assert!((rep.minimum - exact).abs() < 1e-3, "{}", rep.minimum);
    assert_eq!(rep.bound, Some(1.0));
    assert!(rep.margin.unwrap() > 0.0);
}

#[test]
fn exp_warp_minimum_on_twenty_wide_support() {
    let rep = rayleigh_minimize(&exp_warp(3), (0.0, 20.0), 2048).unwrap();
    assert!(rep.minimum >= 1.0 - 1e-3 && rep.minimum <= 1.05, "{}", rep.minimum);
}

#[test]
fn euclidean_interval_bottom_is_pi_squared() {
    // -(t² u')' = λ t² u on [1, 2] with u = sin(π(t-1))/t gives λ = π²
    let end = BuiltinEnd::Euclidean.build(3).unwrap();
    let n = 1024;
    let rep = rayleigh_minimize(&end, (1.0, 2.0), n).unwrap();
    let four_pi = 4.0 * PI;
    let oracle = dense_bottom(|t| four_pi * t * t, |t| four_pi * t * t, 1.0, 2.0, n);
    assert!((rep.minimum - oracle).abs() < 1e-8 * oracle);
    assert!((rep.minimum - PI * PI).abs() < 1e-4, "{}", rep.minimum);
}

#[test]
fn shrinking_support_blows_up() {
    let end = BuiltinEnd::Cylinder.build(3).unwrap();
    let wide = rayleigh_minimize(&end, (0.0, 1.0), 64).unwrap().minimum;
    let narrow = rayleigh_minimize(&end, (0.0, 0.01), 64).unwrap().minimum;
    assert!(narrow > 9000.0 * wide);
}

#[test]
fn tilted_cosine_reaches_continuum_value() {
    for m in [3u32, 4, 5] {
        let end = exp_warp(m);
        let k = (m - 1) as f64 / 2.0;
        let eta = TestFunction::truncated_cosine(10.0, 20.0, k).unwrap();
        let q = rayleigh_quotient(&end, &eta, &cfg()).unwrap();
        let exact = k * k + (PI / 20.0).powi(2);
        assert!((q - exact).abs() < 1e-9 * exact, "m = {m}: {q} vs {exact}");
    }
}

#[test]
fn cylinder_tent_quotient() {
    // flat weight: ∫η'² / ∫η² = (2/w)²·w / (w/3) = 12/w²
    let end = BuiltinEnd::Cylinder.build(3).unwrap();
    for w in [1.0, 4.0, 16.0] {
        let q = rayleigh_quotient(&end, &TestFunction::tent(w / 2.0, w).unwrap(), &cfg()).unwrap();
        assert!((q - 12.0 / (w * w)).abs() < 1e-10 * q);
    }
}

#[test]
fn rayleigh_scale_invariance() {
    let end = BuiltinEnd::GaussianNeck.build(3).unwrap();
    let eta = TestFunction::bump(1.0, 1.5).unwrap();
    let q = rayleigh_quotient(&end, &eta, &cfg()).unwrap();
    for lam in [0.5, 2.0, 10.0] {
        let ql = rayleigh_quotient(&end, &eta.scaled(lam), &cfg()).unwrap();
        assert!((ql - q).abs() <= 1e-12 * q, "{lam}: {ql} vs {q}");
    }
}

#[test]
fn poincare_bound_holds_across_sweep() {
    for m in [3u32, 4, 5] {
        let end = exp_warp(m);
        let rep = rayleigh_report(&end, (0.0, 20.0), 512, &cfg()).unwrap();
        assert!(rep.sweep.len() >= 50);
        let bound = poincare_bound(&end).unwrap();
        for e in &rep.sweep {
            assert!(e.quotient >= bound - 1e-3, "m = {m}, {}: {}", e.label, e.quotient);
            // the discrete minimum is a lower envelope up to discretization error
            assert!(rep.minimum <= e.quotient * (1.0 + 1e-3), "{}", e.label);
        }
        assert!(rep.overall_minimum() - bound < 0.05);
    }
}

#[test]
fn hk_identity_residuals() {
    let shapes = |lo: f64, hi: f64| {
        let c = 0.5 * (lo + hi);
        let w = hi - lo;
        vec![
            TestFunction::bump(c, w).unwrap(),
            TestFunction::tent(c, w).unwrap(),
            TestFunction::truncated_cosine(c, w, 0.3).unwrap(),
        ]
    };
    for m in [3u32, 4, 5] {
        let end = exp_warp(m);
        for kappa in [-((m - 1) as f64) / 2.0, 0.5, 2.0] {
            for eta in shapes(0.5, 6.0) {
                let r = hk_identity_check(&end, kappa, &eta, &cfg()).unwrap();
                assert!(r.residual <= 1e-9, "m={m} κ={kappa} {}: {r:?}", eta.label());
            }
        }
    }
    let r = hk_identity_check(&exp_warp(3), 0.0, &TestFunction::bump(1.0, 1.0).unwrap(), &cfg()).unwrap();
    assert_eq!(r.residual, 0.0);
    assert!(hk_identity_check(&exp_warp(3), f64::NAN, &TestFunction::bump(1.0, 1.0).unwrap(), &cfg()).is_err());
}

#[test]
fn hk_identity_on_revolution_ends() {
    let end = BuiltinEnd::GaussianNeck.build(4).unwrap();
    let eta = TestFunction::tent(1.0, 1.8).unwrap();
    let r = hk_identity_check(&end, 2.0, &eta, &cfg()).unwrap();
    assert!(r.residual <= 1e-9, "{r:?}");
    assert!(r.laplacian_term.abs() > 1e-3);
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

#[test]
fn cylinder_isoperimetric_ratio() {
    let end = BuiltinEnd::Cylinder.build(3).unwrap();
    let omega = 4.0 * PI;
    let closed = |l: f64| (2.0 * omega + 2.0 / 3.0 * omega * l) / (omega * l).powf(2.0 / 3.0);
    let ls = [0.1, 0.5, 1.0, 3.0, 6.0, 10.0, 30.0, 100.0];
    let domains: Vec<(f64, f64)> = ls.iter().map(|&l| (0.0, l)).collect();
    let scan = isoperimetric_scan(&end, &domains, &cfg()).unwrap();
    for (s, &l) in scan.samples.iter().zip(&ls) {
        assert!((s.ratio - closed(l)).abs() < 1e-10 * s.ratio);
    }
    let best = golden_min(closed, 0.1, 100.0);
    let dense = isoperimetric_scan(&end, &default_domains(&end), &cfg()).unwrap();
    assert!(dense.inf_ratio >= best - 1e-9);
    assert!((dense.inf_ratio - best) / best < 1e-2);
}

#[test]
fn euclidean_isoperimetric_arithmetic() {
    let end = BuiltinEnd::Euclidean.build(3).unwrap();
    let scan = isoperimetric_scan(&end, &[(1.0, 2.0)], &cfg()).unwrap();
    let exact = 4.0 * PI * 5.0 / (4.0 * PI / 3.0 * 7.0).powf(2.0 / 3.0);
    assert!((scan.samples[0].ratio - exact).abs() < 1e-12 * exact);
    assert_eq!(scan.samples[0].curvature_integral, Some(0.0));
}

#[test]
fn gaussian_isoperimetric_consistency() {
    let end = BuiltinEnd::GaussianNeck.build(3).unwrap();
    let s = isoperimetric_scan(&end, &[(0.0, 3.0)], &cfg()).unwrap().samples[0];
    assert!(s.ratio > 0.0 && s.ratio.is_finite());
    assert!(s.ratio * s.volume.powf(2.0 / 3.0) >= s.boundary_area);
}

#[test]
fn degenerate_slab_rejected() {
    let end = BuiltinEnd::Cylinder.build(3).unwrap();
    assert!(matches!(
        isoperimetric_scan(&end, &[(1.0, 1.0)], &cfg()),
        Err(InequalityError::OutsideEnd { .. })
    ));
}

#[test]
fn euclidean_volume_bound_holds() {
    let end = BuiltinEnd::Euclidean.build(3).unwrap();
    let scan = isoperimetric_scan(&end, &default_domains(&end), &cfg()).unwrap();
    let radii: Vec<f64> = (0..20).map(|k| 0.1 * 100f64.powf(k as f64 / 19.0)).collect();
    let rep = volume_lower_bound_check(&end, scan.sobolev_observed, &radii, None, &cfg()).unwrap();
    assert!(rep.violations.is_empty(), "{:?}", rep.violations);
    for row in &rep.rows {
        let exact = 4.0 * PI / 3.0 * ((1.0 + row.radius).powi(3) - 1.0);
        assert!((row.volume - exact).abs() < 1e-9 * exact);
    }
}

#[test]
fn cylinder_volume_bound_fails_for_large_radii() {
    let end = BuiltinEnd::Cylinder.build(3).unwrap();
    let scan = isoperimetric_scan(&end, &default_domains(&end), &cfg()).unwrap();
    let radii = [0.01, 0.1, 1.0, 10.0, 100.0];
    let rep = volume_lower_bound_check(&end, scan.sobolev_observed, &radii, None, &cfg()).unwrap();
    for row in &rep.rows {
        assert!((row.volume - 4.0 * PI * row.radius).abs() < 1e-9 * row.volume.max(1.0));
    }
    assert!(!rep.rows[0].violated && !rep.rows[1].violated);
    assert!(rep.violations.contains(&10.0) && rep.violations.contains(&100.0));
}

#[test]
fn default_sweep_covers_support() {
    let end = exp_warp(3);
    let fs = default_test_functions(&end, (0.0, 20.0)).unwrap();
    for f in &fs {
        let (lo, hi) = f.support();
        assert!(lo >= -1e-12 && hi <= 20.0 + 1e-12, "{}", f.label());
    }
}
