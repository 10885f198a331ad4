//! Acceptance suite: one PASS/FAIL line per criterion, with runtimes.
//! Exits nonzero if any criterion fails.

use std::time::Instant;

use endscope::capacity::{
    dirichlet_radial, energy_trace, exhaustion_limit, fd_oracle, parabolicity, ParabolicityVerdict,
    MONOTONICITY_TOLERANCE,
};
use endscope::classify::{consistency_flags, end_signature, sweep_power_family, Agreement, Quantity, SweepSpec};
use endscope::geometry::{power_revolution_end, unit_sphere_volume, BuiltinEnd, ModelEnd};
use endscope::inequalities::rayleigh_report;
use endscope::quadrature::{ConvergenceVerdict, QuadratureConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const RANDOM_SEED: u64 = 20_260_417;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    Outcome {
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            summary
        } else {
            failures.join("; ")
        },
    }
}

/// Composite Simpson on `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Exponential warp: volume `1/(m−1)` and spectral bottom `(m−1)²/4`.
fn exponential_warp(per_m_seconds: &mut Vec<f64>) -> Outcome {
    let mut fails = Vec::new();
    let mut gaps = Vec::new();
    for m in 3..=5u32 {
        let start = Instant::now();
        let end = BuiltinEnd::ExpWarp.build(m).unwrap();
        let sig = end_signature(&end, &[2.0], &cfg()).unwrap();
        let expected = 1.0 / (m - 1) as f64;
        match sig.volume.value() {
            Some(v) if (v - expected).abs() <= 1e-10 => {}
            other => fails.push(format!("m={m}: volume {other:?} vs {expected}")),
        }
        let bound = ((m - 1) * (m - 1)) as f64 / 4.0;
        for width in [20.0, 30.0] {
            let rep = rayleigh_report(&end, (0.0, width), 2000, &cfg()).unwrap();
            let min = rep.overall_minimum();
            if min < bound - 1e-3 || (min - bound).abs() > 0.05 {
                fails.push(format!("m={m} width {width}: minimum {min} vs {bound}"));
            }
            gaps.push(min - bound);
        }
        let secs = start.elapsed().as_secs_f64();
        if secs >= 5.0 {
            fails.push(format!("m={m} took {secs:.2}s"));
        }
        per_m_seconds.push(secs);
    }
    let worst = gaps.iter().cloned().fold(0.0, f64::max);
    outcome(fails, format!("volumes exact to 1e-10, Rayleigh gap ≤ {worst:.4}"))
}

/// Slow power end `f = t^{1/(m−1)}`: parabolic by both criteria, `V ~ s²`,
/// `L^p` threshold at `2(m−1)`.
fn slow_power() -> Outcome {
    let mut fails = Vec::new();
    let mut exps = Vec::new();
    for m in [3u32, 4] {
        let end = BuiltinEnd::SlowPower.build(m).unwrap();
        let rep = parabolicity(&end, &cfg()).unwrap();
        if rep.verdict != ParabolicityVerdict::Parabolic {
            fails.push(format!("m={m}: capacity verdict {:?}", rep.verdict));
        }
        let growth = rep.volume_growth.as_ref().unwrap();
        if !growth.implies_parabolic {
            fails.push(format!("m={m}: volume-growth criterion {}", growth.criterion.label()));
        }
        match growth.exponent {
            Some(x) if (x - 2.0).abs() <= 0.1 => exps.push(x),
            other => fails.push(format!("m={m}: V(s) exponent {other:?}")),
        }
        let pc = 2.0 * (m - 1) as f64;
        let sig = end_signature(&end, &[pc - 0.5, pc + 0.5], &cfg()).unwrap();
        if !sig.lp(pc - 0.5).unwrap().diverges() || !sig.lp(pc + 0.5).unwrap().converges() {
            fails.push(format!("m={m}: L^p verdicts around {pc} wrong"));
        }
    }
    outcome(fails, format!("V(s) exponents {exps:.4?}"))
}

/// Gaussian neck: finite volume against a Simpson oracle, `|H| e^{-t²} → (m−1)/m`,
/// `L^p` threshold at `m−1`.
fn gaussian_neck() -> Outcome {
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    for m in [3u32, 4] {
        let end = BuiltinEnd::GaussianNeck.build(m).unwrap();
        let sig = end_signature(&end, &[(m - 1) as f64 - 0.5, (m - 1) as f64 + 0.5], &cfg()).unwrap();
        let k = (m - 1) as f64;
        let omega = unit_sphere_volume(m - 1);
        let dv = |t: f64| omega * (-k * t * t).exp() * (1.0 + 4.0 * t * t * (-2.0 * t * t).exp()).sqrt();
        let oracle = simpson(dv, 0.0, 12.0, 1_000_000);
        match sig.volume.value() {
            Some(v) if (v - oracle).abs() <= 1e-8 => worst = worst.max((v - oracle).abs()),
            other => fails.push(format!("m={m}: volume {other:?} vs oracle {oracle}")),
        }
        let h = end.mean_curvature_norm(6.0).unwrap().unwrap() * (-36.0f64).exp();
        if (h - k / m as f64).abs() > 1e-6 {
            fails.push(format!("m={m}: |H|e^(-t²) at 6 = {h}"));
        }
        if !sig.lp(k - 0.5).unwrap().converges() || !sig.lp(k + 0.5).unwrap().diverges() {
            fails.push(format!("m={m}: L^p verdicts around {k} wrong"));
        }
    }
    outcome(fails, format!("volume within {worst:.1e} of oracle"))
}

/// Quadrature profile against the finite-difference solve.
fn dirichlet_oracle() -> Outcome {
    let mut fails = Vec::new();
    let mut orders = Vec::new();
    for b in BuiltinEnd::ALL {
        let end = b.build(3).unwrap();
        let (t_in, t_out) = match b {
            BuiltinEnd::Euclidean => (1.0, 10.0),
            _ => (end.t0(), end.t0() + 3.0),
        };
        let f = dirichlet_radial(&end, t_in, t_out, &cfg()).unwrap();
        let err = |n: usize| {
            let fd = fd_oracle(&end, t_in, t_out, n).unwrap();
            fd.nodes
                .iter()
                .zip(&fd.values)
                .map(|(t, u)| (u - f.eval(*t).unwrap()).abs())
                .fold(0.0, f64::max)
        };
        let errs: Vec<f64> = [256, 1024, 4096].into_iter().map(err).collect();
        if errs[0] <= 1e-12 {
            // the scheme is exact on this end; only round-off remains
            orders.push(format!("{}: exact", b.name()));
            continue;
        }
        let order = (errs[0] / errs[2]).log2() / 4.0;
        orders.push(format!("{}: {order:.2}", b.name()));
        if order < 1.9 {
            fails.push(format!("{}: order {order:.3} ({errs:?})", b.name()));
        }
        if b == BuiltinEnd::Euclidean && errs[2] > 1e-6 {
            fails.push(format!("euclidean error at 4096 = {:.2e}", errs[2]));
        }
    }
    outcome(fails, format!("orders {}", orders.join(", ")))
}

fn exhaustion_ok(end: &ModelEnd, label: &str, fails: &mut Vec<String>) {
    let t0 = end.t0();
    let radii: Vec<f64> = (0..8).map(|k| t0 + 0.25 * 2f64.powi(k)).collect();
    let probes: Vec<f64> = (0..=64).map(|i| t0 + 32.0 * i as f64 / 64.0).collect();
    match exhaustion_limit(end, &radii, &probes, &cfg()) {
        Ok(rep) => {
            let in_range = rep
                .values
                .iter()
                .flatten()
                .all(|v| (-MONOTONICITY_TOLERANCE..=1.0 + MONOTONICITY_TOLERANCE).contains(v));
            if !in_range || rep.min_step < -MONOTONICITY_TOLERANCE {
                fails.push(format!("{label}: min step {}", rep.min_step));
            }
        }
        Err(e) => fails.push(format!("{label}: {e}")),
    }
}

/// `0 ≤ f_r ≤ f_s ≤ 1` for `r ≤ s`.
fn maximum_principle() -> Outcome {
    let mut fails = Vec::new();
    let mut count = 0;
    for m in 3..=5 {
        for b in BuiltinEnd::ALL {
            exhaustion_ok(&b.build(m).unwrap(), &format!("{} m={m}", b.name()), &mut fails);
            count += 1;
        }
    }
    let mut rng = StdRng::seed_from_u64(RANDOM_SEED);
    for _ in 0..20 {
        let m = rng.random_range(3..=6u32);
        let alpha = rng.random_range(0.1..=1.0f64);
        exhaustion_ok(&power_revolution_end(m, alpha).unwrap(), &format!("power m={m} α={alpha:.4}"), &mut fails);
        count += 1;
    }
    outcome(fails, format!("{count} ends, seed {RANDOM_SEED}"))
}

/// No consistency flag fails on the reference ends or the default sweep.
fn flag_consistency(sweep: &endscope::classify::PhaseTable) -> Outcome {
    let mut fails = Vec::new();
    let ps = [2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 6.0, 8.0, 12.0, 16.0];
    let mut checked = 0;
    for m in 3..=5 {
        for b in BuiltinEnd::ALL {
            let sig = end_signature(&b.build(m).unwrap(), &ps, &cfg()).unwrap();
            let flags = consistency_flags(&sig, &cfg());
            if flags.has_violation() {
                fails.push(format!("{} m={m}: {:?} / {:?}", b.name(), flags.dichotomy, flags.infinite_volume));
            }
            if !sig.lp_downward_closed() {
                fails.push(format!("{} m={m}: finite norms not downward closed", b.name()));
            }
            checked += 1;
        }
    }
    for e in &sweep.ends {
        if e.flags.has_violation() {
            fails.push(format!("power m={} α={}: flag failure", e.m, e.alpha));
        }
        checked += 1;
    }
    outcome(fails, format!("{checked} signatures, 0 violations"))
}

/// `|H|^p dV` for `f = t^α`, from the closed-form geometry: Simpson in
/// `u = ln t` up to `t = e^U`, plus the leading-order power tail.
fn power_lp_oracle(m: u32, alpha: f64, p: f64) -> f64 {
    let k = (m - 1) as f64;
    let omega = unit_sphere_volume(m - 1);
    let integrand = |t: f64| {
        let f = t.powf(alpha);
        let d1 = alpha * t.powf(alpha - 1.0);
        let d2 = alpha * (alpha - 1.0) * t.powf(alpha - 2.0);
        let a = (1.0 + d1 * d1).sqrt();
        let h = (k / (f * a) - d2 / a.powi(3)).abs() / m as f64;
        h.powf(p) * omega * f.powf(k) * a
    };
    let big_u = 80.0;
    let body = simpson(|u: f64| integrand(u.exp()) * u.exp(), 0.0, big_u, 400_000);
    let beta = alpha * (k - p);
    let c = omega * (k / m as f64).powf(p);
    let t_end = big_u.exp();
    body + c * t_end.powf(beta + 1.0) / -(beta + 1.0)
}

/// Every conclusive sweep cell matches the closed-form thresholds.
fn phase_agreement(sweep: &endscope::classify::PhaseTable, secs: f64) -> Outcome {
    let mut fails = Vec::new();
    let s = &sweep.summary;
    if s.disagreements > 0 {
        for c in sweep.cells.iter().filter(|c| c.agreement == Agreement::Disagree) {
            fails.push(format!("m={} α={} {:?} p={:?}: {} vs {}", c.m, c.alpha, c.quantity, c.p, c.analytic, c.numeric));
        }
    }
    if secs >= 60.0 {
        fails.push(format!("sweep took {secs:.1}s"));
    }
    // spot checks: two finite norms against an independent quadrature, one
    // divergent capacity integral against its closed-form growth
    let mut spot = Vec::new();
    for (m, alpha, p) in [(3u32, 0.45, 5.0), (5, 1.0, 6.0)] {
        let cell = sweep
            .cells
            .iter()
            .find(|c| c.m == m && c.alpha == alpha && c.p == Some(p) && c.quantity == Quantity::MeanCurvature);
        let end = power_revolution_end(m, alpha).unwrap();
        let sig = end_signature(&end, &[p], &cfg()).unwrap();
        let oracle = power_lp_oracle(m, alpha, p);
        match (cell.map(|c| c.agreement), sig.lp(p).unwrap()) {
            (Some(Agreement::Agree), ConvergenceVerdict::Converges { value, .. }) => {
                let rel = (value - oracle).abs() / oracle;
                if rel > 1e-6 {
                    fails.push(format!("m={m} α={alpha} p={p}: {value} vs oracle {oracle}"));
                }
                spot.push(format!("{rel:.1e}"));
            }
            other => fails.push(format!("m={m} α={alpha} p={p}: {other:?}")),
        }
    }
    {
        // m = 4, α = 0.3: ∫ a/g³ ~ ∫ t^{-0.9} grows like T^{0.1}/0.1
        let (m, alpha) = (4u32, 0.3);
        let cell = sweep
            .cells
            .iter()
            .find(|c| c.m == m && c.alpha == alpha && c.quantity == Quantity::Parabolicity);
        let density = |t: f64| {
            let d1 = alpha * t.powf(alpha - 1.0);
            (1.0 + d1 * d1).sqrt() / t.powf(alpha * 3.0)
        };
        let partial = |u_end: f64| simpson(|u: f64| density(u.exp()) * u.exp(), 0.0, u_end, 200_000);
        let (q1, q2) = (partial(20.0), partial(40.0));
        let growth = (q2 - q1) / ((0.1f64 * 40.0).exp() - (0.1f64 * 20.0).exp()) * 0.1;
        if cell.map(|c| (c.agreement, c.numeric.as_str())) != Some((Agreement::Agree, "parabolic"))
            || (growth - 1.0).abs() > 1e-3
        {
            fails.push(format!("m=4 α=0.3 parabolicity: {cell:?}, oracle growth {growth}"));
        }
        spot.push(format!("capacity growth {growth:.4}"));
    }
    outcome(
        fails,
        format!(
            "{} cells: {} agree, {} excluded, {} inconclusive; spot checks {}; {secs:.2}s",
            s.cells,
            s.agreements,
            s.excluded,
            s.inconclusive,
            spot.join(", ")
        ),
    )
}

/// `h(r)` nondecreasing on every end; unbounded on the cylinder.
fn energy_growth() -> Outcome {
    let mut fails = Vec::new();
    for m in [3u32, 4] {
        for b in BuiltinEnd::ALL {
            let end = b.build(m).unwrap();
            let t0 = end.t0();
            let radii: Vec<f64> = (0..10).map(|k| t0 + 2f64.powi(k)).collect();
            match energy_trace(&end, t0, &radii, 1.0, &cfg()) {
                Ok(tr) if tr.is_nondecreasing(1e-10) => {}
                Ok(tr) => fails.push(format!("{} m={m}: h = {:?}", b.name(), tr.rows.iter().map(|r| r.h).collect::<Vec<_>>())),
                Err(e) => fails.push(format!("{} m={m}: {e}", b.name())),
            }
        }
    }
    let bound = 1000.0;
    let cyl = BuiltinEnd::Cylinder.build(3).unwrap();
    let radii: Vec<f64> = (0..13).map(|k| 2f64.powi(k)).collect();
    let tr = energy_trace(&cyl, 0.0, &radii, 1.0, &cfg()).unwrap();
    let passed_at = tr.rows.iter().find(|r| r.h > bound).map(|r| r.r);
    if passed_at.is_none() {
        fails.push(format!("cylinder h stays below {bound}"));
    }
    outcome(fails, format!("cylinder h(r) > {bound} from r = {passed_at:?}"))
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut run = |n: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        results.push((n, name, o, start.elapsed().as_secs_f64()));
    };
    let mut per_m = Vec::new();
    run(1, "exponential warp volume and spectral bottom", &mut || exponential_warp(&mut per_m));
    run(2, "slow power end parabolicity, growth and threshold", &mut slow_power);
    run(3, "gaussian neck volume, curvature limit and threshold", &mut gaussian_neck);
    run(4, "Dirichlet profile vs finite differences", &mut dirichlet_oracle);
    run(5, "maximum principle along exhaustions", &mut maximum_principle);

    let start = Instant::now();
    let sweep = sweep_power_family(&SweepSpec::default(), &cfg()).expect("default sweep runs");
    let sweep_secs = start.elapsed().as_secs_f64();
    run(6, "consistency flags on reference ends and sweep", &mut || flag_consistency(&sweep));
    run(7, "power-family phase diagram vs closed form", &mut || phase_agreement(&sweep, sweep_secs));
    run(8, "energy trace monotone and unbounded on the cylinder", &mut energy_growth);

    let mut failed = 0;
    for (n, name, o, secs) in &results {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {n}: {name} ({secs:.2}s): {}", o.detail);
        failed += usize::from(!o.passed);
    }
    println!("per-m runtime for criterion 1: {per_m:.2?}");
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
