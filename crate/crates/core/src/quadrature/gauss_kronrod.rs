use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Estimate, QuadratureConfig, QuadratureError};

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Cap on the number of live panels, independent of the depth limit.
const MAX_PANELS: usize = 50_000;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // largest error first; ties broken by position so the order is deterministic
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn kronrod21<F>(f: &mut F, a: f64, b: f64, depth: u32) -> Result<Panel, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sample = |t: f64| {
        let v = f(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFiniteSample { t, value: v })
        }
    };

    let fc = sample(center)?;
    let mut gauss = 0.0;
    let mut kronrod = fc * WGK[10];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..5 {
        let k = 2 * j + 1;
        let dx = half * XGK[k];
        let (f1, f2) = (sample(center - dx)?, sample(center + dx)?);
        fv1[k] = f1;
        fv2[k] = f2;
        gauss += WG[j] * (f1 + f2);
        kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let k = 2 * j;
        let dx = half * XGK[k];
        let (f1, f2) = (sample(center - dx)?, sample(center + dx)?);
        fv1[k] = f1;
        fv2[k] = f2;
        kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for k in 0..10 {
        res_asc += WGK[k] * ((fv1[k] - mean).abs() + (fv2[k] - mean).abs());
    }
    let width = half.abs();
    let error = rescale_error((kronrod - gauss) * half, res_abs * width, res_asc * width);
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        error,
        abs_value: res_abs * width,
        depth,
    })
}

/// Adaptive 21-point Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// Panels are bisected largest-error first until the summed error estimate
/// drops below `max(rel_tol |I|, abs_tol)` (or below the round-off floor of
/// the rule). A non-finite sample aborts with `NonFiniteSample`; refining a
/// panel past `max_depth` bisections aborts with `MaxDepthExceeded`, carrying
/// the partial value.
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(Estimate::exact(0.0));
    }

    let first = kronrod21(&mut f, a, b, 0)?;
    let mut value = first.value;
    let mut error = first.error;
    let mut abs_value = first.abs_value;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    loop {
        let target = (cfg.rel_tol * value.abs())
            .max(cfg.abs_tol)
            .max(50.0 * f64::EPSILON * abs_value);
        if error <= target {
            break;
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        if worst.depth >= cfg.max_depth || heap.len() >= MAX_PANELS {
            return Err(QuadratureError::MaxDepthExceeded {
                partial: value,
                error_bound: error,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod21(&mut f, worst.a, mid, worst.depth + 1)?;
        let right = kronrod21(&mut f, mid, worst.b, worst.depth + 1)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        abs_value += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
    }

    // re-sum to shed the drift of the running updates
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    Ok(Estimate {
        value,
        error_bound: error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|t| t * t, 0.0, 1.0, &cfg()).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-15);
        assert!(r.error_bound <= 1e-12);
    }

    #[test]
    fn smooth_transcendental() {
        let r = integrate(f64::exp, 0.0, 2.0, &cfg()).unwrap();
        assert!((r.value - (2f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn kink_is_refined() {
        let r = integrate(|t: f64| (t - 0.3).abs(), 0.0, 1.0, &cfg()).unwrap();
        let exact = 0.5 * (0.3 * 0.3 + 0.7 * 0.7);
        assert!((r.value - exact).abs() <= r.error_bound.max(1e-14));
        assert!((r.value - exact).abs() < 1e-10);
    }

    #[test]
    fn reports_non_finite_samples() {
        let r = integrate(|t: f64| 1.0 / (t - 0.5), 0.0, 1.0, &cfg());
        // the centre of the first panel is exactly the pole
        assert!(matches!(r, Err(QuadratureError::NonFiniteSample { .. })));
    }

    #[test]
    fn depth_limit_returns_partial() {
        let tight = QuadratureConfig {
            max_depth: 2,
            ..cfg()
        };
        let r = integrate(|t: f64| t.sqrt(), 0.0, 1.0, &tight);
        match r {
            Err(QuadratureError::MaxDepthExceeded { partial, .. }) => assert!(partial.is_finite()),
            other => panic!("expected depth error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(matches!(
            integrate(|t| t, 1.0, 0.0, &cfg()),
            Err(QuadratureError::InvalidInterval { .. })
        ));
        assert_eq!(integrate(|t| t, 1.0, 1.0, &cfg()).unwrap().value, 0.0);
    }
}
