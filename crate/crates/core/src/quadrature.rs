//! Adaptive Gauss-Kronrod (10/21 point) quadrature on finite intervals.
//!
//! Panels are kept in a max-heap keyed by their error estimate and the worst
//! panel is bisected until the summed estimate meets the tolerance. Callers
//! can pass interior break points where the integrand is known to be steep.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::QuadratureError;

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

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_626_368_823,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Absolute and relative accuracy targets plus a subdivision budget.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-12, max_panels: 2000 }
    }
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    /// Some panels stopped at the rounding-error floor before the target was met.
    pub roundoff_limited: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    at_floor: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel, QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(QuadratureError::NonFinite(center));
    }
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = fc.abs() * WGK[10];
    let mut fv = [0.0f64; 20];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(QuadratureError::NonFinite(x1));
        }
        if !f2.is_finite() {
            return Err(QuadratureError::NonFinite(x2));
        }
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let mut at_floor = false;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * res_abs;
        if floor >= error {
            error = floor;
            at_floor = true;
        }
    }
    Ok(Panel { a, b, value, error, at_floor })
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral, QuadratureError> {
    integrate_with_breaks(f, a, b, &[], tol)
}

/// Integrates `f` over `[a, b]`, starting from panels split at `breaks`
/// (points outside `(a, b)` are ignored).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Integral, QuadratureError> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(QuadratureError::Interval(a, b));
    }
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0, roundoff_limited: false });
    }
    let mut points: Vec<f64> = breaks.iter().copied().filter(|&p| p > a && p < b).collect();
    points.push(a);
    points.push(b);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Panel> = Vec::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        heap.push(rule(&f, w[0], w[1])?);
        evaluations += 21;
    }
    loop {
        let (value, error) = heap
            .iter()
            .chain(settled.iter())
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target || heap.is_empty() {
            return Ok(Integral { value, error, evaluations, roundoff_limited: !settled.is_empty() && error > target });
        }
        if heap.len() + settled.len() >= tol.max_panels {
            return Err(QuadratureError::Limit { value, error });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        // splitting cannot reduce a rounding-dominated estimate
        if worst.at_floor || mid <= worst.a || mid >= worst.b {
            settled.push(worst);
            continue;
        }
        heap.push(rule(&f, worst.a, mid)?);
        heap.push(rule(&f, mid, worst.b)?);
        evaluations += 42;
    }
}
