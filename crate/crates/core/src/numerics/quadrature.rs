use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::constants::sphere_area;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate.
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            evaluations: self.evaluations,
        }
    }

    fn add(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

/// Stopping rule: the global error estimate must fall below
/// `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: 0.0,
            ..Self::default()
        }
    }

    pub fn relative(tol: f64) -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: tol,
            ..Self::default()
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

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
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_732_258_047,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss 10-point weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

/// One 21-point Gauss–Kronrod panel. Never evaluates `f` at the endpoints.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut resabs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = res_k * half;
    let error = rescale_error((res_k - res_g) * half, resabs * scale, resasc * scale);
    Panel { a, b, value, error }
}

/// Globally adaptive Gauss–Kronrod quadrature over `[a, b]` with optional
/// interior breakpoints (discontinuities, concentration scales).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::InvalidParameter(format!(
            "integration interval [{a}, {b}] must be finite with a < b"
        )));
    }
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut panels = Vec::with_capacity(cuts.len() + 1);
    let mut left = a;
    for &c in cuts.iter().chain(std::iter::once(&b)) {
        panels.push(gk21(&f, left, c));
        left = c;
    }
    let mut evaluations = 21 * panels.len();
    // Max-heap on error; the lower panel index wins ties so the subdivision
    // order is deterministic.
    let mut heap: BinaryHeap<Ranked> =
        panels.iter().enumerate().map(|(i, p)| Ranked { error: p.error, index: i }).collect();
    let mut value: f64 = panels.iter().map(|p| p.value).sum();
    let mut error: f64 = panels.iter().map(|p| p.error).sum();

    loop {
        if error <= opts.target(value) {
            // Re-sum to drop the drift of the running totals.
            value = panels.iter().map(|p| p.value).sum();
            error = panels.iter().map(|p| p.error).sum();
            if error <= opts.target(value) {
                return Ok(QuadratureResult { value, error_estimate: error, evaluations });
            }
        }
        if panels.len() >= opts.max_subdivisions {
            return Err(Error::ToleranceNotMet { value, error_estimate: error, evaluations });
        }
        let worst = heap.pop().expect("at least one panel").index;
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::ToleranceNotMet { value, error_estimate: error, evaluations });
        }
        let (l, r) = (gk21(&f, p.a, mid), gk21(&f, mid, p.b));
        value += l.value + r.value - p.value;
        error += l.error + r.error - p.error;
        panels[worst] = l;
        heap.push(Ranked { error: l.error, index: worst });
        heap.push(Ranked { error: r.error, index: panels.len() });
        panels.push(r);
        evaluations += 42;
    }
}

#[derive(Debug, Clone, Copy)]
struct Ranked {
    error: f64,
    index: usize,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Adaptive quadrature on `[a, b]` to absolute tolerance `tol`.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    integrate_adaptive(f, a, b, &[], &QuadOptions::absolute(tol))
}

/// `∫_a^∞ f` through the substitution `r = a + s/(1−s)`, `s ∈ [0, 1)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    let mapped = |s: f64| {
        let w = 1.0 - s;
        let r = a + s / w;
        let v = f(r) / (w * w);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_adaptive(mapped, 0.0, 1.0, &[0.5], opts)
}

/// Ratio `|∫_{2R}^{4R} h| / |∫_R^{2R} h|` at a large radius. For `h ~ r^{-k}`
/// this equals `2^{1-k}`, so a ratio near or above one signals divergence.
fn tail_ratio<F: Fn(f64) -> f64>(h: &F, radius: f64) -> f64 {
    let near = gk21(h, radius, 2.0 * radius).value.abs();
    let far = gk21(h, 2.0 * radius, 4.0 * radius).value.abs();
    if near == 0.0 {
        if far == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        far / near
    }
}

/// `∫_{ℝⁿ} g(|x|) dx = ω_{n−1} ∫_0^∞ g(r) r^{n−1} dr`.
pub fn integrate_radial<F: Fn(f64) -> f64>(g: F, n: u32, tol: f64) -> Result<QuadratureResult> {
    integrate_radial_with(g, n, &[], &QuadOptions::absolute(tol))
}

/// Radial full-space integral with breakpoints on `[0, 1]` and the improper
/// tail `[1, ∞)` handled separately. Tolerances apply to the final value.
pub fn integrate_radial_with<F: Fn(f64) -> f64>(
    g: F,
    n: u32,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    let omega = sphere_area(n);
    let h = |r: f64| g(r) * r.powi(n as i32 - 1);

    let ratio = tail_ratio(&h, 1e4);
    if ratio > 0.9 {
        return Err(Error::DivergentIntegral { tail_ratio: ratio });
    }

    let part_opts = QuadOptions {
        abs_tol: 0.5 * opts.abs_tol / omega,
        rel_tol: opts.rel_tol,
        max_subdivisions: opts.max_subdivisions,
    };
    let inner = integrate_adaptive(&h, 0.0, 1.0, breakpoints, &part_opts)?;
    let outer_breaks: Vec<f64> = breakpoints.iter().copied().filter(|&b| b > 1.0).collect();
    let outer = if outer_breaks.is_empty() {
        integrate_semi_infinite(&h, 1.0, &part_opts)?
    } else {
        // Map the outer breakpoints through s = (r−1)/r.
        let mapped: Vec<f64> = outer_breaks.iter().map(|&r| (r - 1.0) / r).collect();
        let hs = |s: f64| {
            let w = 1.0 - s;
            let v = h(1.0 + s / w) / (w * w);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        integrate_adaptive(hs, 0.0, 1.0, &mapped, &part_opts)?
    };
    Ok(inner.add(outer).scaled(omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn linear_is_exact() {
        let r = integrate_interval(|t| t, 0.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(r.value, 0.5, epsilon = 1e-15);
        assert!(r.error_estimate >= 0.0 && r.evaluations >= 1);
    }

    #[test]
    fn constant_meets_tight_tolerance() {
        let r = integrate_interval(|_| 1.0, 0.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-15);
        assert!(r.error_estimate <= 1e-12);
    }

    #[test]
    fn gauss_kronrod_degree() {
        // The 21-point Kronrod rule integrates degree-31 polynomials exactly.
        for k in 0..=31 {
            let p = gk21(&|t: f64| t.powi(k), 0.0, 1.0);
            assert_relative_eq!(p.value, 1.0 / (k as f64 + 1.0), max_relative = 1e-13);
        }
    }

    #[test]
    fn improper_beta_integral() {
        // ½B(5/2, 1/2) = 3π/16.
        let r = integrate_semi_infinite(
            |t| t.powi(4) / (1.0 + t * t).powi(3),
            0.0,
            &QuadOptions::relative(1e-12),
        )
        .unwrap();
        assert_relative_eq!(r.value, 3.0 * PI / 16.0, max_relative = 1e-11);
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let opts = QuadOptions {
            abs_tol: 1e-300,
            rel_tol: 0.0,
            max_subdivisions: 8,
        };
        match integrate_adaptive(|t: f64| t.sqrt().sin(), 0.0, 1.0, &[], &opts) {
            Err(Error::ToleranceNotMet { value, .. }) => assert!((value - 0.602337).abs() < 1e-4),
            other => panic!("expected ToleranceNotMet, got {other:?}"),
        }
    }

    #[test]
    fn radial_divergence_detected() {
        // g = r^{-n} in n = 5 gives r^{-1} after the Jacobian.
        let err = integrate_radial(|r| (1.0 + r * r).powf(-2.5), 5, 1e-8).unwrap_err();
        assert!(matches!(err, Error::DivergentIntegral { .. }));
    }

    #[test]
    fn bad_interval_rejected() {
        assert!(integrate_interval(|t| t, 1.0, 0.0, 1e-8).is_err());
        assert!(integrate_interval(|t| t, 0.0, 1.0, 0.0).is_err());
    }
}
