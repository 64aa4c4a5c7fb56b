//! Numerical integration: globally adaptive Gauss-Kronrod (21 point), a
//! log-variable wrapper for integrals over (0, ∞), and Gauss-Chebyshev.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::f64::consts::PI;

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
    0.123_491_976_262_065_851_077_208_838_238_600,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub converged: bool,
}

/// Tolerances and budget for the adaptive integrators.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 0.0, max_intervals: 2000 }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[10];
    let mut resabs = resk.abs();
    let mut resg = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = resk * h;
    let resabs = resabs * h.abs();
    let resasc = resasc * h.abs();
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, abs_err: 0.0, converged: true };
    }
    let (v, e) = kronrod21(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, err: e });
    let mut total = v;
    let mut total_err = e;
    let mut count = 1;
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= tol || !total.is_finite() {
            break;
        }
        if count >= opts.max_intervals {
            return QuadResult { value: total, abs_err: total_err, converged: false };
        }
        let seg = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            heap.push(seg);
            return QuadResult { value: total, abs_err: total_err, converged: false };
        }
        let (v1, e1) = kronrod21(&mut f, seg.a, mid);
        let (v2, e2) = kronrod21(&mut f, mid, seg.b);
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.err;
        heap.push(Segment { a: seg.a, b: mid, value: v1, err: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, err: e2 });
        count += 1;
        if count % 64 == 0 {
            // resum to limit drift
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.err).sum();
        }
    }
    let converged = total.is_finite();
    QuadResult { value: total, abs_err: total_err, converged }
}

/// Integrates `f` over `[lo, hi]` (0 ≤ lo < hi ≤ ∞) in the variable t = ln x.
///
/// `scale` is a typical magnitude of x where the integrand lives; the t-range is
/// grown outward from ln(scale) until the integrand is negligible. Finite
/// endpoints clip the range.
pub fn integrate_log<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    scale: f64,
    opts: QuadOptions,
) -> QuadResult {
    let mut g = |t: f64| {
        let x = t.exp();
        let v = f(x) * x;
        if v.is_finite() { v } else { 0.0 }
    };
    let t_min = if lo > 0.0 { lo.ln() } else { -745.0 };
    let t_max = if hi.is_finite() { hi.ln() } else { 709.0 };
    if t_min >= t_max {
        return QuadResult { value: 0.0, abs_err: 0.0, converged: true };
    }
    let c = scale.ln().clamp(t_min, t_max);
    let mut peak: f64 = 0.0;
    let mut probe = c - 4.0;
    while probe <= c + 4.0 {
        if probe >= t_min && probe <= t_max {
            peak = peak.max(g(probe).abs());
        }
        probe += 0.5;
    }
    let tiny = 1e-20;
    let extend = |g: &mut dyn FnMut(f64) -> f64, start: f64, limit: f64, dir: f64, peak: &mut f64| {
        let mut t = start;
        let mut quiet = 0;
        loop {
            let next = t + dir;
            if (dir > 0.0 && next >= limit) || (dir < 0.0 && next <= limit) {
                return limit;
            }
            t = next;
            let v = g(t).abs();
            *peak = peak.max(v);
            if v <= tiny * *peak {
                quiet += 1;
                if quiet >= 3 {
                    return t;
                }
            } else {
                quiet = 0;
            }
        }
    };
    let a = extend(&mut g, c, t_min, -1.0, &mut peak);
    let b = extend(&mut g, c, t_max, 1.0, &mut peak);
    integrate(g, a, b, opts)
}

/// Gauss-Chebyshev approximation of ∫_a^b f(x) dx with `chi` nodes:
/// (b-a)/2 · Σ (π/χ) √(1-y_i²) f(x_i), y_i = cos((2i-1)π/(2χ)), x_i = (b-a)/2 · y_i + (b+a)/2.
pub fn gauss_chebyshev<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, chi: usize) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let w = PI / chi as f64;
    let mut sum = 0.0;
    for i in 1..=chi {
        let y = ((2 * i - 1) as f64 * PI / (2 * chi) as f64).cos();
        sum += w * (1.0 - y * y).sqrt() * f(half * y + mid);
    }
    half * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 3.0, QuadOptions::default());
        assert_relative_eq!(r.value, 81.0 / 4.0 - 9.0, max_relative = 1e-14);
        assert!(r.converged);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x: f64| x.ln(), 0.0, 1.0, QuadOptions::rel(1e-12));
        assert_relative_eq!(r.value, -1.0, max_relative = 1e-11);
    }

    #[test]
    fn log_variable_semi_infinite() {
        let r = integrate_log(|x: f64| (-x).exp(), 0.0, f64::INFINITY, 1.0, QuadOptions::rel(1e-12));
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-11);
        let r = integrate_log(|x: f64| 1.0 / (1.0 + x * x), 0.0, f64::INFINITY, 1.0, QuadOptions::rel(1e-12));
        assert_relative_eq!(r.value, PI / 2.0, max_relative = 1e-10);
        let r = integrate_log(|x: f64| (-x).exp(), 2.0, f64::INFINITY, 1.0, QuadOptions::rel(1e-12));
        assert_relative_eq!(r.value, (-2.0f64).exp(), max_relative = 1e-11);
    }

    #[test]
    fn chebyshev_sine() {
        let v = gauss_chebyshev(f64::sin, 0.0, PI, 20);
        assert!((v - 2.0).abs() < 1e-3);
    }

    #[test]
    fn chebyshev_constant() {
        // the rule integrates a constant to c(b-a)/2 · (π/χ)/sin(π/(2χ)), not c(b-a)
        for chi in 2..40 {
            let v = gauss_chebyshev(|_| 3.5, -1.0, 4.0, chi);
            let w = PI / chi as f64;
            let expect = 3.5 * 2.5 * w / (0.5 * w).sin();
            assert_relative_eq!(v, expect, max_relative = 1e-12);
            assert!((v / 17.5 - 1.0).abs() < 0.45 / (chi * chi) as f64);
        }
    }
}
