//! Special functions: complex log-gamma, modified Bessel K of real order,
//! the Gaussian Q function.

use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};

/// Γ(x) for real x.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// ln |Γ(x)| for real x.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k-1)) for k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Principal-ish branch of ln Γ(z) for complex z.
///
/// Only `exp` of sums of these values is used downstream, so the imaginary part
/// is allowed to differ from the principal branch by multiples of 2π.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: Γ(z)Γ(1-z) = π / sin(πz)
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_complex(1.0 - z);
    }
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    if w.norm() < 15.0 {
        while w.re < 15.0 {
            prod *= w;
            w += 1.0;
        }
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - prod.ln()
}

/// ln sin(πz), stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let w = z * PI;
    if w.im.abs() < 20.0 {
        return w.sin().ln();
    }
    if w.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin w = (i/2) e^{-iw} (1 - e^{2iw}),  |e^{2iw}| < 1 here
    let i = Complex64::new(0.0, 1.0);
    let e2 = (i * w * 2.0).exp();
    Complex64::new(-LN_2, PI / 2.0) - i * w + (1.0 - e2).ln()
}

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

// Taylor coefficients of 1/Γ(z) = Σ c_k z^k, k = 1..26.
const RGAMMA: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// Returns (gam1, gam2, 1/Γ(1+μ), 1/Γ(1-μ)) for |μ| ≤ 1/2, as used by Temme's method.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mut even = 0.0;
    let mut odd_over_mu = 0.0;
    // 1/Γ(1+μ) = Σ c_k μ^{k-1}
    for k in (1..=26).rev() {
        let c = RGAMMA[k - 1];
        if (k - 1) % 2 == 0 {
            even = even * mu * mu + c;
        } else {
            odd_over_mu = odd_over_mu * mu * mu + c;
        }
    }
    let gampl = even + mu * odd_over_mu;
    let gammi = even - mu * odd_over_mu;
    (-odd_over_mu, even, gampl, gammi)
}

/// Modified Bessel function of the second kind K_ν(x), real order ν, x > 0.
///
/// Temme's series for x < 2, Steed/Temme continued fraction above, then forward
/// recurrence in the order. Returns +∞ at x = 0 and NaN for x < 0.
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    if x.is_nan() || nu.is_nan() || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return f64::INFINITY;
    }
    if x > 745.0 {
        return 0.0;
    }
    let nu = nu.abs();
    let nl = (nu + 0.5).floor() as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    const EPS: f64 = 1e-17;
    let (mut rkmu, mut rk1);
    if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..500 {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= dd / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        rkmu = sum;
        rk1 = sum1 * xi2;
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut c = a1;
        let mut q = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..10_000 {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        h *= a1;
        rkmu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
    }
    for i in 1..=nl {
        let next = (xmu + i as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = next;
    }
    rkmu
}

/// ln K_ν(x), usable where K_ν underflows (large x).
pub fn ln_bessel_k(nu: f64, x: f64) -> f64 {
    if x < 600.0 {
        return bessel_k(nu, x).ln();
    }
    // scaled evaluation through the asymptotic expansion
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..30 {
        let kf = k as f64;
        term *= (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * x);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    0.5 * (PI / (2.0 * x)).ln() - x + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn complex_lgamma_matches_real() {
        for &x in &[0.1, 0.5, 1.0, 2.5, 7.3, 20.0, 150.0] {
            let z = ln_gamma_complex(Complex64::new(x, 0.0));
            assert_relative_eq!(z.re, ln_gamma(x), max_relative = 1e-13, epsilon = 1e-14);
        }
        // negative non-integer argument: |Γ(-0.5)| = 2√π
        let z = ln_gamma_complex(Complex64::new(-0.5, 0.0));
        assert_relative_eq!(z.exp().re, -2.0 * PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn complex_lgamma_recurrence_off_axis() {
        for &(x, y) in &[(0.3, 4.0), (-3.7, 25.0), (5.0, -60.0), (-40.2, 300.0)] {
            let z = Complex64::new(x, y);
            let lhs = ln_gamma_complex(z + 1.0) - ln_gamma_complex(z);
            let d = (lhs - z.ln()).exp();
            assert!((d - 1.0).norm() < 1e-11, "z={z} d={d}");
        }
    }

    #[test]
    fn gamma_abs_on_imaginary_axis() {
        // |Γ(iy)|² = π / (y sinh(πy))
        for &y in &[0.5, 3.0, 30.0] {
            let z = ln_gamma_complex(Complex64::new(0.0, y));
            let expect = 0.5 * (PI / (y * (PI * y).sinh())).ln();
            assert_relative_eq!(z.re, expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn bessel_half_order_closed_form() {
        for &x in &[0.01, 0.3, 1.0, 1.9, 2.1, 5.0, 40.0] {
            let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert_relative_eq!(bessel_k(0.5, x), exact, max_relative = 1e-13);
            let exact15 = exact * (1.0 + 1.0 / x);
            assert_relative_eq!(bessel_k(1.5, x), exact15, max_relative = 1e-13);
        }
    }

    #[test]
    fn bessel_reference_values() {
        assert_relative_eq!(bessel_k(0.0, 2.0), 0.113_893_872_749_533_44, max_relative = 1e-13);
        assert_relative_eq!(bessel_k(1.0, 1.0), 0.601_907_230_197_234_6, max_relative = 1e-13);
        assert_relative_eq!(bessel_k(0.0, 0.1), 2.427_069_024_702_016_7, max_relative = 1e-13);
        assert_relative_eq!(bessel_k(2.0, 0.5), 7.550_183_551_240_869, max_relative = 1e-13);
    }

    #[test]
    fn bessel_recurrence_real_order() {
        // K_{ν+1}(x) = K_{ν-1}(x) + (2ν/x) K_ν(x)
        for &nu in &[0.3, 0.54653, 1.2, 2.7] {
            for &x in &[0.05, 1.0, 3.0, 12.0] {
                let lhs = bessel_k(nu + 1.0, x);
                let rhs = bessel_k(nu - 1.0, x) + 2.0 * nu / x * bessel_k(nu, x);
                assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn ln_bessel_continuity() {
        let a = ln_bessel_k(0.4, 599.999);
        let b = ln_bessel_k(0.4, 600.001);
        assert!((a - b).abs() < 0.01);
    }

    #[test]
    fn q_function_values() {
        assert_relative_eq!(q_function(0.0), 0.5, max_relative = 1e-15);
        assert_relative_eq!(q_function(1.0), 0.158_655_253_931_457_05, max_relative = 1e-13);
        assert_relative_eq!(q_function(5.0), 2.866_515_718_791_939e-7, max_relative = 1e-12);
    }
}
