//! Meijer G-function of real positive argument by Mellin-Barnes line integration.
//!
//! G^{m,n}_{p,q}(x | a; b) = (1/2πi) ∫_L F(s) x^s ds with
//! F(s) = Π_{j≤m} Γ(b_j - s) Π_{j≤n} Γ(1 - a_j + s) / (Π_{j>m} Γ(1 - b_j + s) Π_{j>n} Γ(a_j - s)).
//!
//! Identical numerator/denominator Gamma factors are cancelled first. The line
//! Re s = c is placed left of every pole of the Γ(b_j - s) family and right of as
//! many poles of the Γ(1 - a_j + s) family as possible; simple poles of the latter
//! stranded to the right of the line are added back as residues. Within the
//! admissible strip c minimises |F(c) x^c|, which keeps the oscillatory integral
//! free of cancellation even for very small results.

use crate::error::{eval, Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::special::{ln_gamma, ln_gamma_complex};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Parameters and argument of a Meijer G-function.
///
/// `a_top` holds a_1..a_p (the first `n` form the numerator part), `b_bottom`
/// holds b_1..b_q (the first `m` form the numerator part).
#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    pub a_top: Vec<f64>,
    pub b_bottom: Vec<f64>,
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub argument: f64,
}

impl MeijerGSpec {
    /// Builds G^{m,n}_{p,q} from the four parameter groups
    /// (a_1..a_n), (a_{n+1}..a_p), (b_1..b_m), (b_{m+1}..b_q).
    pub fn new(an: &[f64], ap: &[f64], bm: &[f64], bq: &[f64], argument: f64) -> Self {
        let mut a_top = an.to_vec();
        a_top.extend_from_slice(ap);
        let mut b_bottom = bm.to_vec();
        b_bottom.extend_from_slice(bq);
        Self {
            m: bm.len(),
            n: an.len(),
            p: a_top.len(),
            q: b_bottom.len(),
            a_top,
            b_bottom,
            argument,
        }
    }

    pub fn with_argument(&self, argument: f64) -> Self {
        Self { argument, ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        if self.a_top.len() != self.p || self.b_bottom.len() != self.q || self.m > self.q || self.n > self.p {
            return Err(Error::Contract(format!(
                "inconsistent Meijer-G sizes m={} n={} p={} q={} (|a|={}, |b|={})",
                self.m,
                self.n,
                self.p,
                self.q,
                self.a_top.len(),
                self.b_bottom.len()
            )));
        }
        if !(self.argument > 0.0) || !self.argument.is_finite() {
            return Err(Error::Domain(format!("Meijer-G argument must be positive, got {}", self.argument)));
        }
        if self.a_top.iter().chain(&self.b_bottom).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite Meijer-G parameter".into()));
        }
        Ok(())
    }
}

/// Value of a Meijer G evaluation with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeijerGValue {
    pub value: f64,
    /// Estimated relative error of `value`.
    pub rel_err: f64,
    /// False when `rel_err` exceeds 1e-6.
    pub accurate: bool,
}

/// Γ(shift + sign·s)
#[derive(Debug, Clone, Copy)]
struct Factor {
    shift: f64,
    sign: f64,
}

impl Factor {
    /// Nonpositive integer -k reached by the argument at s, if any.
    fn singular_at(&self, s: f64) -> Option<u32> {
        let z = self.shift + self.sign * s;
        let r = z.round();
        if r <= 0.0 && (z - r).abs() < 1e-10 * (1.0 + z.abs()) {
            Some((-r) as u32)
        } else {
            None
        }
    }
}

/// Integrand after cancellation, with the contour bookkeeping done.
struct Kernel {
    num: Vec<Factor>,
    den: Vec<Factor>,
    lo: f64,
    hi: f64,
    stranded: Vec<f64>,
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-13 * (1.0 + a.abs())
}

fn ln_abs_gamma_real(x: f64) -> (f64, f64) {
    if x > 0.0 {
        return (ln_gamma(x), 1.0);
    }
    let r = x - 2.0 * (x / 2.0).floor();
    let s = (PI * r).sin();
    (PI.ln() - s.abs().ln() - ln_gamma(1.0 - x), s.signum())
}

impl Kernel {
    fn build(spec: &MeijerGSpec, drop: PoleDrop) -> Result<Self> {
        let (an, ap) = spec.a_top.split_at(spec.n);
        let (bm, bq) = spec.b_bottom.split_at(spec.m);
        let mut an: Vec<f64> = an.to_vec();
        let mut ap: Vec<f64> = ap.to_vec();
        let mut bm: Vec<f64> = bm.to_vec();
        let mut bq: Vec<f64> = bq.to_vec();
        // Γ(1 - a + s) / Γ(1 - b + s) with a = b
        an.retain(|&a| {
            if let Some(i) = bq.iter().position(|&b| same(a, b)) {
                bq.remove(i);
                false
            } else {
                true
            }
        });
        // Γ(b - s) / Γ(a - s) with a = b
        bm.retain(|&b| {
            if let Some(i) = ap.iter().position(|&a| same(a, b)) {
                ap.remove(i);
                false
            } else {
                true
            }
        });
        let mut num = Vec::new();
        let mut den = Vec::new();
        for &b in &bm {
            num.push(Factor { shift: b, sign: -1.0 });
        }
        for &a in &an {
            num.push(Factor { shift: 1.0 - a, sign: 1.0 });
        }
        for &b in &bq {
            den.push(Factor { shift: 1.0 - b, sign: 1.0 });
        }
        for &a in &ap {
            den.push(Factor { shift: a, sign: -1.0 });
        }
        let mut k = Kernel { num, den, lo: f64::NEG_INFINITY, hi: f64::INFINITY, stranded: Vec::new() };
        k.place_contour(drop)?;
        Ok(k)
    }

    /// (pole order, touches right family, touches left family)
    fn pole(&self, s: f64) -> (i32, bool, bool) {
        let mut order = 0;
        let mut right = false;
        let mut left = false;
        for f in &self.num {
            if f.singular_at(s).is_some() {
                order += 1;
                if f.sign < 0.0 {
                    right = true;
                } else {
                    left = true;
                }
            }
        }
        for f in &self.den {
            if f.singular_at(s).is_some() {
                order -= 1;
            }
        }
        (order, right, left)
    }

    fn place_contour(&mut self, drop: PoleDrop) -> Result<()> {
        const SCAN: usize = 400;
        let mut right_min = f64::INFINITY;
        for f in self.num.iter().filter(|f| f.sign < 0.0) {
            for k in 0..SCAN {
                let s = f.shift + k as f64;
                if s <= drop.right_upto {
                    continue;
                }
                let (order, _, left) = self.pole(s);
                if order >= 1 {
                    if left {
                        return Err(eval(format!("left and right pole families collide at s = {s}")));
                    }
                    right_min = right_min.min(s);
                    break;
                }
            }
        }
        let mut left_max = f64::NEG_INFINITY;
        let mut stranded = Vec::new();
        for f in self.num.iter().filter(|f| f.sign > 0.0) {
            for k in 0..SCAN {
                let s = -f.shift - k as f64;
                let (order, right, _) = self.pole(s);
                if order < 1 {
                    continue;
                }
                if right {
                    return Err(eval(format!("left and right pole families collide at s = {s}")));
                }
                if s >= right_min {
                    if order > 1 {
                        return Err(eval(format!("stranded pole of order {order} at s = {s}")));
                    }
                    if s < drop.left_from && !stranded.iter().any(|&t| same(t, s)) {
                        stranded.push(s);
                    }
                } else {
                    left_max = left_max.max(s);
                    break;
                }
            }
        }
        if right_min.is_infinite() && left_max.is_infinite() && self.num.is_empty() {
            return Err(eval("integrand has no Gamma factors in the numerator"));
        }
        if drop.right_upto.is_finite() {
            if drop.right_upto >= right_min {
                return Err(eval("no right-family pole left above the dropped range"));
            }
            left_max = left_max.max(drop.right_upto);
        }
        self.lo = left_max;
        self.hi = right_min;
        self.stranded = stranded;
        Ok(())
    }

    /// Re log|F(c)| + c ln x on the real axis.
    fn phi(&self, c: f64, lnx: f64) -> f64 {
        let mut v = c * lnx;
        for f in &self.num {
            v += ln_abs_gamma_real(f.shift + f.sign * c).0;
        }
        for f in &self.den {
            v -= ln_abs_gamma_real(f.shift + f.sign * c).0;
        }
        v
    }

    fn log_integrand(&self, s: Complex64, lnx: f64) -> Complex64 {
        let mut v = s * lnx;
        for f in &self.num {
            v += ln_gamma_complex(Complex64::new(f.shift, 0.0) + s * f.sign);
        }
        for f in &self.den {
            let z = Complex64::new(f.shift, 0.0) + s * f.sign;
            if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
                // 1/Γ at a pole is zero
                return Complex64::new(f64::NEG_INFINITY, 0.0);
            }
            v -= ln_gamma_complex(z);
        }
        v
    }

    fn choose_c(&self, lnx: f64) -> f64 {
        let phi = |c: f64| {
            let v = self.phi(c, lnx);
            if v.is_nan() { f64::INFINITY } else { v }
        };
        let (mut a, mut b) = match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => (self.lo, self.hi),
            (false, true) => (self.hi - 1.0, self.hi),
            (true, false) => (self.lo, self.lo + 1.0),
            (false, false) => (-1.0, 1.0),
        };
        // grow the bracket on open sides while phi keeps falling
        if !self.lo.is_finite() {
            let mut step = 1.0;
            let mut prev = phi(a);
            loop {
                let next = a - step;
                let v = phi(next);
                if v >= prev || step > 1e5 {
                    a = next;
                    break;
                }
                prev = v;
                a = next;
                step *= 2.0;
            }
        }
        if !self.hi.is_finite() {
            let mut step = 1.0;
            let mut prev = phi(b);
            loop {
                let next = b + step;
                let v = phi(next);
                if v >= prev || step > 1e5 {
                    b = next;
                    break;
                }
                prev = v;
                b = next;
                step *= 2.0;
            }
        }
        // golden-section search strictly inside the strip
        let width = b - a;
        let margin = if self.lo.is_finite() || self.hi.is_finite() { 1e-3 * width.min(1.0) } else { 0.0 };
        let mut lo = if self.lo.is_finite() { a + margin } else { a };
        let mut hi = if self.hi.is_finite() { b - margin } else { b };
        let g = 0.5 * (5.0f64.sqrt() - 1.0);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let mut f1 = phi(x1);
        let mut f2 = phi(x2);
        for _ in 0..80 {
            if (hi - lo) < 1e-6 * (1.0 + lo.abs()) {
                break;
            }
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = phi(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = phi(x2);
            }
        }
        0.5 * (lo + hi)
    }

    fn residue(&self, s0: f64, lnx: f64) -> f64 {
        let mut ln_mag = s0 * lnx;
        let mut sign = 1.0;
        for (list, power) in [(&self.num, 1.0), (&self.den, -1.0)] {
            for f in list.iter() {
                match f.singular_at(s0) {
                    Some(k) => {
                        // Γ(-k + σε) ≈ (-1)^k / (k! σ ε)
                        let kf = k as f64;
                        ln_mag -= power * ln_gamma(kf + 1.0);
                        let sgn = if k % 2 == 0 { 1.0 } else { -1.0 } * f.sign;
                        sign *= sgn;
                    }
                    None => {
                        let (l, sg) = ln_abs_gamma_real(f.shift + f.sign * s0);
                        ln_mag += power * l;
                        sign *= sg;
                    }
                }
            }
        }
        // the line integral is (1/2πi)∫ F x^s ds; residues enter with the sign
        // of moving the line to the right across a left-family pole: +Res, and
        // Res_{s=s0} Γ(c + σ s) carries 1/σ, already folded into `sign`.
        sign * ln_mag.exp()
    }

    fn evaluate(&self, x: f64) -> Result<MeijerGValue> {
        let lnx = x.ln();
        let c = self.choose_c(lnx);
        let phi_c = self.phi(c, lnx);
        if !phi_c.is_finite() {
            return Err(eval(format!("integrand not finite at contour c = {c}")));
        }
        let h = |t: f64| -> f64 {
            let s = Complex64::new(c, t);
            let l = self.log_integrand(s, lnx) - phi_c;
            if l.re < -745.0 {
                0.0
            } else {
                l.re.exp() * l.im.cos()
            }
        };
        // find where |integrand| has decayed for good
        let mag = |t: f64| self.log_integrand(Complex64::new(c, t), lnx).re - phi_c;
        let mut t_end = 1.0;
        let mut quiet = 0;
        let mut t = 0.0;
        while t < 1e4 {
            t += 0.5 + 0.05 * t;
            if mag(t) < -45.0 {
                quiet += 1;
                if quiet >= 4 {
                    t_end = t;
                    break;
                }
            } else {
                quiet = 0;
            }
            t_end = t;
        }
        let opts = QuadOptions { rel_tol: 1e-13, abs_tol: 1e-16, max_intervals: 4000 };
        let r = integrate(h, 0.0, t_end, opts);
        let scale = phi_c.exp() / PI;
        let line = r.value * scale;
        let line_err = r.abs_err.max(1e-16) * scale;
        let mut value = line;
        for &s0 in &self.stranded {
            value += self.residue(s0, lnx);
        }
        if !value.is_finite() {
            return Err(eval(format!("non-finite Meijer-G value at x = {x}")));
        }
        let rel_err = if value != 0.0 {
            line_err / value.abs()
        } else if phi_c < -700.0 && self.stranded.is_empty() {
            // underflow of a positive-definite scale; zero is as good as it gets
            0.0
        } else {
            f64::INFINITY
        };
        let rel_err = if r.converged { rel_err } else { rel_err.max(1e-3) };
        Ok(MeijerGValue { value, rel_err, accurate: rel_err <= 1e-6 })
    }
}

/// Poles whose contributions are left out of a reduced evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleDrop {
    /// Γ(b_j - s) poles at s ≤ this value.
    pub right_upto: f64,
    /// Stranded Γ(1 - a_j + s) poles at s ≥ this value.
    pub left_from: f64,
}

impl PoleDrop {
    pub const NONE: PoleDrop = PoleDrop { right_upto: f64::NEG_INFINITY, left_from: f64::INFINITY };
}

/// Evaluates the Meijer G-function described by `spec`.
///
/// Errors when the poles of the two Gamma families coincide (no admissible
/// contour) or when a stranded pole is not simple.
pub fn meijer_g(spec: &MeijerGSpec) -> Result<MeijerGValue> {
    meijer_g_reduced(spec, PoleDrop::NONE)
}

/// G minus the residue contributions of the poles selected by `drop`.
///
/// Differences such as κ₁ G(cκ₁) - κ₂ G(cκ₂) often share a pole term exactly;
/// removing it from both sides up front avoids losing the result to cancellation.
pub fn meijer_g_reduced(spec: &MeijerGSpec, drop: PoleDrop) -> Result<MeijerGValue> {
    spec.validate()?;
    Kernel::build(spec, drop)?.evaluate(spec.argument)
}

/// Convenience wrapper returning only the value.
pub fn meijer_g_value(an: &[f64], ap: &[f64], bm: &[f64], bq: &[f64], x: f64) -> Result<f64> {
    Ok(meijer_g(&MeijerGSpec::new(an, ap, bm, bq, x))?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel_k;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_reduction() {
        let v = meijer_g_value(&[], &[], &[0.0], &[], 1.0).unwrap();
        assert_relative_eq!(v, 0.367_879_441_171_442_3, max_relative = 1e-12);
        for &x in &[0.01, 0.5, 7.0, 100.0] {
            let v = meijer_g_value(&[], &[], &[0.0], &[], x).unwrap();
            assert_relative_eq!(v, (-x).exp(), max_relative = 1e-11);
        }
    }

    #[test]
    fn bessel_reduction() {
        for &nu in &[0.0, 0.3, 0.54653, 1.0, 2.5] {
            for &x in &[0.01, 1.0, 30.0, 100.0] {
                let g = meijer_g_value(&[], &[], &[nu / 2.0, -nu / 2.0], &[], x).unwrap();
                assert_relative_eq!(0.5 * g, bessel_k(nu, 2.0 * x.sqrt()), max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn cancellation_of_identical_factors() {
        // G^{1,1}_{1,2}(x | 1; 0, 1) reduces to G^{1,0}_{0,1}(x | -; 0) = e^{-x}
        let v = meijer_g_value(&[1.0], &[], &[0.0], &[1.0], 2.0).unwrap();
        assert_relative_eq!(v, (-2.0f64).exp(), max_relative = 1e-11);
    }

    #[test]
    fn one_plus_x_power() {
        // G^{1,1}_{1,1}(x | 0; 0) = 1/(1+x)
        for &x in &[0.1, 1.0, 9.0] {
            let v = meijer_g_value(&[0.0], &[], &[0.0], &[], x).unwrap();
            assert_relative_eq!(v, 1.0 / (1.0 + x), max_relative = 1e-11);
        }
    }

    #[test]
    fn stranded_left_pole_residue() {
        // G^{1,1}_{1,1}(x | a; b) = Γ(1-a+b) x^b (1+x)^{a-b-1}; a = 2.5, b = 0 puts the
        // left pole at s = 1.5 right of the right pole s = 0.
        for &x in &[0.2, 1.0, 5.0] {
            let v = meijer_g_value(&[2.5], &[], &[0.0], &[], x).unwrap();
            let expect = crate::special::gamma(-1.5) * (1.0 + x).powf(1.5);
            assert_relative_eq!(v, expect, max_relative = 1e-10);
        }
    }

    #[test]
    fn tiny_values_keep_relative_accuracy() {
        let v = meijer_g_value(&[], &[], &[0.0], &[], 100.0).unwrap();
        assert_relative_eq!(v, (-100.0f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn bad_argument() {
        assert!(meijer_g_value(&[], &[], &[0.0], &[], -1.0).is_err());
    }
}
