//! Closed-form building blocks in Meijer G-functions.
//!
//! Naming: `a`, `b` are the modulation constants of a·Q(√(2bγ)); S→R distance is
//! U(f, g), R→D distance is U(r, p); `v` is the path-loss exponent.

use crate::channel::GammaGammaParams;
use crate::error::{eval, Result};
use crate::meijer::{meijer_g_reduced, MeijerGSpec, PoleDrop};
use crate::special::ln_gamma;
use std::f64::consts::PI;

fn g(an: &[f64], ap: &[f64], bm: &[f64], bq: &[f64], x: f64) -> Result<f64> {
    g_reduced(an, ap, bm, bq, x, PoleDrop::NONE)
}

/// Meijer G without pole terms that cancel exactly in the difference it enters.
fn g_reduced(an: &[f64], ap: &[f64], bm: &[f64], bq: &[f64], x: f64, drop: PoleDrop) -> Result<f64> {
    let r = meijer_g_reduced(&MeijerGSpec::new(an, ap, bm, bq, x), drop)?;
    if !r.accurate {
        return Err(eval(format!(
            "Meijer-G error estimate {:.2e} too large (m={}, n={}, x={x:e})",
            r.rel_err,
            bm.len(),
            an.len()
        )));
    }
    Ok(r.value)
}

// The pole terms dropped below carry no κ (or μ) dependence once the prefactor
// is applied, so they cancel between the endpoint terms of every difference.
fn drop_left(from: f64) -> PoleDrop {
    PoleDrop { left_from: from - 1e-9, ..PoleDrop::NONE }
}

fn drop_right(upto: f64) -> PoleDrop {
    PoleDrop { right_upto: upto + 1e-9, ..PoleDrop::NONE }
}

fn sqrt_pi() -> f64 {
    PI.sqrt()
}

/// S→R SER at a fixed path loss z: τ·G^{3,3}_{5,4}(bz/β).
pub fn sr_conditional(a: f64, b: f64, th: &GammaGammaParams, z: f64) -> Result<f64> {
    let (al, be, xi) = (th.alpha, th.beta, th.xi);
    let tau = a * th.psi / (4.0 * sqrt_pi() * be.powf(al));
    let v = g(
        &[1.0, 1.0 - al - 0.5 * xi, 1.0 - al + 0.5 * xi],
        &[-al, 1.0],
        &[0.0, 0.5, -al],
        &[1.0],
        b * z / be,
    )?;
    Ok(tau * v)
}

/// Ξ(κ) = κ·G^{3,4}_{6,5}(b/(κ^v β)).
fn xi_term(b: f64, th: &GammaGammaParams, kappa: f64, v: f64) -> Result<f64> {
    let (al, be, xi) = (th.alpha, th.beta, th.xi);
    let val = g_reduced(
        &[1.0, 1.0 - al - 0.5 * xi, 1.0 - al + 0.5 * xi, 1.0 + 1.0 / v],
        &[-al, 1.0],
        &[0.0, 0.5, -al],
        &[1.0 / v, 1.0],
        b / (kappa.powf(v) * be),
        drop_left(1.0 / v),
    )?;
    Ok(kappa * val)
}

/// S→R SER averaged over d_sr ~ U(f, g).
pub fn sr_uniform(a: f64, b: f64, th: &GammaGammaParams, f: f64, gg: f64, v: f64) -> Result<f64> {
    let tau = a * th.psi / (4.0 * sqrt_pi() * th.beta.powf(th.alpha));
    Ok(tau / ((gg - f) * v) * (xi_term(b, th, f, v)? - xi_term(b, th, gg, v)?))
}

/// R→D SER given the end-to-end scale x·z·w of the double-Rayleigh hop:
/// (a/2√π)·G^{3,3}_{5,4}(b ȳ x z w).
pub fn rd_conditional(a: f64, b: f64, ybar: f64, scale: f64) -> Result<f64> {
    let v = g(&[1.0, 0.0, 0.0], &[-1.0, 1.0], &[0.0, 0.5, -1.0], &[1.0], b * ybar * scale)?;
    Ok(a / (2.0 * sqrt_pi()) * v)
}

/// ϱ(μ)
fn varrho(a: f64, b: f64, ybar: f64, u: f64, mu: f64, r: f64, p: f64, v: f64) -> Result<f64> {
    let val = g_reduced(
        &[1.0, 0.0, 0.0, 1.0 + 1.0 / v],
        &[-1.0, 1.0],
        &[0.0, 0.5, -1.0],
        &[1.0 / v, 1.0],
        b * ybar * u / mu.powf(v),
        drop_left(1.0 / v),
    )?;
    Ok(a * mu / (2.0 * sqrt_pi() * (p - r) * v) * val)
}

/// R→D SER given harvested power u, averaged over d_rd ~ U(r, p): ϱ(r) - ϱ(p).
#[allow(clippy::too_many_arguments)]
pub fn rd_cond_uniform(a: f64, b: f64, ybar: f64, u: f64, r: f64, p: f64, v: f64) -> Result<f64> {
    Ok(varrho(a, b, ybar, u, r, r, p, v)? - varrho(a, b, ybar, u, p, r, p, v)?)
}

/// ϑ(κ) = κ^(1+vα) G^{3,1}_{2,4}(β κ^v u)
fn vartheta(x: &GammaGammaParams, kappa: f64, u: f64, v: f64) -> Result<f64> {
    let al = x.alpha;
    let val = g_reduced(
        &[1.0],
        &[1.0 - al - 1.0 / v],
        &[0.5 * x.xi, -0.5 * x.xi, -al - 1.0 / v],
        &[1.0],
        x.beta * kappa.powf(v) * u,
        drop_right(-al - 1.0 / v),
    )?;
    Ok(kappa.powf(1.0 + v * al) * val)
}

/// Density of U = X·Z with d_sr ~ U(f, g).
pub fn u_pdf(u: f64, x: &GammaGammaParams, f: f64, gg: f64, v: f64) -> Result<f64> {
    let d = vartheta(x, f, u, v)? - vartheta(x, gg, u, v)?;
    // far in the tail the difference is rounding noise of either sign
    Ok((x.psi / (2.0 * v * (gg - f)) * u.powf(x.alpha - 1.0) * d).max(0.0))
}

/// σ(κ) = P^α κ^(1+vα) G^{3,2}_{3,5}(β P κ^v)
fn sigma(x: &GammaGammaParams, kappa: f64, t: f64, v: f64) -> Result<f64> {
    let al = x.alpha;
    let val = g_reduced(
        &[1.0, 1.0 - al],
        &[1.0 - al - 1.0 / v],
        &[0.5 * x.xi, -0.5 * x.xi, -al - 1.0 / v],
        &[-al, 1.0],
        x.beta * t * kappa.powf(v),
        drop_right(-al - 1.0 / v),
    )?;
    Ok(t.powf(al) * kappa.powf(1.0 + v * al) * val)
}

/// P(U ≤ t) with d_sr ~ U(f, g).
pub fn u_cdf(t: f64, x: &GammaGammaParams, f: f64, gg: f64, v: f64) -> Result<f64> {
    let d = sigma(x, f, t, v)? - sigma(x, gg, t, v)?;
    Ok(x.psi / (2.0 * v * (gg - f)) * d)
}

/// φ(μ, κ) of the linear-harvester uniform-distance R→D SER, G^{7,4}_{7,10}.
#[allow(clippy::too_many_arguments)]
fn varphi(a: f64, b: f64, ybar: f64, x: &GammaGammaParams, mu: f64, kappa: f64, r: f64, p: f64, v: f64) -> Result<f64> {
    let al = x.alpha;
    let iv = 1.0 / v;
    let val = g_reduced(
        &[1.0, 1.0 - al, 0.5 - al, 2.0 - al],
        &[1.0 - al - iv, -al, 1.0 - al - iv],
        &[0.5 * x.xi, -0.5 * x.xi, -al - iv, -al, 1.0 - al, 1.0 - al, -al - iv],
        &[2.0 - al, -al, 1.0],
        x.beta * kappa.powf(v) * mu.powf(v) / (b * ybar),
        drop_right(-al - iv),
    )?;
    let ln_pref = (a * mu / (2.0 * v * (p - r) * sqrt_pi())).ln()
        + (1.0 + v * al) * kappa.ln()
        + al * (v * mu.ln() - (b * ybar).ln());
    Ok(ln_pref.exp() * val)
}

/// R→D SER, linear harvester, d_sr ~ U(f, g), d_rd ~ U(r, p).
#[allow(clippy::too_many_arguments)]
pub fn rd_linear_uniform(
    a: f64,
    b: f64,
    ybar: f64,
    x: &GammaGammaParams,
    f: f64,
    gg: f64,
    r: f64,
    p: f64,
    v: f64,
) -> Result<f64> {
    let t = varphi(a, b, ybar, x, r, f, r, p, v)? - varphi(a, b, ybar, x, r, gg, r, p, v)?
        - varphi(a, b, ybar, x, p, f, r, p, v)?
        + varphi(a, b, ybar, x, p, gg, r, p, v)?;
    Ok(x.psi / (2.0 * v * (gg - f)) * t)
}

/// Gamma-Gamma parameters of Φ = L_sr·X.
pub fn phi_params(x: &GammaGammaParams, l_sr: f64) -> Result<GammaGammaParams> {
    x.scaled(l_sr)
}

/// R→D SER, linear harvester, fixed distances: G^{5,4}_{5,8}.
pub fn rd_linear_det(a: f64, b: f64, ybar: f64, x: &GammaGammaParams, l_sr: f64, l_rd: f64) -> Result<f64> {
    let ph = phi_params(x, l_sr)?;
    let al = ph.alpha;
    let c = b * l_rd * ybar;
    let val = g(
        &[1.0, 1.0 - al, 0.5 - al, 2.0 - al],
        &[-al],
        &[0.5 * ph.xi, -0.5 * ph.xi, -al, 1.0 - al, 1.0 - al],
        &[2.0 - al, -al, 1.0],
        ph.beta / c,
    )?;
    let ln_pref = (a / (4.0 * sqrt_pi())).ln() + ph.ln_psi() - al * c.ln();
    Ok(ln_pref.exp() * val)
}

/// P(Φ ≤ t): ψ_φ t^α / 2 · G^{2,2}_{2,4}(β_φ t).
pub fn phi_cdf(t: f64, x: &GammaGammaParams, l_sr: f64) -> Result<f64> {
    let ph = phi_params(x, l_sr)?;
    let al = ph.alpha;
    let val = g(&[1.0, 1.0 - al], &[], &[0.5 * ph.xi, -0.5 * ph.xi], &[-al, 1.0], ph.beta * t)?;
    Ok((ph.ln_psi() + al * t.ln()).exp() * 0.5 * val)
}

/// Outcome of the Bessel-series evaluation of I₁ = ∫₀^{P_th} P(e|Φ) f_Φ dΦ.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: f64,
    /// Number of terms per Ψ sum actually used.
    pub terms: usize,
    /// Largest term magnitude relative to the result.
    pub cancellation: f64,
    pub converged: bool,
}

/// I₁ by the ascending Bessel series, starting with `chi` terms and extending
/// up to `max_terms` until the tail is negligible.
#[allow(clippy::too_many_arguments)]
pub fn i1_series(
    a: f64,
    b: f64,
    ybar: f64,
    x: &GammaGammaParams,
    l_sr: f64,
    l_rd: f64,
    p_th: f64,
    chi: usize,
    max_terms: usize,
) -> Result<SeriesValue> {
    let ph = phi_params(x, l_sr)?;
    let (al, be, xi) = (ph.alpha, ph.beta, ph.xi);
    let arg = b * p_th * l_rd * ybar;
    let term = |j: usize, zeta: f64| -> Result<f64> {
        let e = al + j as f64 + 0.5 * zeta;
        let jf = j as f64;
        // 1/Γ(j+ζ+1) may be negative for negative arguments
        let gam_arg = jf + zeta + 1.0;
        let (lg, sg) = {
            let lg = ln_gamma(gam_arg);
            let sg = if gam_arg > 0.0 { 1.0 } else { crate::special::gamma(gam_arg).signum() };
            (lg, sg)
        };
        let ln_c = (jf + 0.5 * zeta) * be.ln() + e * p_th.ln() - lg - ln_gamma(jf + 1.0);
        let gv = g(&[1.0, 0.0, 0.0, 1.0 - e], &[-1.0, 1.0], &[0.0, 0.5, -1.0], &[-e, 1.0], arg)?;
        Ok(sg * ln_c.exp() * gv)
    };
    let pref = a * ph.psi * sqrt_pi() / (4.0 * (PI * xi).sin());
    let mut sum = 0.0;
    let mut biggest: f64 = 0.0;
    let mut j = 0;
    let mut converged = false;
    let mut small_run = 0;
    while j < max_terms {
        let lo = pref * term(j, -xi)?;
        let hi = pref * term(j, xi)?;
        let t = lo - hi;
        sum += t;
        biggest = biggest.max(lo.abs()).max(hi.abs());
        j += 1;
        // the sum runs over j = 0..=chi at least
        if j > chi {
            if t.abs() <= 1e-15 * sum.abs() {
                small_run += 1;
                if small_run >= 2 {
                    converged = true;
                    break;
                }
            } else {
                small_run = 0;
            }
        }
    }
    let cancellation = if sum != 0.0 { biggest / sum.abs() } else { f64::INFINITY };
    Ok(SeriesValue { value: sum, terms: j, cancellation, converged })
}
