//! Reference values by nested adaptive quadrature of the defining integrals.
//!
//! Nothing here touches the Meijer G machinery: only the Q function, the
//! double-Rayleigh and Gamma-Gamma densities (Bessel K) and the path-loss
//! density enter. This is the independent route the closed forms are checked
//! against.

use crate::channel::{double_rayleigh_pdf, GammaGammaParams};
use crate::geometry::pathloss_pdf;
use crate::quadrature::{integrate, integrate_log, QuadOptions};
use crate::special::q_function;

const INNER: f64 = 1e-11;
const MIDDLE: f64 = 1e-10;
const OUTER: f64 = 1e-9;

/// E_Y[a Q(√(2 b c Y))] for Y double Rayleigh with mean ȳ.
pub fn q_over_double_rayleigh(a: f64, b: f64, ybar: f64, c: f64) -> f64 {
    if c <= 0.0 {
        return 0.5 * a;
    }
    let scale = ybar.min(1.0 / (b * c));
    integrate_log(
        |y| a * q_function((2.0 * b * c * y).sqrt()) * double_rayleigh_pdf(y, ybar).unwrap_or(0.0),
        0.0,
        f64::INFINITY,
        scale,
        QuadOptions::rel(INNER),
    )
    .value
}

/// S→R SER at fixed path loss z: ∫ a Q(√(2bθz)) f_Θ(θ) dθ.
pub fn sr_deterministic(a: f64, b: f64, th: &GammaGammaParams, z: f64) -> f64 {
    let scale = th.mean_t.min(1.0 / (b * z));
    integrate_log(
        |t| a * q_function((2.0 * b * t * z).sqrt()) * th.pdf(t),
        0.0,
        f64::INFINITY,
        scale,
        QuadOptions::rel(INNER),
    )
    .value
}

/// S→R SER averaged over d_sr ~ U(f, g).
pub fn sr_uniform(a: f64, b: f64, th: &GammaGammaParams, f: f64, g: f64, v: f64) -> f64 {
    let (zlo, zhi) = (g.powf(-v), f.powf(-v));
    integrate(
        |z| pathloss_pdf(z, f, g, v).unwrap_or(0.0) * sr_deterministic(a, b, th, z),
        zlo,
        zhi,
        QuadOptions::rel(OUTER),
    )
    .value
}

/// R→D SER given harvested power u, averaged over Y and over d_rd ~ U(r, p).
pub fn rd_cond_uniform(a: f64, b: f64, ybar: f64, u: f64, r: f64, p: f64, v: f64) -> f64 {
    let (wlo, whi) = (p.powf(-v), r.powf(-v));
    integrate(
        |w| pathloss_pdf(w, r, p, v).unwrap_or(0.0) * q_over_double_rayleigh(a, b, ybar, u * w),
        wlo,
        whi,
        QuadOptions::rel(MIDDLE),
    )
    .value
}

/// Density of U = X·Z, Z the path loss of d_sr ~ U(f, g): ∫ f_X(u/z) f_Z(z) / z dz.
pub fn u_pdf(u: f64, x: &GammaGammaParams, f: f64, g: f64, v: f64) -> f64 {
    let (zlo, zhi) = (g.powf(-v), f.powf(-v));
    integrate(
        |z| x.pdf(u / z) * pathloss_pdf(z, f, g, v).unwrap_or(0.0) / z,
        zlo,
        zhi,
        QuadOptions::rel(MIDDLE),
    )
    .value
}

fn u_scale(x: &GammaGammaParams, f: f64, g: f64, v: f64) -> f64 {
    x.mean_t * 0.5 * (f.powf(-v) + g.powf(-v))
}

/// R→D SER, linear harvester, both distances uniform.
#[allow(clippy::too_many_arguments)]
pub fn rd_linear_uniform(a: f64, b: f64, ybar: f64, x: &GammaGammaParams, f: f64, g: f64, r: f64, p: f64, v: f64) -> f64 {
    integrate_log(
        |u| u_pdf(u, x, f, g, v) * rd_cond_uniform(a, b, ybar, u, r, p, v),
        0.0,
        f64::INFINITY,
        u_scale(x, f, g, v),
        QuadOptions::rel(OUTER),
    )
    .value
}

/// (J₁, P(U > P_th)) for the saturating harvester, both distances uniform.
#[allow(clippy::too_many_arguments)]
pub fn rd_nl_uniform_parts(
    a: f64,
    b: f64,
    ybar: f64,
    x: &GammaGammaParams,
    f: f64,
    g: f64,
    r: f64,
    p: f64,
    v: f64,
    p_th: f64,
) -> (f64, f64) {
    let scale = u_scale(x, f, g, v).min(p_th);
    let j1 = integrate_log(
        |u| u_pdf(u, x, f, g, v) * rd_cond_uniform(a, b, ybar, u, r, p, v),
        0.0,
        p_th,
        scale,
        QuadOptions::rel(OUTER),
    )
    .value;
    let tail = integrate_log(
        |u| u_pdf(u, x, f, g, v),
        p_th,
        f64::INFINITY,
        u_scale(x, f, g, v).max(p_th),
        QuadOptions::rel(OUTER),
    )
    .value;
    (j1, tail)
}

/// R→D SER, saturating harvester, both distances uniform.
#[allow(clippy::too_many_arguments)]
pub fn rd_nl_uniform(a: f64, b: f64, ybar: f64, x: &GammaGammaParams, f: f64, g: f64, r: f64, p: f64, v: f64, p_th: f64) -> f64 {
    let (j1, tail) = rd_nl_uniform_parts(a, b, ybar, x, f, g, r, p, v, p_th);
    j1 + rd_cond_uniform(a, b, ybar, p_th, r, p, v) * tail
}

/// R→D SER, linear harvester, fixed distances.
pub fn rd_linear_det(a: f64, b: f64, ybar: f64, x: &GammaGammaParams, l_sr: f64, l_rd: f64) -> f64 {
    let ph = GammaGammaParams::new(x.k_t, x.m_t, x.mean_t * l_sr).expect("valid parameters");
    integrate_log(
        |t| ph.pdf(t) * q_over_double_rayleigh(a, b, ybar, t * l_rd),
        0.0,
        f64::INFINITY,
        ph.mean_t,
        QuadOptions::rel(OUTER),
    )
    .value
}

/// R→D SER, saturating harvester, fixed distances.
pub fn rd_nl_det(a: f64, b: f64, ybar: f64, x: &GammaGammaParams, l_sr: f64, l_rd: f64, p_th: f64) -> f64 {
    let ph = GammaGammaParams::new(x.k_t, x.m_t, x.mean_t * l_sr).expect("valid parameters");
    let i1 = integrate_log(
        |t| ph.pdf(t) * q_over_double_rayleigh(a, b, ybar, t * l_rd),
        0.0,
        p_th,
        ph.mean_t.min(p_th),
        QuadOptions::rel(OUTER),
    )
    .value;
    let tail = integrate_log(|t| ph.pdf(t), p_th, f64::INFINITY, ph.mean_t.max(p_th), QuadOptions::rel(OUTER)).value;
    i1 + q_over_double_rayleigh(a, b, ybar, p_th * l_rd) * tail
}
