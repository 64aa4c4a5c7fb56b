//! Closed-form symbol and bit error rates.
//!
//! Every public op first tries its Meijer-G closed form. If that route reports an
//! evaluation problem the op falls back to adaptive quadrature over closed-form
//! conditionals and densities, and says so in [`SerValue::provenance`].

pub mod check;
pub mod closed;
pub mod direct;

use crate::channel::{gamma_gamma_sum_params, GammaGammaParams, Link};
use crate::error::{domain, Error, Result};
use crate::geometry::{DistanceModel, LinkGeometry};
use crate::harvester::HarvesterModel;
use crate::montecarlo::SystemConfig;
use crate::quadrature::{integrate_log, QuadOptions};
use serde::{Deserialize, Serialize};

pub use crate::meijer::{meijer_g, MeijerGSpec, MeijerGValue};
pub use crate::quadrature::gauss_chebyshev;

/// Below this ratio of tail bound to linear-model SER the NL ops return the
/// linear-model value; the neglected difference is bounded by the tail itself.
const COMPLEMENT_RATIO: f64 = 1e-9;
/// Largest term-to-result ratio accepted from the I₁ Bessel series.
const SERIES_MAX_CANCELLATION: f64 = 1e4;
const SERIES_MAX_TERMS: usize = 300;
const FALLBACK_TOL: f64 = 1e-8;

/// Square M-QAM with conditional SER a·Q(√(2bγ)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationParams {
    pub a: f64,
    pub b: f64,
    pub m_order: u32,
    /// Bits per symbol.
    pub iota: f64,
}

impl Default for ModulationParams {
    fn default() -> Self {
        Self::qam4()
    }
}

impl ModulationParams {
    pub fn qam4() -> Self {
        Self { a: 2.0, b: 0.5, m_order: 4, iota: 2.0 }
    }

    /// Square M-QAM, M = 4, 16, 64, ...
    pub fn qam(m_order: u32) -> Result<Self> {
        let side = (m_order as f64).sqrt().round() as u32;
        if m_order < 4 || side * side != m_order || !side.is_power_of_two() {
            return Err(Error::Config(format!("square QAM needs M = 4^n, got {m_order}")));
        }
        let m = m_order as f64;
        Ok(Self {
            a: 4.0 * (1.0 - 1.0 / m.sqrt()),
            b: 1.5 / (m - 1.0),
            m_order,
            iota: m.log2(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.b > 0.0 && self.iota >= 1.0) {
            return Err(Error::Config(format!("invalid modulation constants {self:?}")));
        }
        Ok(())
    }
}

/// Which route produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Provenance {
    ClosedForm,
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerValue {
    pub value: f64,
    pub provenance: Provenance,
}

impl SerValue {
    fn closed(value: f64) -> Self {
        Self { value: value.clamp(0.0, 1.0), provenance: Provenance::ClosedForm }
    }

    fn fallback(value: f64) -> Self {
        Self { value: value.clamp(0.0, 1.0), provenance: Provenance::Fallback }
    }
}

/// End-to-end result of [`analytic_ber`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerValue {
    pub ber: f64,
    pub ser_sr: SerValue,
    pub ser_rd: SerValue,
}

impl BerValue {
    pub fn provenance(&self) -> Provenance {
        self.ser_sr.provenance.max(self.ser_rd.provenance)
    }
}

fn check_finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(crate::error::eval(format!("closed form returned {v}")))
    }
}

/// Runs the closed route, switching to `fallback` only on evaluation problems.
fn with_fallback(closed: impl FnOnce() -> Result<f64>, fallback: impl FnOnce() -> Result<f64>) -> Result<SerValue> {
    match closed().and_then(check_finite) {
        Ok(v) => Ok(SerValue::closed(v)),
        Err(Error::Evaluation(_)) => Ok(SerValue::fallback(check_finite(fallback()?)?)),
        Err(e) => Err(e),
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if lo > 0.0 && hi > lo && hi.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("distance interval needs 0 < lo < hi, got ({lo}, {hi})")))
    }
}

/// S→R SER at a fixed path loss z.
pub fn ser_sr_deterministic(m: &ModulationParams, th: &GammaGammaParams, z: f64) -> Result<SerValue> {
    check_positive("path loss", z)?;
    with_fallback(
        || closed::sr_conditional(m.a, m.b, th, z),
        || Ok(direct::sr_deterministic(m.a, m.b, th, z)),
    )
}

/// S→R SER with d_sr ~ U(f, g).
pub fn ser_sr_uniform(m: &ModulationParams, th: &GammaGammaParams, f: f64, g: f64, v: f64) -> Result<SerValue> {
    check_interval(f, g)?;
    check_positive("v", v)?;
    with_fallback(
        || closed::sr_uniform(m.a, m.b, th, f, g, v),
        || {
            let geom = LinkGeometry::uniform(f, g, v);
            let (zlo, zhi) = geom.pathloss_support();
            let r = crate::quadrature::integrate(
                |z| {
                    let c = closed::sr_conditional(m.a, m.b, th, z)
                        .unwrap_or_else(|_| direct::sr_deterministic(m.a, m.b, th, z));
                    crate::geometry::pathloss_pdf(z, f, g, v).unwrap_or(0.0) * c
                },
                zlo,
                zhi,
                QuadOptions::rel(FALLBACK_TOL),
            );
            Ok(r.value)
        },
    )
}

/// R→D SER given harvested power u, d_rd ~ U(r, p).
pub fn ser_rd_cond_uniform(m: &ModulationParams, ybar: f64, u: f64, r: f64, p: f64, v: f64) -> Result<SerValue> {
    check_interval(r, p)?;
    check_positive("ybar", ybar)?;
    check_positive("v", v)?;
    if !(u >= 0.0) {
        return Err(domain(format!("harvested power must be nonnegative, got {u}")));
    }
    if u == 0.0 {
        return Ok(SerValue::closed(0.5 * m.a));
    }
    with_fallback(
        || closed::rd_cond_uniform(m.a, m.b, ybar, u, r, p, v),
        || Ok(direct::rd_cond_uniform(m.a, m.b, ybar, u, r, p, v)),
    )
}

/// R→D SER, linear harvester, d_sr ~ U(f, g), d_rd ~ U(r, p).
#[allow(clippy::too_many_arguments)]
pub fn ser_rd_linear_uniform(
    m: &ModulationParams,
    ybar: f64,
    x: &GammaGammaParams,
    f: f64,
    g: f64,
    r: f64,
    p: f64,
    v: f64,
) -> Result<SerValue> {
    check_interval(f, g)?;
    check_interval(r, p)?;
    check_positive("ybar", ybar)?;
    let sr = LinkGeometry::uniform(f, g, v);
    let rd = LinkGeometry::uniform(r, p, v);
    with_fallback(
        || closed::rd_linear_uniform(m.a, m.b, ybar, x, f, g, r, p, v),
        || rd_by_quadrature(m, ybar, x, &sr, &rd, HarvesterModel::L, f64::INFINITY),
    )
}

/// R→D SER, saturating harvester, d_sr ~ U(f, g), d_rd ~ U(r, p).
///
/// J₁ is a χ-node Gauss-Chebyshev sum after mapping u = P_th·s^q, which keeps the
/// rule accurate when the density of U vanishes or peaks near zero.
#[allow(clippy::too_many_arguments)]
pub fn ser_rd_nl_uniform(
    m: &ModulationParams,
    ybar: f64,
    x: &GammaGammaParams,
    f: f64,
    g: f64,
    r: f64,
    p: f64,
    v: f64,
    p_th: f64,
    chi: usize,
) -> Result<SerValue> {
    check_interval(f, g)?;
    check_interval(r, p)?;
    check_positive("ybar", ybar)?;
    check_positive("p_th", p_th)?;
    if chi == 0 {
        return Err(domain("chi must be at least 1"));
    }
    let sr = LinkGeometry::uniform(f, g, v);
    let rd = LinkGeometry::uniform(r, p, v);
    with_fallback(
        || {
            let cond_th = closed::rd_cond_uniform(m.a, m.b, ybar, p_th, r, p, v)?;
            let j2 = closed::u_cdf(p_th, x, f, g, v)?.clamp(0.0, 1.0);
            let tail = cond_th * (1.0 - j2);
            let lin = closed::rd_linear_uniform(m.a, m.b, ybar, x, f, g, r, p, v)?;
            if tail <= COMPLEMENT_RATIO * lin {
                return Ok(lin);
            }
            let q = chebyshev_power(x, x.mean_t * 0.5 * (f.powf(-v) + g.powf(-v)), p_th);
            let mut err = None;
            let j1 = gauss_chebyshev(
                |s| {
                    let u = p_th * s.powf(q);
                    let val = closed::u_pdf(u, x, f, g, v)
                        .and_then(|d| Ok(d * closed::rd_cond_uniform(m.a, m.b, ybar, u, r, p, v)?));
                    match val {
                        Ok(w) => w * p_th * q * s.powf(q - 1.0),
                        Err(e) => {
                            err.get_or_insert(e);
                            0.0
                        }
                    }
                },
                0.0,
                1.0,
                chi,
            );
            if let Some(e) = err {
                return Err(e);
            }
            Ok(j1 + tail)
        },
        || rd_by_quadrature(m, ybar, x, &sr, &rd, HarvesterModel::NL, p_th),
    )
}

/// Exponent q of the node map u = P_th·s^q for J₁.
///
/// At least 3/min(k, m), which smooths the density near zero; larger when the
/// mean harvested power `mean_u` is far below `p_th`, so that the mean lands
/// near the middle of the node range.
pub fn chebyshev_power(x: &GammaGammaParams, mean_u: f64, p_th: f64) -> f64 {
    let base = (3.0 / x.k_t.min(x.m_t)).max(1.0);
    let centre = (mean_u / p_th).ln() / 0.5f64.ln();
    base.max(centre)
}

/// R→D SER, linear harvester, fixed distances (path losses `l_sr`, `l_rd`).
pub fn ser_rd_linear_det(m: &ModulationParams, ybar: f64, x: &GammaGammaParams, l_sr: f64, l_rd: f64) -> Result<SerValue> {
    check_positive("l_sr", l_sr)?;
    check_positive("l_rd", l_rd)?;
    check_positive("ybar", ybar)?;
    let sr = fixed(l_sr);
    let rd = fixed(l_rd);
    with_fallback(
        || closed::rd_linear_det(m.a, m.b, ybar, x, l_sr, l_rd),
        || rd_by_quadrature(m, ybar, x, &sr, &rd, HarvesterModel::L, f64::INFINITY),
    )
}

/// R→D SER, saturating harvester, fixed distances.
///
/// I₁ comes from the ascending Bessel series, extended beyond χ terms until its
/// tail is negligible.
#[allow(clippy::too_many_arguments)]
pub fn ser_rd_nl_det(
    m: &ModulationParams,
    ybar: f64,
    x: &GammaGammaParams,
    l_sr: f64,
    l_rd: f64,
    p_th: f64,
    chi: usize,
) -> Result<SerValue> {
    check_positive("l_sr", l_sr)?;
    check_positive("l_rd", l_rd)?;
    check_positive("ybar", ybar)?;
    check_positive("p_th", p_th)?;
    let sr = fixed(l_sr);
    let rd = fixed(l_rd);
    with_fallback(
        || {
            let cond_th = closed::rd_conditional(m.a, m.b, ybar, p_th * l_rd)?;
            let i2 = closed::phi_cdf(p_th, x, l_sr)?.clamp(0.0, 1.0);
            let tail = cond_th * (1.0 - i2);
            let lin = closed::rd_linear_det(m.a, m.b, ybar, x, l_sr, l_rd)?;
            if tail <= COMPLEMENT_RATIO * lin {
                return Ok(lin);
            }
            if (x.xi - x.xi.round()).abs() < 1e-9 {
                return Err(crate::error::eval("Bessel series needs a non-integer order"));
            }
            let s = closed::i1_series(m.a, m.b, ybar, x, l_sr, l_rd, p_th, chi, SERIES_MAX_TERMS.max(chi + 2))?;
            if !s.converged || !(s.cancellation <= SERIES_MAX_CANCELLATION) {
                return Err(crate::error::eval(format!(
                    "Bessel series unusable (terms {}, cancellation {:.1e})",
                    s.terms, s.cancellation
                )));
            }
            Ok(s.value + tail)
        },
        || rd_by_quadrature(m, ybar, x, &sr, &rd, HarvesterModel::NL, p_th),
    )
}

fn fixed(l: f64) -> LinkGeometry {
    // a geometry carrying the path loss l directly
    LinkGeometry::deterministic(1.0 / l, 1.0)
}

/// Path-loss value of a fixed hop.
fn fixed_loss(geom: &LinkGeometry) -> Option<f64> {
    match geom.kind {
        DistanceModel::Deterministic { d } => Some(d.powf(-geom.v)),
        DistanceModel::Uniform { .. } => None,
    }
}

/// Density of the (unsaturated) harvested power per unit relay transmit path loss.
fn harvested_density(x: &GammaGammaParams, sr: &LinkGeometry, u: f64) -> f64 {
    match sr.kind {
        DistanceModel::Deterministic { .. } => {
            let l = fixed_loss(sr).unwrap_or(1.0);
            x.pdf(u / l) / l
        }
        DistanceModel::Uniform { lo, hi } => {
            closed::u_pdf(u, x, lo, hi, sr.v).unwrap_or_else(|_| direct::u_pdf(u, x, lo, hi, sr.v))
        }
    }
}

/// R→D SER given transmit power u of the relay.
fn rd_given_power(m: &ModulationParams, ybar: f64, rd: &LinkGeometry, u: f64) -> f64 {
    match rd.kind {
        DistanceModel::Deterministic { .. } => {
            let c = u * fixed_loss(rd).unwrap_or(1.0);
            closed::rd_conditional(m.a, m.b, ybar, c).unwrap_or_else(|_| direct::q_over_double_rayleigh(m.a, m.b, ybar, c))
        }
        DistanceModel::Uniform { lo, hi } => closed::rd_cond_uniform(m.a, m.b, ybar, u, lo, hi, rd.v)
            .unwrap_or_else(|_| direct::rd_cond_uniform(m.a, m.b, ybar, u, lo, hi, rd.v)),
    }
}

fn harvested_mean(x: &GammaGammaParams, sr: &LinkGeometry) -> f64 {
    let (zlo, zhi) = sr.pathloss_support();
    x.mean_t * 0.5 * (zlo + zhi)
}

/// R→D SER for any geometry pair by a single outer quadrature over the relay
/// power. `p_th` is ignored for the linear model.
pub fn rd_by_quadrature(
    m: &ModulationParams,
    ybar: f64,
    x: &GammaGammaParams,
    sr: &LinkGeometry,
    rd: &LinkGeometry,
    model: HarvesterModel,
    p_th: f64,
) -> Result<f64> {
    let scale = harvested_mean(x, sr);
    let opts = QuadOptions::rel(FALLBACK_TOL);
    let body = |u: f64| harvested_density(x, sr, u) * rd_given_power(m, ybar, rd, u);
    let value = match model {
        HarvesterModel::L => integrate_log(body, 0.0, f64::INFINITY, scale, opts).value,
        HarvesterModel::NL => {
            let below = integrate_log(body, 0.0, p_th, scale.min(p_th), opts).value;
            let above = integrate_log(|u| harvested_density(x, sr, u), p_th, f64::INFINITY, scale.max(p_th), opts).value;
            below + rd_given_power(m, ybar, rd, p_th) * above
        }
    };
    check_finite(value)
}

/// Decode-and-forward BER from the per-hop SERs, clamped to [0, 0.5].
pub fn ber_overall(p_sr: f64, p_rd: f64, iota: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_sr) || !(0.0..=1.0).contains(&p_rd) {
        return Err(domain(format!("SERs must lie in [0, 1], got ({p_sr}, {p_rd})")));
    }
    if !(iota >= 1.0) {
        return Err(domain(format!("bits per symbol must be at least 1, got {iota}")));
    }
    Ok(((1.0 - (1.0 - p_sr) * (1.0 - p_rd)) / iota).clamp(0.0, 0.5))
}

/// Analytic end-to-end BER of a system configuration.
pub fn analytic_ber(config: &SystemConfig) -> Result<BerValue> {
    config.validate()?;
    let eh = &config.eh;
    let m = &config.modulation;
    let stats = &config.fading;
    let th = gamma_gamma_sum_params(Link::SR, eh.mode, config, stats)?;
    let x = gamma_gamma_sum_params(Link::RD, eh.mode, config, stats)?;
    let (sr, rd) = (&config.geom_sr, &config.geom_rd);

    let ser_sr = match sr.kind {
        DistanceModel::Deterministic { d } => ser_sr_deterministic(m, &th, d.powf(-sr.v))?,
        DistanceModel::Uniform { lo, hi } => ser_sr_uniform(m, &th, lo, hi, sr.v)?,
    };

    let ybar = stats.ybar;
    let ser_rd = match (sr.kind, rd.kind, eh.model) {
        (DistanceModel::Uniform { lo: f, hi: g }, DistanceModel::Uniform { lo: r, hi: p }, model) => {
            if sr.v != rd.v {
                SerValue::fallback(rd_by_quadrature(m, ybar, &x, sr, rd, model, eh.p_th)?)
            } else if model == HarvesterModel::L {
                ser_rd_linear_uniform(m, ybar, &x, f, g, r, p, sr.v)?
            } else {
                ser_rd_nl_uniform(m, ybar, &x, f, g, r, p, sr.v, eh.p_th, config.chi)?
            }
        }
        (DistanceModel::Deterministic { .. }, DistanceModel::Deterministic { .. }, model) => {
            let l_sr = fixed_loss(sr).unwrap_or(1.0);
            let l_rd = fixed_loss(rd).unwrap_or(1.0);
            match model {
                HarvesterModel::L => ser_rd_linear_det(m, ybar, &x, l_sr, l_rd)?,
                HarvesterModel::NL => ser_rd_nl_det(m, ybar, &x, l_sr, l_rd, eh.p_th, config.chi)?,
            }
        }
        (_, _, model) => SerValue::fallback(rd_by_quadrature(m, ybar, &x, sr, rd, model, eh.p_th)?),
    };

    let ber = ber_overall(ser_sr.value, ser_rd.value, m.iota)?;
    Ok(BerValue { ber, ser_sr, ser_rd })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn qam_constants() {
        let m = ModulationParams::qam(4).unwrap();
        assert_eq!(m, ModulationParams::qam4());
        let m16 = ModulationParams::qam(16).unwrap();
        assert_relative_eq!(m16.a, 3.0);
        assert_relative_eq!(m16.b, 0.1);
        assert_eq!(m16.iota, 4.0);
        assert!(ModulationParams::qam(8).is_err());
        assert!(ModulationParams::qam(2).is_err());
    }

    #[test]
    fn ber_overall_examples() {
        assert_relative_eq!(ber_overall(0.1, 0.2, 1.0).unwrap(), 0.28, max_relative = 1e-14);
        assert_relative_eq!(ber_overall(0.1, 0.2, 2.0).unwrap(), 0.14, max_relative = 1e-14);
        assert_eq!(ber_overall(1.0, 1.0, 1.0).unwrap(), 0.5);
        assert!(ber_overall(1.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn fixed_geometry_roundtrip() {
        let g = fixed(0.25);
        assert_relative_eq!(fixed_loss(&g).unwrap(), 0.25, max_relative = 1e-15);
    }
}
