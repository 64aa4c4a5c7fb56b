//! Double-Rayleigh channel sampling and the Gamma-Gamma approximation of
//! MRC sums of double-Rayleigh powers.

use crate::error::{domain, Error, Result};
use crate::harvester::HarvestMode;
use crate::meijer::meijer_g_value;
use crate::montecarlo::SystemConfig;
use crate::special::{bessel_k, gamma, ln_bessel_k, ln_gamma};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

/// Complex amplitude of one fading link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGain {
    pub value: Complex64,
}

impl ChannelGain {
    pub fn power(&self) -> f64 {
        self.value.norm_sqr()
    }
}

/// Which hop a set of Gamma-Gamma parameters describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    /// Source to relay: the information-processing SNR Θ.
    SR,
    /// Relay to destination: the harvesting variable X.
    RD,
}

/// Per-branch fading orders of the cascade. Double Rayleigh is k = m = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingOrder {
    pub k: f64,
    pub m: f64,
}

impl Default for FadingOrder {
    fn default() -> Self {
        Self { k: 1.0, m: 1.0 }
    }
}

/// Average channel gains and noise level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingStats {
    pub omega_h: f64,
    pub omega_g: f64,
    pub n0: f64,
    /// Ω_g / N₀
    pub ybar: f64,
}

impl FadingStats {
    pub fn new(omega_h: f64, omega_g: f64, n0: f64) -> Result<Self> {
        for (name, v) in [("omega_h", omega_h), ("omega_g", omega_g), ("n0", n0)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { omega_h, omega_g, n0, ybar: omega_g / n0 })
    }
}

impl Default for FadingStats {
    fn default() -> Self {
        Self { omega_h: 1.0, omega_g: 1.0, n0: 1.0, ybar: 1.0 }
    }
}

/// Shape parameters of a Gamma-Gamma variate with the derived constants of its pdf
/// f(δ) = ψ δ^(α-1) K_ξ(2√(βδ)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaGammaParams {
    pub k_t: f64,
    pub m_t: f64,
    pub mean_t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub xi: f64,
    pub psi: f64,
}

impl GammaGammaParams {
    pub fn new(k_t: f64, m_t: f64, mean_t: f64) -> Result<Self> {
        if !(k_t > 0.0 && m_t > 0.0) {
            return Err(domain(format!("Gamma-Gamma orders must be positive (k={k_t}, m={m_t})")));
        }
        if !(mean_t > 0.0) || !mean_t.is_finite() {
            return Err(domain(format!("Gamma-Gamma mean must be positive, got {mean_t}")));
        }
        let alpha = 0.5 * (k_t + m_t);
        let beta = k_t * m_t / mean_t;
        let psi = 2.0 * beta.powf(alpha) / (gamma(k_t) * gamma(m_t));
        Ok(Self { k_t, m_t, mean_t, alpha, beta, xi: k_t - m_t, psi })
    }

    /// Same orders, mean multiplied by `factor` (a path-loss or power scaling).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.k_t, self.m_t, self.mean_t * factor)
    }

    pub fn pdf(&self, delta: f64) -> f64 {
        if delta <= 0.0 {
            return 0.0;
        }
        let arg = 2.0 * (self.beta * delta).sqrt();
        if arg < 600.0 {
            self.psi * delta.powf(self.alpha - 1.0) * bessel_k(self.xi, arg)
        } else {
            (self.psi.ln() + (self.alpha - 1.0) * delta.ln() + ln_bessel_k(self.xi, arg)).exp()
        }
    }

    /// P(Δ ≤ δ) through G^{2,2}_{2,4}.
    pub fn cdf(&self, delta: f64) -> Result<f64> {
        if delta <= 0.0 {
            return Ok(0.0);
        }
        let a = self.alpha;
        let g = meijer_g_value(&[1.0, 1.0 - a], &[], &[0.5 * self.xi, -0.5 * self.xi], &[-a, 1.0], self.beta * delta)?;
        Ok((0.5 * self.psi * delta.powf(a) * g).clamp(0.0, 1.0))
    }

    /// Draws mean · G_k · G_m with unit-mean Gamma factors.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let gk = Gamma::new(self.k_t, 1.0 / self.k_t).expect("positive shape");
        let gm = Gamma::new(self.m_t, 1.0 / self.m_t).expect("positive shape");
        self.mean_t * gk.sample(rng) * gm.sample(rng)
    }

    pub fn ln_psi(&self) -> f64 {
        std::f64::consts::LN_2 + self.alpha * self.beta.ln() - ln_gamma(self.k_t) - ln_gamma(self.m_t)
    }
}

/// One double-Rayleigh gain h = h₁h₂ with E|h|² = omega.
pub fn sample_double_rayleigh<R: Rng + ?Sized>(omega: f64, rng: &mut R) -> Result<ChannelGain> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(domain(format!("omega must be positive, got {omega}")));
    }
    // each factor carries power √Ω, split evenly over I and Q
    let sd = (omega.sqrt() / 2.0).sqrt();
    let mut cn = || {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * sd, im * sd)
    };
    let h1 = cn();
    let h2 = cn();
    Ok(ChannelGain { value: h1 * h2 })
}

/// Density of Y = |g|²/N₀ for a unit double-Rayleigh link: (2/ȳ) K₀(2√(y/ȳ)).
///
/// Returns +∞ at y = 0 (logarithmic singularity).
pub fn double_rayleigh_pdf(y: f64, ybar: f64) -> Result<f64> {
    if y < 0.0 || y.is_nan() {
        return Err(domain(format!("double-Rayleigh pdf needs y >= 0, got {y}")));
    }
    if !(ybar > 0.0) {
        return Err(domain(format!("ybar must be positive, got {ybar}")));
    }
    if y == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 / ybar * bessel_k(0.0, 2.0 * (y / ybar).sqrt()))
}

/// Moment-matching correction ε(k, m) of the Gamma-Gamma sum approximation.
pub fn epsilon_fit(k: f64, m: f64) -> Result<f64> {
    if !(k > 0.0 && m > 0.0) {
        return Err(domain(format!("epsilon_fit needs k, m > 0 (k={k}, m={m})")));
    }
    Ok((-0.127 - 0.95 * k - 0.0058 * m) / (1.0 + 0.00124 * k + 0.98 * m))
}

/// Gamma-Gamma parameters of the MRC sum for one hop.
///
/// S→R describes Θ (SNR per unit path loss), R→D describes X (harvested power per
/// unit path loss, before any saturation).
pub fn gamma_gamma_sum_params(
    link: Link,
    mode: HarvestMode,
    config: &SystemConfig,
    stats: &FadingStats,
) -> Result<GammaGammaParams> {
    let eh = &config.eh;
    let ps = config.ps_linear();
    let order = config.fading_order;
    let n = match (link, mode) {
        (Link::SR, HarvestMode::DA) => eh.n_ip,
        (Link::RD, HarvestMode::DA) => eh.n_eh,
        (_, HarvestMode::PS) => eh.n_r,
    };
    if n == 0 {
        return Err(Error::Config(format!("{link:?} link has no antennas in {mode:?} mode")));
    }
    if mode == HarvestMode::PS && !(eh.rho > 0.0 && eh.rho < 1.0) {
        return Err(Error::Config(format!("PS mode needs 0 < rho < 1, got {}", eh.rho)));
    }
    let per_branch = match (link, mode) {
        (Link::SR, HarvestMode::DA) => ps * stats.omega_h / stats.n0,
        (Link::SR, HarvestMode::PS) => (1.0 - eh.rho) * ps * stats.omega_h / stats.n0,
        (Link::RD, HarvestMode::DA) => eh.eta * ps * stats.omega_h,
        (Link::RD, HarvestMode::PS) => eh.eta * eh.rho * ps * stats.omega_h,
    };
    let nf = n as f64;
    let eps = epsilon_fit(order.k, order.m)?;
    GammaGammaParams::new(nf * order.k + (nf - 1.0) * eps, nf * order.m, nf * per_branch)
}

/// ψ δ^(α-1) K_ξ(2√(βδ)).
pub fn gamma_gamma_pdf(delta: f64, p: &GammaGammaParams) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(domain(format!("Gamma-Gamma pdf needs delta > 0, got {delta}")));
    }
    Ok(p.pdf(delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harvester::EhConfig;
    use crate::quadrature::{integrate_log, QuadOptions};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn epsilon_examples() {
        assert_relative_eq!(epsilon_fit(1.0, 1.0).unwrap(), -1.0828 / 1.98124, max_relative = 1e-14);
        assert_relative_eq!(epsilon_fit(1.0, 1.0).unwrap(), -0.54653, max_relative = 1e-4);
        let e21 = (-0.127 - 1.9 - 0.0058) / (1.0 + 0.00248 + 0.98);
        assert_relative_eq!(epsilon_fit(2.0, 1.0).unwrap(), e21, max_relative = 1e-14);
        assert!(epsilon_fit(0.0, 1.0).is_err());
    }

    #[test]
    fn table_rows() {
        let stats = FadingStats::default();
        let mut cfg = SystemConfig { ps_db: 0.0, eh: EhConfig::ps(1, 0.8), ..SystemConfig::default() };
        let p = gamma_gamma_sum_params(Link::SR, HarvestMode::PS, &cfg, &stats).unwrap();
        assert_relative_eq!(p.mean_t, 0.2, max_relative = 1e-14);
        assert_eq!((p.k_t, p.m_t), (1.0, 1.0));

        cfg.eh = EhConfig::da(1, 2);
        let p = gamma_gamma_sum_params(Link::SR, HarvestMode::DA, &cfg, &stats).unwrap();
        assert_relative_eq!(p.k_t, 1.45347, max_relative = 1e-5);
        assert_eq!(p.m_t, 2.0);

        cfg.eh = EhConfig::da(1, 3);
        let p = gamma_gamma_sum_params(Link::RD, HarvestMode::DA, &cfg, &stats).unwrap();
        assert_relative_eq!(p.mean_t, 0.7, max_relative = 1e-14);
        assert_eq!((p.k_t, p.m_t), (1.0, 1.0));

        cfg.eh.n_eh = 0;
        assert!(matches!(
            gamma_gamma_sum_params(Link::RD, HarvestMode::DA, &cfg, &stats),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn double_rayleigh_pdf_values() {
        assert_relative_eq!(double_rayleigh_pdf(1.0, 1.0).unwrap(), 2.0 * bessel_k(0.0, 2.0), max_relative = 1e-15);
        assert_eq!(double_rayleigh_pdf(0.0, 1.0).unwrap(), f64::INFINITY);
        assert!(double_rayleigh_pdf(-1.0, 1.0).is_err());
        let norm = integrate_log(|y| double_rayleigh_pdf(y, 1.0).unwrap(), 0.0, f64::INFINITY, 1.0, QuadOptions::rel(1e-12));
        assert!((norm.value - 1.0).abs() < 1e-8);
        let mean = integrate_log(|y| y * double_rayleigh_pdf(y, 2.0).unwrap(), 0.0, f64::INFINITY, 2.0, QuadOptions::rel(1e-12));
        assert!((mean.value - 2.0).abs() < 1e-6);
    }

    #[test]
    fn single_branch_reduces_to_double_rayleigh() {
        let p = GammaGammaParams::new(1.0, 1.0, 3.0).unwrap();
        for &y in &[0.01, 0.7, 5.0, 40.0] {
            assert_relative_eq!(p.pdf(y), double_rayleigh_pdf(y, 3.0).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn normalization_and_mean_all_table_sizes() {
        let eps = epsilon_fit(1.0, 1.0).unwrap();
        for n in 1..=8 {
            let nf = n as f64;
            let p = GammaGammaParams::new(nf + (nf - 1.0) * eps, nf, 2.5 * nf).unwrap();
            let opts = QuadOptions::rel(1e-11);
            let norm = integrate_log(|x| p.pdf(x), 0.0, f64::INFINITY, p.mean_t, opts).value;
            let mean = integrate_log(|x| x * p.pdf(x), 0.0, f64::INFINITY, p.mean_t, opts).value;
            assert!((norm - 1.0).abs() < 1e-6, "n={n} norm={norm}");
            assert!((mean / p.mean_t - 1.0).abs() < 5e-3, "n={n} mean={mean}");
        }
    }

    #[test]
    fn cdf_matches_quadrature() {
        let p = GammaGammaParams::new(2.36, 4.0, 7.0).unwrap();
        for &x in &[0.3, 4.0, 20.0] {
            let q = crate::quadrature::integrate_log(|t| p.pdf(t), 0.0, x, x, QuadOptions::rel(1e-12)).value;
            assert_relative_eq!(p.cdf(x).unwrap(), q, max_relative = 1e-9);
        }
    }

    #[test]
    fn sampler_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &omega in &[1.0, 4.0] {
            let n = 1_000_000;
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for _ in 0..n {
                let p = sample_double_rayleigh(omega, &mut rng).unwrap().power();
                s1 += p;
                s2 += p * p;
            }
            let mean = s1 / n as f64;
            let m2 = s2 / n as f64;
            assert!((mean - omega).abs() < 0.01 * omega, "mean {mean}");
            // E|h|⁴ = 4Ω², E|h|⁸ = 576Ω⁴
            let se2 = (560.0 * omega.powi(4) / n as f64).sqrt();
            assert!((m2 - 4.0 * omega * omega).abs() < 3.0 * se2, "m2 {m2}");
        }
        assert!(sample_double_rayleigh(0.0, &mut rng).is_err());
    }
}
