//! Energy harvesting at the relay: power splitting (PS) and dedicated antennas
//! (DA), with a linear or saturating (nonlinear) harvester.

use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};

/// How the relay antennas share harvesting and information processing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HarvestMode {
    /// Every antenna splits its power: ρ to the harvester, 1-ρ to the receiver.
    PS,
    /// N_eh antennas harvest, N_ip antennas decode.
    DA,
}

/// Harvester transfer characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HarvesterModel {
    /// Output proportional to input.
    L,
    /// Linear up to p_th, then clamped at p_th.
    NL,
}

/// Harvesting configuration of the relay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EhConfig {
    pub mode: HarvestMode,
    pub model: HarvesterModel,
    pub rho: f64,
    pub eta: f64,
    /// Saturation level of the NL harvester, linear units.
    pub p_th: f64,
    pub n_r: usize,
    pub n_eh: usize,
    pub n_ip: usize,
}

impl Default for EhConfig {
    fn default() -> Self {
        Self::ps(4, 0.8)
    }
}

impl EhConfig {
    /// PS relay with `n_r` antennas and splitting ratio `rho`, linear harvester.
    pub fn ps(n_r: usize, rho: f64) -> Self {
        Self {
            mode: HarvestMode::PS,
            model: HarvesterModel::L,
            rho,
            eta: 0.7,
            p_th: 1e4,
            n_r,
            n_eh: 0,
            n_ip: 0,
        }
    }

    /// DA relay with `n_eh` harvesting and `n_ip` decoding antennas, linear harvester.
    pub fn da(n_eh: usize, n_ip: usize) -> Self {
        Self {
            mode: HarvestMode::DA,
            model: HarvesterModel::L,
            rho: 0.8,
            eta: 0.7,
            p_th: 1e4,
            n_r: n_eh + n_ip,
            n_eh,
            n_ip,
        }
    }

    pub fn with_model(mut self, model: HarvesterModel) -> Self {
        self.model = model;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_r == 0 {
            return Err(Error::Config("relay needs at least one antenna".into()));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::Config(format!("eta must lie in [0, 1], got {}", self.eta)));
        }
        if !(self.p_th > 0.0) {
            return Err(Error::Config(format!("p_th must be positive, got {}", self.p_th)));
        }
        match self.mode {
            HarvestMode::PS => {
                if !(self.rho > 0.0 && self.rho < 1.0) {
                    return Err(Error::Config(format!("PS mode needs 0 < rho < 1, got {}", self.rho)));
                }
            }
            HarvestMode::DA => {
                if self.n_eh == 0 || self.n_ip == 0 {
                    return Err(Error::Config("DA mode needs n_eh >= 1 and n_ip >= 1".into()));
                }
                if self.n_eh + self.n_ip != self.n_r {
                    return Err(Error::Config(format!(
                        "DA mode needs n_r = n_eh + n_ip ({} != {} + {})",
                        self.n_r, self.n_eh, self.n_ip
                    )));
                }
            }
        }
        Ok(())
    }

    /// Antennas feeding the harvester.
    pub fn harvesting_antennas(&self) -> usize {
        match self.mode {
            HarvestMode::PS => self.n_r,
            HarvestMode::DA => self.n_eh,
        }
    }

    /// Antennas feeding the decoder.
    pub fn decoding_antennas(&self) -> usize {
        match self.mode {
            HarvestMode::PS => self.n_r,
            HarvestMode::DA => self.n_ip,
        }
    }

    fn clamp(&self, p: f64) -> f64 {
        match self.model {
            HarvesterModel::L => p,
            HarvesterModel::NL => p.min(self.p_th),
        }
    }
}

/// Per-hop received SNRs of one channel realisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPair {
    pub gamma_sr: f64,
    pub gamma_rd: f64,
}

/// Power harvested at the relay from the listed per-antenna channel powers.
///
/// `channel_powers` has n_eh entries (DA) or n_r entries (PS).
pub fn harvested_power(config: &EhConfig, ps: f64, l_sr: f64, channel_powers: &[f64]) -> Result<f64> {
    let expected = config.harvesting_antennas();
    if channel_powers.len() != expected {
        return Err(Error::Contract(format!(
            "harvested_power expects {expected} channel powers, got {}",
            channel_powers.len()
        )));
    }
    if !(ps >= 0.0) || !(l_sr >= 0.0) {
        return Err(domain("power and path loss must be nonnegative"));
    }
    let sum: f64 = channel_powers.iter().sum();
    let split = match config.mode {
        HarvestMode::PS => config.rho,
        HarvestMode::DA => 1.0,
    };
    Ok(config.clamp(config.eta * split * ps * l_sr * sum))
}

/// SNRs at the relay (after MRC) and at the destination.
///
/// `h_powers` lists all n_r relay antennas. In DA mode the first n_eh entries are
/// the harvesting antennas and the remaining n_ip the decoding antennas.
pub fn received_snrs(
    config: &EhConfig,
    ps: f64,
    n0: f64,
    l_sr: f64,
    l_rd: f64,
    h_powers: &[f64],
    g_power: f64,
) -> Result<SnrPair> {
    if h_powers.len() != config.n_r {
        return Err(Error::Contract(format!(
            "received_snrs expects {} antenna powers, got {}",
            config.n_r,
            h_powers.len()
        )));
    }
    if !(n0 > 0.0) {
        return Err(domain(format!("n0 must be positive, got {n0}")));
    }
    let (eh, ip, theta_scale) = match config.mode {
        HarvestMode::PS => (h_powers, h_powers, (1.0 - config.rho) * ps / n0),
        HarvestMode::DA => (&h_powers[..config.n_eh], &h_powers[config.n_eh..], ps / n0),
    };
    let gamma_sr = theta_scale * ip.iter().sum::<f64>() * l_sr;
    let p_r = harvested_power(config, ps, l_sr, eh)?;
    let gamma_rd = p_r * l_rd * g_power / n0;
    Ok(SnrPair { gamma_sr, gamma_rd })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn harvested_examples() {
        let da = EhConfig::da(1, 3);
        assert_relative_eq!(harvested_power(&da, 1.0, 1.0, &[2.0]).unwrap(), 1.4, max_relative = 1e-15);
        let ps = EhConfig::ps(2, 0.8);
        assert_relative_eq!(harvested_power(&ps, 1.0, 1.0, &[1.0, 1.0]).unwrap(), 1.12, max_relative = 1e-15);
        let mut nl = EhConfig::da(1, 1).with_model(HarvesterModel::NL);
        nl.p_th = 10.0;
        nl.eta = 1.0;
        assert_eq!(harvested_power(&nl, 100.0, 1.0, &[1.0]).unwrap(), 10.0);
        assert!(matches!(harvested_power(&ps, 1.0, 1.0, &[1.0]), Err(Error::Contract(_))));
    }

    #[test]
    fn snr_examples() {
        let ps = EhConfig::ps(1, 0.8);
        let s = received_snrs(&ps, 10.0, 1.0, 1.0, 1.0, &[1.0], 1.0).unwrap();
        assert_relative_eq!(s.gamma_sr, 0.2 * 10.0, max_relative = 1e-15);

        let da = EhConfig::da(1, 3);
        let s = received_snrs(&da, 1.0, 1.0, 1.0, 1.0, &[100.0, 1.0, 2.0, 3.0], 1.0).unwrap();
        assert_relative_eq!(s.gamma_sr, 6.0, max_relative = 1e-15);
        assert_relative_eq!(s.gamma_rd, 70.0, max_relative = 1e-15);

        let lin = EhConfig::da(1, 1);
        let nl = lin.with_model(HarvesterModel::NL);
        let a = received_snrs(&lin, 1e-3, 1.0, 0.5, 0.5, &[0.2, 1.0], 0.3).unwrap();
        let b = received_snrs(&nl, 1e-3, 1.0, 0.5, 0.5, &[0.2, 1.0], 0.3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn validation() {
        assert!(EhConfig::ps(4, 1.0).validate().is_err());
        assert!(EhConfig::da(0, 4).validate().is_err());
        let mut c = EhConfig::da(1, 3);
        c.n_r = 5;
        assert!(c.validate().is_err());
        assert!(EhConfig::default().validate().is_ok());
    }
}
