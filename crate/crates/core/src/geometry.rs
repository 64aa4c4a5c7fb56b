//! Inter-vehicle distance models, path loss, and the densities of the path-loss
//! variable Z = d^(-v) and of the harvested power U = X·Z.

use crate::analytic::closed;
use crate::channel::GammaGammaParams;
use crate::error::{domain, Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Path-loss exponent used throughout unless configured otherwise.
pub const DEFAULT_PATHLOSS_EXPONENT: f64 = 2.7;

/// Distance of one hop: fixed, or uniform on (lo, hi).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistanceModel {
    Deterministic { d: f64 },
    Uniform { lo: f64, hi: f64 },
}

/// Distance model of a hop together with its path-loss exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    #[serde(flatten)]
    pub kind: DistanceModel,
    pub v: f64,
}

impl LinkGeometry {
    pub fn deterministic(d: f64, v: f64) -> Self {
        Self { kind: DistanceModel::Deterministic { d }, v }
    }

    pub fn uniform(lo: f64, hi: f64, v: f64) -> Self {
        Self { kind: DistanceModel::Uniform { lo, hi }, v }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v > 0.0) || !self.v.is_finite() {
            return Err(Error::Config(format!("path-loss exponent must be positive, got {}", self.v)));
        }
        match self.kind {
            DistanceModel::Deterministic { d } if !(d > 0.0) || !d.is_finite() => {
                Err(Error::Config(format!("distance must be positive, got {d}")))
            }
            DistanceModel::Uniform { lo, hi } if !(lo > 0.0 && hi > lo && hi.is_finite()) => {
                Err(Error::Config(format!("uniform distance needs 0 < lo < hi, got ({lo}, {hi})")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.kind, DistanceModel::Uniform { .. })
    }

    /// Draws one path-loss value d^(-v).
    pub fn sample_pathloss<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            DistanceModel::Deterministic { d } => d.powf(-self.v),
            DistanceModel::Uniform { lo, hi } => rng.random_range(lo..hi).powf(-self.v),
        }
    }

    /// Support (z_min, z_max) of the path-loss variable.
    pub fn pathloss_support(&self) -> (f64, f64) {
        match self.kind {
            DistanceModel::Deterministic { d } => {
                let z = d.powf(-self.v);
                (z, z)
            }
            DistanceModel::Uniform { lo, hi } => (hi.powf(-self.v), lo.powf(-self.v)),
        }
    }
}

/// d^(-v)
pub fn pathloss(d: f64, v: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(domain(format!("distance must be positive, got {d}")));
    }
    Ok(d.powf(-v))
}

/// Density of Z = d^(-v) for d ~ U(lo, hi): z^(-1-1/v) / (v (hi - lo)) on (hi^-v, lo^-v).
pub fn pathloss_pdf(z: f64, lo: f64, hi: f64, v: f64) -> Result<f64> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Config(format!("uniform distance needs 0 < lo < hi, got ({lo}, {hi})")));
    }
    let (z_lo, z_hi) = (hi.powf(-v), lo.powf(-v));
    if z < z_lo || z > z_hi {
        return Ok(0.0);
    }
    Ok(z.powf(-1.0 - 1.0 / v) / (v * (hi - lo)))
}

/// Density of U = X·Z for X Gamma-Gamma and Z the path loss of a uniform hop.
pub fn product_pdf_u(u: f64, x_params: &GammaGammaParams, srgeom: &LinkGeometry, v: f64) -> Result<f64> {
    let DistanceModel::Uniform { lo, hi } = srgeom.kind else {
        return Err(Error::Contract("product_pdf_u needs a uniform S->R geometry; use the fixed-distance density".into()));
    };
    if !(u > 0.0) {
        return Err(domain(format!("u must be positive, got {u}")));
    }
    closed::u_pdf(u, x_params, lo, hi, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, integrate_log, QuadOptions};
    use approx::assert_relative_eq;

    #[test]
    fn pathloss_values() {
        assert_eq!(pathloss(1.0, 3.3).unwrap(), 1.0);
        assert_relative_eq!(pathloss(2.0, 2.7).unwrap(), 0.153_893_051_668_114_5, max_relative = 1e-10);
        assert_relative_eq!(pathloss(3.0, 2.7).unwrap(), 3f64.powf(-2.7), max_relative = 1e-15);
        assert!(pathloss(0.0, 2.7).is_err());
    }

    #[test]
    fn pathloss_pdf_normalised() {
        let (lo, hi, v) = (1.0, 3.0, 2.7);
        let g = LinkGeometry::uniform(lo, hi, v);
        let (a, b) = g.pathloss_support();
        assert_eq!(a, pathloss(hi, v).unwrap());
        assert_eq!(b, pathloss(lo, v).unwrap());
        let r = integrate(|z| pathloss_pdf(z, lo, hi, v).unwrap(), a, b, QuadOptions::rel(1e-13));
        assert!((r.value - 1.0).abs() < 1e-10);
        assert_eq!(pathloss_pdf(1.5, lo, hi, v).unwrap(), 0.0);
        assert!(pathloss_pdf(0.5, 3.0, 1.0, v).is_err());
    }

    #[test]
    fn product_pdf_normalised() {
        let x = GammaGammaParams::new(1.0, 1.0, 0.7 * 1e3).unwrap();
        let g = LinkGeometry::uniform(1.0, 3.0, 2.7);
        let r = integrate_log(|u| product_pdf_u(u, &x, &g, 2.7).unwrap(), 0.0, f64::INFINITY, 100.0, QuadOptions::rel(1e-9));
        assert!((r.value - 1.0).abs() < 1e-5, "{}", r.value);
        assert!(product_pdf_u(1.0, &x, &LinkGeometry::deterministic(2.0, 2.7), 2.7).is_err());
    }

    #[test]
    fn validation() {
        assert!(LinkGeometry::uniform(3.0, 1.0, 2.7).validate().is_err());
        assert!(LinkGeometry::deterministic(-1.0, 2.7).validate().is_err());
        assert!(LinkGeometry::uniform(1.0, 3.0, 0.0).validate().is_err());
        assert!(LinkGeometry::uniform(1.0, 3.0, 2.7).validate().is_ok());
    }
}
