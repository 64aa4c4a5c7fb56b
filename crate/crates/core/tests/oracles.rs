//! Derived values against oracles built here from first principles.
//!
//! With one relay antenna the Gamma-Gamma fit is exact (|h|² is a product of
//! two unit exponentials), so the BER reduces to integrals of elementary
//! functions: averaging Q(√(2sE)) over E ~ Exp(1) gives ½(1 - √(s/(1+s))).

use approx::assert_relative_eq;
use ehrelay::analytic::analytic_ber;
use ehrelay::channel::epsilon_fit;
use ehrelay::geometry::LinkGeometry;
use ehrelay::harvester::{EhConfig, HarvesterModel};
use ehrelay::montecarlo::{simulate_awgn_ber, SystemConfig};
use ehrelay::quadrature::{integrate_log, QuadOptions};
use ehrelay::special::bessel_k;

const A: f64 = 2.0;
const B: f64 = 0.5;

/// E[a Q(√(2 b s E₁E₂))] for independent unit exponentials.
fn q_over_product(s: f64) -> f64 {
    let inner = |e1: f64| 0.5 * A * (1.0 - (B * s * e1 / (1.0 + B * s * e1)).sqrt()) * (-e1).exp();
    integrate_log(inner, 0.0, f64::INFINITY, 1.0, QuadOptions::rel(1e-12)).value
}

/// Unit-mean double-Rayleigh density 2K₀(2√t).
fn product_density(t: f64) -> f64 {
    2.0 * bessel_k(0.0, 2.0 * t.sqrt())
}

/// BER of a single-antenna PS relay, both hops at distance d, by direct integration.
fn single_antenna_ber(ps_db: f64, rho: f64, d: f64, p_th: Option<f64>) -> f64 {
    let (eta, v) = (0.7, 2.7);
    let ps = 10f64.powf(ps_db / 10.0);
    let l = d.powf(-v);
    let p_sr = q_over_product((1.0 - rho) * ps * l);
    let p_rd = integrate_log(
        |t| {
            let mut u = eta * rho * ps * l * t;
            if let Some(cap) = p_th {
                u = u.min(cap);
            }
            product_density(t) * q_over_product(u * l)
        },
        0.0,
        f64::INFINITY,
        1.0,
        QuadOptions::rel(1e-10),
    )
    .value;
    (1.0 - (1.0 - p_sr) * (1.0 - p_rd)) / 2.0
}

fn fixed(eh: EhConfig, ps_db: f64, d: f64) -> SystemConfig {
    SystemConfig {
        eh,
        ps_db,
        geom_sr: LinkGeometry::deterministic(d, 2.7),
        geom_rd: LinkGeometry::deterministic(d, 2.7),
        ..SystemConfig::default()
    }
}

#[test]
fn single_antenna_linear_matches_first_principles() {
    for (ps, rho, d) in [(10.0, 0.8, 2.0), (30.0, 0.5, 1.5), (50.0, 0.8, 2.5)] {
        let want = single_antenna_ber(ps, rho, d, None);
        let got = analytic_ber(&fixed(EhConfig::ps(1, rho), ps, d)).unwrap().ber;
        assert_relative_eq!(got, want, max_relative = 1e-6);
    }
}

#[test]
fn single_antenna_saturating_matches_first_principles() {
    for (ps, p_th) in [(30.0, 1e2), (45.0, 1e3), (60.0, 1e3)] {
        let want = single_antenna_ber(ps, 0.8, 2.0, Some(p_th));
        let eh = EhConfig { p_th, ..EhConfig::ps(1, 0.8).with_model(HarvesterModel::NL) };
        let got = analytic_ber(&fixed(eh, ps, 2.0)).unwrap().ber;
        assert_relative_eq!(got, want, max_relative = 1e-6);
    }
}

#[test]
fn single_antenna_uniform_distance_matches_first_principles() {
    // average the fixed-distance oracle over d_sr, d_rd ~ U(1,3) on a Gauss-Legendre grid
    let (eta, v, rho, ps_db) = (0.7, 2.7, 0.8, 35.0);
    let ps = 10f64.powf(ps_db / 10.0);
    let nodes = gauss_legendre_unit(24);
    let mut p_sr = 0.0;
    let mut p_rd = 0.0;
    for &(x1, w1) in &nodes {
        let d1 = 1.0 + 2.0 * x1;
        let l1 = d1.powf(-v);
        p_sr += w1 * q_over_product((1.0 - rho) * ps * l1);
        for &(x2, w2) in &nodes {
            let l2 = (1.0 + 2.0 * x2).powf(-v);
            let inner = integrate_log(
                |t| product_density(t) * q_over_product(eta * rho * ps * l1 * t * l2),
                0.0,
                f64::INFINITY,
                1.0,
                QuadOptions::rel(1e-10),
            )
            .value;
            p_rd += w1 * w2 * inner;
        }
    }
    let want = (1.0 - (1.0 - p_sr) * (1.0 - p_rd)) / 2.0;
    let got = analytic_ber(&SystemConfig { eh: EhConfig::ps(1, rho), ps_db, ..SystemConfig::default() }).unwrap().ber;
    assert_relative_eq!(got, want, max_relative = 1e-5);
}

/// Gauss-Legendre nodes and weights on (0, 1) by Newton iteration on P_n.
fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            (0.5 * (x + 1.0), 0.5 * w)
        })
        .collect()
}

#[test]
fn fit_constant_for_double_rayleigh() {
    assert_relative_eq!(epsilon_fit(1.0, 1.0).unwrap(), -1.0828 / 1.98124, max_relative = 1e-14);
}

#[test]
fn qam16_awgn_matches_gray_formula() {
    // Gray 16-QAM: BER ≈ (3/4) Q(√(4/5 γ_b)) + (1/2) Q(3√(4/5 γ_b)) - (1/4) Q(5√(4/5 γ_b))
    let gamma_b_db: f64 = 8.0;
    let g = 10f64.powf(gamma_b_db / 10.0);
    let q = ehrelay::special::q_function;
    let s = (0.8 * g).sqrt();
    let exact = 0.75 * q(s) + 0.5 * q(3.0 * s) - 0.25 * q(5.0 * s);
    let est = simulate_awgn_ber(16, gamma_b_db, 3, 4000, 40_000_000).unwrap();
    assert!((est.ber - exact).abs() <= 3.0 * est.half_width_95, "{} vs {exact}", est.ber);
}
