use ehrelay::analytic::analytic_ber;
use ehrelay::channel::{double_rayleigh_pdf, GammaGammaParams};
use ehrelay::harness::{optimize_rho, run_sweep, Axis, Evaluator, McBudget, SweepSpec};
use ehrelay::harvester::{EhConfig, HarvesterModel};
use ehrelay::meijer::{meijer_g, MeijerGSpec};
use ehrelay::montecarlo::{mrc_combine, mrc_snr, qam_demap, qam_map, SystemConfig};
use ehrelay::quadrature::{gauss_chebyshev, integrate_log, QuadOptions};
use ehrelay::special::bessel_k;
use num_complex::Complex64;
use proptest::prelude::*;

fn relay() -> impl Strategy<Value = EhConfig> {
    prop_oneof![
        (1usize..=6, 0.05f64..0.95).prop_map(|(n, rho)| EhConfig::ps(n, rho)),
        (1usize..=3, 1usize..=3).prop_map(|(e, i)| EhConfig::da(e, i)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn ber_is_a_probability_below_one_half(eh in relay(), ps in 0.0f64..70.0, nl in any::<bool>()) {
        let model = if nl { HarvesterModel::NL } else { HarvesterModel::L };
        let b = analytic_ber(&SystemConfig { eh: eh.with_model(model), ps_db: ps, ..SystemConfig::default() }).unwrap().ber;
        prop_assert!((0.0..=0.5).contains(&b));
    }

    #[test]
    fn linear_ber_falls_with_power(eh in relay(), ps in 0.0f64..60.0, step in 1.0f64..10.0) {
        let b = |p: f64| analytic_ber(&SystemConfig { eh, ps_db: p, ..SystemConfig::default() }).unwrap().ber;
        prop_assert!(b(ps + step) <= b(ps) * (1.0 + 1e-9));
    }

    #[test]
    fn saturation_never_helps(eh in relay(), ps in 20.0f64..70.0) {
        let c = SystemConfig { eh, ps_db: ps, ..SystemConfig::default() };
        let l = analytic_ber(&c).unwrap().ber;
        let nl = analytic_ber(&SystemConfig { eh: eh.with_model(HarvesterModel::NL), ..c }).unwrap().ber;
        prop_assert!(nl >= l * (1.0 - 1e-8), "NL {nl} < L {l}");
    }

    #[test]
    fn dedicated_antennas_ignore_rho(e in 1usize..=3, i in 1usize..=3, rho in 0.05f64..0.95) {
        let c = SystemConfig { eh: EhConfig::da(e, i), ps_db: 35.0, ..SystemConfig::default() };
        let moved = SystemConfig { eh: EhConfig { rho, ..c.eh }, ..c };
        prop_assert_eq!(analytic_ber(&c).unwrap().ber, analytic_ber(&moved).unwrap().ber);
    }

    #[test]
    fn optimum_is_a_grid_minimum(n in 1usize..=5, ps in 10.0f64..60.0) {
        let c = SystemConfig { eh: EhConfig::ps(n, 0.5), ps_db: ps, ..SystemConfig::default() };
        let grid = [0.2, 0.4, 0.6, 0.8, 0.9];
        let (rho, ber) = optimize_rho(&c, &grid).unwrap();
        prop_assert!(grid.contains(&rho));
        for r in grid {
            let b = analytic_ber(&SystemConfig { eh: EhConfig { rho: r, ..c.eh }, ..c }).unwrap().ber;
            prop_assert!(ber <= b);
        }
    }

    #[test]
    fn meijer_reduces_to_bessel(nu in 0.0f64..3.0, lx in -2.0f64..2.0) {
        let x = 10f64.powf(lx);
        let g = meijer_g(&MeijerGSpec::new(&[], &[], &[nu / 2.0, -nu / 2.0], &[], x)).unwrap().value;
        let k = 2.0 * bessel_k(nu, 2.0 * x.sqrt());
        prop_assert!(((g - k) / k).abs() < 1e-10, "nu {nu} x {x}: {g} vs {k}");
    }

    #[test]
    fn gamma_gamma_pdf_has_unit_mass(k in 0.6f64..8.0, m in 0.6f64..8.0, lmean in -2.0f64..4.0) {
        let p = GammaGammaParams::new(k, m, 10f64.powf(lmean)).unwrap();
        let mass = integrate_log(|t| p.pdf(t), 0.0, f64::INFINITY, p.mean_t, QuadOptions::rel(1e-11)).value;
        prop_assert!((mass - 1.0).abs() < 1e-7, "mass {mass}");
    }

    #[test]
    fn double_rayleigh_pdf_has_unit_mass(lbar in -2.0f64..3.0) {
        let ybar = 10f64.powf(lbar);
        let mass = integrate_log(|y| double_rayleigh_pdf(y, ybar).unwrap(), 0.0, f64::INFINITY, ybar, QuadOptions::rel(1e-11)).value;
        prop_assert!((mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn chebyshev_rule_is_exact_for_weighted_polynomials(c in proptest::collection::vec(-3.0f64..3.0, 1..10), a in -2.0f64..0.0, w in 0.5f64..4.0) {
        // f(x) = p(t)/sqrt(1-t²) with deg p <= 2χ-1 is integrated exactly; the
        // reference uses ∫ t^k / sqrt(1-t²) dt = π (k-1)!!/k!! for even k
        let b = a + w;
        let t = |x: f64| (2.0 * x - a - b) / (b - a);
        let p = |t: f64| c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci);
        let approx = gauss_chebyshev(|x| p(t(x)) / (1.0 - t(x) * t(x)).sqrt(), a, b, 8);
        let mut moment = std::f64::consts::PI;
        let mut exact = 0.0;
        for (k, ci) in c.iter().enumerate() {
            if k % 2 == 0 {
                if k > 0 {
                    moment *= (k - 1) as f64 / k as f64;
                }
                exact += ci * moment;
            }
        }
        exact *= 0.5 * (b - a);
        prop_assert!((approx - exact).abs() <= 1e-12 * (1.0 + exact.abs()), "{approx} vs {exact}");
    }

    #[test]
    fn qam_roundtrip(bits in proptest::collection::vec(0u8..=1, 4)) {
        for (m, n) in [(4u32, 2usize), (16, 4)] {
            let s = qam_map(&bits[..n], m).unwrap();
            prop_assert_eq!(qam_demap(s, m).unwrap(), bits[..n].to_vec());
        }
    }

    #[test]
    fn mrc_recovers_the_symbol(gains in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..6), sr in -1.0f64..1.0, si in -1.0f64..1.0) {
        let h: Vec<Complex64> = gains.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        prop_assume!(h.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6);
        let x = Complex64::new(sr, si);
        let y: Vec<Complex64> = h.iter().map(|g| g * x).collect();
        let est = mrc_combine(&y, &h).unwrap();
        prop_assert!((est - x).norm() < 1e-9);
        let total: f64 = h.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((mrc_snr(&h, 2.0) - 2.0 * total).abs() < 1e-9 * total.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 4, ..ProptestConfig::default() })]

    #[test]
    fn sweeps_are_reproducible(seed in any::<u64>()) {
        let base = SystemConfig { seed, ..SystemConfig::default() };
        let mut spec = SweepSpec::new(base, Axis::PsDb, vec![5.0, 25.0], vec![Evaluator::AnalyticL, Evaluator::McNL]);
        spec.mc = McBudget { min_errors: 100, max_bits: 400_000 };
        prop_assert_eq!(run_sweep(&spec).unwrap().to_csv(), run_sweep(&spec).unwrap().to_csv());
    }
}
