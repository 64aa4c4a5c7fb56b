//! Link-level simulation: AWGN sanity check, then the relay link against the
//! analytic BER for both harvester models.
//!
//! `cargo run --release --example monte_carlo`

use ehrelay::analytic::analytic_ber;
use ehrelay::harvester::{EhConfig, HarvesterModel};
use ehrelay::montecarlo::{simulate_awgn_ber, simulate_ber, SystemConfig, DEFAULT_MAX_BITS, DEFAULT_MIN_ERRORS};
use ehrelay::special::q_function;

fn main() -> ehrelay::Result<()> {
    let snr_db: f64 = 6.0;
    let awgn = simulate_awgn_ber(4, snr_db, 7, 2000, 10_000_000)?;
    let exact = q_function((2.0 * 10f64.powf(snr_db / 10.0)).sqrt());
    println!("4-QAM over AWGN at Eb/N0 = {snr_db} dB: {:.4e} +- {:.1e} (exact {exact:.4e})", awgn.ber, awgn.half_width_95);

    println!("\n{:<8} {:<3} {:>5} {:>12} {:>12} {:>10} {:>11}", "mode", "EH", "P_s", "analytic", "simulated", "+-95%", "bits");
    for (name, eh) in [("PS(0.8)", EhConfig::ps(4, 0.8)), ("DA(1,3)", EhConfig::da(1, 3))] {
        for model in [HarvesterModel::L, HarvesterModel::NL] {
            for ps_db in [10.0, 25.0, 40.0] {
                let c = SystemConfig { eh: eh.with_model(model), ps_db, ..SystemConfig::default() };
                let a = analytic_ber(&c)?.ber;
                let s = simulate_ber(&c, DEFAULT_MIN_ERRORS, DEFAULT_MAX_BITS)?;
                println!(
                    "{name:<8} {:<3} {ps_db:>5} {a:>12.4e} {:>12.4e} {:>10.1e} {:>11}",
                    format!("{model:?}"),
                    s.ber,
                    s.half_width_95,
                    s.bits
                );
            }
        }
    }
    Ok(())
}
