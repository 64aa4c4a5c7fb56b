//! BER against source power for PS(ρ=0.8) and the three DA splits, with the
//! SNR gain of PS at BER = 1e-2.
//!
//! `cargo run --release --example fig3_ber_vs_ps [out_dir]`

use ehrelay::analytic::analytic_ber;
use ehrelay::harness::{preset_budget, run_named_preset};
use ehrelay::harvester::{EhConfig, HarvesterModel};
use ehrelay::montecarlo::SystemConfig;
use std::path::PathBuf;

/// P_s in dB where the analytic BER crosses `target`.
fn power_at(eh: EhConfig, target: f64) -> f64 {
    let ber = |ps: f64| analytic_ber(&SystemConfig { eh, ps_db: ps, ..SystemConfig::default() }).map(|b| b.ber).unwrap_or(0.5);
    let (mut lo, mut hi) = (-20.0, 90.0);
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if ber(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn main() -> ehrelay::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    let result = run_named_preset("fig3", &out, preset_budget(), true)?;
    println!("{} rows written to {}", result.rows.len(), out.join("fig3.csv").display());

    for model in [HarvesterModel::L, HarvesterModel::NL] {
        let ps = power_at(EhConfig::ps(4, 0.8).with_model(model), 1e-2);
        print!("{model:?}: PS reaches 1e-2 at {ps:.2} dB; gain over");
        for (e, i) in [(1, 3), (2, 2), (3, 1)] {
            let da = power_at(EhConfig::da(e, i).with_model(model), 1e-2);
            print!("  DA({e},{i}) {:.2} dB", da - ps);
        }
        println!();
    }
    Ok(())
}
