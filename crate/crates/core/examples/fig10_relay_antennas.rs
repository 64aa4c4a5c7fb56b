//! BER at 50 dB against the relay antenna count: PS with ρ optimised per
//! point, DA with one decoding antenna.
//!
//! `cargo run --release --example fig10_relay_antennas [out_dir]`

use ehrelay::harness::{preset_budget, run_named_preset};
use std::path::PathBuf;

fn main() -> ehrelay::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    let result = run_named_preset("fig10", &out, preset_budget(), true)?;
    for r in result.rows.iter().filter(|r| !r.evaluator.contains("mc_")) {
        let rho = r.rho_star.map(|v| format!("  rho* {v:.2}")).unwrap_or_default();
        println!("N_r = {}  {:<20} {:.3e}{rho}", r.axis_value, r.evaluator, r.ber);
    }
    Ok(())
}
