//! Optimal splitting ratio against source power for one and five relay antennas.
//!
//! `cargo run --release --example fig4_rho_star [out_dir]`
//! The ρ* values land in `fig4.rho.csv`.

use ehrelay::harness::{preset_budget, run_named_preset};
use std::path::PathBuf;

fn main() -> ehrelay::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    let result = run_named_preset("fig4", &out, preset_budget(), false)?;
    for r in result.rows.iter().filter(|r| r.axis_value % 10.0 == 0.0) {
        println!("{:>5} dB  {:<32} rho* = {:.2}  BER = {:.3e}", r.axis_value, r.evaluator, r.rho_star.unwrap_or(f64::NAN), r.ber);
    }
    Ok(())
}
