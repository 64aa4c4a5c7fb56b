//! BER at 60 dB against the number of decoding antennas (N_eh = 1, 2) and
//! against the number of harvesting antennas (N_ip = 1, 2).
//!
//! `cargo run --release --example fig6_antenna_split [out_dir]`

use ehrelay::harness::{preset_budget, run_named_preset};
use std::path::PathBuf;

fn main() -> ehrelay::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    for name in ["fig6", "fig6b"] {
        let result = run_named_preset(name, &out, preset_budget(), true)?;
        println!("{name}:");
        for r in result.rows.iter().filter(|r| r.evaluator.ends_with("analytic_NL")) {
            println!("  {:>2}  {:<22} {:.3e}", r.axis_value, r.evaluator, r.ber);
        }
    }
    Ok(())
}
