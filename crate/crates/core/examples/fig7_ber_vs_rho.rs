//! BER against the splitting ratio at 40 and 60 dB, distances U(1,2).
//! DA curves are flat in ρ and serve as reference lines.
//!
//! `cargo run --release --example fig7_ber_vs_rho [out_dir]`

use ehrelay::harness::{preset_budget, run_named_preset};
use std::path::PathBuf;

fn main() -> ehrelay::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    let result = run_named_preset("fig7", &out, preset_budget(), true)?;
    for label in ["PS 40dB/analytic_L", "PS 40dB/analytic_NL", "PS 60dB/analytic_L", "PS 60dB/analytic_NL"] {
        let best = result
            .rows
            .iter()
            .filter(|r| r.evaluator == label && r.ber.is_finite())
            .min_by(|a, b| a.ber.total_cmp(&b.ber));
        if let Some(r) = best {
            println!("{label:<22} minimum {:.3e} at rho = {:.2}", r.ber, r.axis_value);
        }
    }
    Ok(())
}
