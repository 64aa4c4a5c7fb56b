//! Approximation error Λ(χ) of the Chebyshev rule in the saturating-harvester
//! BER, against one long simulation at 30 dB.
//!
//! `cargo run --release --example fig5_chi_error [out_dir]`

use ehrelay::harness::{run_named_preset, McBudget};
use std::path::PathBuf;

fn main() -> ehrelay::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    // Λ is a relative gap of order 1e-3, so the simulation needs ~1e6 errors.
    let mc = McBudget { min_errors: 1_000_000, max_bits: 100_000_000 };
    let result = run_named_preset("fig5", &out, mc, true)?;
    for r in &result.rows {
        println!("chi = {:>2}  Lambda = {:.2e}  (MC half-width / BER {:.1e})", r.axis_value, r.ber, r.half_width.unwrap_or(f64::NAN));
    }
    Ok(())
}
