//! BER at 50 dB with both hops at the same fixed distance, against the
//! uniform-distance reference.
//!
//! `cargo run --release --example fig8_fixed_distance [out_dir]`

use ehrelay::harness::{preset_budget, run_named_preset};
use std::path::PathBuf;

fn main() -> ehrelay::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    let result = run_named_preset("fig8", &out, preset_budget(), true)?;
    let fallback = result.rows.iter().filter(|r| r.flag.to_string() == "fallback").count();
    println!("{} rows, {fallback} from the quadrature fallback", result.rows.len());
    for r in result.rows.iter().filter(|r| r.evaluator == "DA(3,1)/analytic_L" || r.evaluator == "DA(3,1) U(1,3)/analytic_L") {
        if (r.axis_value * 10.0).round() as i64 % 5 == 0 {
            println!("  d = {:.1}  {:<28} {:.3e}", r.axis_value, r.evaluator, r.ber);
        }
    }
    Ok(())
}
