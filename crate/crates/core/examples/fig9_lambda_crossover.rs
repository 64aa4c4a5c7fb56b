//! λ(d) = BER(uniform) − BER(fixed d) and the distance where it changes sign.
//!
//! `cargo run --release --example fig9_lambda_crossover [out_dir]`

use ehrelay::harness::{lambda_crossover, preset, preset_budget, run_named_preset};
use ehrelay::harvester::HarvesterModel;
use std::path::PathBuf;

fn main() -> ehrelay::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    run_named_preset("fig9", &out, preset_budget(), false)?;
    for s in preset("fig9")?.series {
        for model in [HarvesterModel::L, HarvesterModel::NL] {
            let d = lambda_crossover(&s.base, model, 1.0, 3.0)?;
            println!("{:<16} {model:?}: lambda = 0 at d = {d:.3}", s.label);
        }
    }
    Ok(())
}
