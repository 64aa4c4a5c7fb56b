//! A sweep defined in TOML, as read by `ehrelay sweep`.
//!
//! `cargo run --release --example config_sweep`

use ehrelay::harness::{run_sweep, ConfigFile};

const CONFIG: &str = r#"
version = 1
seed = 42

[relay]
mode = "DA"
n_eh = 2
n_ip = 2
p_th_db = 40.0

[geometry]
v = 2.7
sr = { kind = "uniform", lo = 1.0, hi = 3.0 }
rd = { kind = "deterministic", d = 2.0 }

[montecarlo]
min_errors = 200
max_bits = 2000000

[sweep]
axis = "ps_db"
grid = "0:10:50"
evaluators = ["analytic_L", "analytic_NL", "mc_NL"]
"#;

fn main() -> ehrelay::Result<()> {
    let cf = ConfigFile::parse(CONFIG)?;
    let spec = cf.sweep_spec()?.expect("file has a [sweep] section");
    print!("{}", run_sweep(&spec)?.to_csv());
    Ok(())
}
