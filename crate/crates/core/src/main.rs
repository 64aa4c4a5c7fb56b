use clap::{Args, Parser, Subcommand};
use ehrelay::analytic::check::{dual_path, SerOp};
use ehrelay::harness::{
    approximation_error, default_rho_grid, difference_lambda, optimize_rho, parse_grid, preset, run_preset, run_sweep, Axis,
    ConfigFile, Evaluator, McBudget, SweepResult, SweepSpec,
};
use ehrelay::harvester::HarvesterModel;
use ehrelay::montecarlo::SystemConfig;
use ehrelay::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ehrelay", version, about = "BER of an energy-harvesting decode-and-forward relay over double-Rayleigh fading")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; built-in defaults when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    ps_db: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    chi: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<ConfigFile, Error> {
        let mut cf = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        self.apply(&mut cf);
        Ok(cf)
    }

    fn apply(&self, cf: &mut ConfigFile) {
        if let Some(v) = self.ps_db {
            cf.ps_db = v;
        }
        if let Some(v) = self.seed {
            cf.seed = v;
        }
        if let Some(v) = self.chi {
            cf.chi = v;
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the sweep described by a config file, with optional overrides.
    Sweep {
        config_file: PathBuf,
        #[arg(long)]
        axis: Option<String>,
        /// "start:step:stop" or a comma-separated list.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated subset of analytic_L, analytic_NL, mc_L, mc_NL.
        #[arg(long)]
        evaluators: Option<String>,
        #[arg(long)]
        ps_db: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a figure preset (fig3 ... fig10).
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the Monte-Carlo columns.
        #[arg(long)]
        no_mc: bool,
        #[arg(long, default_value_t = 200)]
        min_errors: u64,
        #[arg(long, default_value_t = 4_000_000)]
        max_bits: u64,
    },
    /// Splitting ratio minimising the analytic BER.
    OptimizeRho {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: Option<String>,
    },
    /// Lambda(chi) = |MC - analytic(chi)| / MC for the saturating harvester.
    ApproxError {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1:1:30")]
        chi_grid: String,
        #[arg(long, default_value_t = 1_000_000)]
        min_errors: u64,
    },
    /// lambda(d) = BER with uniform distances - BER with both hops at d.
    DiffLambda {
        #[command(flatten)]
        common: Common,
        /// L or NL.
        #[arg(long, default_value = "L")]
        model: String,
        #[arg(long, default_value = "1:0.1:3")]
        grid: String,
    },
    /// Check every closed-form SER operation against direct quadrature.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "0:5:55")]
        ps_grid: String,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
}

enum Outcome {
    Ok,
    NumericalFailure,
}

fn code(e: &Error) -> u8 {
    match e {
        Error::Evaluation(_) => 2,
        _ => 1,
    }
}

fn report(result: &SweepResult, out: &Option<PathBuf>, title: &str) -> Result<Outcome, Error> {
    match out {
        Some(p) => {
            result.write(p, title)?;
            eprintln!("wrote {}", p.display());
        }
        None => print!("{}", result.to_csv()),
    }
    for r in result.rows.iter().filter(|r| r.message.is_some()) {
        eprintln!("{} at {}: {}", r.evaluator, r.axis_value, r.message.as_deref().unwrap_or(""));
    }
    Ok(if result.has_failures() { Outcome::NumericalFailure } else { Outcome::Ok })
}

fn system(cf: &ConfigFile) -> Result<SystemConfig, Error> {
    cf.system()
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.cmd {
        Cmd::Sweep { config_file, axis, grid, out, evaluators, ps_db, seed } => {
            let mut cf = ConfigFile::load(&config_file)?;
            Common { config: None, ps_db, seed, chi: None }.apply(&mut cf);
            let base = system(&cf)?;
            let file_spec = cf.sweep_spec()?;
            let axis = match (axis, &file_spec) {
                (Some(a), _) => a.parse::<Axis>()?,
                (None, Some(s)) => s.axis,
                (None, None) => return Err(Error::Config("no axis given (use --axis or a [sweep] section)".into())),
            };
            let grid = match (grid, &file_spec) {
                (Some(g), _) => parse_grid(&g)?,
                (None, Some(s)) => s.grid.clone(),
                (None, None) => return Err(Error::Config("no grid given (use --grid or a [sweep] section)".into())),
            };
            let evaluators = match (evaluators, &file_spec) {
                (Some(e), _) => e.split(',').map(|s| s.trim().parse::<Evaluator>()).collect::<Result<Vec<_>, _>>()?,
                (None, Some(s)) => s.evaluators.clone(),
                (None, None) => Evaluator::ALL.to_vec(),
            };
            let mut spec = SweepSpec::new(base, axis, grid, evaluators);
            spec.mc = cf.montecarlo;
            spec.optimize_rho = file_spec.as_ref().is_some_and(|s| s.optimize_rho);
            let out = out.or_else(|| file_spec.and_then(|s| s.output_path));
            let result = run_sweep(&spec)?;
            report(&result, &out, axis.name())
        }
        Cmd::Preset { name, out, no_mc, min_errors, max_bits } => {
            let p = preset(&name)?;
            eprintln!("{}: {}", p.name, p.description);
            let result = run_preset(&p, McBudget { min_errors, max_bits }, !no_mc)?;
            report(&result, &out, p.axis.name())
        }
        Cmd::OptimizeRho { common, grid } => {
            let c = system(&common.load()?)?;
            let grid = match grid {
                Some(g) => parse_grid(&g)?,
                None => default_rho_grid(),
            };
            let (rho, ber) = optimize_rho(&c, &grid)?;
            println!("rho_star,ber\n{rho},{ber:e}");
            Ok(Outcome::Ok)
        }
        Cmd::ApproxError { common, chi_grid, min_errors } => {
            let cf = common.load()?;
            let c = system(&cf)?;
            let chis = parse_grid(&chi_grid)?
                .into_iter()
                .map(|v| if v >= 1.0 && v.fract() == 0.0 { Ok(v as usize) } else { Err(Error::Config(format!("chi must be a positive integer, got {v}"))) })
                .collect::<Result<Vec<_>, _>>()?;
            let (sim, rows) = approximation_error(&c, &chis, McBudget { min_errors, max_bits: cf.montecarlo.max_bits })?;
            eprintln!("simulated BER {:e} +- {:e} ({} bits)", sim.ber, sim.half_width_95, sim.bits);
            println!("chi,analytic,lambda");
            let mut failed = false;
            for r in rows {
                match r.lambda {
                    Some(l) => println!("{},{:e},{:e}", r.chi, r.analytic, l),
                    None => {
                        failed = true;
                        println!("{},{:e},", r.chi, r.analytic);
                    }
                }
            }
            Ok(if failed { Outcome::NumericalFailure } else { Outcome::Ok })
        }
        Cmd::DiffLambda { common, model, grid } => {
            let c = system(&common.load()?)?;
            let model = match model.as_str() {
                "L" => HarvesterModel::L,
                "NL" => HarvesterModel::NL,
                _ => return Err(Error::Config(format!("model must be L or NL, got '{model}'"))),
            };
            let rows = difference_lambda(&c, model, &parse_grid(&grid)?)?;
            println!("d,lambda");
            let mut failed = false;
            for (d, lam) in rows {
                match lam {
                    Ok(l) => println!("{d},{l:e}"),
                    Err(e) => {
                        failed = true;
                        eprintln!("d = {d}: {e}");
                        println!("{d},");
                    }
                }
            }
            Ok(if failed { Outcome::NumericalFailure } else { Outcome::Ok })
        }
        Cmd::Verify { common, ps_grid, tol } => {
            let c = system(&common.load()?)?;
            let grid = parse_grid(&ps_grid)?;
            let mut failed = false;
            println!("op,ps_db,closed,direct,rel_err,route,status");
            for op in SerOp::ALL {
                for &ps in &grid {
                    match dual_path(&c, op, ps, 2.0) {
                        Ok(chk) => {
                            let ok = chk.rel_err() <= tol;
                            failed |= !ok;
                            println!(
                                "{},{ps},{:e},{:e},{:.2e},{:?},{}",
                                op.name(),
                                chk.closed,
                                chk.direct,
                                chk.rel_err(),
                                chk.provenance,
                                if ok { "pass" } else { "FAIL" }
                            );
                        }
                        Err(e) => {
                            failed = true;
                            println!("{},{ps},,,,,FAIL ({e})", op.name());
                        }
                    }
                }
            }
            Ok(if failed { Outcome::NumericalFailure } else { Outcome::Ok })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::NumericalFailure) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(code(&e))
        }
    }
}
