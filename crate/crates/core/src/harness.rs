//! Parameter sweeps over the analytic and simulated BER, figure presets, the
//! configuration file format and CSV/SVG output.

use crate::analytic::{analytic_ber, ModulationParams, Provenance};
use crate::channel::FadingStats;
use crate::error::{Error, Result};
use crate::geometry::{DistanceModel, LinkGeometry, DEFAULT_PATHLOSS_EXPONENT};
use crate::harvester::{EhConfig, HarvestMode, HarvesterModel};
use crate::montecarlo::{simulate_ber, SystemConfig, DEFAULT_MAX_BITS, DEFAULT_MIN_ERRORS};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    PsDb,
    Rho,
    NIp,
    NEh,
    NR,
    /// Both hops at the same fixed distance.
    Distance,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::PsDb => "ps_db",
            Axis::Rho => "rho",
            Axis::NIp => "n_ip",
            Axis::NEh => "n_eh",
            Axis::NR => "n_r",
            Axis::Distance => "distance",
        }
    }

    /// `base` with the axis parameter set to `value`.
    ///
    /// Antenna axes keep the other count fixed: in PS mode N_r follows
    /// N_eh + N_ip, in DA mode an N_r value changes N_eh and keeps N_ip.
    pub fn apply(&self, base: &SystemConfig, value: f64) -> Result<SystemConfig> {
        let mut c = *base;
        let count = || -> Result<usize> {
            if value >= 1.0 && value.fract() == 0.0 && value < 1e6 {
                Ok(value as usize)
            } else {
                Err(Error::Config(format!("{} must be a positive integer, got {value}", self.name())))
            }
        };
        match self {
            Axis::PsDb => c.ps_db = value,
            Axis::Rho => c.eh.rho = value,
            Axis::NIp => {
                c.eh.n_ip = count()?;
                c.eh.n_r = c.eh.n_eh + c.eh.n_ip;
            }
            Axis::NEh => {
                c.eh.n_eh = count()?;
                c.eh.n_r = c.eh.n_eh + c.eh.n_ip;
            }
            Axis::NR => {
                let n = count()?;
                if c.eh.mode == HarvestMode::DA {
                    if n <= c.eh.n_ip {
                        return Err(Error::Config(format!("n_r = {n} leaves no harvesting antenna (n_ip = {})", c.eh.n_ip)));
                    }
                    c.eh.n_eh = n - c.eh.n_ip;
                }
                c.eh.n_r = n;
            }
            Axis::Distance => {
                c.geom_sr = LinkGeometry::deterministic(value, c.geom_sr.v);
                c.geom_rd = LinkGeometry::deterministic(value, c.geom_rd.v);
            }
        }
        c.validate()?;
        Ok(c)
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ps_db" => Axis::PsDb,
            "rho" => Axis::Rho,
            "n_ip" => Axis::NIp,
            "n_eh" => Axis::NEh,
            "n_r" => Axis::NR,
            "distance" => Axis::Distance,
            _ => return Err(Error::Config(format!("unknown axis '{s}'"))),
        })
    }
}

/// How a BER value is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Evaluator {
    #[serde(rename = "analytic_L")]
    AnalyticL,
    #[serde(rename = "analytic_NL")]
    AnalyticNL,
    #[serde(rename = "mc_L")]
    McL,
    #[serde(rename = "mc_NL")]
    McNL,
}

impl Evaluator {
    pub const ALL: [Evaluator; 4] = [Evaluator::AnalyticL, Evaluator::AnalyticNL, Evaluator::McL, Evaluator::McNL];

    pub fn model(&self) -> HarvesterModel {
        match self {
            Evaluator::AnalyticL | Evaluator::McL => HarvesterModel::L,
            Evaluator::AnalyticNL | Evaluator::McNL => HarvesterModel::NL,
        }
    }

    pub fn is_mc(&self) -> bool {
        matches!(self, Evaluator::McL | Evaluator::McNL)
    }
}

impl fmt::Display for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Evaluator::AnalyticL => "analytic_L",
            Evaluator::AnalyticNL => "analytic_NL",
            Evaluator::McL => "mc_L",
            Evaluator::McNL => "mc_NL",
        })
    }
}

impl FromStr for Evaluator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Evaluator::ALL
            .into_iter()
            .find(|e| e.to_string() == s)
            .ok_or_else(|| Error::Config(format!("unknown evaluator '{s}'")))
    }
}

/// Monte-Carlo stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McBudget {
    pub min_errors: u64,
    pub max_bits: u64,
}

impl Default for McBudget {
    fn default() -> Self {
        Self { min_errors: DEFAULT_MIN_ERRORS, max_bits: DEFAULT_MAX_BITS }
    }
}

/// Status of one CSV row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowFlag {
    Ok,
    /// Analytic value from the quadrature fallback instead of the closed form.
    Fallback,
    /// Simulation stopped at the bit budget before reaching the error target.
    Capped,
    /// Evaluation failed; `ber` is NaN.
    Failed,
}

impl fmt::Display for RowFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowFlag::Ok => "ok",
            RowFlag::Fallback => "fallback",
            RowFlag::Capped => "capped",
            RowFlag::Failed => "failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub evaluator: String,
    pub ber: f64,
    pub flag: RowFlag,
    pub half_width: Option<f64>,
    /// Splitting ratio used when it was optimised per point.
    pub rho_star: Option<f64>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(|r| r.flag == RowFlag::Failed)
    }

    /// CSV text with header `axis,evaluator,ber,flag,half_width`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("axis,evaluator,ber,flag,half_width\n");
        for r in &self.rows {
            let hw = r.half_width.map(|h| format!("{h:e}")).unwrap_or_default();
            s.push_str(&format!("{},{},{:e},{},{}\n", r.axis_value, r.evaluator, r.ber, r.flag, hw));
        }
        s
    }

    /// Companion CSV of per-point optimised splitting ratios, if any.
    pub fn rho_csv(&self) -> Option<String> {
        let rows: Vec<_> = self.rows.iter().filter_map(|r| r.rho_star.map(|rho| (r, rho))).collect();
        if rows.is_empty() {
            return None;
        }
        let mut s = String::from("axis,evaluator,rho_star\n");
        for (r, rho) in rows {
            s.push_str(&format!("{},{},{}\n", r.axis_value, r.evaluator, rho));
        }
        Some(s)
    }

    /// Writes the CSV, the ρ* companion (`<stem>.rho.csv`) and an SVG plot next to it.
    pub fn write(&self, path: &Path, title: &str) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io_err)?;
        }
        std::fs::write(path, self.to_csv()).map_err(io_err)?;
        if let Some(rho) = self.rho_csv() {
            std::fs::write(path.with_extension("rho.csv"), rho).map_err(io_err)?;
        }
        std::fs::write(path.with_extension("svg"), render_svg(self, title)).map_err(io_err)?;
        Ok(())
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Config(format!("i/o error: {e}"))
}

/// One sweep: one base configuration, one axis, several evaluators.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SystemConfig,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub evaluators: Vec<Evaluator>,
    pub output_path: Option<PathBuf>,
    pub mc: McBudget,
    /// Prefix of the evaluator column, e.g. "PS(0.8)".
    pub label: Option<String>,
    /// Optimise ρ at every point (PS only) before evaluating.
    pub optimize_rho: bool,
}

impl SweepSpec {
    pub fn new(base: SystemConfig, axis: Axis, grid: Vec<f64>, evaluators: Vec<Evaluator>) -> Self {
        Self { base, axis, grid, evaluators, output_path: None, mc: McBudget::default(), label: None, optimize_rho: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.evaluators.is_empty() {
            return Err(Error::Config("no evaluators requested".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::Config("empty grid".into()));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("grid values must be finite".into()));
        }
        if self.mc.max_bits == 0 {
            return Err(Error::Config("max_bits must be positive".into()));
        }
        self.base.validate()
    }
}

fn mix_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Default ρ grid: 0.05, 0.10, ..., 0.95.
pub fn default_rho_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 / 20.0).collect()
}

/// Grid minimiser of the analytic BER over ρ (PS mode). Ties go to the smaller ρ.
pub fn optimize_rho(config: &SystemConfig, grid: &[f64]) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(Error::Config("empty rho grid".into()));
    }
    if config.eh.mode != HarvestMode::PS {
        return Err(Error::Config("rho optimisation needs PS mode".into()));
    }
    let mut best: Option<(f64, f64)> = None;
    let mut last_err = None;
    for &rho in grid {
        let mut c = *config;
        c.eh.rho = rho;
        match analytic_ber(&c) {
            Ok(v) => {
                let better = match best {
                    None => true,
                    Some((r, b)) => v.ber < b || (v.ber == b && rho < r),
                };
                if better {
                    best = Some((rho, v.ber));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::Evaluation("no rho evaluated".into())))
}

fn evaluate(config: &SystemConfig, evaluator: Evaluator, mc: McBudget, optimize: bool) -> Result<SweepRow> {
    let mut c = *config;
    c.eh.model = evaluator.model();
    let mut rho_star = None;
    if optimize && c.eh.mode == HarvestMode::PS {
        let (rho, _) = optimize_rho(&c, &default_rho_grid())?;
        c.eh.rho = rho;
        rho_star = Some(rho);
    }
    let row = if evaluator.is_mc() {
        let est = simulate_ber(&c, mc.min_errors, mc.max_bits)?;
        let flag = if est.bit_errors < mc.min_errors { RowFlag::Capped } else { RowFlag::Ok };
        SweepRow {
            axis_value: 0.0,
            evaluator: evaluator.to_string(),
            ber: est.ber,
            flag,
            half_width: Some(est.half_width_95),
            rho_star,
            message: None,
        }
    } else {
        let v = analytic_ber(&c)?;
        let flag = match v.provenance() {
            Provenance::ClosedForm => RowFlag::Ok,
            Provenance::Fallback => RowFlag::Fallback,
        };
        SweepRow { axis_value: 0.0, evaluator: evaluator.to_string(), ber: v.ber, flag, half_width: None, rho_star, message: None }
    };
    Ok(row)
}

/// Runs `jobs` on a scoped worker pool and returns results in job order.
fn run_pool<T: Send, J: Sync>(jobs: &[J], work: impl Fn(usize, &J) -> T + Sync) -> Vec<T> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(jobs.len().max(1));
    if workers <= 1 {
        return jobs.iter().enumerate().map(|(i, j)| work(i, j)).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut out: Vec<(usize, T)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        if i >= jobs.len() {
                            break;
                        }
                        done.push((i, work(i, &jobs[i])));
                    }
                    done
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    out.sort_by_key(|(i, _)| *i);
    out.into_iter().map(|(_, t)| t).collect()
}

/// Evaluates every evaluator at every grid point. Failing points are flagged
/// and the sweep continues. Writes the CSV when `output_path` is set.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for (pi, &value) in spec.grid.iter().enumerate() {
        for (ei, &ev) in spec.evaluators.iter().enumerate() {
            jobs.push((pi, ei, value, ev));
        }
    }
    let rows = run_pool(&jobs, |_, &(pi, ei, value, ev)| {
        let name = match &spec.label {
            Some(l) => format!("{l}/{ev}"),
            None => ev.to_string(),
        };
        let point = spec.axis.apply(&spec.base, value).and_then(|mut c| {
            c.seed = mix_seed(spec.base.seed, pi as u64, ei as u64);
            evaluate(&c, ev, spec.mc, spec.optimize_rho)
        });
        match point {
            Ok(mut row) => {
                row.axis_value = value;
                row.evaluator = name;
                row
            }
            Err(e) => SweepRow {
                axis_value: value,
                evaluator: name,
                ber: f64::NAN,
                flag: RowFlag::Failed,
                half_width: None,
                rho_star: None,
                message: Some(e.to_string()),
            },
        }
    });
    let result = SweepResult { rows };
    if let Some(path) = &spec.output_path {
        result.write(path, spec.axis.name())?;
    }
    Ok(result)
}

/// One row of [`approximation_error`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaRow {
    pub chi: usize,
    pub analytic: f64,
    /// |MC - analytic(χ)| / MC; `None` when the simulation saw no errors or the
    /// analytic value failed.
    pub lambda: Option<f64>,
}

/// Λ(χ) of the saturating-harvester analytic BER against one simulation of `config`.
pub fn approximation_error(config: &SystemConfig, chi_grid: &[usize], mc: McBudget) -> Result<(crate::montecarlo::BerEstimate, Vec<LambdaRow>)> {
    if chi_grid.is_empty() {
        return Err(Error::Config("empty chi grid".into()));
    }
    let mut c = *config;
    c.eh.model = HarvesterModel::NL;
    c.validate()?;
    let sim = simulate_ber(&c, mc.min_errors, mc.max_bits)?;
    let rows = chi_grid
        .iter()
        .map(|&chi| {
            let mut a = c;
            a.chi = chi;
            match analytic_ber(&a) {
                Ok(v) if sim.ber > 0.0 => LambdaRow { chi, analytic: v.ber, lambda: Some((sim.ber - v.ber).abs() / sim.ber) },
                Ok(v) => LambdaRow { chi, analytic: v.ber, lambda: None },
                Err(_) => LambdaRow { chi, analytic: f64::NAN, lambda: None },
            }
        })
        .collect();
    Ok((sim, rows))
}

/// Analytic BER with both hops at fixed distance `d`.
fn ber_at_distance(config: &SystemConfig, d: f64) -> Result<f64> {
    Ok(analytic_ber(&Axis::Distance.apply(config, d)?)?.ber)
}

/// λ(d) = BER(uniform distances of `config`) - BER(both hops at d).
pub fn difference_lambda(config: &SystemConfig, model: HarvesterModel, d_grid: &[f64]) -> Result<Vec<(f64, Result<f64>)>> {
    let mut c = *config;
    c.eh.model = model;
    c.validate()?;
    if !c.geom_sr.is_uniform() || !c.geom_rd.is_uniform() {
        return Err(Error::Config("difference_lambda needs uniform distances in the base configuration".into()));
    }
    let uniform = analytic_ber(&c)?.ber;
    Ok(d_grid.iter().map(|&d| (d, ber_at_distance(&c, d).map(|b| uniform - b))).collect())
}

/// Distance d in (lo, hi) where λ(d) = 0, by bisection on the analytic BER.
pub fn lambda_crossover(config: &SystemConfig, model: HarvesterModel, lo: f64, hi: f64) -> Result<f64> {
    let mut c = *config;
    c.eh.model = model;
    c.validate()?;
    let uniform = analytic_ber(&c)?.ber;
    let lam = |d: f64| ber_at_distance(&c, d).map(|b| uniform - b);
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (lam(a)?, lam(b)?);
    if fa.signum() == fb.signum() {
        return Err(Error::Evaluation(format!("lambda does not change sign on [{lo}, {hi}]")));
    }
    while b - a > 1e-4 {
        let m = 0.5 * (a + b);
        let fm = lam(m)?;
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Parses "start:step:stop" (inclusive) or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("cannot parse grid '{text}'"));
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let nums: Vec<f64> = parts.iter().map(|p| p.parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
        let (start, step, stop) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    if parts.len() != 1 {
        return Err(bad());
    }
    text.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect()
}

// ---------------------------------------------------------------------------
// configuration file

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Text(String),
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            GridSpec::List(v) => Ok(v.clone()),
            GridSpec::Text(t) => parse_grid(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RelaySection {
    pub mode: HarvestMode,
    pub model: HarvesterModel,
    pub rho: f64,
    pub eta: f64,
    pub p_th_db: f64,
    pub n_r: Option<usize>,
    pub n_eh: usize,
    pub n_ip: usize,
}

impl Default for RelaySection {
    fn default() -> Self {
        Self { mode: HarvestMode::PS, model: HarvesterModel::L, rho: 0.8, eta: 0.7, p_th_db: 40.0, n_r: Some(4), n_eh: 1, n_ip: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub v: f64,
    pub sr: DistanceModel,
    pub rd: DistanceModel,
}

impl Default for GeometrySection {
    fn default() -> Self {
        let u = DistanceModel::Uniform { lo: 1.0, hi: 3.0 };
        Self { v: DEFAULT_PATHLOSS_EXPONENT, sr: u, rd: u }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FadingSection {
    pub omega_h: f64,
    pub omega_g: f64,
    pub n0: f64,
    pub k: f64,
    pub m: f64,
}

impl Default for FadingSection {
    fn default() -> Self {
        Self { omega_h: 1.0, omega_g: 1.0, n0: 1.0, k: 1.0, m: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Axis,
    pub grid: GridSpec,
    pub evaluators: Vec<Evaluator>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub optimize_rho: bool,
}

/// Versioned configuration file. Every field has the default of the reference
/// scenario, so an empty file (apart from `version`) is valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub version: u32,
    #[serde(default = "default_ps_db")]
    pub ps_db: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_chi")]
    pub chi: usize,
    #[serde(default = "default_order")]
    pub modulation_order: u32,
    #[serde(default)]
    pub relay: RelaySection,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub fading: FadingSection,
    #[serde(default)]
    pub montecarlo: McBudget,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

fn default_ps_db() -> f64 {
    30.0
}
fn default_seed() -> u64 {
    1
}
fn default_chi() -> usize {
    20
}
fn default_order() -> u32 {
    4
}

impl Default for ConfigFile {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            ps_db: default_ps_db(),
            seed: default_seed(),
            chi: default_chi(),
            modulation_order: default_order(),
            relay: RelaySection::default(),
            geometry: GeometrySection::default(),
            fading: FadingSection::default(),
            montecarlo: McBudget::default(),
            sweep: None,
        }
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let cf: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))?;
        if cf.version != CONFIG_VERSION {
            return Err(Error::Config(format!("unsupported config version {} (expected {CONFIG_VERSION})", cf.version)));
        }
        Ok(cf)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn system(&self) -> Result<SystemConfig> {
        let r = &self.relay;
        let n_r = match r.mode {
            HarvestMode::DA => {
                let sum = r.n_eh + r.n_ip;
                if let Some(n) = r.n_r.filter(|&n| n != sum) {
                    return Err(Error::Config(format!("n_r = {n} but n_eh + n_ip = {sum}")));
                }
                sum
            }
            HarvestMode::PS => r.n_r.unwrap_or(4),
        };
        let eh = EhConfig {
            mode: r.mode,
            model: r.model,
            rho: r.rho,
            eta: r.eta,
            p_th: 10f64.powf(r.p_th_db / 10.0),
            n_r,
            n_eh: r.n_eh,
            n_ip: r.n_ip,
        };
        let g = &self.geometry;
        let f = &self.fading;
        let fading = FadingStats::new(f.omega_h, f.omega_g, f.n0).map_err(|e| Error::Config(e.to_string()))?;
        let c = SystemConfig {
            eh,
            modulation: ModulationParams::qam(self.modulation_order)?,
            geom_sr: LinkGeometry { kind: g.sr, v: g.v },
            geom_rd: LinkGeometry { kind: g.rd, v: g.v },
            fading,
            fading_order: crate::channel::FadingOrder { k: f.k, m: f.m },
            ps_db: self.ps_db,
            seed: self.seed,
            chi: self.chi,
        };
        c.validate()?;
        Ok(c)
    }

    /// Sweep described by the file, if it has a `[sweep]` section.
    pub fn sweep_spec(&self) -> Result<Option<SweepSpec>> {
        let Some(s) = &self.sweep else { return Ok(None) };
        let mut spec = SweepSpec::new(self.system()?, s.axis, s.grid.values()?, s.evaluators.clone());
        spec.output_path = s.out.clone();
        spec.mc = self.montecarlo;
        spec.optimize_rho = s.optimize_rho;
        Ok(Some(spec))
    }
}

// ---------------------------------------------------------------------------
// figure presets

/// One curve family of a preset.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub base: SystemConfig,
    pub evaluators: Vec<Evaluator>,
    pub optimize_rho: bool,
    /// Overrides the preset grid.
    pub grid: Option<Vec<f64>>,
}

/// A figure recipe: several series over one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub series: Vec<Series>,
}

pub const PRESET_NAMES: [&str; 9] = ["fig3", "fig4", "fig5", "fig6", "fig6b", "fig7", "fig8", "fig9", "fig10"];

fn cfg(eh: EhConfig, ps_db: f64) -> SystemConfig {
    SystemConfig { eh, ps_db, ..SystemConfig::default() }
}

fn both(label: impl Into<String>, base: SystemConfig) -> Series {
    Series { label: label.into(), base, evaluators: Evaluator::ALL.to_vec(), optimize_rho: false, grid: None }
}

fn uniform12(mut c: SystemConfig) -> SystemConfig {
    c.geom_sr = LinkGeometry::uniform(1.0, 2.0, c.geom_sr.v);
    c.geom_rd = LinkGeometry::uniform(1.0, 2.0, c.geom_rd.v);
    c
}

fn steps(start: f64, step: f64, stop: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect()
}

/// Figure recipes. `fig5` and `fig9` are driven by [`approximation_error`] and
/// [`difference_lambda`]; their presets list the configurations used.
pub fn preset(name: &str) -> Result<Preset> {
    let ps = EhConfig::ps(4, 0.8);
    Ok(match name {
        "fig3" => Preset {
            name: "fig3",
            description: "BER vs P_s: PS(rho=0.8) against DA(1,3), DA(2,2), DA(3,1), N_r=4, U(1,3)",
            axis: Axis::PsDb,
            grid: steps(0.0, 5.0, 60.0),
            series: vec![
                both("PS(0.8)", cfg(ps, 0.0)),
                Series { optimize_rho: true, ..both("PS(rho*)", cfg(ps, 0.0)) },
                both("DA(1,3)", cfg(EhConfig::da(1, 3), 0.0)),
                both("DA(2,2)", cfg(EhConfig::da(2, 2), 0.0)),
                both("DA(3,1)", cfg(EhConfig::da(3, 1), 0.0)),
            ],
        },
        "fig4" => {
            let an = vec![Evaluator::AnalyticL, Evaluator::AnalyticNL];
            let mk = |label: &str, c: SystemConfig| Series {
                label: label.into(),
                base: c,
                evaluators: an.clone(),
                optimize_rho: true,
                grid: None,
            };
            Preset {
                name: "fig4",
                description: "optimised rho vs P_s for N_r=1 and N_r=5, U(1,3) and U(1,2)",
                axis: Axis::PsDb,
                grid: steps(0.0, 5.0, 60.0),
                series: vec![
                    mk("PS Nr=1 U(1,3)", cfg(EhConfig::ps(1, 0.8), 0.0)),
                    mk("PS Nr=5 U(1,3)", cfg(EhConfig::ps(5, 0.8), 0.0)),
                    mk("PS Nr=1 U(1,2)", uniform12(cfg(EhConfig::ps(1, 0.8), 0.0))),
                    mk("PS Nr=5 U(1,2)", uniform12(cfg(EhConfig::ps(5, 0.8), 0.0))),
                ],
            }
        }
        "fig5" => Preset {
            name: "fig5",
            description: "approximation error Lambda(chi) at P_s=30 dB, NL harvester, DA(1,3), U(1,3)",
            axis: Axis::PsDb,
            grid: vec![30.0],
            series: vec![Series {
                label: "DA(1,3)".into(),
                base: cfg(EhConfig::da(1, 3).with_model(HarvesterModel::NL), 30.0),
                evaluators: vec![Evaluator::AnalyticNL, Evaluator::McNL],
                optimize_rho: false,
                grid: None,
            }],
        },
        "fig6" => Preset {
            name: "fig6",
            description: "BER vs N_ip at P_s=60 dB for N_eh=1,2 (PS uses N_r = N_eh + N_ip)",
            axis: Axis::NIp,
            grid: steps(1.0, 1.0, 7.0),
            series: vec![
                both("PS Neh=1", cfg(EhConfig { n_eh: 1, ..ps }, 60.0)),
                both("DA Neh=1", cfg(EhConfig::da(1, 1), 60.0)),
                both("PS Neh=2", cfg(EhConfig { n_eh: 2, ..ps }, 60.0)),
                both("DA Neh=2", cfg(EhConfig::da(2, 1), 60.0)),
            ],
        },
        "fig6b" => Preset {
            name: "fig6b",
            description: "BER vs N_eh at P_s=60 dB for N_ip=1,2 (PS uses N_r = N_eh + N_ip)",
            axis: Axis::NEh,
            grid: steps(1.0, 1.0, 7.0),
            series: vec![
                both("PS Nip=1", cfg(EhConfig { n_ip: 1, ..ps }, 60.0)),
                both("DA Nip=1", cfg(EhConfig::da(1, 1), 60.0)),
                both("PS Nip=2", cfg(EhConfig { n_ip: 2, ..ps }, 60.0)),
                both("DA Nip=2", cfg(EhConfig::da(1, 2), 60.0)),
            ],
        },
        "fig7" => {
            let ps6 = EhConfig { n_eh: 4, n_ip: 2, ..EhConfig::ps(6, 0.8) };
            Preset {
                name: "fig7",
                description: "BER vs rho at P_s=40 and 60 dB, N_eh=4, N_ip=2 (PS: N_r=6), U(1,2)",
                axis: Axis::Rho,
                grid: steps(0.05, 0.05, 0.95),
                series: vec![
                    both("PS 40dB", uniform12(cfg(ps6, 40.0))),
                    both("DA 40dB", uniform12(cfg(EhConfig::da(4, 2), 40.0))),
                    both("PS 60dB", uniform12(cfg(ps6, 60.0))),
                    both("DA 60dB", uniform12(cfg(EhConfig::da(4, 2), 60.0))),
                ],
            }
        }
        "fig8" => Preset {
            name: "fig8",
            description: "BER vs fixed distance d_sr = d_rd at P_s=50 dB, DA(3,1) and PS(0.8)",
            axis: Axis::Distance,
            grid: steps(1.0, 0.1, 3.0),
            series: vec![both("PS(0.8)", cfg(ps, 50.0)), both("DA(3,1)", cfg(EhConfig::da(3, 1), 50.0))],
        },
        "fig9" => {
            let mut s = Vec::new();
            for ps_db in [40.0, 50.0] {
                for (name, eh) in [("PS(0.8)", ps), ("DA(3,1)", EhConfig::da(3, 1))] {
                    let eh = EhConfig { p_th: 1e3, ..eh };
                    s.push(Series {
                        label: format!("{name} {ps_db}dB"),
                        base: cfg(eh, ps_db),
                        evaluators: vec![Evaluator::AnalyticL, Evaluator::AnalyticNL],
                        optimize_rho: false,
                        grid: None,
                    });
                }
            }
            Preset {
                name: "fig9",
                description: "lambda(d) = BER(U(1,3)) - BER(d), P_th=30 dB, P_s=40 and 50 dB",
                axis: Axis::Distance,
                grid: steps(1.0, 0.1, 3.0),
                series: s,
            }
        }
        "fig10" => Preset {
            name: "fig10",
            description: "BER vs N_r at P_s=50 dB: PS with optimised rho, DA with N_ip=1",
            axis: Axis::NR,
            grid: steps(1.0, 1.0, 8.0),
            series: vec![
                Series { optimize_rho: true, ..both("PS(rho*)", cfg(EhConfig::ps(4, 0.8), 50.0)) },
                Series { grid: Some(steps(2.0, 1.0, 8.0)), ..both("DA Nip=1", cfg(EhConfig::da(1, 1), 50.0)) },
            ],
        },
        _ => return Err(Error::Config(format!("unknown preset '{name}' (known: {})", PRESET_NAMES.join(", ")))),
    })
}

/// Runs a preset as a set of sweeps and concatenates their rows.
///
/// `fig9` rows hold λ(d) in the `ber` column; `fig5` rows hold Λ(χ) with χ on
/// the axis column.
pub fn run_preset(p: &Preset, mc: McBudget, with_mc: bool) -> Result<SweepResult> {
    let mut out = SweepResult::default();
    match p.name {
        "fig5" => {
            let s = &p.series[0];
            let chis: Vec<usize> = (1..=30).collect();
            let (sim, rows) = approximation_error(&s.base, &chis, mc)?;
            for r in rows {
                out.rows.push(SweepRow {
                    axis_value: r.chi as f64,
                    evaluator: format!("{}/lambda", s.label),
                    ber: r.lambda.unwrap_or(f64::NAN),
                    flag: if r.lambda.is_some() { RowFlag::Ok } else { RowFlag::Failed },
                    half_width: Some(sim.half_width_95 / sim.ber.max(f64::MIN_POSITIVE)),
                    rho_star: None,
                    message: None,
                });
            }
        }
        "fig9" => {
            for s in &p.series {
                for ev in &s.evaluators {
                    for (d, lam) in difference_lambda(&s.base, ev.model(), &p.grid)? {
                        let (ber, flag, message) = match lam {
                            Ok(v) => (v, RowFlag::Ok, None),
                            Err(e) => (f64::NAN, RowFlag::Failed, Some(e.to_string())),
                        };
                        out.rows.push(SweepRow {
                            axis_value: d,
                            evaluator: format!("{}/lambda_{}", s.label, if ev.model() == HarvesterModel::L { "L" } else { "NL" }),
                            ber,
                            flag,
                            half_width: None,
                            rho_star: None,
                            message,
                        });
                    }
                }
            }
        }
        _ => {
            for s in &p.series {
                let evaluators: Vec<Evaluator> = s.evaluators.iter().copied().filter(|e| with_mc || !e.is_mc()).collect();
                if evaluators.is_empty() {
                    continue;
                }
                let mut spec = SweepSpec::new(s.base, p.axis, s.grid.clone().unwrap_or_else(|| p.grid.clone()), evaluators);
                spec.mc = mc;
                spec.label = Some(s.label.clone());
                spec.optimize_rho = s.optimize_rho;
                out.rows.extend(run_sweep(&spec)?.rows);
            }
            if p.axis == Axis::Distance {
                // uniform-distance reference, constant in d
                for s in &p.series {
                    for ev in s.evaluators.iter().filter(|e| !e.is_mc()) {
                        let mut c = s.base;
                        c.eh.model = ev.model();
                        let (ber, flag) = match analytic_ber(&c) {
                            Ok(v) => (v.ber, RowFlag::Ok),
                            Err(_) => (f64::NAN, RowFlag::Failed),
                        };
                        for &d in &p.grid {
                            out.rows.push(SweepRow {
                                axis_value: d,
                                evaluator: format!("{} U(1,3)/{ev}", s.label),
                                ber,
                                flag,
                                half_width: None,
                                rho_star: None,
                                message: None,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Runs preset `name` and writes `<out_dir>/<name>.csv` with its SVG.
pub fn run_named_preset(name: &str, out_dir: &Path, mc: McBudget, with_mc: bool) -> Result<SweepResult> {
    let p = preset(name)?;
    let result = run_preset(&p, mc, with_mc)?;
    result.write(&out_dir.join(format!("{name}.csv")), p.axis.name())?;
    Ok(result)
}

/// Budget used by the figure presets: the default error target with a bit cap
/// that keeps every recipe to a few minutes.
pub fn preset_budget() -> McBudget {
    McBudget { min_errors: DEFAULT_MIN_ERRORS, max_bits: 4_000_000 }
}

// ---------------------------------------------------------------------------
// plotting

/// Minimal SVG line plot of every evaluator column, log-scaled when all values
/// are positive.
pub fn render_svg(result: &SweepResult, x_label: &str) -> String {
    let (w, h, ml, mr, mt, mb) = (720.0, 480.0, 70.0, 200.0, 20.0, 50.0);
    let mut names: Vec<&str> = Vec::new();
    for r in &result.rows {
        if !names.contains(&r.evaluator.as_str()) {
            names.push(&r.evaluator);
        }
    }
    let pts: Vec<&SweepRow> = result.rows.iter().filter(|r| r.ber.is_finite()).collect();
    let log = pts.iter().all(|r| r.ber > 0.0);
    let ty = |v: f64| if log { v.log10() } else { v };
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for r in &pts {
        x0 = x0.min(r.axis_value);
        x1 = x1.max(r.axis_value);
        y0 = y0.min(ty(r.ber));
        y1 = y1.max(ty(r.ber));
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    if log {
        y0 = y0.floor();
        y1 = y1.ceil();
    }
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let py = |y: f64| mt + (1.0 - (ty(y) - y0) / (y1 - y0)) * (h - mt - mb);
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"11\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <rect x=\"{ml}\" y=\"{mt}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        w - ml - mr,
        h - mt - mb
    );
    for i in 0..=4 {
        let x = x0 + (x1 - x0) * i as f64 / 4.0;
        s += &format!("<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">{:.3}</text>\n", px(x), h - mb + 15.0, x);
        let yv = y0 + (y1 - y0) * i as f64 / 4.0;
        let label = if log { format!("1e{yv:.1}") } else { format!("{yv:.3e}") };
        let yy = mt + (1.0 - i as f64 / 4.0) * (h - mt - mb);
        s += &format!("<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{label}</text>\n", ml - 4.0, yy + 4.0);
    }
    s += &format!("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>\n", ml + (w - ml - mr) / 2.0, h - 10.0);
    for (i, name) in names.iter().enumerate() {
        let colour = palette[i % palette.len()];
        let series: Vec<&&SweepRow> = pts.iter().filter(|r| r.evaluator == *name).collect();
        let dashed = name.contains("mc_");
        let path: Vec<String> = series.iter().map(|r| format!("{:.2},{:.2}", px(r.axis_value), py(r.ber))).collect();
        if !path.is_empty() {
            if dashed {
                for p in &path {
                    let (x, y) = p.split_once(',').unwrap_or(("0", "0"));
                    s += &format!("<circle cx=\"{x}\" cy=\"{y}\" r=\"2.5\" fill=\"none\" stroke=\"{colour}\"/>\n");
                }
            } else {
                s += &format!("<polyline fill=\"none\" stroke=\"{colour}\" points=\"{}\"/>\n", path.join(" "));
            }
        }
        let ly = mt + 12.0 + 14.0 * i as f64;
        s += &format!(
            "<text x=\"{}\" y=\"{ly:.1}\" fill=\"{colour}\">{}</text>\n",
            w - mr + 8.0,
            name.replace('&', "&amp;").replace('<', "&lt;")
        );
    }
    s += "</svg>\n";
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:5:20").unwrap(), vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(parse_grid("1, 2.5,4").unwrap(), vec![1.0, 2.5, 4.0]);
        assert!(parse_grid("1:0:3").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn axis_application() {
        let base = SystemConfig::default();
        assert_eq!(Axis::PsDb.apply(&base, 12.0).unwrap().ps_db, 12.0);
        let da = SystemConfig { eh: EhConfig::da(1, 3), ..base };
        let c = Axis::NIp.apply(&da, 5.0).unwrap();
        assert_eq!((c.eh.n_eh, c.eh.n_ip, c.eh.n_r), (1, 5, 6));
        let c = Axis::NR.apply(&da, 6.0).unwrap();
        assert_eq!((c.eh.n_eh, c.eh.n_ip, c.eh.n_r), (3, 3, 6));
        assert!(Axis::NR.apply(&da, 3.0).is_err());
        assert!(Axis::NIp.apply(&da, 1.5).is_err());
        let c = Axis::Distance.apply(&base, 2.0).unwrap();
        assert!(!c.geom_sr.is_uniform() && !c.geom_rd.is_uniform());
        assert!(Axis::Rho.apply(&base, 1.0).is_err());
    }

    #[test]
    fn empty_evaluators_rejected() {
        let spec = SweepSpec::new(SystemConfig::default(), Axis::PsDb, vec![10.0], vec![]);
        assert!(matches!(run_sweep(&spec), Err(Error::Config(_))));
    }

    #[test]
    fn config_roundtrip_and_versioning() {
        let cf = ConfigFile::default();
        let back = ConfigFile::parse(&cf.to_toml()).unwrap();
        assert_eq!(back, cf);
        assert_eq!(cf.system().unwrap(), SystemConfig { eh: EhConfig { n_eh: 1, n_ip: 3, ..EhConfig::ps(4, 0.8) }, ..SystemConfig::default() });
        assert!(ConfigFile::parse("version = 2").is_err());
        assert!(ConfigFile::parse("version = 1\nbogus = 3").is_err());
        let da = ConfigFile::parse("version = 1\n[relay]\nmode = \"DA\"\nn_eh = 2\nn_ip = 2\nn_r = 5\n").unwrap();
        assert!(da.system().is_err());
    }

    #[test]
    fn single_point_rho_grid() {
        let c = SystemConfig { ps_db: 20.0, ..SystemConfig::default() };
        let (rho, ber) = optimize_rho(&c, &[0.3]).unwrap();
        assert_eq!(rho, 0.3);
        assert!(ber > 0.0 && ber < 0.5);
    }

    #[test]
    fn presets_resolve() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            assert!(!p.series.is_empty());
            for s in &p.series {
                s.base.validate().unwrap();
            }
        }
        assert!(preset("fig11").is_err());
    }

    #[test]
    fn failing_points_are_flagged() {
        let base = SystemConfig { eh: EhConfig::da(1, 3), ..SystemConfig::default() };
        let spec = SweepSpec::new(base, Axis::NR, vec![2.0, 4.0], vec![Evaluator::AnalyticL]);
        let r = run_sweep(&spec).unwrap();
        assert_eq!(r.rows[0].flag, RowFlag::Failed);
        assert!(r.rows[1].ber > 0.0);
        assert!(r.has_failures());
        assert!(r.to_csv().starts_with("axis,evaluator,ber,flag,half_width\n"));
    }
}
