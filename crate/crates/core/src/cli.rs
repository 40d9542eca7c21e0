//! The `dephasim` command line: JSON run configs in, CSV and reports out.
//!
//! Exit codes: 0 ok, 1 I/O, 2 schema, 3 compute, 4 oracle adjudication
//! failure, 5 limit-check failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use thiserror::Error;

use crate::closed_form::{
    decoherence_coherent, decoherence_short_time, decoherence_thermal, gaussian_rate,
    gaussian_series, spin_only_factor, CothVariant,
};
use crate::ensemble::{fit_gaussian_rate, sample_config, EnsembleSpec, SpinInit};
use crate::error::Error;
use crate::limits::{stiff_phonon_scan, thermal_vacuum_distance, zurek_distances};
use crate::model::{
    BathConfig, CentralAmplitudes, DecoherenceSeries, ModeParams, PhononPrep, TimeGrid,
};
use crate::oracle::{oracle_decoherence, TruncationPolicy};

/// Agreement required between a closed form and the oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Compute(#[from] Error),
    #[error("adjudication failed: {0}")]
    Adjudication(String),
    #[error("limit check failed")]
    Limits,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Schema(_) => 2,
            CliError::Compute(_) => 3,
            CliError::Adjudication(_) => 4,
            CliError::Limits => 5,
        }
    }
}

// ---------------------------------------------------------------------------
// Run config file

type Pair = [f64; 2];

fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfigFile {
    central: CentralFile,
    modes: Option<Vec<ModeFile>>,
    ensemble: Option<EnsembleFile>,
    phonons: PhononFile,
    time: TimeFile,
    oracle: Option<OracleFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CentralFile {
    c_up: Pair,
    c_down: Pair,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeFile {
    omega0: f64,
    omega: f64,
    big_omega: f64,
    alpha: Pair,
    beta: Pair,
    lambda: Pair,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum PhononFile {
    Coherent,
    Thermal { temperature: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeFile {
    start: f64,
    end: f64,
    points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleFile {
    n_modes: usize,
    #[serde(default = "default_omega0_range")]
    omega0_range: Pair,
    #[serde(default = "default_omega_range")]
    omega_range: Pair,
    #[serde(default = "default_big_omega_range")]
    big_omega_range: Pair,
    #[serde(default = "default_lambda_radius")]
    lambda_radius: f64,
    #[serde(default)]
    spin_init: SpinInitFile,
    #[serde(default)]
    seed: u64,
}

fn default_omega0_range() -> Pair {
    [0.5, 1.5]
}
fn default_omega_range() -> Pair {
    [0.05, 0.3]
}
fn default_big_omega_range() -> Pair {
    [0.8, 1.2]
}
fn default_lambda_radius() -> f64 {
    1.0
}

#[derive(Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum SpinInitFile {
    #[default]
    UniformBloch,
    Polarized,
    GibbsThermal {
        epsilon_range: Pair,
        temperature: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleFile {
    n_max: Option<usize>,
    n_max_ceiling: Option<usize>,
    max_modes: Option<usize>,
}

/// A parsed run config.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub config: BathConfig,
    pub grid: TimeGrid,
    pub ensemble: Option<EnsembleSpec>,
    pub policy: TruncationPolicy,
}

impl EnsembleFile {
    fn into_spec(self) -> EnsembleSpec {
        let pair = |p: Pair| (p[0], p[1]);
        EnsembleSpec {
            n_modes: self.n_modes,
            omega0_range: pair(self.omega0_range),
            omega_range: pair(self.omega_range),
            big_omega_range: pair(self.big_omega_range),
            lambda_radius: self.lambda_radius,
            spin_init: match self.spin_init {
                SpinInitFile::UniformBloch => SpinInit::UniformBloch,
                SpinInitFile::Polarized => SpinInit::Polarized,
                SpinInitFile::GibbsThermal {
                    epsilon_range,
                    temperature,
                } => SpinInit::GibbsThermal {
                    epsilon_range: pair(epsilon_range),
                    temperature,
                },
            },
            seed: self.seed,
        }
    }
}

/// Parses run-config text. `seed` overrides the ensemble seed when given.
pub fn parse_run_config(text: &str, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let file: RunConfigFile =
        serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
    let central = CentralAmplitudes {
        c_up: complex(file.central.c_up),
        c_down: complex(file.central.c_down),
    };
    let phonons = match file.phonons {
        PhononFile::Coherent => PhononPrep::Coherent,
        PhononFile::Thermal { temperature } => PhononPrep::Thermal { temperature },
    };
    let grid = TimeGrid::new(file.time.start, file.time.end, file.time.points)
        .map_err(|e| CliError::Schema(format!("time: {e}")))?;

    let (modes, ensemble) = match (file.modes, file.ensemble) {
        (Some(modes), None) => {
            let modes = modes
                .into_iter()
                .map(|m| ModeParams {
                    omega0: m.omega0,
                    omega: m.omega,
                    big_omega: m.big_omega,
                    lambda: complex(m.lambda),
                    alpha: complex(m.alpha),
                    beta: complex(m.beta),
                })
                .collect();
            (modes, None)
        }
        (None, Some(ens)) => {
            let mut spec = ens.into_spec();
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            (sample_config(&spec)?.modes, Some(spec))
        }
        _ => {
            return Err(CliError::Schema(
                "exactly one of \"modes\" and \"ensemble\" must be present".into(),
            ))
        }
    };

    let mut policy = TruncationPolicy::default();
    if let Some(o) = file.oracle {
        policy.n_max = o.n_max;
        if let Some(c) = o.n_max_ceiling {
            policy.ceiling = c;
        }
        if let Some(m) = o.max_modes {
            policy.max_modes = m;
        }
    }
    Ok(RunConfig {
        config: BathConfig {
            central,
            modes,
            phonons,
        },
        grid,
        ensemble,
        policy,
    })
}

pub fn load_run_config(path: &Path, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_run_config(&text, seed)
}

// ---------------------------------------------------------------------------
// Output

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with header `t,re_r,im_r,abs_r`, 17 significant digits, LF endings.
pub fn series_csv(series: &DecoherenceSeries) -> String {
    let mut out = String::from("t,re_r,im_r,abs_r\n");
    for (t, v) in series.times().into_iter().zip(&series.values) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            sci(t),
            sci(v.re),
            sci(v.im),
            sci(v.norm())
        );
    }
    out
}

fn emit(out: Option<&Path>, body: &str) -> Result<String, CliError> {
    match out {
        Some(path) => {
            fs::write(path, body)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(body.to_string()),
    }
}

// ---------------------------------------------------------------------------
// Commands

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalMethod {
    Coherent,
    ThermalPaper,
    ThermalHalf,
    ShortTime,
    Gaussian,
    SpinOnly,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepAxis {
    Temperature,
    NModes,
}

/// Inclusive `LO:HI:STEPS` range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl SweepRange {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * (i as f64 / (self.steps - 1) as f64)
                }
            })
            .collect()
    }
}

impl std::str::FromStr for SweepRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected LO:HI:STEPS, got {s:?}"));
        }
        let lo: f64 = parts[0].parse().map_err(|e| format!("LO: {e}"))?;
        let hi: f64 = parts[1].parse().map_err(|e| format!("HI: {e}"))?;
        let steps: usize = parts[2].parse().map_err(|e| format!("STEPS: {e}"))?;
        if steps == 0 || !(lo <= hi) {
            return Err(format!("need LO <= HI and STEPS >= 1, got {s:?}"));
        }
        Ok(SweepRange { lo, hi, steps })
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dephasim",
    version,
    about = "Central-spin dephasing through phonon-mediated spin-bath coupling"
)]
pub struct Cli {
    /// Worker threads (falls back to DEPHASIM_THREADS).
    #[arg(long, global = true, env = "DEPHASIM_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the ensemble seed of the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate r(t) on the config's time grid and write CSV.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        method: EvalMethod,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare closed forms against the Fock oracle.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Per-time error table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the phonon-free, stiff-phonon and low-temperature limit checks.
    Limits {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep temperature or bath size.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: SweepAxis,
        #[arg(long)]
        range: SweepRange,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Probe time for the temperature axis; defaults to 1/max Ω.
        #[arg(long)]
        probe_time: Option<f64>,
        /// Thermal variant for the temperature axis.
        #[arg(long, value_enum, default_value = "thermal-half")]
        method: EvalMethod,
    },
}

fn evaluate(run: &RunConfig, method: EvalMethod) -> Result<DecoherenceSeries, CliError> {
    let (cfg, grid) = (&run.config, &run.grid);
    let series = match method {
        EvalMethod::Coherent => decoherence_coherent(cfg, grid)?,
        EvalMethod::ThermalPaper => decoherence_thermal(cfg, grid, CothVariant::PaperCoth)?,
        EvalMethod::ThermalHalf => decoherence_thermal(cfg, grid, CothVariant::HalfCoth)?,
        EvalMethod::ShortTime => decoherence_short_time(cfg, grid)?,
        EvalMethod::Gaussian => gaussian_series(cfg, grid)?,
        EvalMethod::SpinOnly => spin_only_factor(cfg, grid)?,
        EvalMethod::Oracle => oracle_decoherence(cfg, grid, &run.policy)?,
    };
    Ok(series)
}

pub fn cmd_eval(
    run: &RunConfig,
    method: EvalMethod,
    out: Option<&Path>,
) -> Result<String, CliError> {
    let series = evaluate(run, method)?;
    emit(out, &series_csv(&series))
}

/// Which coth argument the thermal oracle agrees with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CothVerdict {
    Paper,
    Half,
    Inconclusive,
}

impl CothVerdict {
    pub fn from_errors(paper: f64, half: f64) -> Self {
        match (paper < ORACLE_TOLERANCE, half < ORACLE_TOLERANCE) {
            (true, false) => CothVerdict::Paper,
            (false, true) => CothVerdict::Half,
            _ => CothVerdict::Inconclusive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CothVerdict::Paper => "paper",
            CothVerdict::Half => "half",
            CothVerdict::Inconclusive => "inconclusive",
        }
    }
}

fn pointwise_errors(a: &DecoherenceSeries, b: &DecoherenceSeries) -> Vec<f64> {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).norm())
        .collect()
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// Runs the closed form(s) and the oracle on the same grid. Returns the
/// report; fails with exit code 4 when no closed form is within tolerance.
pub fn cmd_compare(run: &RunConfig, out: Option<&Path>) -> Result<String, CliError> {
    let oracle = oracle_decoherence(&run.config, &run.grid, &run.policy)?;
    let times = run.grid.times();
    let mut report = String::new();
    let n_max: Vec<&str> = (0..run.config.modes.len())
        .filter_map(|i| oracle.meta.get(&format!("n_max[{i}]")).map(String::as_str))
        .collect();
    let _ = writeln!(report, "oracle_n_max: {}", n_max.join(","));
    let _ = writeln!(report, "tolerance: {}", sci(ORACLE_TOLERANCE));

    let (table, passed, failure) = match run.config.phonons {
        PhononPrep::Coherent => {
            let closed = decoherence_coherent(&run.config, &run.grid)?;
            let err = pointwise_errors(&closed, &oracle);
            let worst = max_of(&err);
            let _ = writeln!(report, "max_abs_error_coherent: {}", sci(worst));
            let mut table = String::from("t,abs_err_coherent\n");
            for (t, e) in times.iter().zip(&err) {
                let _ = writeln!(table, "{},{}", sci(*t), sci(*e));
            }
            (
                table,
                worst < ORACLE_TOLERANCE,
                format!("coherent error {}", sci(worst)),
            )
        }
        PhononPrep::Thermal { .. } => {
            let paper = decoherence_thermal(&run.config, &run.grid, CothVariant::PaperCoth)?;
            let half = decoherence_thermal(&run.config, &run.grid, CothVariant::HalfCoth)?;
            let err_p = pointwise_errors(&paper, &oracle);
            let err_h = pointwise_errors(&half, &oracle);
            let (wp, wh) = (max_of(&err_p), max_of(&err_h));
            let verdict = CothVerdict::from_errors(wp, wh);
            let _ = writeln!(report, "max_abs_error_paper: {}", sci(wp));
            let _ = writeln!(report, "max_abs_error_half: {}", sci(wh));
            let _ = writeln!(report, "coth_variant_matching_oracle: {}", verdict.as_str());
            let mut table = String::from("t,abs_err_paper,abs_err_half\n");
            for ((t, a), b) in times.iter().zip(&err_p).zip(&err_h) {
                let _ = writeln!(table, "{},{},{}", sci(*t), sci(*a), sci(*b));
            }
            (
                table,
                wp.min(wh) < ORACLE_TOLERANCE,
                format!("paper error {}, half error {}", sci(wp), sci(wh)),
            )
        }
    };
    let _ = writeln!(report, "status: {}", if passed { "pass" } else { "fail" });
    if let Some(path) = out {
        emit(Some(path), &table)?;
    }
    if passed {
        Ok(report)
    } else {
        eprint!("{report}");
        Err(CliError::Adjudication(failure))
    }
}

/// Runs the three limit checks and returns the report; exit code 5 when any
/// check fails.
pub fn cmd_limits(run: &RunConfig) -> Result<String, CliError> {
    let (cfg, grid) = (&run.config, &run.grid);
    let mut report = String::new();

    let zurek = zurek_distances(cfg, grid, 4)?;
    let monotone = zurek.windows(2).all(|w| w[1] <= w[0]);
    for (k, d) in zurek.iter().enumerate() {
        let _ = writeln!(report, "zurek k={} sup_distance={}", k + 1, sci(*d));
    }
    let _ = writeln!(
        report,
        "zurek_limit: {}",
        if monotone { "pass" } else { "fail" }
    );

    let stiff = stiff_phonon_scan(cfg, grid, 4)?;
    let within = stiff.iter().all(|s| s.distance <= s.bound);
    let constant = stiff.iter().map(|s| s.constant()).fold(0.0, f64::max);
    for (k, s) in stiff.iter().enumerate() {
        let _ = writeln!(
            report,
            "large_omega k={} ratio={} sup_distance={} bound={}",
            k + 1,
            sci(s.ratio),
            sci(s.distance),
            sci(s.bound)
        );
    }
    let _ = writeln!(
        report,
        "large_omega_limit: {} C={}",
        if within { "pass" } else { "fail" },
        sci(constant)
    );

    let cold = cfg.min_big_omega() / 50.0;
    let mut cold_ok = true;
    for (name, variant) in [
        ("paper", CothVariant::PaperCoth),
        ("half", CothVariant::HalfCoth),
    ] {
        let d = thermal_vacuum_distance(cfg, grid, cold, variant)?;
        cold_ok &= d < ORACLE_TOLERANCE;
        let _ = writeln!(
            report,
            "low_temperature variant={name} T={} sup_distance={}",
            sci(cold),
            sci(d)
        );
    }
    let _ = writeln!(
        report,
        "low_temperature: {}",
        if cold_ok { "pass" } else { "fail" }
    );

    if monotone && within && cold_ok {
        Ok(report)
    } else {
        print!("{report}");
        Err(CliError::Limits)
    }
}

pub fn cmd_sweep(
    run: &RunConfig,
    axis: SweepAxis,
    range: SweepRange,
    probe_time: Option<f64>,
    method: EvalMethod,
    out: Option<&Path>,
) -> Result<String, CliError> {
    let body = match axis {
        SweepAxis::Temperature => {
            let variant = match method {
                EvalMethod::ThermalPaper => CothVariant::PaperCoth,
                EvalMethod::ThermalHalf => CothVariant::HalfCoth,
                other => {
                    return Err(CliError::Schema(format!(
                        "temperature sweep needs thermal-paper or thermal-half, got {other:?}"
                    )))
                }
            };
            let t_star = probe_time.unwrap_or(1.0 / run.config.max_big_omega());
            let probe = TimeGrid::new(t_star, t_star, 1)?;
            let mut body = String::from("T,abs_r_at_t_star\n");
            for temperature in range.values() {
                let cfg = BathConfig {
                    phonons: PhononPrep::Thermal { temperature },
                    ..run.config.clone()
                };
                let r = decoherence_thermal(&cfg, &probe, variant)?.values[0];
                let _ = writeln!(body, "{},{}", sci(temperature), sci(r.norm()));
            }
            body
        }
        SweepAxis::NModes => {
            let base = run.ensemble.as_ref().ok_or_else(|| {
                CliError::Schema("n_modes sweep needs an \"ensemble\" section".into())
            })?;
            let mut body = String::from("N,fitted_gamma2,predicted_gamma2,rel_gap\n");
            for n in range.values() {
                let n_modes = n.round().max(1.0) as usize;
                let spec = EnsembleSpec {
                    n_modes,
                    ..base.clone()
                };
                let cfg = BathConfig {
                    phonons: PhononPrep::Coherent,
                    ..sample_config(&spec)?
                };
                let (fitted, predicted) = gaussian_fit(&cfg, run.grid.points().max(6))?;
                let gap = (fitted - predicted).abs() / predicted;
                let _ = writeln!(
                    body,
                    "{n_modes},{},{},{}",
                    sci(fitted),
                    sci(predicted),
                    sci(gap)
                );
            }
            body
        }
    };
    emit(out, &body)
}

/// Fitted and predicted Γ² over t ∈ [0, 0.05/max Ω].
pub fn gaussian_fit(config: &BathConfig, points: usize) -> Result<(f64, f64), Error> {
    let t_cut = 0.05 / config.max_big_omega();
    let grid = TimeGrid::new(0.0, t_cut, points)?;
    let series = decoherence_coherent(config, &grid)?;
    Ok((fit_gaussian_rate(&series, t_cut)?, gaussian_rate(config)?))
}

/// Executes a parsed command line and returns what goes to stdout.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    if let Some(k) = cli.threads {
        // A second call in the same process keeps the existing pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global();
    }
    match &cli.command {
        Command::Eval {
            common,
            method,
            out,
        } => {
            let run = load_run_config(&common.config, common.seed)?;
            cmd_eval(&run, *method, out.as_deref())
        }
        Command::Compare { common, out } => {
            let run = load_run_config(&common.config, common.seed)?;
            cmd_compare(&run, out.as_deref())
        }
        Command::Limits { common } => {
            let run = load_run_config(&common.config, common.seed)?;
            cmd_limits(&run)
        }
        Command::Sweep {
            common,
            axis,
            range,
            out,
            probe_time,
            method,
        } => {
            let run = load_run_config(&common.config, common.seed)?;
            cmd_sweep(&run, *axis, *range, *probe_time, *method, out.as_deref())
        }
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(stdout) => {
            print!("{stdout}");
            0
        }
        Err(e) => {
            eprintln!("dephasim: {e}");
            e.exit_code()
        }
    }
}
