//! Command-line front end. Every subcommand emits one record per sweep point
//! as CSV (default) or JSON lines.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 validation error, 3 numeric oracle
//! disagreement beyond tolerance.

mod config;
mod output;
mod sweep;

pub use config::{parse_config, ConfigEntry};
pub use output::{write_records, Format};
pub use sweep::{DirectionArg, EtaArg, Spacing, SweepSpec, SweepVariable, CLI_DIRECTION_SLACK};

use clap::{Args, CommandFactory, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::cluster_field::{decay_rate_fit, log_two_point, two_point, two_point_asymptotic, FieldParams};
use crate::experiment::{
    estimate_chsh, estimate_chsh_with, scaling_exponent, side_probabilities, trials_for_significance,
    DetectorStrategy, ExperimentConfig, LhvSource, RunRecord, TrialRequirement,
};
use crate::spin_chsh::{
    chsh_value, lhv_extremal_scan, lhv_random_scan, singlet_state, spin_correlator, ChshSetting, LhvModel,
};
use crate::wavepacket::{detection_probability_closed, detection_probability_numeric, GridSpec};

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "CLUSTERBELL_THREADS";
pub const ORACLE_REL_TOL: f64 = 1e-6;
pub const ORACLE_ABS_TOL: f64 = 1e-14;
/// Below this probability the oracle comparison switches to [`ORACLE_ABS_TOL`].
pub const ORACLE_ABS_BELOW: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "clusterbell", version, about = "Spatially damped CHSH correlations of receding wave packets")]
#[command(args_override_self = true)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write records here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat key = value file of flag defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the resolved parameters to standard error before running.
    #[arg(long, global = true)]
    pub units: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Singlet CHSH value for four analyser directions.
    #[command(args_override_self = true)]
    Chsh(SettingArgs),
    /// Classical bound: all deterministic strategies plus random mixtures.
    #[command(args_override_self = true)]
    LhvScan(LhvScanArgs),
    /// Single-side detection probability, optionally checked against grid propagation.
    #[command(args_override_self = true)]
    Overlap(OverlapArgs),
    /// Detection probabilities and damped CHSH value over time.
    #[command(args_override_self = true)]
    TimeScan(TimeScanArgs),
    /// Free scalar field two-point function at spacelike separation.
    #[command(args_override_self = true)]
    Field2pt(FieldArgs),
    /// Monte Carlo coincidence experiment.
    #[command(args_override_self = true)]
    Montecarlo(MonteCarloArgs),
    /// Trials needed for a k-standard-error violation.
    #[command(args_override_self = true)]
    Significance(SignificanceArgs),
}

const SUBCOMMANDS: [&str; 7] = ["chsh", "lhv-scan", "overlap", "time-scan", "field2pt", "montecarlo", "significance"];

#[derive(Debug, Clone, Args, Serialize)]
pub struct SettingArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<DirectionArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub a2: Option<DirectionArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub b1: Option<DirectionArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub b2: Option<DirectionArg>,
}

impl SettingArgs {
    /// Unset directions fall back to the maximal-violation choice.
    pub fn setting(&self) -> ChshSetting {
        let d = ChshSetting::maximal_violation();
        ChshSetting::new(
            self.a1.map_or(d.a1, |a| a.0),
            self.a2.map_or(d.a2, |a| a.0),
            self.b1.map_or(d.b1, |a| a.0),
            self.b2.map_or(d.b2, |a| a.0),
        )
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PacketArgs {
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub p0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// `adaptive`, a fixed position, or `schedule:T=ETA,...`.
    #[arg(long, default_value = "adaptive", allow_hyphen_values = true)]
    pub eta: EtaArg,
    /// Single evaluation time; ignored when sweeping time.
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    /// `VARIABLE:START:STOP:POINTS[:lin|log]`.
    #[arg(long)]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LhvScanArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub models: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest number of hidden states in a random model.
    #[arg(long, default_value_t = 8)]
    pub max_support: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OverlapArgs {
    #[command(flatten)]
    pub packet: PacketArgs,
    /// Cross-check against spectral grid propagation and append the residual.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, requires_all = ["grid_x_max", "grid_points"], allow_hyphen_values = true)]
    pub grid_x_min: Option<f64>,
    #[arg(long, requires_all = ["grid_x_min", "grid_points"], allow_hyphen_values = true)]
    pub grid_x_max: Option<f64>,
    #[arg(long, requires_all = ["grid_x_min", "grid_x_max"])]
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TimeScanArgs {
    #[command(flatten)]
    pub packet: PacketArgs,
    #[command(flatten)]
    pub setting: SettingArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FieldArgs {
    /// Field mass (inverse Compton length).
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long)]
    pub sweep: Option<SweepSpec>,
    /// Emit the fitted exponential decay rate over the sweep range instead.
    #[arg(long)]
    pub fit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Singlet,
    Lhv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub packet: PacketArgs,
    #[command(flatten)]
    pub setting: SettingArgs,
    /// Repetitions per analyser pair.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SourceKind::Singlet)]
    pub source: SourceKind,
    /// Hidden states in the random model used by `--source lhv`.
    #[arg(long, default_value_t = 4)]
    pub lhv_support: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SignificanceArgs {
    #[command(flatten)]
    pub packet: PacketArgs,
    #[command(flatten)]
    pub setting: SettingArgs,
    #[arg(long, default_value_t = 5.0)]
    pub k: f64,
    /// Emit the log-log slope of required trials against time instead.
    #[arg(long)]
    pub fit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshRecord {
    pub e11: f64,
    pub e12: f64,
    pub e21: f64,
    pub e22: f64,
    pub chsh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvScanRecord {
    pub models: u64,
    pub seed: u64,
    pub max_support: usize,
    pub deterministic_max: f64,
    pub deterministic_min: f64,
    pub random_max_abs: f64,
    pub random_argmax: u64,
    pub bound_respected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapRecord {
    pub t: f64,
    pub eta: f64,
    pub p_closed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapOracleRecord {
    pub t: f64,
    pub eta: f64,
    pub p_closed: f64,
    pub p_numeric: f64,
    pub grid_points: usize,
    /// Relative deviation, or absolute when the probability is below 1e-12.
    pub residual: f64,
    pub residual_kind: String,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeScanRecord {
    pub t: f64,
    pub eta: f64,
    pub p_side_plus: f64,
    pub p_side_minus: f64,
    pub p_joint: f64,
    pub damped_chsh: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub r: f64,
    pub mr: f64,
    pub two_point: f64,
    pub log_two_point: f64,
    pub asymptotic: f64,
    /// `None` once both values underflow.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldFitRecord {
    pub mass: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
    pub decay_rate: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFitRecord {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub k: f64,
    pub exponent: f64,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Oracle(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            Self::Io(_) => 1,
            Self::Validation(_) => 2,
            Self::Oracle(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Validation(m) | Self::Oracle(m) | Self::Io(m) => m,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    match dispatch(&argv, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

fn dispatch(argv: &[OsString], stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let argv = match config::config_path(argv).map_err(CliError::Validation)? {
        Some(path) => config::splice_config(argv, Path::new(&path), &SUBCOMMANDS).map_err(CliError::Validation)?,
        None => argv.to_vec(),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{}", e.render());
            return Ok(());
        }
        Err(e) => {
            let text = e.render().to_string();
            return Err(CliError::Validation(text.trim_start_matches("error: ").trim_end().to_string()));
        }
    };
    if cli.units {
        let echo = serde_json::to_string(&cli.command).map_err(|e| CliError::Io(e.to_string()))?;
        let _ = writeln!(stderr, "units: natural (hbar = m = sigma = 1 unless set); parameters: {echo}");
    }
    let pool = thread_pool()?;
    let mut sink: Box<dyn Write + '_> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?,
        )),
        None => Box::new(stdout),
    };
    // records are rendered into memory inside the pool and written afterwards
    let mut buffer = Vec::new();
    let result = pool.install(|| execute(&cli.command, cli.format, &mut buffer));
    sink.write_all(&buffer).and_then(|_| sink.flush()).map_err(|e| CliError::Io(e.to_string()))?;
    result
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(raw) = std::env::var_os(THREADS_ENV) {
        let raw = raw.to_string_lossy();
        match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => builder = builder.num_threads(n),
            _ => return Err(invalid(format!("{THREADS_ENV} must be a positive integer, got '{raw}'"))),
        }
    }
    builder.build().map_err(|e| CliError::Io(e.to_string()))
}

fn emit<T: Serialize>(out: &mut dyn Write, format: Format, records: &[T]) -> Result<(), CliError> {
    write_records(out, format, records).map_err(CliError::Io)
}

fn execute(command: &Command, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Chsh(a) => emit(out, format, &[chsh_record(&a.setting())]),
        Command::LhvScan(a) => emit(out, format, &[lhv_scan(a)?]),
        Command::Overlap(a) => overlap(a, format, out),
        Command::TimeScan(a) => emit(out, format, &time_scan(a)?),
        Command::Field2pt(a) => field2pt(a, format, out),
        Command::Montecarlo(a) => emit(out, format, &montecarlo(a)?),
        Command::Significance(a) => significance(a, format, out),
    }
}

fn chsh_record(setting: &ChshSetting) -> ChshRecord {
    let rho = singlet_state();
    let e = |i, j| spin_correlator(&rho, &setting.alice(i), &setting.bob(j));
    ChshRecord { e11: e(0, 0), e12: e(0, 1), e21: e(1, 0), e22: e(1, 1), chsh: chsh_value(&rho, setting) }
}

fn lhv_scan(a: &LhvScanArgs) -> Result<LhvScanRecord, CliError> {
    if a.max_support == 0 {
        return Err(invalid("--max-support must be at least 1"));
    }
    let extremal: Vec<f64> = lhv_extremal_scan().into_iter().map(|(_, s)| s).collect();
    let max = extremal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = extremal.iter().copied().fold(f64::INFINITY, f64::min);
    let random = lhv_random_scan(a.models, a.seed, a.max_support);
    let random_max = if a.models == 0 { 0.0 } else { random.max_abs_chsh };
    Ok(LhvScanRecord {
        models: a.models,
        seed: a.seed,
        max_support: a.max_support,
        deterministic_max: max,
        deterministic_min: min,
        random_max_abs: random_max,
        random_argmax: random.argmax.min(a.models),
        bound_respected: max <= 2.0 && min >= -2.0 && random_max <= 2.0 + 1e-12,
    })
}

impl PacketArgs {
    fn config(&self, setting: ChshSetting, trials: u64, seed: u64) -> Result<ExperimentConfig, CliError> {
        let cfg = ExperimentConfig {
            sigma: self.sigma,
            delta: self.delta,
            p0: self.p0,
            mass: self.mass,
            hbar: self.hbar,
            setting,
            strategy: self.eta.0.clone(),
            times: vec![self.t],
            trials,
            seed,
        };
        cfg.validate().map_err(invalid)?;
        Ok(cfg)
    }

    /// `(time, strategy)` for each sweep point; `trials` sweeps are handled by the caller.
    fn points(&self, allow_trials: bool) -> Result<Vec<(f64, DetectorStrategy, Option<u64>)>, CliError> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![(self.t, self.eta.0.clone(), None)]);
        };
        let values = sweep.values();
        match sweep.variable {
            SweepVariable::Time => {
                if sweep.start < 0.0 {
                    return Err(invalid("time sweep must start at t >= 0"));
                }
                Ok(values.into_iter().map(|t| (t, self.eta.0.clone(), None)).collect())
            }
            SweepVariable::Eta => Ok(values.into_iter().map(|eta| (self.t, DetectorStrategy::Static { eta }, None)).collect()),
            SweepVariable::Trials if allow_trials => {
                if sweep.start < 1.0 {
                    return Err(invalid("trials sweep must start at 1 or more"));
                }
                Ok(values.into_iter().map(|n| (self.t, self.eta.0.clone(), Some(n.round() as u64))).collect())
            }
            other => Err(invalid(format!("this subcommand cannot sweep {other:?}"))),
        }
    }
}

fn oracle_residual(closed: f64, numeric: f64) -> (f64, &'static str, bool) {
    if closed.max(numeric) < ORACLE_ABS_BELOW {
        let r = (numeric - closed).abs();
        (r, "absolute", r <= ORACLE_ABS_TOL)
    } else {
        let r = (numeric - closed).abs() / closed;
        (r, "relative", r <= ORACLE_REL_TOL)
    }
}

fn overlap(a: &OverlapArgs, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let base = a.packet.config(ChshSetting::maximal_violation(), 1, 0)?;
    let points = a.packet.points(false)?;
    let manual_grid = match (a.grid_x_min, a.grid_x_max, a.grid_points) {
        (Some(lo), Some(hi), Some(n)) => Some(GridSpec::new(lo, hi, n).map_err(invalid)?),
        _ => None,
    };
    let evaluated: Vec<_> = points
        .par_iter()
        .map(|(t, strategy, _)| {
            let cfg = base.with_strategy(strategy.clone());
            let packet = cfg.packet().map_err(invalid)?;
            let window = cfg.window(*t).map_err(invalid)?;
            let closed = detection_probability_closed(&packet, &window, *t).map_err(invalid)?;
            if !a.oracle {
                return Ok((OverlapRecord { t: *t, eta: window.eta(), p_closed: closed }, None));
            }
            let grid = match manual_grid {
                Some(g) => g,
                None => GridSpec::auto(&packet, &window, *t).map_err(invalid)?,
            };
            let numeric = detection_probability_numeric(&packet, &window, *t, &grid).map_err(invalid)?;
            let (residual, kind, ok) = oracle_residual(closed, numeric);
            Ok((
                OverlapRecord { t: *t, eta: window.eta(), p_closed: closed },
                Some(OverlapOracleRecord {
                    t: *t,
                    eta: window.eta(),
                    p_closed: closed,
                    p_numeric: numeric,
                    grid_points: grid.points,
                    residual,
                    residual_kind: kind.to_string(),
                    within_tolerance: ok,
                }),
            ))
        })
        .collect::<Result<_, CliError>>()?;
    if !a.oracle {
        let records: Vec<OverlapRecord> = evaluated.into_iter().map(|(r, _)| r).collect();
        return emit(out, format, &records);
    }
    let records: Vec<OverlapOracleRecord> = evaluated.into_iter().filter_map(|(_, r)| r).collect();
    emit(out, format, &records)?;
    let failures = records.iter().filter(|r| !r.within_tolerance).count();
    if failures > 0 {
        let worst = records.iter().map(|r| r.residual).fold(0.0, f64::max);
        return Err(CliError::Oracle(format!(
            "{failures} of {} points exceed the oracle tolerance (worst residual {worst:e})",
            records.len()
        )));
    }
    Ok(())
}

fn time_scan(a: &TimeScanArgs) -> Result<Vec<TimeScanRecord>, CliError> {
    let base = a.packet.config(a.setting.setting(), 1, 0)?;
    let s_quantum = chsh_value(&singlet_state(), &base.setting);
    a.packet
        .points(false)?
        .par_iter()
        .map(|(t, strategy, _)| {
            let cfg = base.with_strategy(strategy.clone());
            let (pp, pm) = side_probabilities(&cfg, *t).map_err(invalid)?;
            let damped = pp * pm * s_quantum;
            Ok(TimeScanRecord {
                t: *t,
                eta: cfg.window(*t).map_err(invalid)?.eta(),
                p_side_plus: pp,
                p_side_minus: pm,
                p_joint: pp * pm,
                damped_chsh: damped,
                violation: damped.abs() > 2.0,
            })
        })
        .collect()
}

fn field2pt(a: &FieldArgs, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let params = FieldParams::new(a.mass).map_err(invalid)?;
    let separations = match &a.sweep {
        None => vec![a.r],
        Some(s) if s.variable == SweepVariable::SeparationR => s.values(),
        Some(s) => return Err(invalid(format!("field2pt sweeps separation-r, not {:?}", s.variable))),
    };
    if a.fit {
        let Some(s) = &a.sweep else {
            return Err(invalid("--fit needs a separation-r sweep"));
        };
        let rate = decay_rate_fit(&params, s.start, s.stop, s.points).map_err(invalid)?;
        let record = FieldFitRecord {
            mass: a.mass,
            r_min: s.start,
            r_max: s.stop,
            samples: s.points,
            decay_rate: rate,
            relative_error: (rate - a.mass).abs() / a.mass,
        };
        return emit(out, format, &[record]);
    }
    let records = separations
        .par_iter()
        .map(|r| {
            let exact = two_point(&params, *r).map_err(invalid)?;
            let asym = two_point_asymptotic(&params, *r).map_err(invalid)?;
            let log_exact = log_two_point(&params, *r).map_err(invalid)?;
            // ratio from logs so it survives underflow of both factors
            let log_asym = (a.mass / (8.0 * std::f64::consts::PI)).ln()
                + 0.5 * (2.0 / (a.mass * std::f64::consts::PI * r)).ln()
                - a.mass * r
                - r.ln();
            let ratio = (log_exact - log_asym).exp();
            Ok(FieldRecord {
                r: *r,
                mr: a.mass * r,
                two_point: exact,
                log_two_point: log_exact,
                asymptotic: asym,
                ratio: ratio.is_finite().then_some(ratio),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    emit(out, format, &records)
}

fn montecarlo(a: &MonteCarloArgs) -> Result<Vec<RunRecord>, CliError> {
    let base = a.packet.config(a.setting.setting(), a.trials, a.seed)?;
    let source = match a.source {
        SourceKind::Singlet => None,
        SourceKind::Lhv => {
            use rand::SeedableRng;
            if a.lhv_support == 0 {
                return Err(invalid("--lhv-support must be at least 1"));
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
            rng.set_stream(u64::MAX);
            Some(LhvSource::new(LhvModel::random(&mut rng, a.lhv_support)))
        }
    };
    // points run in order; each run is parallel inside
    a.packet
        .points(true)?
        .iter()
        .map(|(t, strategy, trials)| {
            let mut cfg = base.with_strategy(strategy.clone());
            if let Some(n) = trials {
                cfg.trials = *n;
            }
            match &source {
                None => estimate_chsh(&cfg, *t),
                Some(s) => estimate_chsh_with(&cfg, *t, s),
            }
            .map_err(invalid)
        })
        .collect()
}

fn significance(a: &SignificanceArgs, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let base = a.packet.config(a.setting.setting(), 1, 0)?;
    let records = a
        .packet
        .points(false)?
        .par_iter()
        .map(|(t, strategy, _)| trials_for_significance(&base.with_strategy(strategy.clone()), *t, a.k).map_err(invalid))
        .collect::<Result<Vec<TrialRequirement>, CliError>>()?;
    if !a.fit {
        return emit(out, format, &records);
    }
    if a.packet.sweep.map(|s| s.variable) != Some(SweepVariable::Time) {
        return Err(invalid("--fit needs a time sweep"));
    }
    let points: Vec<(f64, f64)> = records
        .iter()
        .map(|r| r.total_trials.map(|n| (r.time, n)).ok_or_else(|| invalid(format!("no finite requirement at t = {}", r.time))))
        .collect::<Result<_, _>>()?;
    let exponent = scaling_exponent(&points).map_err(invalid)?;
    let record = ScalingFitRecord {
        t_min: points[0].0,
        t_max: points[points.len() - 1].0,
        points: points.len(),
        k: a.k,
        exponent,
    };
    emit(out, format, &[record])
}

/// Usage text, for `--help`-style diagnostics.
pub fn usage() -> String {
    Cli::command().render_usage().to_string()
}
