//! Command-line experiment runner for the `zenoberry` engines.
//!
//! A run is described by an [`ExperimentConfig`], read from a JSON file and
//! overridden by flags, and produces flat records written as CSV or JSON.
//!
//! Exit statuses: `0` success, `2` invalid configuration, `3` engine error,
//! `4` I/O error. Failures print one JSON object on stderr.

pub mod config;
pub mod record;
pub mod runner;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::json;
use zenoberry_core::batch;

use config::{parse_angle, parse_vector, HamiltonianConfig, PlanConfig, SweepConfig, SweepParameter};
pub use config::{ExperimentConfig, Format, Mode};
use record::{write_atomic, Record, Table};

pub const THREADS_ENV: &str = "ZENOBERRY_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "zenoberry",
    version,
    about = "Zeno-driven spin phases and mirror-polygon polarization transport"
)]
pub struct Args {
    /// JSON experiment configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Projection axis n as "x,y,z".
    #[arg(long, allow_hyphen_values = true)]
    pub axis_n: Option<String>,
    /// Total rotation angle a in radians; "pi*0.5" style accepted.
    #[arg(long, allow_hyphen_values = true)]
    pub total_angle: Option<String>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Field axis b as "x,y,z".
    #[arg(long, allow_hyphen_values = true)]
    pub axis_b: Option<String>,
    /// Total duration T.
    #[arg(long)]
    pub time: Option<f64>,
    #[arg(long)]
    pub polygon_sides: Option<usize>,
    /// Polar angle of the entering photon; "pi*" prefix accepted.
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<String>,
    /// PARAM:START:STOP:STEP with PARAM in steps, cos_theta, mu, polygon_sides;
    /// prefix STEP with '*' for a geometric sweep.
    #[arg(long, allow_hyphen_values = true)]
    pub sweep: Option<String>,
    /// Output file; records go to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the trajectory of a single run as CSV to this path.
    #[arg(long)]
    pub dump_trajectory: Option<PathBuf>,
    /// Append a wall_time_seconds column (makes output nondeterministic).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Engine { message: String, index: Option<usize>, step: Option<usize> },
    Io(String),
}

impl CliError {
    pub fn status(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Engine { .. } => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn to_json(&self) -> String {
        let value = match self {
            CliError::Config(m) => json!({"status": 2, "kind": "invalid-config", "message": m}),
            CliError::Engine { message, index, step } => json!({
                "status": 3,
                "kind": "engine",
                "message": message,
                "point": index,
                "step": step,
            }),
            CliError::Io(m) => json!({"status": 4, "kind": "io", "message": m}),
        };
        value.to_string()
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Merges the optional config file with flag overrides.
pub fn build_config(args: &Args) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            ExperimentConfig::from_json(&text).map_err(CliError::Config)?
        }
        None => ExperimentConfig::new(infer_mode(args)),
    };
    apply_overrides(&mut cfg, args).map_err(CliError::Config)?;
    Ok(cfg)
}

fn infer_mode(args: &Args) -> Mode {
    if args.sweep.is_some() {
        Mode::Sweep
    } else if args.polygon_sides.is_some() || args.theta0.is_some() {
        Mode::PhotonPolygon
    } else if args.mu.is_some() || args.axis_b.is_some() || args.time.is_some() {
        Mode::SpinHamiltonian
    } else {
        Mode::SpinFree
    }
}

fn apply_overrides(cfg: &mut ExperimentConfig, args: &Args) -> Result<(), String> {
    if let Some(mode) = args.mode {
        cfg.mode = mode;
    }
    if let Some(spec) = &args.sweep {
        cfg.sweep = Some(SweepConfig::parse(spec)?);
        if args.mode.is_none() {
            cfg.mode = Mode::Sweep;
        }
    }

    // the swept field may be left out; the sweep overwrites it anyway
    let swept = cfg.sweep.as_ref().map(|s| (s.parameter, s.start));
    let swept_value = |p: SweepParameter| swept.filter(|(q, _)| *q == p).map(|(_, v)| v);

    let axis = args.axis_n.as_deref().map(parse_vector).transpose()?;
    let axis = axis.or_else(|| swept_value(SweepParameter::CosTheta).map(|_| [0.0, 0.0, 1.0]));
    let angle = args.total_angle.as_deref().map(parse_angle).transpose()?;
    let steps = args.steps.or_else(|| swept_value(SweepParameter::Steps).map(|v| v.max(1.0) as usize));
    if args.axis_n.is_some() || angle.is_some() || args.steps.is_some() {
        cfg.plan = Some(match cfg.plan.take() {
            Some(p) => PlanConfig {
                axis: axis.unwrap_or(p.axis),
                total_angle: angle.unwrap_or(p.total_angle),
                steps: steps.unwrap_or(p.steps),
            },
            None => PlanConfig {
                axis: axis.ok_or("a plan needs --axis-n")?,
                total_angle: angle.ok_or("a plan needs --total-angle")?,
                steps: steps.ok_or("a plan needs --steps")?,
            },
        });
    }

    let b = args.axis_b.as_deref().map(parse_vector).transpose()?;
    let mu = args.mu.or_else(|| swept_value(SweepParameter::Mu));
    if args.mu.is_some() || b.is_some() || args.time.is_some() {
        cfg.hamiltonian = Some(match cfg.hamiltonian.take() {
            Some(h) => HamiltonianConfig {
                mu: mu.unwrap_or(h.mu),
                axis: b.unwrap_or(h.axis),
                total_time: args.time.unwrap_or(h.total_time),
            },
            None => HamiltonianConfig {
                mu: mu.ok_or("a hamiltonian needs --mu")?,
                axis: b.ok_or("a hamiltonian needs --axis-b")?,
                total_time: args.time.ok_or("a hamiltonian needs --time")?,
            },
        });
    }

    if let Some(n) = args.polygon_sides {
        cfg.polygon_sides = Some(n);
    }
    if let Some(t) = &args.theta0 {
        cfg.theta0 = Some(parse_angle(t)?);
    }
    if let Some(out) = &args.out {
        cfg.output.path = Some(out.clone());
    }
    if let Some(format) = args.format {
        cfg.output.format = format;
    }
    Ok(())
}

/// Reads the thread cap; `None` leaves the default pool in charge.
pub fn thread_cap(raw: Option<&str>) -> Result<Option<usize>, CliError> {
    let Some(raw) = raw else { return Ok(None) };
    match raw.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(Some(n)),
        _ => Err(CliError::Config(format!("{THREADS_ENV} must be an integer >= 1, got {raw:?}"))),
    }
}

/// `<stem>_summary.<ext>` next to the records file.
pub fn summary_path(out: &Path, format: Format) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_summary.{}", format.extension()))
}

fn render(records: &[Record], format: Format) -> Result<Vec<u8>, CliError> {
    Table::from_records(records).and_then(|t| t.render(format)).map_err(|m| CliError::Engine {
        message: m,
        index: None,
        step: None,
    })
}

/// Runs one invocation; returns the exit status.
pub fn execute(args: &Args, threads: Option<&str>) -> Result<(), CliError> {
    let cfg = build_config(args)?;
    let experiment = cfg.validate().map_err(CliError::Config)?;
    if args.dump_trajectory.is_some() && experiment.points.len() != 1 {
        return Err(CliError::Config("--dump-trajectory needs a single run, not a sweep".into()));
    }
    let cap = thread_cap(threads)?;

    let job = || runner::run(&experiment, args.timing, args.dump_trajectory.is_some());
    let result = match cap {
        Some(n) => batch::with_threads(n, job).map_err(|e| CliError::Config(e.to_string()))?,
        None => job(),
    };
    let output = result.map_err(|e| CliError::Engine {
        message: e.error.to_string(),
        index: Some(e.index),
        step: match e.error {
            zenoberry_core::Error::EvolutionKilled { step, .. } => Some(step),
            _ => None,
        },
    })?;

    let format = cfg.output.format;
    let body = render(&output.records, format)?;
    let summary = output.summary.as_ref().map(|s| render(std::slice::from_ref(s), format)).transpose()?;

    if let (Some(path), Some(table)) = (&args.dump_trajectory, &output.trajectory) {
        let bytes = table.render(Format::Csv).map_err(CliError::Config)?;
        write_atomic(path, &bytes).map_err(|e| io_error(path, e))?;
    }

    let mut stdout = std::io::stdout().lock();
    let stdout_err = |e: std::io::Error| CliError::Io(format!("stdout: {e}"));
    match &cfg.output.path {
        Some(path) => {
            write_atomic(path, &body).map_err(|e| io_error(path, e))?;
            if let Some(s) = &summary {
                let spath = summary_path(path, format);
                write_atomic(&spath, s).map_err(|e| io_error(&spath, e))?;
                stdout.write_all(s).map_err(stdout_err)?;
            }
        }
        None => {
            stdout.write_all(&body).map_err(stdout_err)?;
            if let Some(s) = &summary {
                stdout.write_all(b"\n").map_err(stdout_err)?;
                stdout.write_all(s).map_err(stdout_err)?;
            }
        }
    }
    stdout.flush().map_err(stdout_err)
}

/// Parses `argv`, runs, reports failures on stderr and returns the exit status.
pub fn main_with<I, T>(argv: I, threads: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            let err = CliError::Config(first.to_string());
            eprintln!("{}", err.to_json());
            return err.status();
        }
    };
    match execute(&args, threads) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.status()
        }
    }
}
