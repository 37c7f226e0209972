//! `kirchhoff` command-line interface.
//!
//! Every subcommand prints its result to stdout (JSON, or CSV for
//! `moser`) and, when an output directory is configured, also writes it
//! there. The directory is taken from `--out`, then the
//! `KIRCHHOFF_OUT_DIR` environment variable, then `output.dir`.
//!
//! Exit codes: 0 success, 1 hard hypothesis failure, 2 solver,
//! configuration or I/O error.

mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use config::{
    BoundConfig, FiberConfig, KirchhoffConfig, KirchhoffKind, MeshConfig, NonlinearityConfig, NonlinearityConfigKind,
    OutputConfig, ProbeConfig, RunConfig,
};
pub use output::{save_table, to_json, write_field, write_report, write_table, Envelope, SCHEMA_VERSION};

use crate::error::{Error, Result};
use crate::model::{validate_hypotheses, HypothesisReport};
use crate::moser::{MoserFamily, MoserRow};
use crate::solver::{self, initial_field, SolveStatus};

pub const OUT_DIR_ENV: &str = "KIRCHHOFF_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_HYPOTHESIS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "kirchhoff",
    version,
    about = "Ground states of nonlocal Kirchhoff problems with exponential growth"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Default)]
struct Common {
    /// Run configuration (TOML, or JSON for `.json` files). Defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report and data files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the solver and probe seeds.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the structural hypotheses on m and f.
    Validate(Common),
    /// Tabulate the Moser-family integral and its lower bounds.
    Moser {
        /// Comma-separated indices n ≥ 2.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        /// Ball radius.
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute a positive ground state.
    Solve(Common),
    /// Probe the mountain-pass geometry.
    Probe(Common),
    /// Check the level bound c* < ½M(4π/α₀).
    Bound(Common),
    /// Tabulate h(t) = I(t u0/‖u0‖) and h'(t).
    Fiber(Common),
}

/// Parse `argv` (including the program name) and run, writing to the
/// process's stdout and stderr.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Hypothesis { .. } => EXIT_HYPOTHESIS,
                _ => EXIT_ERROR,
            }
        }
    }
}

struct Session {
    config: RunConfig,
    out_dir: Option<PathBuf>,
}

impl Session {
    fn open(common: &Common) -> Result<Self> {
        let mut config = match &common.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = common.seed {
            config.solver.seed = seed;
            config.probe.seed = seed;
        }
        let out_dir = resolve_out_dir(common.out.as_deref(), config.output.dir.as_deref());
        Ok(Self { config, out_dir })
    }

    fn emit<R: Serialize>(&self, command: &str, result: &R, out: &mut dyn Write) -> Result<()> {
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            command,
            config: Some(&self.config),
            result,
        };
        let text = to_json(&env)?;
        if let Some(dir) = &self.out_dir {
            write_report(&env, &dir.join(format!("{command}.json")))?;
        }
        out.write_all(text.as_bytes()).map_err(stdout_err)
    }
}

fn resolve_out_dir(flag: Option<&Path>, config: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| {
            std::env::var_os(OUT_DIR_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        })
        .or_else(|| config.map(Path::to_path_buf))
}

fn stdout_err(source: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn hypotheses(s: &Session) -> Result<HypothesisReport> {
    let grid = s.config.grid()?;
    validate_hypotheses(
        &s.config.coefficient()?,
        &s.config.nonlinearity()?,
        grid.inradius(),
        &s.config.validation,
    )
}

/// Report hard hypothesis failures on stderr; true when any occurred.
fn hard_failure(report: &HypothesisReport, err: &mut dyn Write) -> bool {
    match report.hard_failure() {
        Some(e) => {
            let witness = e
                .witness
                .as_ref()
                .map(|w| format!(" with witness {w:?}"))
                .unwrap_or_default();
            let _ = writeln!(err, "hypothesis {} failed{witness}", e.hypothesis.name());
            true
        }
        None => false,
    }
}

#[derive(Serialize)]
struct HypothesisFailure<'a> {
    status: &'static str,
    hypotheses: &'a HypothesisReport,
}

/// Shared gate for the subcommands that need the hypotheses.
fn gate(s: &Session, command: &str, out: &mut dyn Write, err: &mut dyn Write) -> Result<Option<i32>> {
    let report = hypotheses(s)?;
    if hard_failure(&report, err) {
        s.emit(
            command,
            &HypothesisFailure {
                status: "hypothesis-failure",
                hypotheses: &report,
            },
            out,
        )?;
        return Ok(Some(EXIT_HYPOTHESIS));
    }
    Ok(None)
}

#[derive(Serialize)]
struct MoserSummary {
    d: f64,
    rows: Vec<MoserRow>,
    /// Every integral dominates its lower bound.
    bounds_hold: bool,
    /// Lower bounds increase with n (rows sorted by n).
    monotone: bool,
    limit: f64,
}

#[derive(Serialize)]
struct FiberRow {
    t: f64,
    h: f64,
    h_prime: f64,
}

#[derive(Serialize)]
struct FiberTable {
    ray_norm: f64,
    t_star: Option<f64>,
    rows: Vec<FiberRow>,
    /// Set when the table stops early at the overflow cap.
    truncated_at: Option<f64>,
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Validate(c) => {
            let s = Session::open(&c)?;
            let report = hypotheses(&s)?;
            let failed = hard_failure(&report, err);
            s.emit("validate", &report, out)?;
            Ok(if failed { EXIT_HYPOTHESIS } else { EXIT_OK })
        }
        Command::Moser { n, d, out: dir } => moser(&n, d, dir, out),
        Command::Solve(c) => {
            let s = Session::open(&c)?;
            if let Some(code) = gate(&s, "solve", out, err)? {
                return Ok(code);
            }
            let ctx = s.config.context()?;
            let report = solver::solve_ground_state(&ctx, &s.config.solver)?;
            if let Some(dir) = &s.out_dir {
                write_field(&report.field, &dir.join("field.csv"))?;
            }
            s.emit("solve", &report, out)?;
            if report.status != SolveStatus::Converged {
                let _ = writeln!(
                    err,
                    "solve ended with status {:?}: {}",
                    report.status,
                    report.note.as_deref().unwrap_or("")
                );
                return Ok(EXIT_ERROR);
            }
            Ok(EXIT_OK)
        }
        Command::Probe(c) => {
            let s = Session::open(&c)?;
            if let Some(code) = gate(&s, "probe", out, err)? {
                return Ok(code);
            }
            let ctx = s.config.context()?;
            let p = &s.config.probe;
            let u0 = initial_field(&ctx.grid, &p.ray)?;
            let report = solver::geometry_probe(&ctx, &p.rho, &u0, p.directions, p.seed)?;
            s.emit("probe", &report, out)?;
            Ok(EXIT_OK)
        }
        Command::Bound(c) => {
            let s = Session::open(&c)?;
            if let Some(code) = gate(&s, "bound", out, err)? {
                return Ok(code);
            }
            let ctx = s.config.context()?;
            let (report, solve) = solver::verify_level_bound(&ctx, &s.config.solver, &s.config.bound.moser_n)?;
            if let Some(dir) = &s.out_dir {
                write_field(&solve.field, &dir.join("field.csv"))?;
            }
            s.emit("bound", &report, out)?;
            Ok(EXIT_OK)
        }
        Command::Fiber(c) => {
            let s = Session::open(&c)?;
            let ctx = s.config.context()?;
            let f = &s.config.fiber;
            let u0 = initial_field(&ctx.grid, &f.ray)?;
            let norm = u0.dirichlet_energy().sqrt();
            let unit = u0.scaled(norm.recip());
            let mut rows = Vec::with_capacity(f.count);
            let mut truncated_at = None;
            for k in 0..f.count {
                let t = f.t_min + (f.t_max - f.t_min) * k as f64 / (f.count - 1) as f64;
                match ctx.fibering_sample(&unit, t) {
                    Ok(p) => rows.push(FiberRow {
                        t,
                        h: p.h,
                        h_prime: p.h_prime,
                    }),
                    Err(e) if e.is_overflow() => {
                        truncated_at = Some(t);
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            let t_star = ctx.nehari_project(&unit).ok().map(|p| p.t_star);
            let table = FiberTable {
                ray_norm: norm,
                t_star,
                rows,
                truncated_at,
            };
            if let Some(dir) = &s.out_dir {
                std::fs::create_dir_all(dir).map_err(|source| Error::Io {
                    path: dir.clone(),
                    source,
                })?;
                save_table(
                    &dir.join("fiber.csv"),
                    &["t", "h", "h_prime"],
                    table.rows.iter().map(|r| vec![r.t, r.h, r.h_prime]),
                )?;
            }
            s.emit("fiber", &table, out)?;
            Ok(EXIT_OK)
        }
    }
}

fn moser(ns: &[u64], d: f64, dir: Option<PathBuf>, out: &mut dyn Write) -> Result<i32> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let rows = ns
        .iter()
        .map(|&n| MoserFamily::new(n, d, [0.0, 0.0])?.row())
        .collect::<Result<Vec<_>>>()?;
    let summary = MoserSummary {
        d,
        bounds_hold: rows.iter().all(|r| r.limite_integral >= r.lower_bound),
        monotone: rows.windows(2).all(|w| w[1].lower_bound > w[0].lower_bound),
        limit: 3.0 * std::f64::consts::PI * d * d,
        rows,
    };
    let header = ["n", "q", "limite_integral", "lower_bound", "limit"];
    let table = || {
        summary
            .rows
            .iter()
            .map(|r| vec![r.n as f64, r.q, r.limite_integral, r.lower_bound, r.limit])
            .collect::<Vec<_>>()
    };
    let mut csv_bytes = Vec::new();
    write_table(&mut csv_bytes, &header, table()).map_err(|e| Error::Configuration(format!("CSV formatting: {e}")))?;
    out.write_all(&csv_bytes).map_err(stdout_err)?;
    if let Some(dir) = resolve_out_dir(dir.as_deref(), None) {
        std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        save_table(&dir.join("moser.csv"), &header, table())?;
        let env = Envelope::<(), _> {
            schema_version: SCHEMA_VERSION,
            command: "moser",
            config: None,
            result: &summary,
        };
        write_report(&env, &dir.join("moser.json"))?;
    }
    Ok(EXIT_OK)
}
