//! `nhq`: run, verify and sweep two-level non-Hermitian scenarios, with CSV
//! output.
//!
//! Exit codes: 0 success, 1 verification failure, 2 propagation singularity,
//! 3 configuration error.

pub mod config;
pub mod series;
pub mod verify;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use config::{ConfigError, RunConfig, ScenarioSpec, Settings};
use nhq_core::tls::oracle_asymptote;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_SINGULARITY: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] nhq_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use nhq_core::Error as E;
        match self {
            CliError::Core(E::TraceSingularity { .. } | E::Diverged { .. } | E::ZeroTrace { .. }) => EXIT_SINGULARITY,
            _ => EXIT_CONFIG,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nhq", version, about = "Non-Hermitian two-level correlation scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute averages and correlations on a time grid; writes CSV.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        outputs: OutputArgs,
    },
    /// Compare numerics with the closed forms; exit 1 on mismatch.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Relative tolerance for the closed-form comparison.
        #[arg(long)]
        rtol: Option<String>,
    },
    /// Repeat `run` over values of one parameter; writes stacked CSV.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        outputs: OutputArgs,
        /// One of nu, a2, gamma, delta.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Print the long-time limits of the closed forms.
    Asymptote {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// INI-style configuration file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// ed, pd, dph or raw.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Initial state family: x or z.
    #[arg(long)]
    init: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tmax: Option<String>,
    /// Output every `stride` steps of dt.
    #[arg(long)]
    stride: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<String>,
    /// exact or rk4.
    #[arg(long)]
    method: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Include ⟨σx⟩, ⟨σy⟩, ⟨σz⟩ (on by default unless pairs are given).
    #[arg(long)]
    averages: bool,
    /// Comma-separated ξχ letter pairs from i, x, y, z (e.g. zz,zx).
    #[arg(long)]
    pairs: Option<String>,
    /// nonlinear, linear or both.
    #[arg(long)]
    kind: Option<String>,
    /// Include 1 − 𝒞/𝒞⁽ᴸ⁾ per pair.
    #[arg(long)]
    delta_c: bool,
    /// Include 𝒞/𝒞⁽ᴸ⁾ per pair.
    #[arg(long)]
    ratio: bool,
}

impl CommonArgs {
    fn settings(&self) -> Result<Settings, CliError> {
        let mut s = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
                Settings::parse(&text)?
            }
            None => Settings::default(),
        };
        let flags = [
            ("scenario", "model", "model", &self.model),
            ("scenario", "a2", "a2", &self.a2),
            ("scenario", "nu", "nu", &self.nu),
            ("scenario", "delta", "delta", &self.delta),
            ("scenario", "gamma", "gamma", &self.gamma),
            ("scenario", "init", "init", &self.init),
            ("time", "t_max", "tmax", &self.tmax),
            ("time", "stride", "stride", &self.stride),
            ("propagation", "dt", "dt", &self.dt),
            ("propagation", "method", "method", &self.method),
            ("outputs", "out", "out", &self.out),
        ];
        for (section, key, flag, value) in flags {
            if let Some(v) = value {
                s.set_flag(section, key, v, flag);
            }
        }
        Ok(s)
    }
}

impl OutputArgs {
    fn apply(&self, s: &mut Settings) {
        if self.averages {
            s.set_flag("outputs", "averages", "true", "averages");
        }
        if let Some(p) = &self.pairs {
            s.set_flag("outputs", "pairs", p, "pairs");
        }
        if let Some(k) = &self.kind {
            s.set_flag("outputs", "kind", k, "kind");
        }
        if self.delta_c {
            s.set_flag("outputs", "delta_c", "true", "delta-c");
        }
        if self.ratio {
            s.set_flag("outputs", "ratio", "true", "ratio");
        }
    }
}

/// Sends output to the configured file or to `out`.
fn emit(path: Option<&PathBuf>, bytes: &[u8], out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => Ok(out.write_all(bytes)?),
    }
}

fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let table = series::compute(cfg, err)?;
    let mut buf = Vec::new();
    series::write_csv(&mut buf, &table)?;
    emit(cfg.out.as_ref(), &buf, out)?;
    Ok(EXIT_OK)
}

fn thread_cap() -> Option<usize> {
    std::env::var("NHQ_THREADS")
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

fn sweep(base: Settings, param: &str, values: &str, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    if !["nu", "a2", "gamma", "delta"].contains(&param) {
        return Err(CliError::Usage(format!(
            "--param must be one of nu, a2, gamma, delta (got `{param}`)"
        )));
    }
    let parsed: Vec<f64> = values
        .split(',')
        .map(|v| v.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect::<Option<_>>()
        .ok_or_else(|| {
            CliError::Usage(format!(
                "--values must be a comma-separated list of numbers (got `{values}`)"
            ))
        })?;
    if parsed.is_empty() {
        return Err(CliError::Usage("--values is empty".into()));
    }

    let configs: Vec<RunConfig> = parsed
        .iter()
        .map(|v| {
            let mut s = base.clone();
            s.set_flag("scenario", param, &v.to_string(), "values");
            s.into_config()
        })
        .collect::<Result<_, _>>()?;
    if configs.iter().any(|c| matches!(c.scenario, ScenarioSpec::Raw { .. })) {
        return Err(CliError::Usage("sweep needs one of the ed, pd, dph models".into()));
    }

    let work = || -> Vec<(Vec<u8>, nhq_core::Result<series::Table>)> {
        configs
            .par_iter()
            .map(|cfg| {
                let mut notes = Vec::new();
                let table = series::compute(cfg, &mut notes);
                (notes, table)
            })
            .collect()
    };
    let results = match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))?
            .install(work),
        None => work(),
    };

    let mut buf = Vec::new();
    for (i, ((notes, table), value)) in results.into_iter().zip(&parsed).enumerate() {
        err.write_all(&notes)?;
        let table = table?;
        if i == 0 {
            series::write_header(&mut buf, Some(param), &table)?;
        }
        series::write_rows(&mut buf, Some(*value), &table)?;
    }
    emit(configs[0].out.as_ref(), &buf, out)?;
    Ok(EXIT_OK)
}

fn asymptote(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let ScenarioSpec::Tls(sc) = &cfg.scenario else {
        return Err(CliError::Usage("asymptote needs one of the ed, pd, dph models".into()));
    };
    let lim = oracle_asymptote(sc)?;
    let mut buf = Vec::new();
    writeln!(buf, "series,re,im,ok,erratum")?;
    for (series, entry) in lim.entries() {
        let (re, im, ok) = match entry.value {
            Some(v) => (format!("{:.16e}", v.re), format!("{:.16e}", v.im), 1),
            None => ("nan".into(), "nan".into(), 0),
        };
        writeln!(buf, "{},{re},{im},{ok},{}", series.label(), entry.is_erratum() as u8)?;
    }
    emit(cfg.out.as_ref(), &buf, out)?;
    Ok(EXIT_OK)
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { common, outputs } => {
            let mut s = common.settings()?;
            outputs.apply(&mut s);
            run(&s.into_config()?, out, err)
        }
        Command::Verify { common, rtol } => {
            let mut s = common.settings()?;
            if let Some(r) = rtol {
                s.set_flag("outputs", "rtol", &r, "rtol");
            }
            let cfg = s.into_config()?;
            let mut buf = Vec::new();
            let pass = verify::verify(&cfg, &mut buf)?;
            emit(cfg.out.as_ref(), &buf, out)?;
            Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Sweep {
            common,
            outputs,
            param,
            values,
        } => {
            let mut s = common.settings()?;
            outputs.apply(&mut s);
            sweep(s, &param, &values, out, err)
        }
        Command::Asymptote { common } => asymptote(&common.settings()?.into_config()?, out),
    }
}

/// Runs the command line `args` (without the program name) and returns the
/// exit code.
pub fn execute<I>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = String>,
{
    let argv = std::iter::once("nhq".to_string()).chain(args);
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_CONFIG
                }
            };
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
