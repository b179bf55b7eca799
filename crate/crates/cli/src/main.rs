mod check;
mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{ConfigError, Params};

/// Directory used for output files when no `output` key is given.
const OUTPUT_DIR_ENV: &str = "SCALESPIN_OUTPUT_DIR";

#[derive(Parser)]
#[command(
    name = "scalespin",
    version,
    about = "Quaternionic spinor fields, spiral geodesics and fractal hyperhelices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

const COMMON_HELP: &str = "\
Parameters are given as `--key value` or `--key=value`, or read from a file
with `--config FILE` (one `key = value` per line, `#` starts a comment).
Command-line values override file values. Unknown keys are rejected.

Common keys:
  format   csv | json
  output   output file; `-` for stdout. Without it, files go to
           $SCALESPIN_OUTPUT_DIR/<command>.<format> if that variable is set,
           otherwise to stdout.";

#[derive(Subcommand)]
enum Command {
    /// Stochastic spiral geodesics. CSV: one path (t,x,y,z). JSON: ensemble summary.
    #[command(after_help = concat!(
        "Keys (defaults): D (0.05), dt (0.01), n_steps (1000), seed (1), m (1), p0 (1),\n",
        "sigma0 (0.5), x0 (0.5,0,0), n_traj (1), noise (gaussian | rademacher),\n",
        "drift (spiral | vx,vy,vz), core_radius (0), lags (1,2,3), path_index (0).\n",
        "Default format: csv."
    ))]
    Simulate(Rest),
    /// Deterministic spiral integration (RK4). CSV: t,x,y,z. JSON: conservation summary.
    #[command(after_help = concat!(
        "Keys (defaults): dt (0.01), n_steps (1000), m (1), p0 (1), sigma0 (0.5),\n",
        "x0 (0.5,0,0), core_radius (0). Default format: csv."
    ))]
    Spiral(Rest),
    /// Velocity components v±± and ṽ±± on a grid of points.
    #[command(after_help = concat!(
        "Keys (defaults): field (dezael | plane), hbar (1), m (1), c (1), s0 (hbar),\n",
        "p (0,0,1), sigma (0.5), amp0, amp1 (4 real or 8 re/im numbers), energy0 (0.5),\n",
        "energy1 (1), t (0), grid_min (-1,-1,0), grid_max (1,1,0), grid_n (4,4,1),\n",
        "method (analytic | fd), fd_step (1e-4). Default format: csv with columns\n",
        "t,x,y,z,mu,v_pp,v_pm,v_mp,v_mm,vt_pp,vt_pm,vt_mp,vt_mm."
    ))]
    Extract(Rest),
    /// Fractal hyperhelix. CSV: vertices x,y,z. JSON: dimension, spin and scaling report.
    #[command(after_help = concat!(
        "Keys (defaults): generator (helical | segments), n (9), r (1/3), turns (1),\n",
        "theta0 (0), segments (x,y,z; x,y,z; ...), level (5), scaling_level (min(level,4)),\n",
        "m (1), v (1), hbar (1), q (2,3,9), d_f (similarity dimension). Default format: csv."
    ))]
    Hyperhelix(Rest),
    /// Run the built-in residual and invariant suites. Exit status 1 if any fails.
    #[command(after_help = "Keys (defaults): seed (1). Default format: json.")]
    Check(Rest),
}

#[derive(Args)]
#[command(after_long_help = COMMON_HELP)]
struct Rest {
    /// Parameter overrides and `--config FILE`.
    #[arg(
        trailing_var_arg = true,
        allow_hyphen_values = true,
        value_name = "--KEY VALUE"
    )]
    args: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("{op}: {source}")]
    Core {
        op: &'static str,
        source: scalespin::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core { source, .. } if source.is_numerical() => 3,
            _ => 2,
        }
    }
}

fn read_format(p: &mut Params, default: &str) -> Result<Format, ConfigError> {
    Ok(
        match p.choice("format", default, &["csv", "json"])?.as_str() {
            "csv" => Format::Csv,
            _ => Format::Json,
        },
    )
}

fn destination(output: Option<String>, name: &str, format: Format) -> Option<PathBuf> {
    match output.as_deref() {
        Some("-") => None,
        Some(path) => Some(PathBuf::from(path)),
        None => std::env::var_os(OUTPUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| Path::new(&d).join(format!("{name}.{}", format.extension()))),
    }
}

fn write_text(dest: Option<&Path>, text: &str) -> Result<(), CliError> {
    match dest {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
                    path: dir.to_path_buf(),
                    source,
                })?;
            }
            std::fs::write(path, text).map_err(|source| CliError::Write {
                path: path.to_path_buf(),
                source,
            })
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Write {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn run(command: Command) -> Result<bool, (&'static str, CliError)> {
    use commands::*;
    let (name, args, default_format) = match &command {
        Command::Simulate(r) => ("simulate", &r.args, "csv"),
        Command::Spiral(r) => ("spiral", &r.args, "csv"),
        Command::Extract(r) => ("extract", &r.args, "csv"),
        Command::Hyperhelix(r) => ("hyperhelix", &r.args, "csv"),
        Command::Check(r) => ("check", &r.args, "json"),
    };
    let fail = |e: CliError| (name, e);
    let mut p = config::parse_args(args).map_err(|e| fail(e.into()))?;
    let format = read_format(&mut p, default_format).map_err(|e| fail(e.into()))?;
    let output = p.take_location("output");

    let emitted = match command {
        Command::Simulate(_) => {
            let plan = read_simulate(&mut p).map_err(|e| fail(e.into()))?;
            let cfg = p.finish().map_err(|e| fail(e.into()))?;
            run_simulate(&plan, format, cfg)
        }
        Command::Spiral(_) => {
            let plan = read_spiral(&mut p).map_err(|e| fail(e.into()))?;
            let cfg = p.finish().map_err(|e| fail(e.into()))?;
            run_spiral(&plan, format, cfg)
        }
        Command::Extract(_) => {
            let plan = read_extract(&mut p).map_err(|e| fail(e.into()))?;
            let cfg = p.finish().map_err(|e| fail(e.into()))?;
            run_extract(&plan, format, cfg)
        }
        Command::Hyperhelix(_) => {
            let plan = read_hyperhelix(&mut p).map_err(|e| fail(e.into()))?;
            let cfg = p.finish().map_err(|e| fail(e.into()))?;
            run_hyperhelix(&plan, format, cfg)
        }
        Command::Check(_) => {
            let seed = p.u64("seed", 1).map_err(|e| fail(e.into()))?;
            let cfg = p.finish().map_err(|e| fail(e.into()))?;
            run_check(seed, format, cfg)
        }
    }
    .map_err(fail)?;

    write_text(destination(output, name, format).as_deref(), &emitted.text).map_err(fail)?;
    Ok(!emitted.failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("scalespin: check failed");
            ExitCode::from(1)
        }
        Err((name, e)) => {
            eprintln!("scalespin {name}: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
