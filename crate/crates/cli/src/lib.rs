//! Command-line driver: `decompose`, `baseline-lelele`, `gen`, `verify`.
//!
//! Exit codes: 0 success, 1 usage or I/O, 2 invalid input or failed
//! verification, 3 time limit reached before optimality was proven.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use leleec::cost::parse_decimal;
use leleec::decomposer::{decompose_lelele, decompose_with, Decomposition, RunOptions};
use leleec::io::{emit_layout, emit_result, read_layout, read_result, text_report, write_file, IoError, Mode, ResultFile};
use leleec::svg::emit_svg;
use leleec::synth::{gen_synthetic, SynthKind};
use leleec::verify::verify;
use leleec::Config;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_TIME_LIMIT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "leleec", version, about = "Two-mask layout decomposition with end-cut trim shapes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Two masks plus end-cuts, with stitches unless disabled.
    Decompose {
        #[command(flatten)]
        run: RunArgs,
        /// Do not split wires at stitch candidates.
        #[arg(long)]
        no_stitch: bool,
        /// Fix cuts that look forced before solving (may lose optimality).
        #[arg(long, conflicts_with = "no_preselect")]
        preselect: bool,
        /// Keep pre-selection off (the default).
        #[arg(long)]
        no_preselect: bool,
        /// Solve whole components without splitting at bridges.
        #[arg(long)]
        no_bridges: bool,
        /// Stitch weight as a decimal or fraction, e.g. 0.1 or 1/10.
        #[arg(long, value_name = "R")]
        alpha: Option<String>,
    },
    /// Three-mask coloring without end-cuts, for comparison.
    BaselineLelele {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write a synthetic layout.
    Gen {
        /// grid, comb, clique4_array or via_array.
        #[arg(value_parser = parse_kind)]
        kind: SynthKind,
        /// Size: grid side, comb teeth, motif copies or contact count.
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        w_min: i64,
        #[arg(long, default_value_t = 10)]
        s_min: i64,
        /// Output file; stdout if omitted.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Re-check a result file against its layout.
    Verify { layout: PathBuf, result: PathBuf },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Layout file (JSON, format 1).
    layout: PathBuf,
    /// Render masks, trim shapes and conflicts to an SVG file.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Write the whole-layout model in CPLEX LP format.
    #[arg(long, value_name = "PATH")]
    lp_dump: Option<PathBuf>,
    /// Seconds; the best solution found so far is written when it expires.
    #[arg(long, value_name = "S")]
    time_limit: Option<f64>,
    /// Result file; the report still goes to stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Report::Text)]
    report: Report,
    /// Solve sub-problems on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Report {
    Json,
    Text,
}

fn parse_kind(s: &str) -> Result<SynthKind, String> {
    s.parse()
}

/// A failure with its exit code; the message goes to stderr.
struct Failure(i32, String);

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let code = match e {
            IoError::Io { .. } => EXIT_USAGE,
            IoError::Parse(_) | IoError::Validation(_) => EXIT_INVALID,
        };
        Failure(code, e.to_string())
    }
}

pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_cli_with(argv, &mut std::io::stdout().lock())
}

/// As [`run_cli`], with reports written to `stdout` instead.
pub fn run_cli_with<I, T>(argv: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Decompose {
            run,
            no_stitch,
            preselect,
            no_preselect: _,
            no_bridges,
            alpha,
        } => {
            let layout = read_layout(&run.layout)?;
            let mut cfg = layout.config();
            cfg.enable_stitch = !no_stitch;
            cfg.enable_preselect = preselect;
            cfg.enable_bridges = !no_bridges;
            if let Some(a) = alpha {
                cfg.alpha = parse_alpha(&a).ok_or_else(|| Failure(EXIT_USAGE, format!("--alpha {a:?} is not a non-negative decimal or fraction")))?;
            }
            let opts = run_options(&run)?;
            let d = decompose_with(layout.features, &cfg, &opts).map_err(|e| Failure(EXIT_INVALID, e.to_string()))?;
            finish(&run, &d, &cfg, Mode::TwoMask, stdout)
        }
        Command::BaselineLelele { run } => {
            let layout = read_layout(&run.layout)?;
            let cfg = layout.config();
            let opts = run_options(&run)?;
            let d = decompose_lelele(layout.features, &cfg, &opts).map_err(|e| Failure(EXIT_INVALID, e.to_string()))?;
            finish(&run, &d, &cfg, Mode::ThreeColor, stdout)
        }
        Command::Gen {
            kind,
            n,
            seed,
            w_min,
            s_min,
            out,
        } => {
            if n == 0 {
                return Err(Failure(EXIT_USAGE, "n must be at least 1".into()));
            }
            let cfg = Config::from_rules(w_min, s_min);
            cfg.validate().map_err(|e| Failure(EXIT_USAGE, e.to_string()))?;
            let text = emit_layout(&gen_synthetic(kind, n, seed, &cfg));
            emit(out.as_deref(), &text, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Verify { layout, result } => {
            let layout = read_layout(&layout)?;
            let result = read_result(&result)?;
            match verify(&layout, &result) {
                Ok(s) => {
                    let _ = writeln!(
                        stdout,
                        "ok: {} vertices, {} conflicts, {} stitches, cost {}",
                        s.vertices, s.conflicts, s.stitches, result.cost
                    );
                    Ok(EXIT_OK)
                }
                Err(e) => Err(Failure(EXIT_INVALID, format!("verification failed: {e}"))),
            }
        }
    }
}

fn parse_alpha(s: &str) -> Option<leleec::Cost> {
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (i64, i64) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
            (d != 0).then(|| leleec::Cost::new(n, d))?
        }
        None => parse_decimal(s)?,
    };
    (v >= leleec::Cost::from_integer(0)).then_some(v)
}

fn run_options(run: &RunArgs) -> Result<RunOptions, Failure> {
    let time_limit = match run.time_limit {
        Some(s) if s.is_finite() && s >= 0.0 => Some(Duration::from_secs_f64(s)),
        Some(s) => return Err(Failure(EXIT_USAGE, format!("--time-limit {s} is not a non-negative number of seconds"))),
        None => None,
    };
    Ok(RunOptions {
        time_limit,
        parallel: !run.sequential && leleec::parallel::PARALLEL_AVAILABLE,
    })
}

fn finish(run: &RunArgs, d: &Decomposition, cfg: &Config, mode: Mode, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let result = ResultFile::from_decomposition(d, cfg, mode);
    if let Some(p) = &run.lp_dump {
        write_file(p, &d.model.to_lp())?;
    }
    if let Some(p) = &run.svg {
        emit_svg(&d.graph, &d.endcuts, &d.result, p)?;
    }
    let json = emit_result(&result);
    if let Some(p) = &run.out {
        write_file(p, &json)?;
    }
    let report = match run.report {
        Report::Json => json,
        Report::Text => text_report(&result),
    };
    let _ = stdout.write_all(report.as_bytes());
    if run.time_limit.is_some() && !d.proven_optimal {
        eprintln!("time limit reached; result is the best found, not proven optimal");
        return Ok(EXIT_TIME_LIMIT);
    }
    Ok(EXIT_OK)
}

fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => Ok(write_file(p, text)?),
        None => {
            let _ = stdout.write_all(text.as_bytes());
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use leleec::Cost;

    #[test]
    fn alpha_accepts_decimals_and_fractions() {
        assert_eq!(parse_alpha("0.1"), Some(Cost::new(1, 10)));
        assert_eq!(parse_alpha("1/4"), Some(Cost::new(1, 4)));
        assert_eq!(parse_alpha("1/0"), None);
        assert_eq!(parse_alpha("-1"), None);
        assert_eq!(parse_alpha("x"), None);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_cli(["leleec"]), EXIT_USAGE);
        assert_eq!(run_cli(["leleec", "gen", "mesh", "3"]), EXIT_USAGE);
        assert_eq!(run_cli(["leleec", "decompose", "/nonexistent/layout.json"]), EXIT_USAGE);
    }
}
