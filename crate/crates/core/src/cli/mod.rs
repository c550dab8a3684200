//! Command-line front end: trace runner, generator, differential tester and
//! benchmark reporter.
//!
//! Exit codes: 0 on success, 1 on a divergence, a validation failure or a
//! rejected line under `--strict`, 2 on a parse or usage error.

mod engine;
mod gen;
mod run;
mod trace;

use std::ffi::OsString;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use engine::{supports_latency, Engine, EngineKind, HldEngine, OracleEngine, PathEngine};
pub use gen::{generate, GenError, GenParams, LatencyMode, Regime};
pub use run::{
    amortization_point, bench, bench_ops, difftest, difftest_ops, harmonic, run_ops, run_trace, DiffReport, Divergence,
    RunOptions, SeriesPoint, BENCH_HEADER, EXIT_FAILURE, EXIT_OK, EXIT_PARSE,
};
pub use trace::{parse, render, Op, ParseError};

#[derive(Debug, Parser)]
#[command(
    name = "temporal-forest",
    version,
    about = "Dynamic temporal forests: traces, workloads, differential tests and benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a trace and print one line per query.
    Run {
        #[arg(long, value_enum, default_value = "forest")]
        engine: EngineKind,
        /// Abort on the first rejected line.
        #[arg(long)]
        strict: bool,
        /// Validate the structure after every update.
        #[arg(long)]
        validate_every_op: bool,
        /// Trace file; standard input when absent.
        trace: Option<PathBuf>,
    },
    /// Print a generated trace.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        params: GenArgs,
    },
    /// Run an engine against the oracle on generated traces.
    Difftest {
        #[arg(long, value_enum, default_value = "forest")]
        engine: EngineKind,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of consecutive seeds.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[command(flatten)]
        params: GenArgs,
    },
    /// Print per-op timings and counters as CSV.
    Bench {
        /// Engines to time, comma separated.
        #[arg(long, value_enum, value_delimiter = ',', default_value = "forest,latency,hld,oracle")]
        engines: Vec<EngineKind>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exponent range `A..=B` of the latency amortization series.
        #[arg(long, value_parser = parse_range, default_value = "10:13")]
        series: (u32, u32),
        /// Skip the amortization series.
        #[arg(long)]
        no_series: bool,
        #[command(flatten)]
        params: GenArgs,
    },
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Number of vertices.
    #[arg(long, default_value_t = 16)]
    n: u32,
    /// Number of generated operations.
    #[arg(long, default_value_t = 256)]
    ops: usize,
    /// Inclusive departure range `LO:HI`.
    #[arg(long, value_parser = parse_pair, default_value = "-50:50", allow_hyphen_values = true)]
    labels: (i64, i64),
    /// `none`, `uniform:D` or `random:MAX`.
    #[arg(long, default_value = "none")]
    latency: LatencyMode,
    #[arg(long, value_enum, default_value = "mixed")]
    regime: Regime,
    /// Fraction of operations that are queries.
    #[arg(long, default_value_t = 0.3)]
    query_ratio: f64,
}

impl From<&GenArgs> for GenParams {
    fn from(a: &GenArgs) -> Self {
        GenParams {
            n: a.n,
            ops: a.ops,
            labels: a.labels,
            latency: a.latency,
            regime: a.regime,
            query_ratio: a.query_ratio,
        }
    }
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let num = |x: &str| x.parse::<i64>().map_err(|_| format!("invalid integer `{x}`"));
    Ok((num(a)?, num(b)?))
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = parse_pair(s)?;
    let a = u32::try_from(a).map_err(|_| "exponent out of range".to_string())?;
    let b = u32::try_from(b).map_err(|_| "exponent out of range".to_string())?;
    if a > b || b > 24 {
        return Err(format!("invalid exponent range `{s}`"));
    }
    Ok((a, b))
}

fn execute(cli: Cli, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    match cli.command {
        Command::Run {
            engine,
            strict,
            validate_every_op,
            trace,
        } => {
            let text = match trace {
                Some(p) => match std::fs::read_to_string(&p) {
                    Ok(t) => t,
                    Err(e) => {
                        writeln!(err, "cannot read {}: {e}", p.display())?;
                        return Ok(EXIT_PARSE);
                    }
                },
                None => {
                    let mut t = String::new();
                    stdin.read_to_string(&mut t)?;
                    t
                }
            };
            let opts = RunOptions {
                strict,
                validate_every_op,
            };
            run_trace(engine, &text, opts, out, err)
        }
        Command::Gen { seed, params } => match generate(seed, &(&params).into()) {
            Ok(ops) => {
                out.write_all(render(&ops).as_bytes())?;
                Ok(EXIT_OK)
            }
            Err(e) => {
                writeln!(err, "{e}")?;
                Ok(EXIT_PARSE)
            }
        },
        Command::Difftest {
            engine,
            seed,
            seeds,
            params,
        } => {
            let params: GenParams = (&params).into();
            let mut code = EXIT_OK;
            for s in seed..seed.saturating_add(seeds) {
                match difftest(engine, s, &params) {
                    Ok(r) => {
                        writeln!(out, "{r}")?;
                        if r.divergence.is_some() {
                            code = EXIT_FAILURE;
                        }
                    }
                    Err(e) => {
                        writeln!(err, "{e}")?;
                        return Ok(EXIT_PARSE);
                    }
                }
            }
            Ok(code)
        }
        Command::Bench {
            engines,
            seed,
            series,
            no_series,
            params,
        } => {
            let range = (!no_series).then_some(series.0..=series.1);
            match bench(&engines, seed, &(&params).into(), range) {
                Ok(rows) => {
                    for r in rows {
                        writeln!(out, "{r}")?;
                    }
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    writeln!(err, "{e}")?;
                    Ok(EXIT_PARSE)
                }
            }
        }
    }
}

/// Entry point of the binary: parses `args` and runs the command.
pub fn main_with<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match execute(cli, stdin, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "i/o error: {e}");
            EXIT_FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], input: &str) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut stdin = input.as_bytes();
        let code = main_with(
            std::iter::once("temporal-forest").chain(args.iter().copied()),
            &mut stdin,
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn run_from_stdin() {
        let (code, out, _) = call(
            &["run", "--engine", "latency"],
            "addv 0\naddv 1\nlink 1 0 3 4\nea 1 0 1\n",
        );
        assert_eq!((code, out.as_str()), (0, "4\n"));
        let (code, _, err) = call(&["run"], "addv x\n");
        assert_eq!(code, 2);
        assert!(err.contains("line 1"));
    }

    #[test]
    fn gen_is_deterministic() {
        let args = [
            "gen",
            "--seed",
            "9",
            "--labels",
            "-5:5",
            "--latency",
            "random:3",
            "--ops",
            "50",
        ];
        let (code, a, _) = call(&args, "");
        assert_eq!(code, 0);
        assert_eq!(a, call(&args, "").1);
        assert!(parse(&a).is_ok());
    }

    #[test]
    fn difftest_and_bench_commands() {
        let (code, out, _) = call(
            &[
                "difftest",
                "--engine",
                "latency",
                "--seeds",
                "3",
                "--latency",
                "random:4",
            ],
            "",
        );
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 3);
        let (code, out, _) = call(&["bench", "--engines", "forest", "--no-series", "--ops", "50"], "");
        assert_eq!(code, 0);
        assert_eq!(out.lines().next(), Some(BENCH_HEADER));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["run", "--engine", "nope"], "").0, 2);
        assert_eq!(call(&["gen", "--n", "0"], "").0, 2);
        assert_eq!(call(&["--help"], "").0, 0);
    }
}
