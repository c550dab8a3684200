//! Trace runner, differential tester and benchmark reporter.

use std::fmt;
use std::io::{self, Write};
use std::time::Instant;

use crate::instrument::Counters;

use super::engine::{Engine, EngineKind, OracleEngine};
use super::gen::{generate, GenError, GenParams, LatencyMode, Regime};
use super::trace::{self, Op};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Stop at the first rejected line.
    pub strict: bool,
    /// Validate the structure after every accepted update.
    pub validate_every_op: bool,
}

/// Runs parsed ops, writing one line per answered query to `out` and
/// diagnostics to `err`. Returns the exit code.
pub fn run_ops(
    engine: &mut dyn Engine,
    ops: &[(usize, Op)],
    opts: RunOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    for (line, op) in ops {
        match engine.execute(op) {
            Ok(Some(answer)) => writeln!(out, "{answer}")?,
            Ok(None) => {
                if opts.validate_every_op {
                    let report = engine.validate();
                    if !report.is_empty() {
                        for m in &report {
                            writeln!(err, "line {line}: validation: {m}")?;
                        }
                        return Ok(EXIT_FAILURE);
                    }
                }
            }
            Err(e) => {
                writeln!(err, "line {line}: rejected `{op}`: {e}")?;
                if opts.strict {
                    return Ok(EXIT_FAILURE);
                }
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses and runs a trace. Parse errors produce no output and exit code 2.
pub fn run_trace(
    kind: EngineKind,
    text: &str,
    opts: RunOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    let ops = match trace::parse(text) {
        Ok(ops) => ops,
        Err(e) => {
            writeln!(err, "parse error: {e}")?;
            return Ok(EXIT_PARSE);
        }
    };
    let mut engine = kind.build();
    run_ops(engine.as_mut(), &ops, opts, out, err)
}

/// First point where an engine and the oracle disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Divergence {
    /// Different answers, or one side rejected the op and the other did not.
    Answer {
        index: usize,
        op: String,
        engine: String,
        oracle: String,
    },
    /// The engine's structure failed validation after an update.
    Validation {
        index: usize,
        op: String,
        report: Vec<String>,
    },
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Answer {
                index,
                op,
                engine,
                oracle,
            } => {
                write!(f, "op {index} `{op}`: engine {engine}, oracle {oracle}")
            }
            Divergence::Validation { index, op, report } => {
                write!(f, "op {index} `{op}`: validation failed: {}", report.join("; "))
            }
        }
    }
}

fn outcome(r: &crate::error::Result<Option<String>>) -> String {
    match r {
        Ok(Some(a)) => a.clone(),
        Ok(None) => "accepted".to_string(),
        Err(e) => format!("rejected ({e})"),
    }
}

/// Runs `engine` and the oracle in lockstep, validating after every update.
/// Returns the number of ops run and the first divergence, if any.
pub fn difftest_ops(engine: &mut dyn Engine, ops: &[Op]) -> (usize, Option<Divergence>) {
    let mut oracle = OracleEngine::default();
    for (index, op) in ops.iter().enumerate() {
        let got = engine.execute(op);
        let want = oracle.execute(op);
        if got.is_ok() != want.is_ok() || (got.is_ok() && got != want) {
            return (
                index + 1,
                Some(Divergence::Answer {
                    index,
                    op: op.to_string(),
                    engine: outcome(&got),
                    oracle: outcome(&want),
                }),
            );
        }
        if !op.is_query() && got.is_ok() {
            let report = engine.validate();
            if !report.is_empty() {
                return (
                    index + 1,
                    Some(Divergence::Validation {
                        index,
                        op: op.to_string(),
                        report,
                    }),
                );
            }
        }
    }
    (ops.len(), None)
}

#[derive(Clone, Debug)]
pub struct DiffReport {
    pub seed: u64,
    pub ops: usize,
    pub divergence: Option<Divergence>,
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.divergence {
            None => write!(f, "seed {}: {} ops, no divergence", self.seed, self.ops),
            Some(d) => write!(f, "seed {}: divergence at {d}", self.seed),
        }
    }
}

pub fn difftest(kind: EngineKind, seed: u64, params: &GenParams) -> Result<DiffReport, GenError> {
    let ops = generate(seed, params)?;
    let mut engine = kind.build();
    let (ops, divergence) = difftest_ops(engine.as_mut(), &ops);
    Ok(DiffReport { seed, ops, divergence })
}

pub const BENCH_HEADER: &str = "engine,op,count,total_ns,p50_ns,p99_ns,fixparent_calls,rewires";

#[derive(Clone, Debug, Default)]
struct OpStats {
    nanos: Vec<u64>,
    fix_parent: u64,
    rewires: u64,
}

fn percentile(sorted: &[u64], q: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i]
}

fn row(engine: &str, op: &str, stats: &mut OpStats) -> String {
    stats.nanos.sort_unstable();
    format!(
        "{engine},{op},{},{},{},{},{},{}",
        stats.nanos.len(),
        stats.nanos.iter().sum::<u64>(),
        percentile(&stats.nanos, 0.5),
        percentile(&stats.nanos, 0.99),
        stats.fix_parent,
        stats.rewires
    )
}

/// Counter growth; lazily rebuilt engines restart their counters, in which
/// case the new totals are the growth.
fn delta(before: Counters, after: Counters) -> Counters {
    let f = |b: u64, a: u64| if a >= b { a - b } else { a };
    Counters {
        fix_parent: f(before.fix_parent, after.fix_parent),
        rewires: f(before.rewires, after.rewires),
        primitives: f(before.primitives, after.primitives),
    }
}

const OP_NAMES: [&str; 9] = ["addv", "delv", "link", "cut", "addl", "dell", "ea", "ld", "reach"];

/// Times every op of `ops` on `engine`; rows are grouped by op name.
pub fn bench_ops(engine_name: &str, engine: &mut dyn Engine, ops: &[Op]) -> Vec<String> {
    let mut stats: Vec<OpStats> = vec![OpStats::default(); OP_NAMES.len()];
    for op in ops {
        let before = engine.counters();
        let start = Instant::now();
        let _ = engine.execute(op);
        let nanos = start.elapsed().as_nanos() as u64;
        let d = delta(before, engine.counters());
        let s = &mut stats[OP_NAMES.iter().position(|&n| n == op.name()).expect("known op")];
        s.nanos.push(nanos);
        s.fix_parent += d.fix_parent;
        s.rewires += d.rewires;
    }
    OP_NAMES
        .iter()
        .zip(stats.iter_mut())
        .filter(|(_, s)| !s.nanos.is_empty())
        .map(|(name, s)| row(engine_name, name, s))
        .collect()
}

/// Counters accumulated by the updates of one amortization run.
#[derive(Clone, Copy, Debug)]
pub struct SeriesPoint {
    pub labels: usize,
    pub nanos: u64,
    pub counters: Counters,
}

/// Rewires of the latency structure on a pure regime with `m` label
/// insertions (and, when decremental, `m` teardown steps; only the teardown
/// is counted).
pub fn amortization_point(seed: u64, m: usize, max_latency: i64, regime: Regime) -> SeriesPoint {
    let params = GenParams {
        n: (m as f64).sqrt().ceil().max(2.0) as u32,
        ops: m,
        labels: (0, 4 * m as i64),
        latency: LatencyMode::Random(max_latency),
        regime,
        query_ratio: 0.0,
    };
    let ops = generate(seed, &params).expect("valid parameters");
    let split = match regime {
        Regime::Decremental => ops
            .iter()
            .position(|op| matches!(op.name(), "dell" | "cut" | "delv"))
            .unwrap_or(ops.len()),
        _ => 0,
    };
    let mut engine = EngineKind::Latency.build();
    for op in &ops[..split] {
        engine.execute(op).expect("generated ops are valid");
    }
    let before = engine.counters();
    let start = Instant::now();
    let mut labels = 0;
    for op in &ops[split..] {
        engine.execute(op).expect("generated ops are valid");
        if matches!(op.name(), "addl" | "link" | "dell" | "cut") {
            labels += 1;
        }
    }
    SeriesPoint {
        labels,
        nanos: start.elapsed().as_nanos() as u64,
        counters: engine.counters() - before,
    }
}

/// `H_m`.
pub fn harmonic(m: usize) -> f64 {
    (1..=m).map(|k| 1.0 / k as f64).sum()
}

/// Amortization rows: one per `(regime, m)`, with `count` the number of
/// label updates and the op column naming the series.
pub fn amortization_rows(seed: u64, exponents: std::ops::RangeInclusive<u32>, max_latency: i64) -> Vec<String> {
    let mut rows = Vec::new();
    for (regime, name) in [
        (Regime::Incremental, "incremental"),
        (Regime::Decremental, "decremental"),
    ] {
        for e in exponents.clone() {
            let p = amortization_point(seed, 1 << e, max_latency, regime);
            rows.push(format!(
                "latency,{name}_m{},{},{},0,0,{},{}",
                1usize << e,
                p.labels,
                p.nanos,
                p.counters.fix_parent,
                p.counters.rewires
            ));
        }
    }
    rows
}

/// Header, per-op rows for each engine on one generated workload, then the
/// latency amortization series.
pub fn bench(
    engines: &[EngineKind],
    seed: u64,
    params: &GenParams,
    series: Option<std::ops::RangeInclusive<u32>>,
) -> Result<Vec<String>, GenError> {
    let ops = generate(seed, params)?;
    let mut out = vec![BENCH_HEADER.to_string()];
    for &kind in engines {
        let mut engine = kind.build();
        out.extend(bench_ops(kind.name(), engine.as_mut(), &ops));
    }
    if let Some(exps) = series {
        let max_latency = match params.latency {
            LatencyMode::Random(d) | LatencyMode::Uniform(d) => d.max(1),
            LatencyMode::None => 10,
        };
        out.extend(amortization_rows(seed, exps, max_latency));
    }
    Ok(out)
}
