//! Generates a workload, runs it on every engine and compares the outputs.

use temporal_forest::cli::{generate, render, run_trace, EngineKind, GenParams, LatencyMode, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = GenParams {
        n: 20,
        ops: 400,
        latency: LatencyMode::None,
        ..GenParams::default()
    };
    let trace = render(&generate(7, &params)?);
    println!("trace head:");
    for line in trace.lines().take(25).skip(20) {
        println!("  {line}");
    }

    let mut reference = None;
    for kind in [
        EngineKind::Oracle,
        EngineKind::Forest,
        EngineKind::Latency,
        EngineKind::Hld,
    ] {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let opts = RunOptions {
            validate_every_op: true,
            ..RunOptions::default()
        };
        let code = run_trace(kind, &trace, opts, &mut out, &mut err)?;
        let answers = String::from_utf8(out)?;
        let same = reference.get_or_insert_with(|| answers.clone()) == &answers;
        println!(
            "{:>8}: exit {code}, {} answers, {} rejected lines, matches oracle: {same}",
            kind.name(),
            answers.lines().count(),
            String::from_utf8(err)?.lines().count()
        );
    }
    Ok(())
}
