//! Static-topology queries through a heavy-path decomposition.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use temporal_forest::hld::HldForest;
use temporal_forest::model::{ForestTopology, Label, TimeValue, VertexId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 1 << 12;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let edges: Vec<_> = (1..n)
        .map(|v| {
            let departures: BTreeSet<i64> = (0..3).map(|_| rng.gen_range(0..10_000)).collect();
            let labels = departures.into_iter().map(|t| Label::instant(t).unwrap()).collect();
            (VertexId(v), VertexId(rng.gen_range(0..v)), labels)
        })
        .collect();
    let topo = ForestTopology::from_edges((0..n).map(VertexId), edges)?;
    let mut hld = HldForest::build(&topo)?;
    println!("{n} vertices split into {} heavy paths", hld.path_count());

    let mut worst = 0;
    let mut reachable = None;
    for _ in 0..1000 {
        let (u, v) = (VertexId(rng.gen_range(0..n)), VertexId(rng.gen_range(0..n)));
        if u != v && hld.ea(u, v, TimeValue::Finite(0))?.is_finite() {
            reachable.get_or_insert((u, v));
        }
        worst = worst.max(hld.last_query_paths());
    }
    println!("most heavy paths touched by one query: {worst}");

    if let Some((u, v)) = reachable {
        println!("lca({u}, {v}) = {:?}", hld.lca(u, v));
        println!("ea({u} -> {v}, 0) = {}", hld.ea(u, v, TimeValue::Finite(0))?);
        println!("ld({u} -> {v}, 10000) = {}", hld.ld(u, v, TimeValue::Finite(10_000))?);
        let first = hld.topology().labels(u).iter().next().map(|l| l.dep);
        if let (Some(dep), false) = (first, hld.topology().is_root(u)) {
            if hld.topology().labels(u).len() > 1 {
                hld.delete_label(u, dep)?;
                println!(
                    "without departure {dep} above {u}: ea = {}",
                    hld.ea(u, v, TimeValue::Finite(0))?
                );
            }
        }
    }
    Ok(())
}
