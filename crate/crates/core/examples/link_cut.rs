//! The weighted dynamic forest on its own: roots, distances, ancestors.

use temporal_forest::dynamic_forest::DynamicForest;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut df = DynamicForest::new();
    let nodes: Vec<_> = (0..8).map(|_| df.add_node()).collect();

    // A chain 7 -> 6 -> ... -> 0 with alternating weights.
    for i in 1..nodes.len() {
        df.link(nodes[i], nodes[i - 1], (i % 2) as u32)?;
    }
    let leaf = nodes[7];
    println!("root of leaf: {}", df.root(leaf)?.index());
    println!("weighted depth of leaf: {}", df.weighted_depth(leaf)?);
    for w in 0..=3 {
        let a = df.wla(leaf, w)?.map(|h| h.index());
        println!("deepest ancestor at weight >= {w}: {a:?}");
    }

    df.cut(nodes[4])?;
    println!("after cut, root of leaf: {}", df.root(leaf)?.index());
    println!("dist(leaf, node 0): {:?}", df.dist(leaf, nodes[0])?);
    println!("lca(leaf, node 5): {:?}", df.lca(leaf, nodes[5])?.map(|h| h.index()));
    println!("counters: {:?}", df.counters());
    Ok(())
}
