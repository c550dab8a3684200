//! A small rooted forest under link, cut and label updates.

use temporal_forest::forest::TemporalForest;
use temporal_forest::model::{TimeValue, VertexId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut f = TemporalForest::new();
    for v in 0..6 {
        f.add_vertex(VertexId(v))?;
    }
    //        0
    //      /   \
    //     1     2
    //    / \     \
    //   3   4     5
    f.link(VertexId(1), VertexId(0), 2)?;
    f.link(VertexId(2), VertexId(0), 7)?;
    f.link(VertexId(3), VertexId(1), 1)?;
    f.link(VertexId(4), VertexId(1), 5)?;
    f.link(VertexId(5), VertexId(2), 3)?;
    f.add_label(VertexId(5), 8)?;

    let t = TimeValue::Finite(0);
    println!("ea(3 -> 5, 0) = {}", f.ea(VertexId(3), VertexId(5), t)?);
    println!("ea(4 -> 5, 0) = {}", f.ea(VertexId(4), VertexId(5), t)?);
    println!(
        "ld(3 -> 2, 7) = {}",
        f.ld(VertexId(3), VertexId(2), TimeValue::Finite(7))?
    );
    println!(
        "reach(3 -> 5 within [0, 8]) = {}",
        f.reach(VertexId(3), VertexId(5), TimeValue::Finite(0), TimeValue::Finite(8))?
    );

    f.cut(VertexId(2))?;
    println!(
        "after cutting 2: ea(3 -> 5, 0) = {}",
        f.ea(VertexId(3), VertexId(5), t)?
    );
    f.link(VertexId(2), VertexId(4), 6)?;
    println!(
        "after relinking under 4: ea(3 -> 5, 0) = {}",
        f.ea(VertexId(3), VertexId(5), t)?
    );
    Ok(())
}
