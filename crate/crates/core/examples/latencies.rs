//! Edges with travel times: labels are `(departure, arrival)` pairs.

use temporal_forest::latency::LatencyForest;
use temporal_forest::model::{TimeValue, VertexId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (a, b, c, d) = (VertexId(0), VertexId(1), VertexId(2), VertexId(3));
    let mut f = LatencyForest::new();
    for v in [a, b, c, d] {
        f.add_vertex(v)?;
    }
    // a -> b -> c, with d hanging off b.
    f.link(a, b, 1, 4)?;
    f.add_label(a, 3, 5)?;
    f.link(b, c, 5, 9)?;
    f.add_label(b, 6, 7)?;
    f.link(d, b, 2, 2)?;

    println!("ea(a -> c, 0) = {}", f.ea(a, c, TimeValue::Finite(0))?);
    println!("ea(a -> c, 2) = {}", f.ea(a, c, TimeValue::Finite(2))?);
    println!("ld(a -> c, 8) = {}", f.ld(a, c, TimeValue::Finite(8))?);
    println!("ea(c -> d, 0) = {}", f.ea(c, d, TimeValue::Finite(0))?);

    // Coming from a and reaching b at the given time, the label on b -> c
    // with the earliest arrival that can still be caught.
    println!("next hop at b after arriving at 4: {:?}", f.next_hop(a, 4)?);
    println!("next hop at b after arriving at 7: {:?}", f.next_hop(a, 7)?);

    f.delete_label(b, 6, 7)?;
    println!(
        "after removing (6, 7): ea(a -> c, 0) = {}",
        f.ea(a, c, TimeValue::Finite(0))?
    );
    Ok(())
}
