//! Earliest-arrival and latest-departure queries on a single labeled path.

use temporal_forest::model::TimeValue;
use temporal_forest::path::PathStructure;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // v0 -- v1 -- v2 -- v3, each edge with its own departure times.
    let mut path = PathStructure::build(&[vec![1, 4, 9], vec![3, 5], vec![6, 12]])?;

    for t in [0, 2, 5] {
        println!("ea(v0 -> v3, depart >= {t}) = {}", path.ea(0, 3, TimeValue::Finite(t))?);
    }
    println!("ld(v0 -> v3, arrive <= 10) = {}", path.ld(0, 3, TimeValue::Finite(10))?);
    println!("ld(v3 -> v0, arrive <= 10) = {}", path.ld(3, 0, TimeValue::Finite(10))?);

    path.add_label(1, 10)?;
    path.delete_label(2, 6)?;
    println!(
        "after updates, ea(v0 -> v3, 2) = {}",
        path.ea(0, 3, TimeValue::Finite(2))?
    );
    println!("total counters: {:?}", path.total_counters());
    Ok(())
}
