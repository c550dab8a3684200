//! Checks the structure against brute-force journeys and the explicit
//! successor-forest definition after every update.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use temporal_forest::forest::{TemporalForest, Twin};
use temporal_forest::model::{TimeValue, VertexId};
use temporal_forest::oracle;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut f = TemporalForest::new();
    for v in 0..n {
        f.add_vertex(VertexId(v))?;
    }
    for v in 1..n {
        f.link(VertexId(v), VertexId(rng.gen_range(0..v)), rng.gen_range(-20..20))?;
    }

    let mut checked = 0;
    for step in 0..300 {
        let v = VertexId(rng.gen_range(1..n));
        let label = rng.gen_range(-20..20);
        // Rejected updates (duplicates, last label) leave the structure untouched.
        let _ = if rng.gen_bool(0.6) {
            f.add_label(v, label)
        } else {
            f.delete_label(v, label)
        };

        for (twin, mirrored) in [(Twin::Forward, false), (Twin::Mirror, true)] {
            let labels = oracle::label_map(f.topology(), mirrored);
            let bad = oracle::validate(f.topology(), &labels, &f.snapshot(twin));
            assert!(bad.is_empty(), "step {step}: {:?}", bad[0]);
        }
        let (u, w) = (VertexId(rng.gen_range(0..n)), VertexId(rng.gen_range(0..n)));
        let t = TimeValue::Finite(rng.gen_range(-25..25));
        assert_eq!(f.ea(u, w, t)?, oracle::ea(f.topology(), u, w, t)?);
        assert_eq!(f.ld(u, w, t)?, oracle::ld(f.topology(), u, w, t)?);
        checked += 1;
    }
    println!("{checked} updates validated, queries agree with the oracle");
    Ok(())
}
