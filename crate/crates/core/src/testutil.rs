use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{synth_bipartite, BipartiteGraph, SynthParams, WeightRange};

/// Random graph with sides in `[lo, hi]`, average U-degree in `[2, 20]`
/// (capped by |V|), weights uniform in (0, 10].
pub(crate) fn random_graph(lo: usize, hi: usize, seed: u64) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let nu = rng.gen_range(lo..=hi);
    let nv = rng.gen_range(lo..=hi);
    let avg = rng.gen_range(2.0..=20.0);
    let m = ((nu as f64 * avg) as usize).clamp(nu.max(nv), nu * nv);
    let skew = if rng.gen_bool(0.5) { Some(rng.gen_range(0.2..1.2)) } else { None };
    synth_bipartite(
        &SynthParams {
            u_count: nu,
            v_count: nv,
            edge_count: m,
            weights: WeightRange::new(0.0, 10.0).unwrap(),
            degree_skew: skew,
        },
        seed,
    )
    .unwrap()
}
