#![allow(dead_code)]

use powercast::{LineConfig, Scalar};
use proptest::prelude::*;

/// Strictly increasing rational positions built from positive gaps `k/d`.
pub fn line_strategy(min_n: usize, max_n: usize) -> impl Strategy<Value = LineConfig> {
    (
        -50i64..50,
        prop::collection::vec((1i64..60, 1i64..7), min_n.saturating_sub(1)..max_n),
    )
        .prop_map(|(start, gaps)| {
            let mut x = Scalar::from_int(start);
            let mut xs = vec![x.clone()];
            for (k, d) in gaps {
                x += Scalar::ratio(k, d);
                xs.push(x.clone());
            }
            LineConfig::new(xs).unwrap()
        })
}

pub fn line(xs: &[i64]) -> LineConfig {
    LineConfig::from_ints(xs).unwrap()
}

/// Bisection over a monotone predicate on `[0, hi]`, doubling `hi` first.
pub fn bisect(tol: &Scalar, ok: impl Fn(&Scalar) -> bool) -> (Scalar, Scalar) {
    let mut hi = Scalar::one();
    while !ok(&hi) {
        hi = hi.twice();
    }
    let mut lo = Scalar::zero();
    while &(&hi - &lo) > tol {
        let mid = (&lo + &hi).half();
        if ok(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Connected random graph: a random spanning tree plus `extra` chords, weights
/// `k/4` with `k <= 40`, and agents on `agents` distinct random nodes.
pub fn random_graph(seed: u64, nodes: usize, extra: usize, agents: usize) -> powercast::WeightedGraph {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let names = (0..nodes).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for v in 1..nodes {
        let u = rng.gen_range(0..v);
        seen.insert((u, v));
        edges.push((u, v, Scalar::ratio(rng.gen_range(1..=40), 4)));
    }
    for _ in 0..extra {
        let u = rng.gen_range(0..nodes);
        let v = rng.gen_range(0..nodes);
        let (u, v) = (u.min(v), u.max(v));
        if u != v && seen.insert((u, v)) {
            edges.push((u, v, Scalar::ratio(rng.gen_range(1..=40), 4)));
        }
    }
    let mut at: Vec<usize> = (0..nodes).collect();
    at.shuffle(&mut rng);
    at.truncate(agents.min(nodes));
    powercast::WeightedGraph::new(names, edges, at, None).unwrap()
}
