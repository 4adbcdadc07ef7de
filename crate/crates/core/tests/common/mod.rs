#![allow(dead_code)]

use ktopo::algorithms::{AlgorithmKind, AlgorithmSpec};
use ktopo::generate::{random_topology, RandomTopologyParams};
use ktopo::Topology;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn all_algorithms() -> Vec<AlgorithmSpec> {
    [
        AlgorithmKind::Maxpower,
        AlgorithmKind::Ktc { k: 1.0 },
        AlgorithmKind::Ktc { k: 1.41 },
        AlgorithmKind::Ktc { k: 2.0 },
        AlgorithmKind::Xtc,
        AlgorithmKind::Gg,
        AlgorithmKind::Rng,
        AlgorithmKind::Lktc { k: 1.41, a: 1.5 },
        AlgorithmKind::Yao { cones: 4 },
        AlgorithmKind::Yao { cones: 6 },
        AlgorithmKind::Ektc { k: 1.41 },
    ]
    .into_iter()
    .map(|k| AlgorithmSpec::new(k).expect("valid parameters"))
    .collect()
}

pub fn strict_algorithms() -> Vec<AlgorithmSpec> {
    all_algorithms().into_iter().filter(|a| a.strict_dominance()).collect()
}

/// Random topology with at most `max_links` links, derived from a proptest seed.
pub fn topo(max_links: usize, tie_prone: bool) -> impl Strategy<Value = Topology> {
    any::<u64>().prop_map(move |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = RandomTopologyParams {
            max_nodes: if max_links > 12 { 12 } else { 6 },
            max_links,
            tie_prone_weights: tie_prone,
            ..RandomTopologyParams::default()
        };
        random_topology(&mut rng, &p)
    })
}
