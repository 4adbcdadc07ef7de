//! Random topology generators for experiments and property checks.

use std::collections::{BTreeMap, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::events::ContextEvent;
use crate::topology::{NodeAttribute, NodeId, Topology};

#[derive(Debug, Clone)]
pub struct RandomTopologyParams {
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub max_links: usize,
    /// Nodes sit on integer grid points in `[0, side]²`.
    pub side: u32,
    /// Draw weights from `1..=6` to provoke ties instead of using distances.
    pub tie_prone_weights: bool,
    /// Chance that a chosen pair also gets its reverse link.
    pub reverse_probability: f64,
}

impl Default for RandomTopologyParams {
    fn default() -> Self {
        RandomTopologyParams {
            min_nodes: 3,
            max_nodes: 6,
            max_links: 12,
            side: 8,
            tie_prone_weights: false,
            reverse_probability: 0.5,
        }
    }
}

const ENERGIES: [f64; 6] = [0.0, 10.0, 20.0, 50.0, 100.0, 130.0];

/// Random directed topology with at most `max_links` links, all unclassified.
/// Energies come from a small palette so that lifetimes tie now and then;
/// hop counts are random in `-1..=3`.
pub fn random_topology<R: Rng>(rng: &mut R, p: &RandomTopologyParams) -> Topology {
    let mut t = Topology::new();
    let n = rng.random_range(p.min_nodes..=p.max_nodes.max(p.min_nodes));
    let mut ids = Vec::with_capacity(n);
    for _ in 0..n {
        let lat = f64::from(rng.random_range(0..=p.side));
        let lon = f64::from(rng.random_range(0..=p.side));
        let energy = ENERGIES[rng.random_range(0..ENERGIES.len())];
        let id = t.add_node(lat, lon, energy).expect("finite attributes");
        t.set_hop_count(id, rng.random_range(-1..=3)).expect("valid hop count");
        ids.push(id);
    }
    let mut pairs: Vec<(NodeId, NodeId)> = ids
        .iter()
        .flat_map(|&a| ids.iter().filter(move |&&b| b != a).map(move |&b| (a, b)))
        .collect();
    pairs.shuffle(rng);
    let budget = rng.random_range(0..=p.max_links);
    for (a, b) in pairs {
        if t.link_count() >= budget {
            break;
        }
        let add = |s: NodeId, d: NodeId, t: &mut Topology, rng: &mut R| {
            if t.link_between(s, d).is_none() && t.link_count() < budget {
                let w = if p.tie_prone_weights { f64::from(rng.random_range(1..=6u32)) } else { distance(t, s, d).max(0.5) };
                t.add_link(s, d, w).expect("fresh pair");
            }
        };
        add(a, b, &mut t, rng);
        if rng.random_bool(p.reverse_probability) {
            add(b, a, &mut t, rng);
        }
    }
    t
}

pub fn distance(t: &Topology, a: NodeId, b: NodeId) -> f64 {
    let (a, b) = (t.node(a).expect("known node"), t.node(b).expect("known node"));
    (a.latitude - b.latitude).hypot(a.longitude - b.longitude)
}

/// Disk graph: links in both directions between nodes closer than `radius`, weight = distance.
pub fn random_disk_graph<R: Rng>(rng: &mut R, n: usize, side: f64, radius: f64) -> Topology {
    let mut t = Topology::new();
    let ids: Vec<NodeId> = (0..n)
        .map(|_| {
            let energy = rng.random_range(39.0..=130.0);
            t.add_node(rng.random_range(0.0..side), rng.random_range(0.0..side), energy).expect("finite")
        })
        .collect();
    for &a in &ids {
        for &b in &ids {
            let d = distance(&t, a, b);
            if a != b && d <= radius && d > 0.0 {
                t.add_link(a, b, d).expect("fresh pair");
            }
        }
    }
    t
}

/// BFS distance of every node to `base` along links; −1 if unreachable.
pub fn hop_counts(t: &Topology, base: NodeId) -> BTreeMap<NodeId, i32> {
    let mut hops: BTreeMap<NodeId, i32> = t.node_ids().into_iter().map(|n| (n, -1)).collect();
    if !t.contains_node(base) {
        return hops;
    }
    hops.insert(base, 0);
    let mut queue = VecDeque::from([(base, 0)]);
    while let Some((n, h)) = queue.pop_front() {
        for e in t.incoming(n).expect("known node") {
            let p = t.link(e).expect("adjacent").source;
            if hops[&p] < 0 {
                hops.insert(p, h + 1);
                queue.push_back((p, h + 1));
            }
        }
    }
    hops
}

/// Sets every node's hop count to [`hop_counts`].
pub fn assign_hop_counts(t: &mut Topology, base: NodeId) {
    for (n, h) in hop_counts(t, base) {
        t.set_hop_count(n, h).expect("known node");
    }
}

/// Every node reaches every other node along links.
pub fn is_strongly_connected(t: &Topology) -> bool {
    let Some(first) = t.node_ids().first().copied() else {
        return true;
    };
    let reach = |forward: bool| {
        let mut seen = std::collections::BTreeSet::from([first]);
        let mut queue = VecDeque::from([first]);
        while let Some(n) = queue.pop_front() {
            let next: Vec<NodeId> = if forward {
                t.outgoing(n).expect("known").map(|e| t.link(e).expect("adjacent").target).collect()
            } else {
                t.incoming(n).expect("known").map(|e| t.link(e).expect("adjacent").source).collect()
            };
            for m in next {
                if seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        seen.len()
    };
    reach(true) == t.node_count() && reach(false) == t.node_count()
}

/// A random event that is valid on `t`. Falls back to `NodeAdd` when the
/// drawn kind has nothing to act on.
pub fn random_event<R: Rng>(rng: &mut R, t: &Topology, side: f64) -> ContextEvent {
    let nodes = t.node_ids();
    let links = t.link_ids();
    let node_add = |rng: &mut R| ContextEvent::NodeAdd {
        latitude: rng.random_range(0.0..side),
        longitude: rng.random_range(0.0..side),
        energy: ENERGIES[rng.random_range(0..ENERGIES.len())],
    };
    match rng.random_range(0..6) {
        0 => node_add(rng),
        1 if nodes.len() > 3 => ContextEvent::NodeRemove { id: nodes[rng.random_range(0..nodes.len())] },
        2 if nodes.len() >= 2 => {
            let free: Vec<(NodeId, NodeId)> = nodes
                .iter()
                .flat_map(|&a| nodes.iter().map(move |&b| (a, b)))
                .filter(|&(a, b)| a != b && t.link_between(a, b).is_none())
                .collect();
            match free.get(rng.random_range(0..free.len().max(1))) {
                Some(&(source, target)) => ContextEvent::LinkAdd { source, target, weight: weight(rng, t, source, target) },
                None => node_add(rng),
            }
        }
        3 if !links.is_empty() => ContextEvent::LinkRemove { id: links[rng.random_range(0..links.len())] },
        4 if !nodes.is_empty() => {
            let id = nodes[rng.random_range(0..nodes.len())];
            let (attr, value) = match rng.random_range(0..4) {
                0 => (NodeAttribute::Energy, ENERGIES[rng.random_range(0..ENERGIES.len())]),
                1 => (NodeAttribute::Latitude, rng.random_range(0.0..side)),
                2 => (NodeAttribute::Longitude, rng.random_range(0.0..side)),
                _ => (NodeAttribute::HopCount, f64::from(rng.random_range(-1..=3))),
            };
            ContextEvent::NodeAttrMod { id, attr, value }
        }
        5 if !links.is_empty() => {
            let id = links[rng.random_range(0..links.len())];
            let l = t.link(id).expect("listed link");
            ContextEvent::LinkAttrMod { id, weight: weight(rng, t, l.source, l.target) }
        }
        _ => node_add(rng),
    }
}

fn weight<R: Rng>(rng: &mut R, t: &Topology, a: NodeId, b: NodeId) -> f64 {
    if rng.random_bool(0.5) {
        f64::from(rng.random_range(1..=6u32))
    } else {
        distance(t, a, b).max(0.5)
    }
}
