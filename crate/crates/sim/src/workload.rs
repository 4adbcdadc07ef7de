//! Energy drain caused by the configured traffic pattern.
//!
//! Routes follow active links only. Among paths with the fewest hops, the one
//! with the lowest summed transmission power wins; remaining ties go to the
//! smaller predecessor id.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use ktopo::energy::max_active_power;
use ktopo::{LinkState, NodeId, PowerModel, Topology};
use rand::Rng;

use crate::config::WorkloadKind;

/// One transmission: the sender and the power it spends.
pub type Hop = (NodeId, f64);

/// Shortest-path trees over active links, cached per source.
#[derive(Debug, Default)]
pub struct Router {
    trees: HashMap<NodeId, BTreeMap<NodeId, (NodeId, f64)>>,
}

impl Router {
    pub fn invalidate(&mut self) {
        self.trees.clear();
    }

    /// Transmissions along the route from `src` to `dst`, or `None` if unreachable.
    pub fn route(&mut self, t: &Topology, model: &PowerModel, dead: &BTreeSet<NodeId>, src: NodeId, dst: NodeId) -> Option<Vec<Hop>> {
        let tree = self.trees.entry(src).or_insert_with(|| shortest_path_tree(t, model, dead, src));
        let mut hops = Vec::new();
        let mut cur = dst;
        while cur != src {
            let &(pred, p) = tree.get(&cur)?;
            hops.push((pred, p));
            cur = pred;
        }
        hops.reverse();
        Some(hops)
    }
}

/// Predecessor and last-hop power for every node reachable from `src`.
fn shortest_path_tree(t: &Topology, model: &PowerModel, dead: &BTreeSet<NodeId>, src: NodeId) -> BTreeMap<NodeId, (NodeId, f64)> {
    let mut tree = BTreeMap::new();
    if dead.contains(&src) || !t.contains_node(src) {
        return tree;
    }
    let mut cost: BTreeMap<NodeId, f64> = BTreeMap::from([(src, 0.0)]);
    let mut frontier = vec![src];
    while !frontier.is_empty() {
        let mut next: BTreeMap<NodeId, (f64, NodeId, f64)> = BTreeMap::new();
        for &u in &frontier {
            for e in t.outgoing(u).expect("known node") {
                let l = t.link(e).expect("adjacent");
                if l.state != LinkState::Active || dead.contains(&l.target) || cost.contains_key(&l.target) {
                    continue;
                }
                let p = model.power_for_weight(l.weight);
                let c = cost[&u] + p;
                let better = next.get(&l.target).is_none_or(|&(best, pred, _)| c < best || (c == best && u < pred));
                if better {
                    next.insert(l.target, (c, u, p));
                }
            }
        }
        frontier = next.keys().copied().collect();
        for (v, (c, pred, p)) in next {
            cost.insert(v, c);
            tree.insert(v, (pred, p));
        }
    }
    tree
}

/// Charges one message interval of traffic to `energy`. Returns the nodes that ran dry.
#[allow(clippy::too_many_arguments)]
pub fn drain<R: Rng>(
    kind: WorkloadKind,
    t: &Topology,
    model: &PowerModel,
    airtime: f64,
    base: Option<NodeId>,
    energy: &mut BTreeMap<NodeId, f64>,
    router: &mut Router,
    rng: &mut R,
) -> Vec<NodeId> {
    let mut dead: BTreeSet<NodeId> = energy.iter().filter(|(_, &e)| e <= 0.0).map(|(&n, _)| n).collect();
    let mut died = Vec::new();
    let senders: Vec<NodeId> = energy.keys().copied().filter(|n| !dead.contains(n)).collect();
    for src in senders {
        if dead.contains(&src) {
            continue;
        }
        let hops = match kind {
            WorkloadKind::Gossip => {
                let p = max_active_power(t, model, src).unwrap_or(0.0);
                if p > 0.0 { vec![(src, p)] } else { Vec::new() }
            }
            WorkloadKind::Messaging => {
                let alive: Vec<NodeId> = energy.keys().copied().filter(|n| *n != src && !dead.contains(n)).collect();
                if alive.is_empty() {
                    continue;
                }
                let dst = alive[rng.random_range(0..alive.len())];
                router.route(t, model, &dead, src, dst).unwrap_or_default()
            }
            WorkloadKind::Collection => match base {
                Some(b) if b != src && !dead.contains(&b) => router.route(t, model, &dead, src, b).unwrap_or_default(),
                _ => Vec::new(),
            },
        };
        for (sender, p) in hops {
            let e = energy.get_mut(&sender).expect("alive sender");
            *e = (*e - p * airtime).max(0.0);
            if *e == 0.0 && dead.insert(sender) {
                died.push(sender);
                router.invalidate();
            }
        }
    }
    died
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line() -> (Topology, Vec<NodeId>) {
        // 0 -> 1 -> 2 plus a direct long link 0 -> 2 and a detour 0 -> 3 -> 2.
        let mut t = Topology::new();
        let n: Vec<NodeId> = (0..4).map(|i| t.add_node(0.0, f64::from(i), 100.0).unwrap()).collect();
        for (a, b, w) in [(0, 1, 10.0), (1, 2, 10.0), (0, 3, 5.0), (3, 2, 5.0)] {
            let e = t.add_link(n[a], n[b], w).unwrap();
            t.set_state(e, LinkState::Active).unwrap();
        }
        let long = t.add_link(n[0], n[2], 30.0).unwrap();
        t.set_state(long, LinkState::Inactive).unwrap();
        (t, n)
    }

    #[test]
    fn routes_prefer_fewest_hops_then_power() {
        let (t, n) = line();
        let model = PowerModel::new(1.0).unwrap();
        let mut r = Router::default();
        let route = r.route(&t, &model, &BTreeSet::new(), n[0], n[2]).unwrap();
        assert_eq!(route, vec![(n[0], 25.0), (n[3], 25.0)]);
        assert!(r.route(&t, &model, &BTreeSet::new(), n[2], n[0]).is_none());
        r.invalidate();
        let dead = BTreeSet::from([n[3]]);
        assert_eq!(r.route(&t, &model, &dead, n[0], n[2]).unwrap(), vec![(n[0], 100.0), (n[1], 100.0)]);
    }

    #[test]
    fn gossip_charges_largest_active_power() {
        let (t, n) = line();
        let model = PowerModel::new(0.01).unwrap();
        let mut energy: BTreeMap<NodeId, f64> = n.iter().map(|&i| (i, 10.0)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        drain(WorkloadKind::Gossip, &t, &model, 1.0, None, &mut energy, &mut Router::default(), &mut rng);
        assert_eq!(energy[&n[0]], 9.0);
        assert_eq!(energy[&n[2]], 10.0);
    }

    #[test]
    fn collection_drains_along_the_route() {
        let (t, n) = line();
        let model = PowerModel::new(0.004).unwrap();
        let mut energy: BTreeMap<NodeId, f64> = n.iter().map(|&i| (i, 10.0)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let died = drain(WorkloadKind::Collection, &t, &model, 1.0, Some(n[2]), &mut energy, &mut Router::default(), &mut rng);
        assert!(died.is_empty());
        // 0 -> 3 -> 2 costs 0.1 per hop, 1 -> 2 costs 0.4, 3 relays once and sends once.
        for (i, want) in [(0, 9.9), (1, 9.6), (2, 10.0), (3, 9.8)] {
            assert!((energy[&n[i]] - want).abs() < 1e-12, "node {i}: {}", energy[&n[i]]);
        }
    }

    #[test]
    fn empty_battery_stops_relaying() {
        let (t, n) = line();
        let model = PowerModel::new(0.04).unwrap();
        let mut energy: BTreeMap<NodeId, f64> = n.iter().map(|&i| (i, 10.0)).collect();
        energy.insert(n[1], 100.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let died = drain(WorkloadKind::Collection, &t, &model, 10.0, Some(n[2]), &mut energy, &mut Router::default(), &mut rng);
        // Node 0's message drains both 0 and 3; nobody pays past zero.
        assert_eq!(died, vec![n[0], n[3]]);
        assert!(energy.values().all(|&e| e >= 0.0));
        assert!((energy[&n[1]] - 60.0).abs() < 1e-12);
    }
}
