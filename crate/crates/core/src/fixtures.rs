//! Small hand-built topologies reused by tests, the CLI and the acceptance suite.

use crate::topology::{Node, NodeId, Topology};

fn with_nodes(nodes: &[(u32, f64, f64, f64)]) -> Topology {
    let mut t = Topology::new();
    for &(id, latitude, longitude, energy) in nodes {
        t.insert_node(Node { id: NodeId(id), latitude, longitude, energy, hop_count: -1 })
            .expect("fixture node");
    }
    t
}

fn add_pair(t: &mut Topology, a: u32, b: u32, w: f64) {
    t.add_link(NodeId(a), NodeId(b), w).expect("fixture link");
    t.add_link(NodeId(b), NodeId(a), w).expect("fixture link");
}

/// Five nodes 3, 7, 9, 10, 11 with bidirectional links, all unclassified.
///
/// Under kTC with k = 2, the pairs 3↔11 and 9↔11 are inactive through node 10
/// and 3↔9 is active. After [`incremental_events`] it is the other way round.
pub fn incremental_example() -> Topology {
    let mut t = with_nodes(&[
        (3, 0.0, 0.0, 100.0),
        (7, 10.0, 10.0, 100.0),
        (9, 0.0, 40.0, 100.0),
        (10, 15.0, 20.0, 100.0),
        (11, 40.0, 20.0, 100.0),
    ]);
    for (a, b, w) in [(3, 7, 15.0), (3, 9, 40.0), (3, 10, 22.0), (3, 11, 50.0), (9, 10, 22.0), (9, 11, 45.0), (10, 11, 20.0)] {
        add_pair(&mut t, a, b, w);
    }
    t
}

/// Adds 7↔9 with weight 20, then removes node 10.
pub fn incremental_events() -> Vec<crate::events::ContextEvent> {
    use crate::events::ContextEvent::*;
    vec![
        LinkAdd { source: NodeId(7), target: NodeId(9), weight: 20.0 },
        LinkAdd { source: NodeId(9), target: NodeId(7), weight: 20.0 },
        NodeRemove { id: NodeId(10) },
    ]
}

/// Five nodes for the gossip depletion comparison with p = w²/100 and k = 2.
///
/// kTC keeps node 4's 30 m link to node 2, so node 4 drains 9 J per step and
/// dies after 12 steps. e-kTC drops it in favour of the route through node 1,
/// and the first death (node 3) comes at step 16.
pub fn depletion_example() -> Topology {
    let mut t = with_nodes(&[
        (1, 0.0, 0.0, 300.0),
        (2, 0.0, 20.0, 300.0),
        (3, 60.0, 10.0, 144.0),
        (4, 15.0, 10.0, 108.0),
        (5, 25.0, 10.0, 250.0),
    ]);
    for (a, b, w) in [(3, 5, 30.0), (4, 5, 10.0), (1, 5, 30.0), (1, 4, 20.0), (2, 4, 30.0), (1, 2, 20.0)] {
        add_pair(&mut t, a, b, w);
    }
    t
}
