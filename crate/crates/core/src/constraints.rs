//! Graph constraints, consistency levels, and connectivity checks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::algorithms::AlgorithmSpec;
use crate::topology::{LinkId, LinkState, NodeId, Topology, TopologyError, Triangle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConsistencyLevel {
    StronglyConsistent,
    WeaklyConsistent,
    Inconsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    NoUnclassified,
    InactiveLink,
    ActiveLink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConstraintViolation {
    pub constraint: ConstraintKind,
    pub witness: LinkId,
    pub triangle: Option<Triangle>,
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.constraint {
            ConstraintKind::NoUnclassified => "no-unclassified",
            ConstraintKind::InactiveLink => "inactive-link",
            ConstraintKind::ActiveLink => "active-link",
        };
        write!(f, "{kind} link={}", self.witness)?;
        if let Some(t) = self.triangle {
            write!(f, " triangle=({},{},{})", t.ab, t.ac, t.cb)?;
        }
        Ok(())
    }
}

/// A triangle with `e` as `ab`, both other links classified and π true.
pub fn find_witness(t: &Topology, spec: &AlgorithmSpec, e: LinkId) -> Result<Option<Triangle>, TopologyError> {
    for tri in t.triangles_containing(e)? {
        if t.state(tri.ac)?.is_classified() && t.state(tri.cb)?.is_classified() && spec.holds_on(t, &tri)? {
            return Ok(Some(tri));
        }
    }
    Ok(None)
}

/// The violation `e` causes in its current state, if any.
pub fn link_violation(t: &Topology, spec: &AlgorithmSpec, e: LinkId) -> Result<Option<ConstraintViolation>, TopologyError> {
    let v = |constraint, triangle| Some(ConstraintViolation { constraint, witness: e, triangle });
    Ok(match t.state(e)? {
        LinkState::Unclassified => None,
        LinkState::Inactive => match find_witness(t, spec, e)? {
            Some(_) => None,
            None => v(ConstraintKind::InactiveLink, None),
        },
        LinkState::Active => find_witness(t, spec, e)?.and_then(|tri| v(ConstraintKind::ActiveLink, Some(tri))),
    })
}

pub fn check_no_unclassified(t: &Topology) -> Vec<ConstraintViolation> {
    t.links()
        .filter(|l| l.state == LinkState::Unclassified)
        .map(|l| ConstraintViolation { constraint: ConstraintKind::NoUnclassified, witness: l.id, triangle: None })
        .collect()
}

fn check_state(t: &Topology, spec: &AlgorithmSpec, state: LinkState) -> Vec<ConstraintViolation> {
    t.links()
        .filter(|l| l.state == state)
        .filter_map(|l| link_violation(t, spec, l.id).expect("link taken from the topology"))
        .collect()
}

pub fn check_inactive_link(t: &Topology, spec: &AlgorithmSpec) -> Vec<ConstraintViolation> {
    check_state(t, spec, LinkState::Inactive)
}

pub fn check_active_link(t: &Topology, spec: &AlgorithmSpec) -> Vec<ConstraintViolation> {
    check_state(t, spec, LinkState::Active)
}

/// Whether both state-dependent constraints hold; stops at the first violation.
pub fn is_weakly_consistent(t: &Topology, spec: &AlgorithmSpec) -> bool {
    t.links()
        .all(|l| link_violation(t, spec, l.id).expect("link taken from the topology").is_none())
}

pub fn classify_consistency(t: &Topology, spec: &AlgorithmSpec) -> ConsistencyLevel {
    if !is_weakly_consistent(t, spec) {
        ConsistencyLevel::Inconsistent
    } else if t.links().any(|l| l.state == LinkState::Unclassified) {
        ConsistencyLevel::WeaklyConsistent
    } else {
        ConsistencyLevel::StronglyConsistent
    }
}

/// Nodes reachable from each node over links accepted by `keep`.
pub fn reachability<F: Fn(LinkState) -> bool>(t: &Topology, keep: F) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
    let mut out = BTreeMap::new();
    for start in t.node_ids() {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            for e in t.outgoing(n).expect("node from topology") {
                let l = t.link(e).expect("adjacent link");
                if keep(l.state) && seen.insert(l.target) {
                    queue.push_back(l.target);
                }
            }
        }
        out.insert(start, seen);
    }
    out
}

fn connected_over<F: Fn(LinkState) -> bool>(t: &Topology, keep: F) -> bool {
    reachability(t, |_| true) == reachability(t, keep)
}

/// Every pair reachable in the full graph is reachable over active links.
pub fn is_a_connected(t: &Topology) -> bool {
    connected_over(t, |s| s == LinkState::Active)
}

/// Every pair reachable in the full graph is reachable over active or unclassified links.
pub fn is_au_connected(t: &Topology) -> bool {
    connected_over(t, |s| s != LinkState::Inactive)
}
