//! Incremental TC execution and two reference oracles.
//!
//! [`run_tc`] repeatedly picks an unclassified link `e` and classifies it:
//! inactive if it has a witness triangle, active otherwise. Every active link
//! that thereby ends up in a fully classified π-triangle is then repaired.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algorithms::{AlgorithmSpec, OrderKey};
use crate::constraints::{self, find_witness, ConsistencyLevel, ConstraintViolation};
use crate::events::unclassify_link;
use crate::topology::{LinkId, LinkState, Topology, TopologyError};

pub const BRUTE_FORCE_MAX_LINKS: usize = 16;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("input topology is not weakly consistent ({} violations, first: {})", .0.len(), .0[0])]
    NotWeaklyConsistent(Vec<ConstraintViolation>),
    #[error("{0} has no strict dominance; the sequential oracle does not apply")]
    RequiresStrictDominance(String),
    #[error("{count} links exceed the brute-force limit of {max}")]
    TooManyLinks { count: usize, max: usize },
    #[error("no fixpoint after {0} iterations")]
    IterationLimit(usize),
    #[error("unclassified link {0} is missing from the dirty set")]
    DirtySetIncomplete(LinkId),
    #[error("run ended with {0} unclassified links")]
    Incomplete(usize),
    #[error("witness triangle of link {0} uses a link that is not smaller")]
    DominanceBreach(LinkId),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// Order in which unclassified links are picked.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SelectionOrder {
    /// Smallest link under the algorithm's order first.
    #[default]
    Ascending,
    /// A seeded random permutation.
    Shuffled(u64),
    /// Listed links first, in list order; the rest ascending.
    Explicit(Vec<LinkId>),
}

#[derive(Debug, Clone)]
pub struct TcOptions {
    pub order: SelectionOrder,
    /// Validates weak consistency (and, for incremental runs, the dirty set) before starting.
    pub check_precondition: bool,
    /// Upper bound on main-loop iterations; `None` derives one from the link count.
    pub max_iterations: Option<usize>,
}

impl Default for TcOptions {
    fn default() -> Self {
        TcOptions { order: SelectionOrder::Ascending, check_precondition: cfg!(debug_assertions), max_iterations: None }
    }
}

impl TcOptions {
    pub fn with_order(order: SelectionOrder) -> Self {
        TcOptions { order, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcRunReport {
    pub lsm_count: u64,
    /// Links classified during the run.
    pub links_processed: usize,
    /// Links unclassified while making room for a classification, cascades included.
    pub nac_unclassifications: usize,
    /// Active links switched straight to inactive (algorithms without strict dominance).
    pub nac_inactivations: usize,
    /// Unclassified links at the start of the run that were handed to the loop.
    pub initial_unclassified: usize,
    /// Executions of the pick step, including the final one that finds nothing.
    pub loop_count: usize,
    /// Iterations in which a link not larger than the picked one changed state as well,
    /// i.e. the state sequence sorted by link order failed to grow in the termination order.
    pub order_violations: usize,
    pub wall_time: Duration,
    pub final_consistency: ConsistencyLevel,
}

impl TcRunReport {
    pub fn total_unclassifications(&self) -> usize {
        self.initial_unclassified + self.nac_unclassifications
    }

    pub fn loop_bound_holds(&self) -> bool {
        self.loop_count <= 1 + self.total_unclassifications()
    }
}

pub fn run_tc(t: &mut Topology, spec: &AlgorithmSpec) -> Result<TcRunReport, EngineError> {
    run_tc_with(t, spec, &TcOptions::default())
}

pub fn run_tc_with(t: &mut Topology, spec: &AlgorithmSpec, opts: &TcOptions) -> Result<TcRunReport, EngineError> {
    let seeds: Vec<LinkId> = t.links().filter(|l| l.state == LinkState::Unclassified).map(|l| l.id).collect();
    execute(t, spec, seeds, opts)
}

/// Runs TC starting only from `dirty`. Every unclassified link must be in `dirty`.
pub fn run_tc_incremental(t: &mut Topology, spec: &AlgorithmSpec, dirty: &[LinkId]) -> Result<TcRunReport, EngineError> {
    run_tc_incremental_with(t, spec, dirty, &TcOptions::default())
}

pub fn run_tc_incremental_with(
    t: &mut Topology,
    spec: &AlgorithmSpec,
    dirty: &[LinkId],
    opts: &TcOptions,
) -> Result<TcRunReport, EngineError> {
    let dirty: HashSet<LinkId> = dirty.iter().copied().filter(|&e| t.contains_link(e)).collect();
    if opts.check_precondition {
        if let Some(l) = t.links().find(|l| l.state == LinkState::Unclassified && !dirty.contains(&l.id)) {
            return Err(EngineError::DirtySetIncomplete(l.id));
        }
    }
    let mut seeds: Vec<LinkId> = dirty
        .into_iter()
        .filter(|&e| t.state(e) == Ok(LinkState::Unclassified))
        .collect();
    seeds.sort();
    execute(t, spec, seeds, opts)
}

fn priorities(t: &Topology, spec: &AlgorithmSpec, order: &SelectionOrder) -> Result<HashMap<LinkId, (u64, OrderKey)>, TopologyError> {
    let mut out = HashMap::with_capacity(t.link_count());
    let mut rng = match order {
        SelectionOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let listed: HashMap<LinkId, u64> = match order {
        SelectionOrder::Explicit(list) => list.iter().enumerate().map(|(i, &e)| (e, i as u64)).collect(),
        _ => HashMap::new(),
    };
    for e in t.link_ids() {
        let key = spec.order_key(t, e)?;
        let primary = match order {
            SelectionOrder::Ascending => 0,
            SelectionOrder::Shuffled(_) => rng.as_mut().expect("seeded above").random(),
            SelectionOrder::Explicit(_) => listed.get(&e).copied().unwrap_or(u64::MAX),
        };
        out.insert(e, (primary, key));
    }
    Ok(out)
}

fn execute(t: &mut Topology, spec: &AlgorithmSpec, seeds: Vec<LinkId>, opts: &TcOptions) -> Result<TcRunReport, EngineError> {
    let started = Instant::now();
    let lsm_before = t.lsm_count();
    if opts.check_precondition {
        let mut v = constraints::check_inactive_link(t, spec);
        v.extend(constraints::check_active_link(t, spec));
        if !v.is_empty() {
            return Err(EngineError::NotWeaklyConsistent(v));
        }
    }
    let prio = priorities(t, spec, &opts.order)?;
    let limit = opts
        .max_iterations
        .unwrap_or_else(|| (t.link_count() + 1).saturating_mul(t.link_count() + 1).saturating_mul(4));

    let mut heap: BinaryHeap<Reverse<((u64, OrderKey), LinkId)>> =
        seeds.iter().map(|&e| Reverse((prio[&e], e))).collect();
    let mut report = TcRunReport {
        lsm_count: 0,
        links_processed: 0,
        nac_unclassifications: 0,
        nac_inactivations: 0,
        initial_unclassified: seeds.len(),
        loop_count: 0,
        order_violations: 0,
        wall_time: Duration::ZERO,
        final_consistency: ConsistencyLevel::WeaklyConsistent,
    };

    loop {
        report.loop_count += 1;
        if report.loop_count > limit {
            return Err(EngineError::IterationLimit(limit));
        }
        let mut picked = None;
        while let Some(Reverse((_, e))) = heap.pop() {
            if t.state(e)? == LinkState::Unclassified {
                picked = Some(e);
                break;
            }
        }
        let Some(e) = picked else { break };
        let e_key = prio[&e].1;

        let state = if find_witness(t, spec, e)?.is_some() { LinkState::Inactive } else { LinkState::Active };
        t.set_state(e, state)?;
        report.links_processed += 1;

        // An active link that now sits in a fully classified π-triangle with `e`
        // violates the active-link constraint. Under strict dominance it goes back
        // to the worklist (with any inactive link that loses its last witness).
        // Otherwise the triangle itself is a witness and the link is inactivated
        // in place, which cannot cascade.
        let mut violated = false;
        for tri in t.triangles_supported_by(e)? {
            let other = if tri.ac == e { tri.cb } else { tri.ac };
            if t.state(tri.ab)? != LinkState::Active || !t.state(other)?.is_classified() || !spec.holds_on(t, &tri)? {
                continue;
            }
            if spec.strict_dominance() {
                for l in unclassify_link(t, tri.ab, spec)?.unclassified_links {
                    report.nac_unclassifications += 1;
                    violated |= prio[&l].1 <= e_key;
                    heap.push(Reverse((prio[&l], l)));
                }
            } else {
                t.set_state(tri.ab, LinkState::Inactive)?;
                report.nac_inactivations += 1;
                violated |= prio[&tri.ab].1 <= e_key;
            }
        }
        if violated {
            report.order_violations += 1;
        }
    }

    let remaining = t.count_state(LinkState::Unclassified);
    if remaining > 0 {
        return Err(EngineError::Incomplete(remaining));
    }
    report.final_consistency = constraints::classify_consistency(t, spec);
    report.lsm_count = t.lsm_count() - lsm_before;
    report.wall_time = started.elapsed();
    Ok(report)
}

/// Assigns links in ascending order: inactive iff some triangle satisfies π.
pub fn batch_oracle_sequential(t: &Topology, spec: &AlgorithmSpec) -> Result<BTreeMap<LinkId, LinkState>, EngineError> {
    if !spec.strict_dominance() {
        return Err(EngineError::RequiresStrictDominance(spec.to_string()));
    }
    let mut order: Vec<(OrderKey, LinkId)> = t
        .link_ids()
        .into_iter()
        .map(|e| spec.order_key(t, e).map(|k| (k, e)))
        .collect::<Result<_, _>>()?;
    order.sort();
    let mut out = BTreeMap::new();
    for (_, e) in order {
        let mut inactive = false;
        for tri in t.triangles_containing(e)? {
            if spec.holds_on(t, &tri)? {
                if !out.contains_key(&tri.ac) || !out.contains_key(&tri.cb) {
                    return Err(EngineError::DominanceBreach(e));
                }
                inactive = true;
                break;
            }
        }
        out.insert(e, if inactive { LinkState::Inactive } else { LinkState::Active });
    }
    Ok(out)
}

/// Every active/inactive assignment that is strongly consistent.
pub fn brute_force_oracle(t: &Topology, spec: &AlgorithmSpec) -> Result<Vec<BTreeMap<LinkId, LinkState>>, EngineError> {
    let ids = t.link_ids();
    if ids.len() > BRUTE_FORCE_MAX_LINKS {
        return Err(EngineError::TooManyLinks { count: ids.len(), max: BRUTE_FORCE_MAX_LINKS });
    }
    let mut work = t.clone();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << ids.len()) {
        for (i, &e) in ids.iter().enumerate() {
            let s = if mask >> i & 1 == 1 { LinkState::Inactive } else { LinkState::Active };
            work.set_state(e, s)?;
        }
        if constraints::classify_consistency(&work, spec) == ConsistencyLevel::StronglyConsistent {
            out.push(work.all_states());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::AlgorithmKind;
    use crate::topology::NodeId;

    /// 1→2 (25), 1→3 (10), 3→2 (12).
    fn triangle() -> (Topology, LinkId, LinkId, LinkId) {
        let mut t = Topology::new();
        let n: Vec<NodeId> = (0..3).map(|i| t.add_node(i as f64, 0.0, 10.0).unwrap()).collect();
        let e12 = t.add_link(n[0], n[1], 25.0).unwrap();
        let e13 = t.add_link(n[0], n[2], 10.0).unwrap();
        let e32 = t.add_link(n[2], n[1], 12.0).unwrap();
        (t, e12, e13, e32)
    }

    #[test]
    fn adversarial_order_reaches_fixpoint() {
        let (mut t, e12, e13, e32) = triangle();
        let ktc = AlgorithmSpec::ktc(2.0).unwrap();
        let opts = TcOptions::with_order(SelectionOrder::Explicit(vec![e32, e12, e13]));
        let r = run_tc_with(&mut t, &ktc, &opts).unwrap();
        assert_eq!(t.state(e13).unwrap(), LinkState::Active);
        assert_eq!(t.state(e32).unwrap(), LinkState::Active);
        assert_eq!(t.state(e12).unwrap(), LinkState::Inactive);
        assert_eq!(r.nac_unclassifications, 1);
        assert_eq!(r.order_violations, 0);
        assert_eq!(r.loop_count, 5);
        assert!(r.loop_bound_holds());
        assert_eq!(r.final_consistency, ConsistencyLevel::StronglyConsistent);
        let all = brute_force_oracle(&t, &ktc).unwrap();
        assert_eq!(all, vec![t.all_states()]);
    }

    #[test]
    fn maxpower_activates_everything() {
        let (mut t, e12, ..) = triangle();
        t.set_state(e12, LinkState::Active).unwrap();
        let before = t.count_state(LinkState::Unclassified) as u64;
        let r = run_tc(&mut t, &AlgorithmSpec::maxpower()).unwrap();
        assert_eq!(t.count_state(LinkState::Active), 3);
        assert_eq!(r.lsm_count, before);
        let again = run_tc(&mut t, &AlgorithmSpec::maxpower()).unwrap();
        assert_eq!(again.lsm_count, 0);
    }

    #[test]
    fn precondition_is_checked() {
        let (mut t, e12, e13, e32) = triangle();
        for e in [e12, e13, e32] {
            t.set_state(e, LinkState::Active).unwrap();
        }
        let opts = TcOptions { check_precondition: true, ..TcOptions::default() };
        assert!(matches!(
            run_tc_with(&mut t, &AlgorithmSpec::ktc(2.0).unwrap(), &opts),
            Err(EngineError::NotWeaklyConsistent(_))
        ));
    }

    #[test]
    fn oracles_on_triangle() {
        let mut t = Topology::new();
        let n: Vec<NodeId> = (0..3).map(|i| t.add_node(i as f64, 0.0, 10.0).unwrap()).collect();
        let ab = t.add_link(n[0], n[1], 30.0).unwrap();
        let ac = t.add_link(n[0], n[2], 10.0).unwrap();
        let cb = t.add_link(n[2], n[1], 20.0).unwrap();
        let ktc = AlgorithmSpec::ktc(2.0).unwrap();
        let expected = BTreeMap::from([(ab, LinkState::Inactive), (ac, LinkState::Active), (cb, LinkState::Active)]);
        assert_eq!(batch_oracle_sequential(&t, &ktc).unwrap(), expected);
        assert_eq!(brute_force_oracle(&t, &ktc).unwrap(), vec![expected]);
        let yao = AlgorithmSpec::new(AlgorithmKind::Yao { cones: 4 }).unwrap();
        assert!(matches!(batch_oracle_sequential(&t, &yao), Err(EngineError::RequiresStrictDominance(_))));
    }

    #[test]
    fn single_link_oracle() {
        let mut t = Topology::new();
        let a = t.add_node(0.0, 0.0, 1.0).unwrap();
        let b = t.add_node(0.0, 1.0, 1.0).unwrap();
        let e = t.add_link(a, b, 1.0).unwrap();
        let all = brute_force_oracle(&t, &AlgorithmSpec::ktc(1.41).unwrap()).unwrap();
        assert_eq!(all, vec![BTreeMap::from([(e, LinkState::Active)])]);
    }

    #[test]
    fn brute_force_limit() {
        let mut t = Topology::new();
        let ns: Vec<NodeId> = (0..5).map(|i| t.add_node(i as f64, 0.0, 1.0).unwrap()).collect();
        for &a in &ns {
            for &b in &ns {
                if a != b {
                    t.add_link(a, b, 1.0).unwrap();
                }
            }
        }
        assert!(matches!(
            brute_force_oracle(&t, &AlgorithmSpec::maxpower()),
            Err(EngineError::TooManyLinks { count: 20, .. })
        ));
    }

    #[test]
    fn incremental_requires_complete_dirty_set() {
        let (mut t, e12, e13, _) = triangle();
        let ktc = AlgorithmSpec::ktc(2.0).unwrap();
        let opts = TcOptions { check_precondition: true, ..TcOptions::default() };
        assert!(matches!(
            run_tc_incremental_with(&mut t, &ktc, &[e12], &opts),
            Err(EngineError::DirtySetIncomplete(l)) if l == e13
        ));
        let all = t.link_ids();
        let r = run_tc_incremental(&mut t, &ktc, &all).unwrap();
        assert_eq!(r.final_consistency, ConsistencyLevel::StronglyConsistent);
        let r = run_tc_incremental(&mut t, &ktc, &[]).unwrap();
        assert_eq!(r.lsm_count, 0);
    }
}
