mod common;

use ktopo::algorithms::AlgorithmSpec;
use ktopo::constraints::{check_active_link, check_inactive_link, classify_consistency};
use ktopo::events::{parse_trace, write_trace};
use ktopo::generate::random_event;
use ktopo::{apply_event, run_tc, run_tc_incremental, unclassify_link, ConsistencyLevel, ContextEvent, LinkState, NodeAttribute, Topology};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn triangle() -> (Topology, [ktopo::LinkId; 3]) {
    let mut t = Topology::new();
    let a = t.add_node(0.0, 0.0, 100.0).unwrap();
    let b = t.add_node(0.0, 30.0, 100.0).unwrap();
    let c = t.add_node(8.0, 10.0, 100.0).unwrap();
    let ab = t.add_link(a, b, 30.0).unwrap();
    let ac = t.add_link(a, c, 10.0).unwrap();
    let cb = t.add_link(c, b, 20.0).unwrap();
    (t, [ab, ac, cb])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn events_restore_weak_consistency_and_only_unclassify(
        t in common::topo(40, true),
        seed in any::<u64>(),
        len in 1usize..20,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for spec in common::all_algorithms() {
            let mut cur = t.clone();
            run_tc(&mut cur, &spec).unwrap();
            for _ in 0..len {
                let ev = random_event(&mut rng, &cur, 8.0);
                let before = cur.all_states();
                let report = apply_event(&mut cur, &ev, &spec).unwrap();
                prop_assert!(check_inactive_link(&cur, &spec).is_empty(), "{spec} after {ev}");
                prop_assert!(check_active_link(&cur, &spec).is_empty(), "{spec} after {ev}");
                for (e, s) in cur.all_states() {
                    if let Some(&old) = before.get(&e) {
                        prop_assert!(s == old || s == LinkState::Unclassified, "{spec}: {e} went {old:?} -> {s:?}");
                    }
                }
                for e in &report.unclassified_links {
                    prop_assert_eq!(cur.state(*e).unwrap(), LinkState::Unclassified);
                }
            }
        }
    }

    #[test]
    fn incremental_run_equals_scratch_run(t in common::topo(40, true), seed in any::<u64>(), len in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for spec in common::strict_algorithms() {
            let mut cur = t.clone();
            run_tc(&mut cur, &spec).unwrap();
            let mut dirty = Vec::new();
            for _ in 0..len {
                let ev = random_event(&mut rng, &cur, 8.0);
                dirty.extend(apply_event(&mut cur, &ev, &spec).unwrap().unclassified_links);
            }
            let mut scratch = cur.clone();
            for e in scratch.link_ids() {
                scratch.set_state(e, LinkState::Unclassified).unwrap();
            }
            run_tc(&mut scratch, &spec).unwrap();
            run_tc_incremental(&mut cur, &spec, &dirty).unwrap();
            prop_assert_eq!(classify_consistency(&cur, &spec), ConsistencyLevel::StronglyConsistent);
            prop_assert_eq!(cur.all_states(), scratch.all_states(), "{}", spec);
        }
    }

    #[test]
    fn trace_round_trip(t in common::topo(20, false), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let events: Vec<ContextEvent> = (0..10).map(|_| random_event(&mut rng, &t, 8.0)).collect();
        prop_assert_eq!(parse_trace(&write_trace(&events)).unwrap(), events);
    }
}

#[test]
fn removing_the_witness_unclassifies_the_long_link() {
    let spec = AlgorithmSpec::ktc(2.0).unwrap();
    let (mut t, [ab, ac, _]) = triangle();
    run_tc(&mut t, &spec).unwrap();
    assert_eq!(t.state(ab).unwrap(), LinkState::Inactive);
    let report = apply_event(&mut t, &ContextEvent::LinkRemove { id: ac }, &spec).unwrap();
    assert_eq!(report.unclassified_links, vec![ab]);
    assert!(check_inactive_link(&t, &spec).is_empty());
}

#[test]
fn weight_change_cascades() {
    let spec = AlgorithmSpec::ktc(2.0).unwrap();
    let (mut t, [ab, ac, _]) = triangle();
    run_tc(&mut t, &spec).unwrap();
    let report = apply_event(&mut t, &ContextEvent::LinkAttrMod { id: ac, weight: 40.0 }, &spec).unwrap();
    assert_eq!(report.unclassified_links, vec![ac, ab]);
    assert_eq!(report.cascades, 2);
}

#[test]
fn irrelevant_attributes_are_suppressed() {
    let spec = AlgorithmSpec::ktc(2.0).unwrap();
    let (mut t, _) = triangle();
    run_tc(&mut t, &spec).unwrap();
    let n = t.node_ids()[0];
    let ev = ContextEvent::NodeAttrMod { id: n, attr: NodeAttribute::Energy, value: 5.0 };
    assert!(apply_event(&mut t, &ev, &spec).unwrap().unclassified_links.is_empty());
    let ektc = AlgorithmSpec::ektc(2.0).unwrap();
    assert_eq!(apply_event(&mut t, &ev, &ektc).unwrap().unclassified_links.len(), 2);
}

#[test]
fn unclassify_cascade_and_idempotence() {
    let spec = AlgorithmSpec::ktc(2.0).unwrap();
    let (mut t, [ab, ac, cb]) = triangle();
    run_tc(&mut t, &spec).unwrap();
    assert_eq!(unclassify_link(&mut t, cb, &spec).unwrap().unclassified_links, vec![cb, ab]);
    let again = unclassify_link(&mut t, cb, &spec).unwrap();
    assert!(again.unclassified_links.is_empty());
    assert_eq!(t.state(ac).unwrap(), LinkState::Active);
}

#[test]
fn invalid_events_leave_the_topology_untouched() {
    let spec = AlgorithmSpec::ktc(2.0).unwrap();
    let (mut t, [ab, ..]) = triangle();
    let before = t.clone();
    let n = t.node_ids();
    for ev in [
        ContextEvent::LinkAdd { source: n[0], target: n[1], weight: 3.0 },
        ContextEvent::LinkAdd { source: n[0], target: n[0], weight: 3.0 },
        ContextEvent::LinkAttrMod { id: ab, weight: 0.0 },
        ContextEvent::NodeAttrMod { id: n[0], attr: NodeAttribute::HopCount, value: 1.5 },
        ContextEvent::NodeAttrMod { id: n[0], attr: NodeAttribute::Energy, value: -1.0 },
        ContextEvent::NodeRemove { id: ktopo::NodeId(99) },
    ] {
        assert!(apply_event(&mut t, &ev, &spec).is_err(), "{ev}");
        assert!(t.same_structure(&before));
    }
}
