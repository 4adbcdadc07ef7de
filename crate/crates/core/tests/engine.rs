mod common;

use ktopo::algorithms::AlgorithmSpec;
use ktopo::constraints::{classify_consistency, is_a_connected, is_au_connected};
use ktopo::engine::{batch_oracle_sequential, brute_force_oracle, run_tc_with};
use ktopo::events::apply_event;
use ktopo::fixtures::{incremental_events, incremental_example};
use ktopo::{run_tc, run_tc_incremental, ConsistencyLevel, LinkState, NodeId, SelectionOrder, TcOptions, Topology};
use proptest::prelude::*;

fn state(t: &Topology, a: u32, b: u32) -> LinkState {
    t.state(t.link_between(NodeId(a), NodeId(b)).unwrap()).unwrap()
}

fn unclassified(t: &Topology) -> Topology {
    let mut u = t.clone();
    for e in u.link_ids() {
        u.set_state(e, LinkState::Unclassified).unwrap();
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn output_is_strongly_consistent_and_structure_is_kept(t in common::topo(40, true), seed in any::<u64>()) {
        for spec in common::all_algorithms() {
            for order in [SelectionOrder::Ascending, SelectionOrder::Shuffled(seed)] {
                let mut out = t.clone();
                let report = run_tc_with(&mut out, &spec, &TcOptions::with_order(order)).unwrap();
                prop_assert_eq!(report.final_consistency, ConsistencyLevel::StronglyConsistent);
                prop_assert_eq!(classify_consistency(&out, &spec), ConsistencyLevel::StronglyConsistent);
                prop_assert!(unclassified(&out).same_structure(&unclassified(&t)));
                prop_assert!(report.loop_bound_holds(), "{spec}: {report:?}");
                if spec.strict_dominance() {
                    prop_assert_eq!(report.order_violations, 0);
                }
            }
        }
    }

    #[test]
    fn output_belongs_to_brute_force_set(t in common::topo(12, true)) {
        for spec in common::all_algorithms() {
            let fixpoints = brute_force_oracle(&t, &spec).unwrap();
            let mut out = t.clone();
            run_tc(&mut out, &spec).unwrap();
            prop_assert!(fixpoints.contains(&out.all_states()), "{spec}");
            if spec.strict_dominance() {
                prop_assert_eq!(fixpoints.len(), 1);
            }
        }
    }

    #[test]
    fn order_independence(t in common::topo(40, true), seeds in proptest::collection::vec(any::<u64>(), 5)) {
        for spec in common::strict_algorithms() {
            let expected = batch_oracle_sequential(&t, &spec).unwrap();
            for &s in &seeds {
                let mut out = t.clone();
                run_tc_with(&mut out, &spec, &TcOptions::with_order(SelectionOrder::Shuffled(s))).unwrap();
                prop_assert_eq!(&out.all_states(), &expected, "{}", spec);
            }
        }
    }

    #[test]
    fn a_connected_when_input_is_au_connected(t in common::topo(60, false)) {
        prop_assume!(is_au_connected(&t));
        for spec in common::strict_algorithms() {
            let mut out = t.clone();
            run_tc(&mut out, &spec).unwrap();
            prop_assert!(is_a_connected(&out), "{spec}");
        }
    }
}

#[test]
fn non_terminating_order_reaches_the_fixpoint() {
    let mut t = Topology::new();
    let n: Vec<NodeId> = (0..3).map(|i| t.add_node(0.0, f64::from(i), 10.0).unwrap()).collect();
    let e12 = t.add_link(n[0], n[1], 25.0).unwrap();
    let e13 = t.add_link(n[0], n[2], 10.0).unwrap();
    let e32 = t.add_link(n[2], n[1], 12.0).unwrap();
    let spec = AlgorithmSpec::ktc(2.0).unwrap();
    let report = run_tc_with(&mut t, &spec, &TcOptions::with_order(SelectionOrder::Explicit(vec![e32, e12, e13]))).unwrap();
    assert_eq!(t.state(e12).unwrap(), LinkState::Inactive);
    assert_eq!(t.state(e13).unwrap(), LinkState::Active);
    assert_eq!(t.state(e32).unwrap(), LinkState::Active);
    assert_eq!(brute_force_oracle(&t, &spec).unwrap(), vec![t.all_states()]);
    assert_eq!(report.nac_unclassifications, 1);
    assert_eq!(report.order_violations, 0);
    assert!(report.loop_bound_holds());
}

#[test]
fn incremental_example_flips_the_expected_links() {
    let spec = AlgorithmSpec::ktc(2.0).unwrap();
    let mut t = incremental_example();
    run_tc(&mut t, &spec).unwrap();
    for (a, b) in [(3, 11), (11, 3), (9, 11), (11, 9)] {
        assert_eq!(state(&t, a, b), LinkState::Inactive, "{a}->{b}");
    }
    assert_eq!(state(&t, 3, 9), LinkState::Active);

    let mut dirty = Vec::new();
    for ev in incremental_events() {
        dirty.extend(apply_event(&mut t, &ev, &spec).unwrap().unclassified_links);
    }
    run_tc_incremental(&mut t, &spec, &dirty).unwrap();
    for (a, b, s) in [
        (7, 9, LinkState::Active),
        (9, 7, LinkState::Active),
        (3, 9, LinkState::Inactive),
        (9, 3, LinkState::Inactive),
        (3, 11, LinkState::Active),
        (11, 3, LinkState::Active),
        (9, 11, LinkState::Active),
        (11, 9, LinkState::Active),
    ] {
        assert_eq!(state(&t, a, b), s, "{a}->{b}");
    }
    assert_eq!(brute_force_oracle(&t, &spec).unwrap(), vec![t.all_states()]);
}

#[test]
fn maxpower_activates_everything() {
    let mut t = incremental_example();
    let e = t.link_ids()[0];
    t.set_state(e, LinkState::Active).unwrap();
    let report = run_tc(&mut t, &AlgorithmSpec::maxpower()).unwrap();
    assert_eq!(t.count_state(LinkState::Active), t.link_count());
    assert_eq!(report.lsm_count as usize, t.link_count() - 1);
    assert_eq!(run_tc(&mut t, &AlgorithmSpec::maxpower()).unwrap().lsm_count, 0);
}
