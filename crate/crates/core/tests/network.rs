use std::collections::BTreeMap;
use std::path::PathBuf;

use dsm_core::network::*;
use dsm_core::qarith::CNum;
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

#[test]
fn fixtures_load() {
    for name in ["diamond.json", "layered7.json", "phase_pattern.json", "ic2x2.json"] {
        let t = load_topology_file(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(t.node_count() >= 4, "{name}");
    }
    let ic = load_topology_file(&fixture("ic2x2.json")).unwrap();
    assert_eq!(ic.user_pairs(), vec![(0, 2), (1, 3)]);
}

#[test]
fn parameters_scale_edges() {
    let doc = load_document_file(&fixture("phase_pattern.json")).unwrap();
    let t = doc.build(&BTreeMap::from([("h".to_string(), 8.0)])).unwrap();
    assert_eq!(t.edge_between(1, 3).unwrap().gain(), CNum::new(-8.0, 0.0));
    assert_eq!(t.edge_between(2, 4).unwrap().gain(), CNum::new(8.0, 0.0));
    assert!(doc.build(&BTreeMap::from([("nope".to_string(), 1.0)])).is_err());
}

#[test]
fn malformed_documents_are_rejected() {
    let bad = [
        r#"{"mode":"relay","nodes":[],"edges":[]}"#,
        r#"{"mode":"relay","nodes":[{"id":0,"role":"source"},{"id":1,"role":"destination"}],
            "edges":[{"from":0,"to":1,"gain_re":1,"gain_im":0,"extra":1}]}"#,
        r#"{"mode":"relay","nodes":[{"id":0,"role":"source"},{"id":1,"role":"destination"}],
            "edges":[{"from":0,"to":0,"gain_re":1,"gain_im":0}]}"#,
        "not json",
    ];
    for doc in bad {
        assert!(load_topology(doc).is_err(), "{doc}");
    }
}

#[test]
fn relay_cuts_split_source_from_destination() {
    let t = load_topology_file(&fixture("layered7.json")).unwrap();
    let cuts = enumerate_cuts(&t).unwrap();
    assert_eq!(cuts.len(), 1 << (t.node_count() - 2));
    for c in &cuts {
        assert!(c.contains(t.source()) && !c.contains(t.destination()));
        assert_eq!(c.omega().len() + c.complement().len(), t.node_count());
    }
}

#[test]
fn mimo_expansion_has_one_node_per_antenna() {
    let doc = r#"{"mode":"relay","nodes":[
        {"id":0,"role":"source","antennas":2},{"id":1,"role":"destination","antennas":2}],
        "edges":[{"from":0,"to":1,"gains":[[1,0],[0,1],[2,0],[0,2]]}]}"#;
    let t = load_topology(doc).unwrap();
    let (e, origin) = mimo_expand_with_origin(&t).unwrap();
    assert_eq!(e.node_count(), 4);
    assert_eq!(origin, vec![0, 0, 1, 1]);
    assert_eq!(e.edges().len(), 4);
}

proptest! {
    #[test]
    fn random_networks_are_acyclic_and_round_trip(n in 2usize..8, p in 0.0..1.0f64, seed in any::<u64>()) {
        let t = random_relay_topology(n, p, (1.0, 50.0), seed).unwrap();
        let order = t.topological_order().unwrap();
        prop_assert_eq!(order.len(), n);
        for j in 1..n {
            prop_assert!(!t.in_edges(j).is_empty());
        }
        let back = t.to_document().build(&BTreeMap::new()).unwrap();
        prop_assert_eq!(back.gains(), t.gains());
        prop_assert_eq!(random_relay_topology(n, p, (1.0, 50.0), seed).unwrap().gains(), t.gains());
    }

    #[test]
    fn scaling_multiplies_every_gain(seed in any::<u64>(), gamma in 0.1..10.0f64) {
        let t = random_relay_topology(5, 0.5, (1.0, 50.0), seed).unwrap();
        let s = t.scaled(gamma).unwrap();
        for (a, b) in t.gains().iter().zip(s.gains()) {
            prop_assert!((a * gamma - b).norm() <= 1e-12 * b.norm());
        }
    }
}
