mod common;

use common::*;
use rbatl::checker::{Checker, Semantics};
use rbatl::fixtures;
use rbatl::formula::{parse_formula, Formula, Temporal};
use rbatl::model::Model;
use rbatl::witness::certificate::{validate_query, Certificate};
use rbatl::witness::concretize::concretize;
use rbatl::witness::Witness;

/// Concrete witnesses for every state satisfying `f`.
fn witnesses(m: &Model, f: &Formula, sem: Semantics) -> Vec<(usize, Witness)> {
    let mut c = Checker::new(m, sem).unwrap();
    let labels = c.label(f).unwrap();
    let mut out = Vec::new();
    for &s in labels.of(f) {
        let w = c.witness(f, s).unwrap().expect("labelled state has a witness");
        out.push((s, concretize(&mut c, f, &w).unwrap().witness));
    }
    out
}

#[test]
fn random_witnesses_validate() {
    let mut rng = seeded(31);
    let mut checked = 0;
    for case in 0..150 {
        let m = random_model(&mut rng, ModelShape::small(1 + case % 2, true));
        let f = random_modality(&mut rng, 2, 1 + case % 2, 1);
        if matches!(f, Formula::Next { .. }) {
            continue;
        }
        for sem in Semantics::ALL {
            for (s, w) in witnesses(&m, &f, sem) {
                assert!(w.root.is_concrete());
                validate_query(&m, &f, s, &w).unwrap_or_else(|e| panic!("case {case}, {sem}, {f}: {e}"));
                let cert = Certificate::from_witness(&m, &w);
                assert_eq!(Certificate::from_json(&cert.to_json()).unwrap().to_witness(&m).unwrap(), w);
                checked += 1;
            }
        }
    }
    assert!(checked > 100, "only {checked} witnesses");
}

#[test]
fn fixture_witnesses_validate() {
    let cases = [
        (fixtures::shuttle(), "<{a1}: 3,1> (true U p)", "s_I"),
        (fixtures::shuttle(), "<{a1,a2}: 0,1> (true U p)", "s_I"),
        (fixtures::workshop(), "<{w}: 0> (true U done)", "q"),
        (fixtures::leaky_loop(), "<{a}: 0> G p", "free"),
        (fixtures::chain(), "<{1}: 2> (true U p)", "u0"),
    ];
    for (m, f, s) in cases {
        let f = parse_formula(f).unwrap();
        let s = m.state_id(s).unwrap();
        let found = witnesses(&m, &f, Semantics::Rbatl);
        let (_, w) = found.iter().find(|(t, _)| *t == s).expect("query holds");
        validate_query(&m, &f, s, w).unwrap();
    }
}

#[test]
fn box_witnesses_end_in_loopbacks() {
    let m = fixtures::leaky_loop();
    let f = parse_formula("<{a}: 0> G p").unwrap();
    for (_, w) in witnesses(&m, &f, Semantics::Rbatl) {
        assert_eq!(w.kind, Temporal::Always);
        fn leaves_loop(n: &rbatl::witness::WitnessNode) -> bool {
            match &n.body {
                rbatl::witness::NodeBody::Leaf(k) => matches!(k, rbatl::witness::LeafKind::Loopback { .. }),
                rbatl::witness::NodeBody::Step { children, .. } => children.iter().all(leaves_loop),
            }
        }
        assert!(leaves_loop(&w.root));
    }
}
