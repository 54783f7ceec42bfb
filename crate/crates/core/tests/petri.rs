mod common;

use common::*;
use rbatl::checker::{model_check, Semantics};
use rbatl::io::{model_from_json, model_to_json};
use rbatl::petri::{NetDocument, PetriNet, Transition};

fn reduced_answer(net: &PetriNet, target: &[u64]) -> bool {
    let (m, f) = net.reduce(target).unwrap();
    let s0 = m.state_id("s0").unwrap();
    model_check(&m, &f, Semantics::Rbatl).unwrap().of(&f).contains(&s0)
}

#[test]
fn reduction_decides_coverability() {
    let mut rng = seeded(21);
    let mut positives = 0;
    for case in 0..250 {
        let (net, target) = random_net(&mut rng);
        let expected = net.coverable(&target).unwrap();
        positives += expected as usize;
        assert_eq!(reduced_answer(&net, &target), expected, "case {case}: {net:?} target {target:?}");
    }
    assert!(positives > 25 && positives < 225, "corpus is lopsided: {positives} coverable");
}

#[test]
fn coverable_by_firing_sequence() {
    // Spot check the Karp-Miller answer against explicit breadth-first
    // exploration with a cap on token counts.
    let mut rng = seeded(22);
    for _ in 0..200 {
        let (net, target) = random_net(&mut rng);
        let mut seen = std::collections::HashSet::new();
        let mut queue = std::collections::VecDeque::from([net.initial().to_vec()]);
        let mut found = false;
        while let Some(m) = queue.pop_front() {
            if m.iter().zip(&target).all(|(x, t)| x >= t) {
                found = true;
                break;
            }
            if m.iter().any(|&x| x > 12) || !seen.insert(m.clone()) {
                continue;
            }
            for t in 0..net.transitions().len() {
                if let Ok(next) = net.fire(&m, t) {
                    queue.push_back(next);
                }
            }
        }
        if found {
            assert!(net.coverable(&target).unwrap());
        }
    }
}

#[test]
fn reduced_models_survive_the_model_format() {
    let mut rng = seeded(23);
    for _ in 0..30 {
        let (net, target) = random_net(&mut rng);
        let (m, _) = net.reduce(&target).unwrap();
        let text = model_to_json(&m);
        assert_eq!(model_to_json(&model_from_json(&text).unwrap()), text);
    }
}

#[test]
fn unbounded_growth() {
    // t doubles tokens in p0; any target on p0 is coverable from one token.
    let net = PetriNet::new(
        vec!["p0".into(), "p1".into()],
        vec![
            Transition { name: "t".into(), consume: vec![1, 0], produce: vec![2, 0] },
            Transition { name: "u".into(), consume: vec![3, 0], produce: vec![0, 1] },
        ],
        vec![1, 0],
    )
    .unwrap();
    for target in [vec![5, 0], vec![0, 2], vec![4, 3]] {
        assert!(net.coverable(&target).unwrap());
        assert!(reduced_answer(&net, &target));
    }
    let stuck = PetriNet::new(vec!["p0".into()], vec![], vec![1]).unwrap();
    assert!(!stuck.coverable(&[2]).unwrap());
    assert!(!reduced_answer(&stuck, &[2]));
}

#[test]
fn documents_round_trip() {
    let mut rng = seeded(24);
    for _ in 0..20 {
        let (net, target) = random_net(&mut rng);
        let doc = NetDocument { net, target: Some(target) };
        assert_eq!(NetDocument::from_json(&doc.to_json()).unwrap(), doc);
    }
}
