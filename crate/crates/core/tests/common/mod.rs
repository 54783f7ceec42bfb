#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use rbatl::formula::{Coalition, Formula};
use rbatl::model::{Model, ModelBuilder};
use rbatl::petri::{PetriNet, Transition};
use rbatl::vector::{Amount, BoundVec};

pub const PROPS: [&str; 2] = ["p", "q"];

#[derive(Debug, Clone, Copy)]
pub struct ModelShape {
    pub max_states: usize,
    pub agents: usize,
    pub resources: usize,
    /// Allow negative cost components.
    pub production: bool,
    /// Idle everywhere and a complete transition function.
    pub total: bool,
}

impl ModelShape {
    pub fn small(resources: usize, production: bool) -> Self {
        ModelShape { max_states: 6, agents: 2, resources, production, total: true }
    }
}

fn agent(i: usize) -> String {
    format!("g{i}")
}

fn product(menus: &[Vec<String>]) -> Vec<Vec<String>> {
    menus.iter().fold(vec![Vec::new()], |acc, menu| {
        acc.iter()
            .flat_map(|prefix| {
                menu.iter().map(move |a| {
                    let mut v = prefix.clone();
                    v.push(a.clone());
                    v
                })
            })
            .collect()
    })
}

pub fn random_model(rng: &mut StdRng, shape: ModelShape) -> Model {
    let n = rng.gen_range(1..=shape.max_states);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let agents: Vec<String> = (0..shape.agents).map(agent).collect();
    let resources: Vec<String> = (0..shape.resources).map(|i| format!("r{i}")).collect();
    let mut b = ModelBuilder::new(agents.clone(), resources).states(states.clone()).total(shape.total);
    for p in PROPS {
        b = b.proposition(p);
        for s in &states {
            if rng.gen_bool(0.4) {
                b = b.label(p, s.as_str());
            }
        }
    }
    let low = if shape.production { -2 } else { 0 };
    for s in &states {
        let mut menus = Vec::new();
        for a in &agents {
            let mut menu = Vec::new();
            if shape.total || rng.gen_bool(0.8) {
                menu.push("idle".to_string());
                b = b.action(s, a, "idle", vec![0; shape.resources]);
            }
            for act in ["x", "y"] {
                if rng.gen_bool(0.5) {
                    let cost: Vec<i64> = (0..shape.resources).map(|_| rng.gen_range(low..=2)).collect();
                    b = b.action(s, a, act, cost);
                    menu.push(act.to_string());
                }
            }
            menus.push(menu);
        }
        for joint in product(&menus) {
            if !shape.total && rng.gen_bool(0.2) {
                continue;
            }
            let t = states.choose(rng).unwrap();
            b = b.transition(s, joint, t);
        }
    }
    b.build().expect("generated model is well formed")
}

fn random_coalition(rng: &mut StdRng, agents: usize) -> Coalition {
    Coalition::new((0..agents).filter(|_| rng.gen_bool(0.5)).map(agent))
}

pub fn random_bound(rng: &mut StdRng, resources: usize, max: u64) -> BoundVec {
    BoundVec::new(
        (0..resources)
            .map(|_| if rng.gen_bool(0.15) { Amount::Infinite } else { Amount::Finite(rng.gen_range(0..=max)) })
            .collect(),
    )
}

/// A random formula of modal depth at most `depth`.
pub fn random_formula(rng: &mut StdRng, agents: usize, resources: usize, depth: usize) -> Formula {
    let leaf = |rng: &mut StdRng| match rng.gen_range(0..6) {
        0 => Formula::True,
        1 => Formula::not(Formula::prop(*PROPS.choose(rng).unwrap())),
        _ => Formula::prop(*PROPS.choose(rng).unwrap()),
    };
    if depth == 0 {
        return leaf(rng);
    }
    let sub = |rng: &mut StdRng| {
        let d = rng.gen_range(0..depth);
        random_formula(rng, agents, resources, d)
    };
    let c = random_coalition(rng, agents);
    let b = random_bound(rng, resources, 3);
    match rng.gen_range(0..8) {
        0 => Formula::not(random_formula(rng, agents, resources, depth)),
        1 => {
            let l = random_formula(rng, agents, resources, depth);
            Formula::or(l, sub(rng))
        }
        2 | 3 => Formula::next(c, b, sub(rng)),
        4 | 5 => Formula::always(c, b, sub(rng)),
        _ => {
            let l = sub(rng);
            Formula::until(c, b, l, sub(rng))
        }
    }
}

/// A random coalition modality (the outermost operator is `X`, `G` or `U`).
pub fn random_modality(rng: &mut StdRng, agents: usize, resources: usize, depth: usize) -> Formula {
    loop {
        let f = random_formula(rng, agents, resources, depth.max(1));
        if f.is_modal() {
            return f;
        }
    }
}

pub fn random_net(rng: &mut StdRng) -> (PetriNet, Vec<u64>) {
    let places = rng.gen_range(1..=4);
    let count = rng.gen_range(1..=4);
    let weights = |rng: &mut StdRng| -> Vec<u64> {
        (0..places).map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(1..=2) }).collect()
    };
    let transitions = (0..count)
        .map(|i| Transition { name: format!("t{i}"), consume: weights(rng), produce: weights(rng) })
        .collect();
    let initial = (0..places).map(|_| rng.gen_range(0..=2)).collect();
    let target = (0..places).map(|_| rng.gen_range(0..=3)).collect();
    let net = PetriNet::new((0..places).map(|i| format!("p{i}")).collect(), transitions, initial).unwrap();
    (net, target)
}

/// Classical ATL labelling by direct fixpoint iteration over the model,
/// ignoring all bounds. Independent of the checker's move tables.
pub fn naive_atl(m: &Model, f: &Formula, sem: rbatl::checker::Semantics) -> std::collections::BTreeSet<usize> {
    use std::collections::BTreeSet;
    let all: BTreeSet<usize> = (0..m.state_count()).collect();
    let pre = |coalition: &Coalition, rho: &BTreeSet<usize>| -> BTreeSet<usize> {
        let ids: Vec<usize> = coalition.iter().map(|a| m.agent_id(a).unwrap()).collect();
        all.iter()
            .copied()
            .filter(|&s| {
                m.coalition_actions(s, &ids).iter().any(|sigma| {
                    let out = m.outcomes(s, sigma).unwrap();
                    (!sem.requires_outcomes() || !out.is_empty()) && out.is_subset(rho)
                })
            })
            .collect()
    };
    match f {
        Formula::True => all,
        Formula::False => BTreeSet::new(),
        Formula::Prop(p) => m.label(p).cloned().unwrap_or_default(),
        Formula::Not(g) => all.difference(&naive_atl(m, g, sem)).copied().collect(),
        Formula::Or(l, r) => naive_atl(m, l, sem).union(&naive_atl(m, r, sem)).copied().collect(),
        Formula::And(l, r) => naive_atl(m, l, sem).intersection(&naive_atl(m, r, sem)).copied().collect(),
        Formula::Next { coalition, body, .. } => pre(coalition, &naive_atl(m, body, sem)),
        Formula::Always { coalition, body, .. } => {
            let phi = naive_atl(m, body, sem);
            let mut rho = phi.clone();
            loop {
                let next: BTreeSet<usize> = pre(coalition, &rho).intersection(&phi).copied().collect();
                if next == rho {
                    return rho;
                }
                rho = next;
            }
        }
        Formula::Until { coalition, left, right, .. } => {
            let phi = naive_atl(m, left, sem);
            let mut rho = naive_atl(m, right, sem);
            loop {
                let step: BTreeSet<usize> = pre(coalition, &rho).intersection(&phi).copied().collect();
                if step.is_subset(&rho) {
                    return rho;
                }
                rho.extend(step);
            }
        }
    }
}

/// Replaces every bound by the all-`inf` vector.
pub fn unbounded(f: &Formula) -> Formula {
    match f {
        Formula::Not(g) => Formula::not(unbounded(g)),
        Formula::Or(l, r) => Formula::or(unbounded(l), unbounded(r)),
        Formula::And(l, r) => Formula::and(unbounded(l), unbounded(r)),
        Formula::Next { coalition, bound, body } => {
            Formula::next(coalition.clone(), BoundVec::infinite(bound.len()), unbounded(body))
        }
        Formula::Always { coalition, bound, body } => {
            Formula::always(coalition.clone(), BoundVec::infinite(bound.len()), unbounded(body))
        }
        Formula::Until { coalition, bound, left, right } => {
            Formula::until(coalition.clone(), BoundVec::infinite(bound.len()), unbounded(left), unbounded(right))
        }
        other => other.clone(),
    }
}

pub fn seeded(seed: u64) -> StdRng {
    use rand::SeedableRng;
    StdRng::seed_from_u64(seed)
}
