//! Petri nets, their encoding as resource-bounded game structures, and a
//! Karp–Miller coverability check.
//!
//! The encoding turns places into resources: a single agent repeatedly
//! picks a transition, pays its input arcs, collects its output arcs, and
//! may at any point pay the target marking to reach the state where `p`
//! holds. Starting with the initial marking as its budget, the agent can
//! enforce `true U p` exactly when the target marking is coverable.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Coalition, Formula};
use crate::model::{Model, ModelBuilder};
use crate::vector::{Amount, BoundVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PetriError {
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("marking has {got} components, the net has {expected} places")]
    MarkingLength { expected: usize, got: usize },
    #[error("unsupported format_version {0}")]
    Version(u32),
    #[error("arc weight {0} is too large")]
    Weight(u64),
    #[error("malformed net: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    /// `W(p, t)` per place.
    pub consume: Vec<u64>,
    /// `W(t, p)` per place.
    pub produce: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    places: Vec<String>,
    transitions: Vec<Transition>,
    initial: Vec<u64>,
}

impl PetriNet {
    pub fn new(places: Vec<String>, transitions: Vec<Transition>, initial: Vec<u64>) -> Result<Self, PetriError> {
        let mut seen = HashSet::new();
        for p in &places {
            if !seen.insert(p) {
                return Err(PetriError::Duplicate { kind: "place", name: p.clone() });
            }
        }
        let mut seen = HashSet::new();
        for t in &transitions {
            if !seen.insert(&t.name) {
                return Err(PetriError::Duplicate { kind: "transition", name: t.name.clone() });
            }
            for w in [&t.consume, &t.produce] {
                check_len(places.len(), w.len())?;
                if let Some(&big) = w.iter().find(|&&x| x > i64::MAX as u64) {
                    return Err(PetriError::Weight(big));
                }
            }
        }
        check_len(places.len(), initial.len())?;
        Ok(PetriNet { places, transitions, initial })
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial(&self) -> &[u64] {
        &self.initial
    }

    pub fn place_id(&self, name: &str) -> Option<usize> {
        self.places.iter().position(|p| p == name)
    }

    pub fn enabled(&self, m: &[u64], t: usize) -> bool {
        self.transitions[t].consume.iter().zip(m).all(|(w, x)| w <= x)
    }

    pub fn fire(&self, m: &[u64], t: usize) -> Result<Vec<u64>, PetriError> {
        if !self.enabled(m, t) {
            return Err(PetriError::NotEnabled(self.transitions[t].name.clone()));
        }
        let tr = &self.transitions[t];
        Ok(m.iter()
            .zip(&tr.consume)
            .zip(&tr.produce)
            .map(|((x, c), p)| x - c + p)
            .collect())
    }

    /// The single-agent model and formula whose truth at `s0` is
    /// equivalent to coverability of `target`.
    pub fn reduce(&self, target: &[u64]) -> Result<(Model, Formula), PetriError> {
        check_len(self.places.len(), target.len())?;
        let neg = |v: &[u64]| v.iter().map(|&x| -(x as i64)).collect::<Vec<_>>();
        let pos = |v: &[u64]| v.iter().map(|&x| x as i64).collect::<Vec<_>>();
        let zero = vec![0i64; self.places.len()];
        let state_of = |t: &Transition| format!("t:{}", t.name);

        let mut b = ModelBuilder::new([AGENT], self.places.iter().cloned()).state("s0");
        for t in &self.transitions {
            b = b.state(state_of(t));
        }
        b = b
            .states(["s", "e"])
            .action("s0", AGENT, "idle", zero.clone())
            .action("s0", AGENT, "good", pos(target))
            .transition("s0", ["idle"], "e")
            .transition("s0", ["good"], "s");
        for t in &self.transitions {
            let ts = state_of(t);
            let minus = format!("{}-", t.name);
            let plus = format!("{}+", t.name);
            b = b
                .action("s0", AGENT, &minus, pos(&t.consume))
                .transition("s0", [minus.as_str()], &ts)
                .action(&ts, AGENT, "idle", zero.clone())
                .action(&ts, AGENT, &plus, neg(&t.produce))
                .transition(&ts, ["idle"], "e")
                .transition(&ts, [plus.as_str()], "s0");
        }
        let model = b
            .action("s", AGENT, "idle", zero.clone())
            .action("e", AGENT, "idle", zero)
            .transition("s", ["idle"], "s")
            .transition("e", ["idle"], "e")
            .label("p", "s")
            .build()
            .map_err(|e| PetriError::Json(e.to_string()))?;
        let bound = BoundVec::new(self.initial.iter().map(|&x| Amount::Finite(x)).collect());
        let formula = Formula::until(Coalition::new([AGENT]), bound, Formula::True, Formula::prop("p"));
        Ok((model, formula))
    }

    /// Whether some marking reachable from the initial one covers `target`.
    pub fn coverable(&self, target: &[u64]) -> Result<bool, PetriError> {
        check_len(self.places.len(), target.len())?;
        Ok(karp_miller(self, target))
    }
}

/// The agent of reduced models.
pub const AGENT: &str = "1";

fn check_len(expected: usize, got: usize) -> Result<(), PetriError> {
    if expected == got {
        Ok(())
    } else {
        Err(PetriError::MarkingLength { expected, got })
    }
}

/// Marking component in the coverability tree; `None` is ω.
type Omega = Option<u64>;

fn omega_le(a: &[Omega], b: &[Omega]) -> bool {
    a.iter().zip(b).all(|(x, y)| match (x, y) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x <= y,
    })
}

fn karp_miller(net: &PetriNet, target: &[u64]) -> bool {
    let covers = |m: &[Omega]| m.iter().zip(target).all(|(x, &t)| x.is_none_or(|x| x >= t));
    struct Node {
        marking: Vec<Omega>,
        parent: Option<usize>,
    }
    let root: Vec<Omega> = net.initial.iter().map(|&x| Some(x)).collect();
    let mut nodes = vec![Node { marking: root, parent: None }];
    let mut seen: HashSet<Vec<Omega>> = HashSet::new();
    let mut work = vec![0usize];
    while let Some(id) = work.pop() {
        let m = nodes[id].marking.clone();
        if covers(&m) {
            return true;
        }
        if !seen.insert(m.clone()) {
            continue;
        }
        for t in &net.transitions {
            let enabled = t.consume.iter().zip(&m).all(|(&w, x)| x.is_none_or(|x| w <= x));
            if !enabled {
                continue;
            }
            let mut next: Vec<Omega> = m
                .iter()
                .zip(&t.consume)
                .zip(&t.produce)
                .map(|((x, c), p)| x.map(|x| x - c + p))
                .collect();
            // Accelerate against every strictly smaller ancestor.
            let mut anc = Some(id);
            while let Some(a) = anc {
                let am = &nodes[a].marking;
                if omega_le(am, &next) && *am != next {
                    for (x, y) in next.iter_mut().zip(am) {
                        if *x != *y {
                            *x = None;
                        }
                    }
                }
                anc = nodes[a].parent;
            }
            nodes.push(Node { marking: next, parent: Some(id) });
            work.push(nodes.len() - 1);
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetFile {
    format_version: u32,
    places: Vec<String>,
    transitions: Vec<TransitionFile>,
    #[serde(default)]
    initial: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<BTreeMap<String, u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionFile {
    name: String,
    #[serde(default)]
    consume: BTreeMap<String, u64>,
    #[serde(default)]
    produce: BTreeMap<String, u64>,
}

pub const FORMAT_VERSION: u32 = 1;

/// A net file: the net plus an optional target marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetDocument {
    pub net: PetriNet,
    pub target: Option<Vec<u64>>,
}

impl NetDocument {
    pub fn from_json(text: &str) -> Result<NetDocument, PetriError> {
        let f: NetFile = serde_json::from_str(text).map_err(|e| PetriError::Json(e.to_string()))?;
        if f.format_version != FORMAT_VERSION {
            return Err(PetriError::Version(f.format_version));
        }
        let places = f.places;
        let vector = |m: &BTreeMap<String, u64>| -> Result<Vec<u64>, PetriError> {
            let mut v = vec![0; places.len()];
            for (p, &w) in m {
                let i = places.iter().position(|q| q == p).ok_or_else(|| PetriError::UnknownPlace(p.clone()))?;
                v[i] = w;
            }
            Ok(v)
        };
        let transitions = f
            .transitions
            .iter()
            .map(|t| {
                Ok(Transition { name: t.name.clone(), consume: vector(&t.consume)?, produce: vector(&t.produce)? })
            })
            .collect::<Result<Vec<_>, PetriError>>()?;
        let initial = vector(&f.initial)?;
        let target = f.target.as_ref().map(vector).transpose()?;
        Ok(NetDocument { net: PetriNet::new(places, transitions, initial)?, target })
    }

    pub fn to_json(&self) -> String {
        let net = &self.net;
        let map = |v: &[u64]| -> BTreeMap<String, u64> {
            net.places.iter().cloned().zip(v.iter().copied()).filter(|(_, w)| *w > 0).collect()
        };
        let f = NetFile {
            format_version: FORMAT_VERSION,
            places: net.places.clone(),
            transitions: net
                .transitions
                .iter()
                .map(|t| TransitionFile { name: t.name.clone(), consume: map(&t.consume), produce: map(&t.produce) })
                .collect(),
            initial: map(&net.initial),
            target: self.target.as_deref().map(map),
        };
        serde_json::to_string_pretty(&f).expect("net serializes")
    }
}

/// Parses `p1=3,p2=1` into a marking over the net's places (missing places
/// are 0).
pub fn parse_marking(net: &PetriNet, text: &str) -> Result<Vec<u64>, PetriError> {
    let mut v = vec![0; net.places.len()];
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (p, n) = part
            .split_once('=')
            .ok_or_else(|| PetriError::Json(format!("expected place=count, found `{part}`")))?;
        let i = net.place_id(p.trim()).ok_or_else(|| PetriError::UnknownPlace(p.trim().to_string()))?;
        v[i] = n
            .trim()
            .parse()
            .map_err(|_| PetriError::Json(format!("bad count in `{part}`")))?;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{model_check, Semantics};

    fn doubling() -> PetriNet {
        PetriNet::new(
            vec!["p1".into()],
            vec![Transition { name: "t".into(), consume: vec![1], produce: vec![2] }],
            vec![1],
        )
        .unwrap()
    }

    fn reduced_holds(net: &PetriNet, target: &[u64]) -> bool {
        let (m, f) = net.reduce(target).unwrap();
        let labels = model_check(&m, &f, Semantics::Rbatl).unwrap();
        labels.of(&f).contains(&m.state_id("s0").unwrap())
    }

    #[test]
    fn firing() {
        let net = doubling();
        assert_eq!(net.fire(&[1], 0).unwrap(), vec![2]);
        assert!(!net.enabled(&[0], 0));
        assert!(net.fire(&[0], 0).is_err());
        let idle = PetriNet::new(
            vec!["a".into()],
            vec![Transition { name: "z".into(), consume: vec![0], produce: vec![0] }],
            vec![0],
        )
        .unwrap();
        assert!(idle.enabled(&[0], 0));
        assert_eq!(idle.fire(&[4], 0).unwrap(), vec![4]);
    }

    #[test]
    fn reduction_shape() {
        let (m, f) = doubling().reduce(&[3]).unwrap();
        assert_eq!(m.state_count(), 4);
        assert_eq!(m.actions().len(), 4);
        assert!(m.validate().is_empty());
        assert_eq!(f.to_string(), "<{1}: 1> (true U p)");

        let empty = PetriNet::new(vec!["a".into()], vec![], vec![2]).unwrap();
        let (m, _) = empty.reduce(&[1]).unwrap();
        assert_eq!(m.states(), ["s0", "s", "e"]);
        assert!(reduced_holds(&empty, &[2]));
        assert!(!reduced_holds(&empty, &[3]));
    }

    #[test]
    fn coverability_examples() {
        let net = doubling();
        assert!(net.coverable(&[1]).unwrap());
        assert!(net.coverable(&[3]).unwrap());
        assert!(reduced_holds(&net, &[3]));
        let empty = PetriNet::new(vec!["a".into()], vec![], vec![1]).unwrap();
        assert!(!empty.coverable(&[2]).unwrap());
        assert!(!reduced_holds(&empty, &[2]));
    }

    #[test]
    fn json_round_trip() {
        let doc = NetDocument { net: doubling(), target: Some(vec![3]) };
        let text = doc.to_json();
        assert_eq!(NetDocument::from_json(&text).unwrap(), doc);
        let bad = r#"{"format_version": 1, "places": ["a"], "transitions": [], "initial": {"b": 1}}"#;
        assert_eq!(NetDocument::from_json(bad).unwrap_err(), PetriError::UnknownPlace("b".into()));
    }

    #[test]
    fn markings() {
        let net = doubling();
        assert_eq!(parse_marking(&net, "p1=3").unwrap(), vec![3]);
        assert!(parse_marking(&net, "q=3").is_err());
    }
}
