//! Certificate JSON for witnesses and independent re-checking.
//!
//! Validation only trusts the model: every availability is recomputed from
//! the bound and the model's own costs, every outcome set from the
//! transition function.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{LeafKind, NodeBody, Pump, Witness, WitnessNode};
use crate::checker::{Semantics, StateSet};
use crate::formula::Temporal;
use crate::model::{JointAction, Model, StateId};
use crate::vector::{BoundVec, CostVec};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub format_version: u32,
    /// `until` or `always`.
    pub kind: String,
    pub semantics: String,
    pub coalition: Vec<String>,
    pub bound: BoundVec,
    pub root: CertNode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertNode {
    pub state: String,
    pub avail: BoundVec,
    /// Resources pumped to `inf` on arrival, with the witnessing ancestor
    /// depth.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pumped: Vec<CertPump>,
    /// One action per coalition member, in coalition order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostVec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<CertNode>,
    /// `psi`, `all-infinite` or `loopback`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf: Option<String>,
    /// Depth of the loopback ancestor (root = 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loopback: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertPump {
    pub resource: String,
    pub ancestor: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("unsupported format_version {0}")]
    Version(u32),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("malformed certificate: {0}")]
    Malformed(String),
}

impl Certificate {
    pub fn from_witness(model: &Model, w: &Witness) -> Certificate {
        Certificate {
            format_version: FORMAT_VERSION,
            kind: match w.kind {
                Temporal::Until => "until",
                Temporal::Always => "always",
                Temporal::Next => "next",
            }
            .to_string(),
            semantics: w.semantics.to_string(),
            coalition: w.coalition.iter().map(|&a| model.agent_name(a).to_string()).collect(),
            bound: w.bound.clone(),
            root: cert_node(model, &w.root),
        }
    }

    pub fn to_witness(&self, model: &Model) -> Result<Witness, CertificateError> {
        if self.format_version != FORMAT_VERSION {
            return Err(CertificateError::Version(self.format_version));
        }
        let kind = match self.kind.as_str() {
            "until" => Temporal::Until,
            "always" => Temporal::Always,
            other => return Err(CertificateError::Malformed(format!("unknown kind `{other}`"))),
        };
        let semantics: Semantics = self.semantics.parse().map_err(CertificateError::Malformed)?;
        let coalition = self
            .coalition
            .iter()
            .map(|a| model.agent_id(a).ok_or_else(|| unknown("agent", a)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Witness {
            kind,
            semantics,
            root: witness_node(model, &coalition, &self.root)?,
            coalition,
            bound: self.bound.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Certificate, CertificateError> {
        serde_json::from_str(text).map_err(|e| CertificateError::Malformed(e.to_string()))
    }
}

fn unknown(kind: &'static str, name: &str) -> CertificateError {
    CertificateError::Unknown { kind, name: name.to_string() }
}

fn cert_node(model: &Model, n: &WitnessNode) -> CertNode {
    let mut c = CertNode {
        state: model.state_name(n.state).to_string(),
        avail: n.avail.clone(),
        pumped: n
            .pumps
            .iter()
            .map(|p| CertPump { resource: model.resources()[p.resource].clone(), ancestor: p.ancestor })
            .collect(),
        action: None,
        cost: None,
        children: Vec::new(),
        leaf: None,
        loopback: None,
    };
    match &n.body {
        NodeBody::Leaf(kind) => {
            c.leaf = Some(
                match kind {
                    LeafKind::Psi => "psi",
                    LeafKind::AllInfinite => "all-infinite",
                    LeafKind::Loopback { ancestor } => {
                        c.loopback = Some(*ancestor);
                        "loopback"
                    }
                }
                .to_string(),
            );
        }
        NodeBody::Step { action, cost, children } => {
            c.action = Some(action.choices.iter().map(|&a| model.action_name(a).to_string()).collect());
            c.cost = Some(cost.clone());
            c.children = children.iter().map(|k| cert_node(model, k)).collect();
        }
    }
    c
}

fn witness_node(model: &Model, coalition: &[usize], c: &CertNode) -> Result<WitnessNode, CertificateError> {
    let state = model.state_id(&c.state).ok_or_else(|| unknown("state", &c.state))?;
    let pumps = c
        .pumped
        .iter()
        .map(|p| {
            model
                .resource_id(&p.resource)
                .map(|resource| Pump { resource, ancestor: p.ancestor })
                .ok_or_else(|| unknown("resource", &p.resource))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let body = match (&c.leaf, &c.action) {
        (Some(leaf), None) => {
            if !c.children.is_empty() || c.cost.is_some() {
                return Err(CertificateError::Malformed("leaf with children or cost".into()));
            }
            NodeBody::Leaf(match (leaf.as_str(), c.loopback) {
                ("psi", None) => LeafKind::Psi,
                ("all-infinite", None) => LeafKind::AllInfinite,
                ("loopback", Some(ancestor)) => LeafKind::Loopback { ancestor },
                _ => return Err(CertificateError::Malformed(format!("bad leaf `{leaf}`"))),
            })
        }
        (None, Some(names)) => {
            if c.loopback.is_some() {
                return Err(CertificateError::Malformed("loopback index on an internal node".into()));
            }
            if names.len() != coalition.len() {
                return Err(CertificateError::Malformed("action arity differs from coalition".into()));
            }
            let choices = names
                .iter()
                .map(|a| model.action_id(a).ok_or_else(|| unknown("action", a)))
                .collect::<Result<Vec<_>, _>>()?;
            NodeBody::Step {
                action: JointAction::new(coalition.to_vec(), choices),
                cost: c.cost.clone().ok_or_else(|| CertificateError::Malformed("step without cost".into()))?,
                children: c
                    .children
                    .iter()
                    .map(|k| witness_node(model, coalition, k))
                    .collect::<Result<Vec<_>, _>>()?,
            }
        }
        _ => return Err(CertificateError::Malformed("node must be either a leaf or a step".into())),
    };
    Ok(WitnessNode { state, avail: c.avail.clone(), pumps, body })
}

/// Why a witness was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid witness at depth {depth} (state `{state}`): {reason}")]
pub struct Invalid {
    pub depth: usize,
    pub state: String,
    pub reason: String,
}

/// Checks a concrete witness for `<A: bound> (phi U psi)` (with `goal` =
/// `[psi]`) or `<A: bound> G phi` (`goal` unused) at `state`, given the
/// satisfaction sets of the arguments.
pub fn validate(
    model: &Model,
    w: &Witness,
    coalition: &[usize],
    bound: &BoundVec,
    state: StateId,
    phi: &StateSet,
    goal: &StateSet,
) -> Result<(), Invalid> {
    let fail = |depth: usize, s: StateId, reason: String| Invalid {
        depth,
        state: state_label(model, s),
        reason,
    };
    if w.coalition != coalition {
        return Err(fail(0, w.root.state, "coalition differs from the query".into()));
    }
    if w.bound != *bound {
        return Err(fail(0, w.root.state, "bound differs from the query".into()));
    }
    if w.root.state != state {
        return Err(fail(0, w.root.state, "root is not the query state".into()));
    }
    let mut v = Validator { model, w, phi, goal, path: Vec::new() };
    v.node(&w.root, bound.clone()).map_err(|(depth, s, reason)| fail(depth, s, reason))
}

/// Validates `w` against the query `f` at `state`, labelling the arguments
/// of `f` with the tree-search engine under the witness semantics.
pub fn validate_query(model: &Model, f: &crate::formula::Formula, state: StateId, w: &Witness) -> Result<(), Invalid> {
    let fail = |reason: String| Invalid { depth: 0, state: state_label(model, state), reason };
    let coalition = f
        .coalition()
        .ok_or_else(|| fail(format!("`{f}` is not a coalition formula")))
        .and_then(|c| crate::checker::resolve_coalition(model, c).map_err(|e| fail(e.to_string())))?;
    let labels = crate::checker::model_check(model, f, w.semantics).map_err(|e| fail(e.to_string()))?;
    let args = f.children();
    let phi = labels.of(args[0]);
    let goal = labels.of(args[args.len() - 1]);
    validate(model, w, &coalition, f.bound().expect("coalition formula"), state, phi, goal)
}

fn state_label(model: &Model, s: StateId) -> String {
    if s < model.state_count() {
        model.state_name(s).to_string()
    } else {
        format!("#{s}")
    }
}

struct Validator<'a> {
    model: &'a Model,
    w: &'a Witness,
    phi: &'a StateSet,
    goal: &'a StateSet,
    path: Vec<(StateId, BoundVec)>,
}

type Failure = (usize, StateId, String);

impl Validator<'_> {
    fn node(&mut self, n: &WitnessNode, expected: BoundVec) -> Result<(), Failure> {
        let depth = self.path.len();
        let err = |reason: String| Err((depth, n.state, reason));
        if n.state >= self.model.state_count() {
            return err("unknown state".into());
        }
        if n.avail != expected {
            return err(format!("availability is {} but the costs so far leave {}", n.avail, expected));
        }
        if !n.pumps.is_empty() {
            return err("pumped resources must be unrolled first".into());
        }
        let until = self.w.kind == Temporal::Until;
        if !until && !self.phi.contains(&n.state) {
            return err("state violates the invariant".into());
        }
        match &n.body {
            NodeBody::Leaf(LeafKind::Psi) if until => {
                if !self.goal.contains(&n.state) {
                    return err("leaf does not satisfy the goal".into());
                }
                Ok(())
            }
            NodeBody::Leaf(LeafKind::Loopback { ancestor }) if !until => {
                match self.path.get(*ancestor) {
                    Some((s, e)) if *s == n.state && e.le(&n.avail) => Ok(()),
                    Some(_) => err(format!("loopback ancestor {ancestor} has another state or more resources")),
                    None => err(format!("loopback ancestor {ancestor} is not on the path")),
                }
            }
            NodeBody::Leaf(kind) => err(format!("leaf kind {kind:?} not allowed here")),
            NodeBody::Step { action, cost, children } => {
                if until && !self.phi.contains(&n.state) {
                    return err("state before the goal violates the left argument".into());
                }
                if action.coalition != self.w.coalition {
                    return err("joint action is not for the query coalition".into());
                }
                let real = match self.model.cost_joint(n.state, action) {
                    Ok(c) => c,
                    Err(e) => return err(e.to_string()),
                };
                if real != *cost {
                    return err(format!("recorded cost {cost} differs from the model's {real}"));
                }
                let filter = match self.w.semantics {
                    Semantics::RalFinite => match self.model.consumption_joint(n.state, action) {
                        Ok(c) => c,
                        Err(e) => return err(e.to_string()),
                    },
                    _ => real.clone(),
                };
                if !filter.fits_within(&n.avail) {
                    return err(format!("action needs {filter} with only {} left", n.avail));
                }
                let outcomes: Vec<StateId> = match self.model.outcomes(n.state, action) {
                    Ok(o) => o.into_iter().collect(),
                    Err(e) => return err(e.to_string()),
                };
                if self.w.semantics.requires_outcomes() && outcomes.is_empty() {
                    return err("joint action has no outcome".into());
                }
                let kids: Vec<StateId> = children.iter().map(|c| c.state).collect();
                if kids != outcomes {
                    return err("children do not match the outcomes of the joint action".into());
                }
                let next = match n.avail.minus_cost(&real) {
                    Ok(Some(e)) => e,
                    _ => return err("resources would become negative".into()),
                };
                self.path.push((n.state, n.avail.clone()));
                for c in children {
                    self.node(c, next.clone())?;
                }
                self.path.pop();
                Ok(())
            }
        }
    }
}
