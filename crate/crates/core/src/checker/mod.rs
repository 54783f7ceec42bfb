//! Labelling algorithms.
//!
//! [`atl`] holds the one-step predecessor operator and the classical
//! fixpoints used for unbounded modalities; [`bounded`] holds the
//! dispatcher and the and-or searches for bounded `U` and `G`.

pub mod atl;
pub mod bounded;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::formula::{Coalition, Formula};
use crate::model::{AgentId, JointAction, Model, ModelError, StateId, Violation};
use crate::vector::{BoundVec, CostVec, VectorError};

pub use atl::{atl_label, pre};
pub use bounded::{model_check, Checker, SearchStats};

pub type StateSet = BTreeSet<StateId>;

/// Which notion of resource-bounded strategy is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Semantics {
    /// Net cost of each joint action must fit the remaining budget.
    #[default]
    Rbatl,
    /// As `Rbatl`, but a joint action only counts if it has at least one
    /// outcome (for models without `idle`).
    Nt,
    /// Every unit consumed by any member must be covered by the remaining
    /// budget, regardless of what other members produce in the same step.
    RalFinite,
}

impl Semantics {
    pub const ALL: [Semantics; 3] = [Semantics::Rbatl, Semantics::Nt, Semantics::RalFinite];

    pub fn requires_outcomes(self) -> bool {
        !matches!(self, Semantics::Rbatl)
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Rbatl => "rbatl",
            Semantics::Nt => "nt",
            Semantics::RalFinite => "ral-finite",
        })
    }
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rbatl" => Ok(Semantics::Rbatl),
            "nt" => Ok(Semantics::Nt),
            "ral-finite" | "ral" => Ok(Semantics::RalFinite),
            other => Err(format!("unknown semantics `{other}` (expected rbatl, nt or ral-finite)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("invalid model: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidModel(Vec<Violation>),
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
    #[error("unknown agent `{0}` in coalition")]
    UnknownAgent(String),
    #[error("bound of `{formula}` has {got} components but the model has {expected} resources")]
    BoundLength {
        formula: String,
        expected: usize,
        got: usize,
    },
    #[error("the symbolic engine needs a consumption-only model; state `{state}` lets agent `{agent}` produce with `{action}`")]
    ProductionNotSupported {
        state: String,
        agent: String,
        action: String,
    },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("`{0}` is not a bounded `U` or `G` modality")]
    NotASearchFormula(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Vector(#[from] VectorError),
}

/// Checks that every proposition, agent and bound in `phi` fits `model`.
pub fn check_formula(model: &Model, phi: &Formula) -> Result<(), CheckError> {
    for p in phi.propositions() {
        if model.label(p).is_none() {
            return Err(CheckError::UnknownProposition(p.to_string()));
        }
    }
    for c in phi.coalitions() {
        resolve_coalition(model, c)?;
    }
    check_bounds(model, phi)
}

fn check_bounds(model: &Model, phi: &Formula) -> Result<(), CheckError> {
    if let Some(b) = phi.bound() {
        if b.len() != model.resource_count() {
            return Err(CheckError::BoundLength {
                formula: phi.to_string(),
                expected: model.resource_count(),
                got: b.len(),
            });
        }
    }
    phi.children().into_iter().try_for_each(|c| check_bounds(model, c))
}

/// Agent ids of a coalition, in declared agent order.
pub fn resolve_coalition(model: &Model, c: &Coalition) -> Result<Vec<AgentId>, CheckError> {
    let mut ids = c
        .iter()
        .map(|a| model.agent_id(a).ok_or_else(|| CheckError::UnknownAgent(a.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    ids.sort_unstable();
    Ok(ids)
}

/// One available joint action of a coalition at a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub action: JointAction,
    /// Net cost summed over members.
    pub cost: CostVec,
    /// Consumption summed over members, ignoring production.
    pub consumption: CostVec,
    pub outcomes: Vec<StateId>,
}

impl Move {
    /// Whether the move is allowed with `avail` left under `semantics`.
    pub fn allowed(&self, avail: &BoundVec, semantics: Semantics) -> bool {
        if semantics.requires_outcomes() && self.outcomes.is_empty() {
            return false;
        }
        match semantics {
            Semantics::RalFinite => self.consumption.fits_within(avail),
            _ => self.cost.fits_within(avail),
        }
    }
}

/// Every move of a fixed coalition at every state, in enumeration order.
#[derive(Debug, Clone)]
pub struct MoveTable {
    pub coalition: Vec<AgentId>,
    moves: Vec<Vec<Move>>,
}

impl MoveTable {
    pub fn new(model: &Model, coalition: &[AgentId]) -> Result<MoveTable, ModelError> {
        let mut moves = Vec::with_capacity(model.state_count());
        for s in 0..model.state_count() {
            let mut here = Vec::new();
            for action in model.coalition_actions(s, coalition) {
                here.push(Move {
                    cost: model.cost_joint(s, &action)?,
                    consumption: model.consumption_joint(s, &action)?,
                    outcomes: model.outcomes(s, &action)?.into_iter().collect(),
                    action,
                });
            }
            moves.push(here);
        }
        Ok(MoveTable { coalition: coalition.to_vec(), moves })
    }

    pub fn state_count(&self) -> usize {
        self.moves.len()
    }

    pub fn at(&self, s: StateId) -> &[Move] {
        &self.moves[s]
    }
}

/// The satisfaction sets of a formula and its subformulas, in labelling
/// order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Labelling {
    order: Vec<Formula>,
    sets: BTreeMap<Formula, StateSet>,
}

impl Labelling {
    pub fn new() -> Self {
        Labelling::default()
    }

    pub fn insert(&mut self, f: Formula, set: StateSet) {
        if self.sets.insert(f.clone(), set).is_none() {
            self.order.push(f);
        }
    }

    pub fn get(&self, f: &Formula) -> Option<&StateSet> {
        self.sets.get(f)
    }

    /// Like [`get`](Self::get) for formulas that must already be labelled.
    pub fn of(&self, f: &Formula) -> &StateSet {
        self.sets
            .get(f)
            .unwrap_or_else(|| panic!("`{f}` labelled before its subformulas"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Formula, &StateSet)> {
        self.order.iter().map(move |f| (f, &self.sets[f]))
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Restriction to the given formulas (used to compare engines whose
    /// closures differ).
    pub fn restrict<'a>(&self, formulas: impl IntoIterator<Item = &'a Formula>) -> BTreeMap<Formula, StateSet> {
        formulas
            .into_iter()
            .filter_map(|f| self.sets.get(f).map(|s| (f.clone(), s.clone())))
            .collect()
    }
}

/// Labels the non-modal formulas by set algebra over already labelled
/// children. Returns `None` for modalities.
pub(crate) fn label_boolean(model: &Model, f: &Formula, labels: &Labelling) -> Option<StateSet> {
    let all = || (0..model.state_count()).collect::<StateSet>();
    Some(match f {
        Formula::True => all(),
        Formula::False => StateSet::new(),
        Formula::Prop(p) => model.label(p).cloned().unwrap_or_default(),
        Formula::Not(g) => all().difference(labels.of(g)).copied().collect(),
        Formula::Or(l, r) => labels.of(l).union(labels.of(r)).copied().collect(),
        Formula::And(l, r) => labels.of(l).intersection(labels.of(r)).copied().collect(),
        _ => return None,
    })
}

/// Resolves a state name.
pub fn state_id(model: &Model, name: &str) -> Result<StateId, CheckError> {
    model.state_id(name).ok_or_else(|| CheckError::UnknownState(name.to_string()))
}
