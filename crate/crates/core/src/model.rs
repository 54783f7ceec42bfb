//! Resource-bounded concurrent game structures.
//!
//! States, agents, resources and actions are named by strings in external
//! formats and addressed by dense indices inside a [`Model`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::vector::CostVec;

pub type StateId = usize;
pub type AgentId = usize;
pub type ActionId = usize;

/// The distinguished zero-cost action of total models.
pub const IDLE: &str = "idle";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("action `{action}` is not available to agent `{agent}` in state `{state}`")]
    Unavailable {
        state: String,
        agent: String,
        action: String,
    },
    #[error("joint action has {got} components, expected {expected}")]
    Arity { expected: usize, got: usize },
    #[error("cost vector for `{action}` has {got} components, expected {expected}")]
    CostLength {
        action: String,
        expected: usize,
        got: usize,
    },
    #[error("cost overflow")]
    Overflow,
}

/// One entry of an agent's action menu at a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MenuEntry {
    pub action: ActionId,
    pub cost: CostVec,
}

/// A joint action by an (ordered) coalition: one choice per member.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JointAction {
    pub coalition: Vec<AgentId>,
    pub choices: Vec<ActionId>,
}

impl JointAction {
    pub fn new(coalition: Vec<AgentId>, choices: Vec<ActionId>) -> Self {
        debug_assert_eq!(coalition.len(), choices.len());
        JointAction { coalition, choices }
    }

    pub fn choice_of(&self, agent: AgentId) -> Option<ActionId> {
        self.coalition
            .iter()
            .position(|&a| a == agent)
            .map(|i| self.choices[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    agents: Vec<String>,
    resources: Vec<String>,
    states: Vec<String>,
    actions: Vec<String>,
    labels: BTreeMap<String, BTreeSet<StateId>>,
    /// `menus[state][agent]`, in declared order.
    menus: Vec<Vec<Vec<MenuEntry>>>,
    /// Per state: full joint action (one choice per agent) to successor.
    transitions: Vec<BTreeMap<Vec<ActionId>, StateId>>,
    total: bool,
}

impl Model {
    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn resources(&self) -> &[String] {
        &self.resources
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn labels(&self) -> &BTreeMap<String, BTreeSet<StateId>> {
        &self.labels
    }

    pub fn is_total(&self) -> bool {
        self.total
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn resource_count(&self) -> usize {
        self.resources.len()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s]
    }

    pub fn agent_name(&self, a: AgentId) -> &str {
        &self.agents[a]
    }

    pub fn action_name(&self, act: ActionId) -> &str {
        &self.actions[act]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn agent_id(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|a| a == name)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a == name)
    }

    pub fn resource_id(&self, name: &str) -> Option<usize> {
        self.resources.iter().position(|r| r == name)
    }

    /// States where proposition `p` holds, or `None` if `p` is undeclared.
    pub fn label(&self, p: &str) -> Option<&BTreeSet<StateId>> {
        self.labels.get(p)
    }

    /// `d(s, a)` with costs, in declared order.
    pub fn menu(&self, s: StateId, a: AgentId) -> &[MenuEntry] {
        &self.menus[s][a]
    }

    pub fn transitions(&self, s: StateId) -> &BTreeMap<Vec<ActionId>, StateId> {
        &self.transitions[s]
    }

    pub fn successor(&self, s: StateId, joint: &[ActionId]) -> Option<StateId> {
        self.transitions[s].get(joint).copied()
    }

    /// `c(s, a, act)`, defined only on available actions.
    pub fn cost(&self, s: StateId, a: AgentId, act: ActionId) -> Option<&CostVec> {
        self.menus[s][a]
            .iter()
            .find(|e| e.action == act)
            .map(|e| &e.cost)
    }

    /// True when no available action produces any resource.
    pub fn is_consumption_only(&self) -> bool {
        self.menus
            .iter()
            .flatten()
            .flatten()
            .all(|e| e.cost.is_consumption_only())
    }

    fn unavailable(&self, s: StateId, a: AgentId, act: ActionId) -> ModelError {
        ModelError::Unavailable {
            state: self.states[s].clone(),
            agent: self.agents[a].clone(),
            action: self.actions.get(act).cloned().unwrap_or_else(|| format!("#{act}")),
        }
    }

    /// `cost_A(s, σ)`: the componentwise sum of the members' costs.
    pub fn cost_joint(&self, s: StateId, sigma: &JointAction) -> Result<CostVec, ModelError> {
        let mut total = CostVec::zero(self.resource_count());
        for (&a, &act) in sigma.coalition.iter().zip(&sigma.choices) {
            let c = self.cost(s, a, act).ok_or_else(|| self.unavailable(s, a, act))?;
            total = total.checked_add(c).map_err(|_| ModelError::Overflow)?;
        }
        Ok(total)
    }

    /// Sum over members of the consumed part of each member's cost.
    pub fn consumption_joint(&self, s: StateId, sigma: &JointAction) -> Result<CostVec, ModelError> {
        let mut total = CostVec::zero(self.resource_count());
        for (&a, &act) in sigma.coalition.iter().zip(&sigma.choices) {
            let c = self.cost(s, a, act).ok_or_else(|| self.unavailable(s, a, act))?;
            total = total
                .checked_add(&c.consumption())
                .map_err(|_| ModelError::Overflow)?;
        }
        Ok(total)
    }

    /// `D_A(s)`: the Cartesian product of the members' menus, enumerated
    /// lexicographically by declared menu position (first member most
    /// significant).
    pub fn coalition_actions(&self, s: StateId, coalition: &[AgentId]) -> Vec<JointAction> {
        let menus: Vec<&[MenuEntry]> = coalition.iter().map(|&a| self.menu(s, a)).collect();
        product(&menus)
            .into_iter()
            .map(|choices| JointAction::new(coalition.to_vec(), choices))
            .collect()
    }

    /// `out(s, σ_A)`: successors over all completions of `σ_A` by the other
    /// agents' available actions.
    pub fn outcomes(&self, s: StateId, sigma: &JointAction) -> Result<BTreeSet<StateId>, ModelError> {
        for (&a, &act) in sigma.coalition.iter().zip(&sigma.choices) {
            if self.cost(s, a, act).is_none() {
                return Err(self.unavailable(s, a, act));
            }
        }
        let menus: Vec<&[MenuEntry]> = (0..self.agent_count())
            .map(|a| match sigma.choice_of(a) {
                Some(_) => &[][..],
                None => self.menu(s, a),
            })
            .collect();
        // Coalition members contribute a fixed component; others vary.
        let mut out = BTreeSet::new();
        let free: Vec<&[MenuEntry]> = (0..self.agent_count())
            .filter(|a| sigma.choice_of(*a).is_none())
            .map(|a| menus[a])
            .collect();
        for completion in product(&free) {
            let mut rest = completion.into_iter();
            let full: Vec<ActionId> = (0..self.agent_count())
                .map(|a| sigma.choice_of(a).unwrap_or_else(|| rest.next().unwrap()))
                .collect();
            if let Some(t) = self.successor(s, &full) {
                out.insert(t);
            }
        }
        Ok(out)
    }

    /// Checks every structural invariant; an empty result means the model is
    /// well formed. Totality requirements are only checked when the model
    /// is flagged total.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let r = self.resource_count();
        let n = self.agent_count();
        let idle = self.action_id(IDLE);

        for (p, set) in &self.labels {
            for &s in set {
                if s >= self.state_count() {
                    out.push(Violation::LabelOutOfRange { prop: p.clone(), state: s });
                }
            }
        }

        for s in 0..self.state_count() {
            for a in 0..n {
                let menu = self.menu(s, a);
                let mut seen = BTreeSet::new();
                for e in menu {
                    if !seen.insert(e.action) {
                        out.push(Violation::DuplicateAction {
                            state: self.states[s].clone(),
                            agent: self.agents[a].clone(),
                            action: self.actions[e.action].clone(),
                        });
                    }
                    if e.cost.len() != r {
                        out.push(Violation::CostLength {
                            state: self.states[s].clone(),
                            agent: self.agents[a].clone(),
                            action: self.actions[e.action].clone(),
                            len: e.cost.len(),
                        });
                    }
                }
                if self.total {
                    match idle.and_then(|i| menu.iter().find(|e| e.action == i)) {
                        None => out.push(Violation::MissingIdle {
                            state: self.states[s].clone(),
                            agent: self.agents[a].clone(),
                        }),
                        Some(e) if !e.cost.is_zero() => out.push(Violation::IdleCost {
                            state: self.states[s].clone(),
                            agent: self.agents[a].clone(),
                        }),
                        Some(_) => {}
                    }
                }
            }

            for (joint, &t) in &self.transitions[s] {
                if joint.len() != n {
                    out.push(Violation::JointArity {
                        state: self.states[s].clone(),
                        got: joint.len(),
                    });
                    continue;
                }
                if t >= self.state_count() {
                    out.push(Violation::TargetOutOfRange {
                        state: self.states[s].clone(),
                        target: t,
                    });
                }
                for (a, &act) in joint.iter().enumerate() {
                    if self.cost(s, a, act).is_none() {
                        out.push(Violation::UnavailableInTransition {
                            state: self.states[s].clone(),
                            agent: self.agents[a].clone(),
                            action: self.actions.get(act).cloned().unwrap_or_default(),
                        });
                    }
                }
            }

            if self.total {
                let all: Vec<AgentId> = (0..n).collect();
                for joint in self.coalition_actions(s, &all) {
                    if self.successor(s, &joint.choices).is_none() {
                        out.push(Violation::UndefinedTransition {
                            state: self.states[s].clone(),
                            joint: joint.choices.iter().map(|&c| self.actions[c].clone()).collect(),
                        });
                    }
                }
            }
        }
        out
    }

    /// Copy of this model with one cost replaced; used to build perturbed
    /// fixtures.
    pub fn with_cost(&self, s: StateId, a: AgentId, act: ActionId, cost: CostVec) -> Option<Model> {
        let mut m = self.clone();
        let entry = m.menus[s][a].iter_mut().find(|e| e.action == act)?;
        entry.cost = cost;
        Some(m)
    }
}

/// Cartesian product of menus as action-id tuples, lexicographic order.
fn product(menus: &[&[MenuEntry]]) -> Vec<Vec<ActionId>> {
    let mut acc: Vec<Vec<ActionId>> = vec![Vec::new()];
    for menu in menus {
        let mut next = Vec::with_capacity(acc.len() * menu.len());
        for prefix in &acc {
            for e in menu.iter() {
                let mut v = prefix.clone();
                v.push(e.action);
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

/// A broken model invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MissingIdle { state: String, agent: String },
    IdleCost { state: String, agent: String },
    DuplicateAction { state: String, agent: String, action: String },
    CostLength { state: String, agent: String, action: String, len: usize },
    UnavailableInTransition { state: String, agent: String, action: String },
    UndefinedTransition { state: String, joint: Vec<String> },
    JointArity { state: String, got: usize },
    TargetOutOfRange { state: String, target: usize },
    LabelOutOfRange { prop: String, state: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingIdle { state, agent } => {
                write!(f, "state `{state}`: agent `{agent}` has no `idle` action")
            }
            Violation::IdleCost { state, agent } => {
                write!(f, "state `{state}`: `idle` of agent `{agent}` has non-zero cost")
            }
            Violation::DuplicateAction { state, agent, action } => {
                write!(f, "state `{state}`: agent `{agent}` lists `{action}` twice")
            }
            Violation::CostLength { state, agent, action, len } => write!(
                f,
                "state `{state}`: cost of `{action}` for agent `{agent}` has {len} components"
            ),
            Violation::UnavailableInTransition { state, agent, action } => write!(
                f,
                "state `{state}`: transition uses `{action}`, unavailable to agent `{agent}`"
            ),
            Violation::UndefinedTransition { state, joint } => write!(
                f,
                "state `{state}`: no transition for joint action ({})",
                joint.join(",")
            ),
            Violation::JointArity { state, got } => {
                write!(f, "state `{state}`: transition with {got} action components")
            }
            Violation::TargetOutOfRange { state, target } => {
                write!(f, "state `{state}`: transition to unknown state #{target}")
            }
            Violation::LabelOutOfRange { prop, state } => {
                write!(f, "proposition `{prop}` labels unknown state #{state}")
            }
        }
    }
}

/// Name-based construction of a [`Model`].
///
/// ```
/// use rbatl::model::ModelBuilder;
///
/// let model = ModelBuilder::new(["a"], ["r"])
///     .state("s")
///     .action("s", "a", "idle", [0])
///     .transition("s", ["idle"], "s")
///     .label("p", "s")
///     .build()
///     .unwrap();
/// assert!(model.validate().is_empty());
/// ```
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    agents: Vec<String>,
    resources: Vec<String>,
    states: Vec<String>,
    labels: Vec<(String, String)>,
    declared_props: Vec<String>,
    actions: Vec<(String, String, String, Vec<i64>)>,
    transitions: Vec<(String, Vec<String>, String)>,
    total: bool,
}

impl ModelBuilder {
    pub fn new<A, R>(agents: A, resources: R) -> Self
    where
        A: IntoIterator,
        A::Item: Into<String>,
        R: IntoIterator,
        R::Item: Into<String>,
    {
        ModelBuilder {
            agents: agents.into_iter().map(Into::into).collect(),
            resources: resources.into_iter().map(Into::into).collect(),
            states: Vec::new(),
            labels: Vec::new(),
            declared_props: Vec::new(),
            actions: Vec::new(),
            transitions: Vec::new(),
            total: true,
        }
    }

    pub fn state(mut self, name: impl Into<String>) -> Self {
        self.states.push(name.into());
        self
    }

    pub fn states<I>(mut self, names: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<String>,
    {
        self.states.extend(names.into_iter().map(Into::into));
        self
    }

    /// Declares a proposition without labelling any state.
    pub fn proposition(mut self, prop: impl Into<String>) -> Self {
        self.declared_props.push(prop.into());
        self
    }

    pub fn label(mut self, prop: impl Into<String>, state: impl Into<String>) -> Self {
        self.labels.push((prop.into(), state.into()));
        self
    }

    pub fn action<C>(mut self, state: &str, agent: &str, action: &str, cost: C) -> Self
    where
        C: IntoIterator<Item = i64>,
    {
        self.actions.push((
            state.to_string(),
            agent.to_string(),
            action.to_string(),
            cost.into_iter().collect(),
        ));
        self
    }

    pub fn transition<J>(mut self, state: &str, joint: J, target: &str) -> Self
    where
        J: IntoIterator,
        J::Item: Into<String>,
    {
        self.transitions.push((
            state.to_string(),
            joint.into_iter().map(Into::into).collect(),
            target.to_string(),
        ));
        self
    }

    pub fn total(mut self, total: bool) -> Self {
        self.total = total;
        self
    }

    pub fn build(self) -> Result<Model, ModelError> {
        fn index(names: &[String], kind: &'static str) -> Result<HashMap<String, usize>, ModelError> {
            let mut map = HashMap::new();
            for (i, n) in names.iter().enumerate() {
                if map.insert(n.clone(), i).is_some() {
                    return Err(ModelError::Duplicate { kind, name: n.clone() });
                }
            }
            Ok(map)
        }
        let state_ix = index(&self.states, "state")?;
        let agent_ix = index(&self.agents, "agent")?;
        index(&self.resources, "resource")?;
        let lookup_state =
            |s: &str| state_ix.get(s).copied().ok_or_else(|| ModelError::UnknownState(s.into()));
        let lookup_agent =
            |a: &str| agent_ix.get(a).copied().ok_or_else(|| ModelError::UnknownAgent(a.into()));

        let r = self.resources.len();
        let mut actions: Vec<String> = Vec::new();
        let mut action_ix: HashMap<String, usize> = HashMap::new();
        let mut menus = vec![vec![Vec::new(); self.agents.len()]; self.states.len()];
        for (s, a, act, cost) in &self.actions {
            let s = lookup_state(s)?;
            let a = lookup_agent(a)?;
            if cost.len() != r {
                return Err(ModelError::CostLength {
                    action: act.clone(),
                    expected: r,
                    got: cost.len(),
                });
            }
            let id = *action_ix.entry(act.clone()).or_insert_with(|| {
                actions.push(act.clone());
                actions.len() - 1
            });
            let menu: &mut Vec<MenuEntry> = &mut menus[s][a];
            if menu.iter().any(|e| e.action == id) {
                return Err(ModelError::Duplicate { kind: "action", name: act.clone() });
            }
            menu.push(MenuEntry { action: id, cost: CostVec::new(cost.clone()) });
        }

        let mut transitions = vec![BTreeMap::new(); self.states.len()];
        for (s, joint, t) in &self.transitions {
            let sid = lookup_state(s)?;
            let tid = lookup_state(t)?;
            if joint.len() != self.agents.len() {
                return Err(ModelError::Arity { expected: self.agents.len(), got: joint.len() });
            }
            let mut ids = Vec::with_capacity(joint.len());
            for (a, act) in joint.iter().enumerate() {
                let id = action_ix.get(act).copied().ok_or_else(|| ModelError::Unavailable {
                    state: s.clone(),
                    agent: self.agents[a].clone(),
                    action: act.clone(),
                })?;
                ids.push(id);
            }
            if transitions[sid].insert(ids, tid).is_some() {
                return Err(ModelError::Duplicate {
                    kind: "transition",
                    name: format!("{s}:({})", joint.join(",")),
                });
            }
        }

        let mut labels: BTreeMap<String, BTreeSet<StateId>> = BTreeMap::new();
        for p in self.declared_props {
            labels.entry(p).or_default();
        }
        for (p, s) in &self.labels {
            let s = lookup_state(s)?;
            labels.entry(p.clone()).or_default().insert(s);
        }

        Ok(Model {
            agents: self.agents,
            resources: self.resources,
            states: self.states,
            actions,
            labels,
            menus,
            transitions,
            total: self.total,
        })
    }
}
