//! Labelling dispatcher and the and-or tree searches for bounded `U`/`G`.

use std::collections::HashMap;
use std::rc::Rc;

use super::atl::{atl_label, pre};
use super::{check_formula, label_boolean, resolve_coalition, CheckError, Labelling, MoveTable, Semantics, StateSet};
use crate::formula::{sub_ordered, Formula, Temporal};
use crate::model::{AgentId, Model, StateId};
use crate::vector::{Amount, BoundVec};
use crate::witness::{LeafKind, NodeBody, Pump, Witness, WitnessNode};

/// Search instrumentation, accumulated over all searches of a checker.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Number of root calls (one per state and bounded `U`/`G` formula).
    pub searches: u64,
    /// Number of search nodes visited.
    pub nodes: u64,
    /// Longest root path seen, counting the current node.
    pub max_depth: usize,
}

pub struct Checker<'m> {
    model: &'m Model,
    semantics: Semantics,
    tables: HashMap<Vec<AgentId>, Rc<MoveTable>>,
    stats: SearchStats,
}

impl<'m> Checker<'m> {
    /// Fails if the model breaks any structural invariant.
    pub fn new(model: &'m Model, semantics: Semantics) -> Result<Self, CheckError> {
        let violations = model.validate();
        if !violations.is_empty() {
            return Err(CheckError::InvalidModel(violations));
        }
        Ok(Checker { model, semantics, tables: HashMap::new(), stats: SearchStats::default() })
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn table(&mut self, coalition: &[AgentId]) -> Result<Rc<MoveTable>, CheckError> {
        if let Some(t) = self.tables.get(coalition) {
            return Ok(t.clone());
        }
        let t = Rc::new(MoveTable::new(self.model, coalition)?);
        self.tables.insert(coalition.to_vec(), t.clone());
        Ok(t)
    }

    /// Labels `phi` and all formulas it depends on.
    pub fn label(&mut self, phi: &Formula) -> Result<Labelling, CheckError> {
        check_formula(self.model, phi)?;
        let mut labels = Labelling::new();
        for f in sub_ordered(phi) {
            let set = self.label_one(&f, &labels)?;
            labels.insert(f, set);
        }
        Ok(labels)
    }

    fn label_one(&mut self, f: &Formula, labels: &Labelling) -> Result<StateSet, CheckError> {
        if let Some(set) = label_boolean(self.model, f, labels) {
            return Ok(set);
        }
        let coalition = resolve_coalition(self.model, f.coalition().expect("modal formula"))?;
        let table = self.table(&coalition)?;
        let bound = f.bound().expect("modal formula");
        let r = self.model.resource_count();
        let (temporal, phi, psi) = match f {
            Formula::Next { body, .. } => (Temporal::Next, labels.of(body), labels.of(body)),
            Formula::Always { body, .. } => (Temporal::Always, labels.of(body), labels.of(body)),
            Formula::Until { left, right, .. } => (Temporal::Until, labels.of(left), labels.of(right)),
            _ => unreachable!("non-modal formulas handled above"),
        };
        if bound.is_all_infinite() {
            return Ok(atl_label(&table, temporal, r, phi, psi, self.semantics));
        }
        if temporal == Temporal::Next {
            return Ok(pre(&table, phi, bound, self.semantics));
        }
        let mut out = StateSet::new();
        for s in 0..self.model.state_count() {
            if self.search(f, s, labels)?.is_some() {
                out.insert(s);
            }
        }
        Ok(out)
    }

    /// Runs the and-or search for a bounded `U` or `G` formula from `state`
    /// with the formula's bound, returning the witness tree on success.
    /// `labels` must hold the formula's arguments and unbounded version.
    pub fn search(&mut self, f: &Formula, state: StateId, labels: &Labelling) -> Result<Option<WitnessNode>, CheckError> {
        let (kind, goal) = match f {
            Formula::Until { right, .. } => (Temporal::Until, Some(labels.of(right))),
            Formula::Always { .. } => (Temporal::Always, None),
            _ => return Err(CheckError::NotASearchFormula(f.to_string())),
        };
        let coalition = resolve_coalition(self.model, f.coalition().expect("modal formula"))?;
        let table = self.table(&coalition)?;
        let bound = f.bound().expect("modal formula").clone();
        let mut search = Search {
            table: &table,
            semantics: self.semantics,
            guard: labels.of(&f.infinite_version()),
            goal: goal.unwrap_or(labels.of(f.children()[0])),
            path: Vec::new(),
            stats: &mut self.stats,
        };
        search.stats.searches += 1;
        Ok(match kind {
            Temporal::Until => search.until(state, bound)?,
            _ => search.always(state, bound)?,
        })
    }

    /// Labels `f` and, if `state` satisfies it, returns a witness. Only
    /// bounded `U` and `G` formulas have witnesses.
    pub fn witness(&mut self, f: &Formula, state: StateId) -> Result<Option<Witness>, CheckError> {
        let kind = match f.temporal() {
            Some(t @ (Temporal::Until | Temporal::Always)) => t,
            _ => return Err(CheckError::NotASearchFormula(f.to_string())),
        };
        let labels = self.label(f)?;
        let root = self.search(f, state, &labels)?;
        let coalition = resolve_coalition(self.model, f.coalition().expect("modal formula"))?;
        Ok(root.map(|root| Witness {
            kind,
            semantics: self.semantics,
            coalition,
            bound: f.bound().expect("modal formula").clone(),
            root,
        }))
    }
}

/// Labels `phi` under `semantics` with the tree-search engine.
///
/// ```
/// use rbatl::checker::{model_check, Semantics};
/// use rbatl::fixtures::shuttle;
/// use rbatl::formula::parse_formula;
///
/// let m = shuttle();
/// let f = parse_formula("<{a1}: 3,1> (true U p)").unwrap();
/// let labels = model_check(&m, &f, Semantics::Rbatl).unwrap();
/// assert!(labels.of(&f).contains(&m.state_id("s_I").unwrap()));
/// ```
pub fn model_check(model: &Model, phi: &Formula, semantics: Semantics) -> Result<Labelling, CheckError> {
    Checker::new(model, semantics)?.label(phi)
}

struct Search<'a> {
    table: &'a MoveTable,
    semantics: Semantics,
    /// States satisfying the unbounded version of the formula.
    guard: &'a StateSet,
    /// `[psi]` for until, `[phi]` for always.
    goal: &'a StateSet,
    /// Ancestors with their availability after pumping.
    path: Vec<(StateId, BoundVec)>,
    stats: &'a mut SearchStats,
}

impl Search<'_> {
    fn visit(&mut self) {
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(self.path.len() + 1);
    }

    fn until(&mut self, state: StateId, avail: BoundVec) -> Result<Option<WitnessNode>, CheckError> {
        self.visit();
        if !self.guard.contains(&state) {
            return Ok(None);
        }
        let same_state = || self.path.iter().enumerate().filter(|(_, (s, _))| *s == state);
        if same_state().any(|(_, (_, e))| e.ge(&avail)) {
            return Ok(None);
        }

        let mut pumps: Vec<Pump> = Vec::new();
        for (depth, (_, e)) in same_state() {
            if !e.le(&avail) {
                continue;
            }
            for i in 0..avail.len() {
                if e[i] < avail[i] && !avail[i].is_infinite() && !pumps.iter().any(|p| p.resource == i) {
                    pumps.push(Pump { resource: i, ancestor: depth });
                }
            }
        }
        pumps.sort_by_key(|p| p.resource);
        let mut e = avail.clone();
        for p in &pumps {
            e.set(p.resource, Amount::Infinite);
        }

        let leaf = |kind| Ok(Some(WitnessNode { state, avail: avail.clone(), pumps: pumps.clone(), body: NodeBody::Leaf(kind) }));
        if self.goal.contains(&state) {
            return leaf(LeafKind::Psi);
        }
        if e.is_all_infinite() {
            return leaf(LeafKind::AllInfinite);
        }

        let body = self.expand(state, e, Self::until)?;
        Ok(body.map(|body| WitnessNode { state, avail, pumps, body }))
    }

    fn always(&mut self, state: StateId, avail: BoundVec) -> Result<Option<WitnessNode>, CheckError> {
        self.visit();
        if !self.guard.contains(&state) {
            return Ok(None);
        }
        let same_state = || self.path.iter().enumerate().filter(|(_, (s, _))| *s == state);
        if same_state().any(|(_, (_, e))| e.ge(&avail) && *e != avail) {
            return Ok(None);
        }
        if let Some((depth, _)) = same_state().find(|(_, (_, e))| e.le(&avail)) {
            return Ok(Some(WitnessNode::leaf(state, avail, LeafKind::Loopback { ancestor: depth })));
        }
        let body = self.expand(state, avail.clone(), Self::always)?;
        Ok(body.map(|body| WitnessNode { state, avail, pumps: Vec::new(), body }))
    }

    /// Tries the allowed moves in order; the first one whose every outcome
    /// succeeds becomes the node's step.
    fn expand(
        &mut self,
        state: StateId,
        e: BoundVec,
        recurse: fn(&mut Self, StateId, BoundVec) -> Result<Option<WitnessNode>, CheckError>,
    ) -> Result<Option<NodeBody>, CheckError> {
        let table = self.table;
        self.path.push((state, e.clone()));
        let mut found = None;
        for mv in table.at(state) {
            if !mv.allowed(&e, self.semantics) {
                continue;
            }
            let Some(next) = e.minus_cost(&mv.cost)? else {
                continue;
            };
            let mut children = Vec::with_capacity(mv.outcomes.len());
            for &t in &mv.outcomes {
                match recurse(self, t, next.clone())? {
                    Some(child) => children.push(child),
                    None => break,
                }
            }
            if children.len() == mv.outcomes.len() {
                found = Some(NodeBody::Step { action: mv.action.clone(), cost: mv.cost.clone(), children });
                break;
            }
        }
        self.path.pop();
        Ok(found)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formula::parse_formula;

    fn holds(m: &Model, f: &str, state: &str, sem: Semantics) -> bool {
        let f = parse_formula(f).unwrap();
        let labels = model_check(m, &f, sem).unwrap();
        labels.of(&f).contains(&m.state_id(state).unwrap())
    }

    #[test]
    fn shuttle_claims() {
        let m = fixtures::shuttle();
        let r = Semantics::Rbatl;
        assert!(holds(&m, "<{a1}: 3,1> (true U p)", "s_I", r));
        assert!(holds(&m, "<{a1,a2}: 0,1> (true U p)", "s_I", r));
        for b in ["2,1", "3,0", "0,0"] {
            assert!(!holds(&m, &format!("<{{a1}}: {b}> (true U p)"), "s_I", r), "{b}");
        }
        assert!(!holds(&m, "<{a1,a2}: 0,0> (true U p)", "s_I", r));
    }

    #[test]
    fn psi_at_root_with_zero_bound() {
        let m = fixtures::shuttle();
        assert!(holds(&m, "<{a1}: 0,0> (true U p)", "s'", Semantics::Rbatl));
    }

    #[test]
    fn pumping_shortcut_witness() {
        let m = fixtures::shuttle();
        let f = parse_formula("<{a1,a2}: 0,1> (true U p)").unwrap();
        let mut c = Checker::new(&m, Semantics::Rbatl).unwrap();
        let w = c.witness(&f, 0).unwrap().unwrap();
        // s_I, s, s_I (pumped r1), s, s'
        assert_eq!(w.root.plays(), vec![vec![0, 1, 0, 1, 2]]);
        let third = &w.root.children()[0].children()[0];
        assert_eq!(third.pumps, vec![Pump { resource: 0, ancestor: 0 }]);
        assert!(!w.root.is_concrete());
    }

    #[test]
    fn box_examples() {
        let m = fixtures::shuttle();
        assert!(holds(&m, "<{a1}: 0,0> G true", "s_I", Semantics::Rbatl));
        let leaky = fixtures::leaky_loop();
        assert!(!holds(&leaky, "<{a}: 3> G p", "s", Semantics::Rbatl));
        assert!(holds(&leaky, "<{a}: inf> G p", "s", Semantics::Rbatl));
        assert!(holds(&leaky, "<{a}: 0> G p", "free", Semantics::Rbatl));
    }

    #[test]
    fn loopback_on_equal_avail() {
        let m = fixtures::leaky_loop();
        let f = parse_formula("<{a}: 0> G p").unwrap();
        let mut c = Checker::new(&m, Semantics::Rbatl).unwrap();
        let w = c.witness(&f, 1).unwrap().unwrap();
        assert_eq!(w.root.children()[0].body, NodeBody::Leaf(LeafKind::Loopback { ancestor: 0 }));
    }

    #[test]
    fn exchange_modes() {
        let m = fixtures::exchange(1);
        let f = "<{a,b}: 0> X p";
        assert!(holds(&m, f, "s", Semantics::Rbatl));
        assert!(holds(&m, f, "s", Semantics::Nt));
        assert!(!holds(&m, f, "s", Semantics::RalFinite));
        let u = "<{a,b}: 0> (true U p)";
        assert!(holds(&m, u, "s", Semantics::Nt));
        assert!(!holds(&m, u, "s", Semantics::RalFinite));
    }

    #[test]
    fn errors() {
        let m = fixtures::shuttle();
        let check = |s: &str| model_check(&m, &parse_formula(s).unwrap(), Semantics::Rbatl).unwrap_err();
        assert_eq!(check("q"), CheckError::UnknownProposition("q".into()));
        assert_eq!(check("<{z}: 1,1> X p"), CheckError::UnknownAgent("z".into()));
        assert!(matches!(check("<{a1}: 1> X p"), CheckError::BoundLength { expected: 2, got: 1, .. }));
    }
}
