//! Depth-bounded exhaustive strategy search.
//!
//! Explores concrete availability vectors only, with no pumping and no
//! dominance pruning, up to a fixed number of steps. A `True` answer comes
//! with an explicit finite strategy and is therefore sound; running out of
//! depth yields `Unknown`, never `False`.

use std::collections::HashMap;

use crate::checker::{Semantics, StateSet};
use crate::model::{AgentId, JointAction, Model, StateId};
use crate::vector::BoundVec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    True,
    Unknown,
}

/// The temporal goal, with the satisfaction sets of its arguments.
#[derive(Debug, Clone, Copy)]
pub enum Goal<'a> {
    Until { phi: &'a StateSet, psi: &'a StateSet },
    Always { phi: &'a StateSet },
}

pub struct Query<'a> {
    pub model: &'a Model,
    pub semantics: Semantics,
    pub coalition: &'a [AgentId],
    pub goal: Goal<'a>,
}

/// Searches for a strategy of at most `depth` steps from `state` with
/// budget `bound`.
///
/// For until, every play must reach `psi` within `depth` steps, passing
/// only through `phi`. For always, every play must stay in `phi` until it
/// revisits a state of its own history with no more resources than now,
/// again within `depth` steps.
pub fn bounded_search(q: &Query<'_>, bound: &BoundVec, state: StateId, depth: usize) -> Verdict {
    let mut o = Oracle { q, memo: HashMap::new() };
    let found = match q.goal {
        Goal::Until { phi, psi } => o.until(phi, psi, state, bound.clone(), depth),
        Goal::Always { phi } => o.always(phi, state, bound.clone(), &mut Vec::new(), depth),
    };
    if found {
        Verdict::True
    } else {
        Verdict::Unknown
    }
}

struct Oracle<'q, 'a> {
    q: &'q Query<'a>,
    memo: HashMap<(StateId, BoundVec, usize), bool>,
}

impl Oracle<'_, '_> {
    /// Allowed moves with their successor availability and outcomes.
    fn moves(&self, s: StateId, e: &BoundVec) -> Vec<(BoundVec, Vec<StateId>)> {
        let m = self.q.model;
        let mut out = Vec::new();
        for sigma in m.coalition_actions(s, self.q.coalition) {
            let Some((next, outcomes)) = self.try_move(s, &sigma, e) else {
                continue;
            };
            out.push((next, outcomes));
        }
        out
    }

    fn try_move(&self, s: StateId, sigma: &JointAction, e: &BoundVec) -> Option<(BoundVec, Vec<StateId>)> {
        let m = self.q.model;
        let cost = m.cost_joint(s, sigma).ok()?;
        let charged = match self.q.semantics {
            Semantics::RalFinite => m.consumption_joint(s, sigma).ok()?,
            _ => cost.clone(),
        };
        if !charged.fits_within(e) {
            return None;
        }
        let outcomes: Vec<StateId> = m.outcomes(s, sigma).ok()?.into_iter().collect();
        if self.q.semantics != Semantics::Rbatl && outcomes.is_empty() {
            return None;
        }
        let next = e.minus_cost(&cost).ok()??;
        Some((next, outcomes))
    }

    fn until(&mut self, phi: &StateSet, psi: &StateSet, s: StateId, e: BoundVec, depth: usize) -> bool {
        if psi.contains(&s) {
            return true;
        }
        if depth == 0 || !phi.contains(&s) {
            return false;
        }
        let key = (s, e, depth);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let e = &key.1;
        let result = self
            .moves(s, e)
            .into_iter()
            .any(|(next, outs)| outs.iter().all(|&t| self.until(phi, psi, t, next.clone(), depth - 1)));
        self.memo.insert(key, result);
        result
    }

    fn always(&mut self, phi: &StateSet, s: StateId, e: BoundVec, path: &mut Vec<(StateId, BoundVec)>, depth: usize) -> bool {
        if !phi.contains(&s) {
            return false;
        }
        if path.iter().any(|(t, f)| *t == s && f.le(&e)) {
            return true;
        }
        if depth == 0 {
            return false;
        }
        let moves = self.moves(s, &e);
        path.push((s, e));
        let result = moves
            .into_iter()
            .any(|(next, outs)| outs.iter().all(|&t| self.always(phi, t, next.clone(), path, depth - 1)));
        path.pop();
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn fig1_until(coalition: &[AgentId], bound: &[u64], depth: usize) -> Verdict {
        let m = fixtures::shuttle();
        let all: StateSet = (0..m.state_count()).collect();
        let p = m.label("p").unwrap().clone();
        let q = Query { model: &m, semantics: Semantics::Rbatl, coalition, goal: Goal::Until { phi: &all, psi: &p } };
        bounded_search(&q, &BoundVec::finite(bound), 0, depth)
    }

    #[test]
    fn goal_at_root() {
        let m = fixtures::shuttle();
        let all: StateSet = (0..3).collect();
        let p = m.label("p").unwrap().clone();
        let q = Query { model: &m, semantics: Semantics::Rbatl, coalition: &[0], goal: Goal::Until { phi: &all, psi: &p } };
        assert_eq!(bounded_search(&q, &BoundVec::finite(&[0, 0]), 2, 1), Verdict::True);
    }

    #[test]
    fn shuttle_two_steps() {
        assert_eq!(fig1_until(&[0], &[3, 1], 2), Verdict::True);
        assert_eq!(fig1_until(&[0], &[3, 1], 1), Verdict::Unknown);
        assert_eq!(fig1_until(&[0], &[3, 1], 4), Verdict::True);
    }

    #[test]
    fn shuttle_loop_threshold() {
        // The shortest strategy visits s four times: eight steps.
        assert_eq!(fig1_until(&[0, 1], &[0, 1], 3), Verdict::Unknown);
        assert_eq!(fig1_until(&[0, 1], &[0, 1], 7), Verdict::Unknown);
        assert_eq!(fig1_until(&[0, 1], &[0, 1], 8), Verdict::True);
        assert_eq!(fig1_until(&[0, 1], &[0, 1], 12), Verdict::True);
    }

    #[test]
    fn box_loops() {
        let m = fixtures::leaky_loop();
        let p = m.label("p").unwrap().clone();
        let q = Query { model: &m, semantics: Semantics::Rbatl, coalition: &[0], goal: Goal::Always { phi: &p } };
        assert_eq!(bounded_search(&q, &BoundVec::finite(&[0]), 1, 1), Verdict::True);
        assert_eq!(bounded_search(&q, &BoundVec::finite(&[5]), 0, 20), Verdict::Unknown);
    }
}
