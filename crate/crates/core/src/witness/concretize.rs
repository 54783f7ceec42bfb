//! Turning pumped until-witnesses into finite strategy trees.
//!
//! A pumped node may return to its witnessing ancestor (same state) and
//! replay the ancestor's strategy; each traversal of the loop gains the
//! pumped resources. How often each loop must be taken depends on what the
//! rest of the tree needs, so the witness is treated as a small
//! multi-dimensional energy game: positions are witness nodes, the
//! coalition picks between a node's own step and a jump back to a pump
//! ancestor, and the opponents pick the outcome. The minimal initial
//! credits of every position are computed as a least fixpoint of
//! antichains, level by level, and a finite tree is read off by descending
//! the levels from the query bound.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{LeafKind, NodeBody, Witness, WitnessNode};
use crate::checker::atl::pre;
use crate::checker::{CheckError, Checker, MoveTable, Semantics, StateSet};
use crate::formula::{Formula, Temporal};
use crate::model::{JointAction, StateId};
use crate::vector::{Amount, BoundVec, CostVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConcretizeError {
    #[error("witness is malformed: {0}")]
    Malformed(String),
    #[error("the witness does not fit the bound after unrolling")]
    Insufficient,
    #[error("unrolling exceeded {0} iterations")]
    TooManyIterations(usize),
    #[error("unrolled tree exceeds {0} nodes")]
    TooLarge(usize),
    #[error("credit overflow")]
    Overflow,
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// Number of extra loop traversals needed to lift a resource from `arrival`
/// to `target` when each traversal gains `gain` units.
///
/// ```
/// use rbatl::witness::concretize::repetitions_needed;
///
/// assert_eq!(repetitions_needed(5, 0, 2), 3);
/// assert_eq!(repetitions_needed(4, 6, 2), 0);
/// ```
pub fn repetitions_needed(target: u64, arrival: u64, gain: u64) -> u64 {
    assert!(gain > 0, "a pumping loop gains at least one unit");
    target.saturating_sub(arrival).div_ceil(gain)
}

const MAX_LEVELS: usize = 200_000;
const MAX_NODES: usize = 1_000_000;

/// Credit vectors over the finite dimensions of the query bound.
type Credit = Vec<i64>;

/// A concrete witness and how often each pumped loop was replayed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concretized {
    pub witness: Witness,
    /// Total number of jumps back to a pump ancestor.
    pub repetitions: usize,
}

/// Flattened witness node with its energy-game edges.
struct Position {
    state: StateId,
    kind: PositionKind,
    /// Pump ancestors (positions) this node may jump back to.
    jumps: Vec<usize>,
}

enum PositionKind {
    Leaf { need: Credit, completion: Option<WitnessNode> },
    Step { action: JointAction, cost: CostVec, filter: Credit, delta: Credit, children: Vec<usize> },
}

fn minimal(mut v: Vec<Credit>) -> Vec<Credit> {
    v.sort();
    v.dedup();
    let le = |a: &Credit, b: &Credit| a.iter().zip(b).all(|(x, y)| x <= y);
    let mut out: Vec<Credit> = Vec::new();
    for c in v {
        if !out.iter().any(|o| le(o, &c)) {
            out.retain(|o| !le(&c, o));
            out.push(c);
        }
    }
    out
}

fn covers(v: &Credit, set: &[Credit]) -> bool {
    set.iter().any(|u| u.iter().zip(v).all(|(x, y)| x <= y))
}

/// Replaces pumped loops and unbounded leaves of an until-witness by a
/// finite strategy tree that respects the witness bound. Box witnesses and
/// witnesses without pumping are returned unchanged.
pub fn concretize(checker: &mut Checker<'_>, f: &Formula, w: &Witness) -> Result<Concretized, ConcretizeError> {
    if w.kind != Temporal::Until || w.root.is_concrete() {
        return Ok(Concretized { witness: w.clone(), repetitions: 0 });
    }
    let Formula::Until { left, right, .. } = f else {
        return Err(ConcretizeError::Malformed(format!("`{f}` is not an until formula")));
    };
    let labels = checker.label(f)?;
    let phi = labels.of(left).clone();
    let psi = labels.of(right).clone();
    let table = checker.table(&w.coalition)?;
    let semantics = checker.semantics();
    let dims: Vec<usize> = (0..w.bound.len()).filter(|&i| !w.bound[i].is_infinite()).collect();
    let mut game = Game {
        positions: Vec::new(),
        dims: &dims,
        resources: w.bound.len(),
        table: &table,
        semantics,
        phi: &phi,
        psi: &psi,
        ranks: None,
    };
    game.flatten(&w.root, &mut Vec::new())?;
    let levels = game.solve()?;

    let budget: Credit = dims
        .iter()
        .map(|&i| w.bound[i].finite().expect("finite dimension") as i64)
        .collect();
    let top = levels.len() - 1;
    if !covers(&budget, &levels[top][0]) {
        return Err(ConcretizeError::Insufficient);
    }
    let mut extract = Extract { game: &game, levels: &levels, nodes: 0, repetitions: 0, bound: &w.bound };
    let root = extract.node(0, top, budget)?;
    Ok(Concretized {
        witness: Witness { root, ..w.clone() },
        repetitions: extract.repetitions,
    })
}

struct Game<'a> {
    positions: Vec<Position>,
    dims: &'a [usize],
    resources: usize,
    table: &'a MoveTable,
    semantics: Semantics,
    phi: &'a StateSet,
    psi: &'a StateSet,
    ranks: Option<Vec<Option<usize>>>,
}

impl Game<'_> {
    fn project(&self, c: &CostVec) -> Credit {
        self.dims.iter().map(|&i| c[i]).collect()
    }

    fn flatten(&mut self, n: &WitnessNode, path: &mut Vec<usize>) -> Result<usize, ConcretizeError> {
        let id = self.positions.len();
        let mut jumps = BTreeSet::new();
        for p in &n.pumps {
            let &anc = path
                .get(p.ancestor)
                .ok_or_else(|| ConcretizeError::Malformed(format!("pump ancestor {} is not on the path", p.ancestor)))?;
            if self.positions[anc].state != n.state {
                return Err(ConcretizeError::Malformed("pump ancestor has a different state".into()));
            }
            jumps.insert(anc);
        }
        let kind = match &n.body {
            NodeBody::Leaf(LeafKind::Psi) => PositionKind::Leaf { need: vec![0; self.dims.len()], completion: None },
            NodeBody::Leaf(LeafKind::AllInfinite) => {
                let tree = self.completion(n.state)?;
                PositionKind::Leaf { need: self.need(&tree)?, completion: Some(tree) }
            }
            NodeBody::Leaf(LeafKind::Loopback { .. }) => {
                return Err(ConcretizeError::Malformed("loopback leaf in an until witness".into()))
            }
            NodeBody::Step { .. } => PositionKind::Leaf { need: vec![], completion: None },
        };
        self.positions.push(Position { state: n.state, kind, jumps: jumps.into_iter().collect() });
        if let NodeBody::Step { action, cost, children } = &n.body {
            path.push(id);
            let mut ids = Vec::with_capacity(children.len());
            for c in children {
                ids.push(self.flatten(c, path)?);
            }
            path.pop();
            let filter = match self.semantics {
                Semantics::RalFinite => self.project(&cost.consumption()),
                _ => self.project(cost),
            };
            self.positions[id].kind = PositionKind::Step {
                action: action.clone(),
                cost: cost.clone(),
                filter,
                delta: self.project(cost),
                children: ids,
            };
        }
        Ok(id)
    }

    /// Attractor strategy for the unbounded until from `state`, as a tree
    /// ending in goal states.
    fn completion(&mut self, state: StateId) -> Result<WitnessNode, ConcretizeError> {
        if self.ranks.is_none() {
            let n = self.table.state_count();
            let inf = BoundVec::infinite(self.resources);
            let mut ranks: Vec<Option<usize>> = vec![None; n];
            let mut layer = self.psi.clone();
            for &s in &layer {
                ranks[s] = Some(0);
            }
            let mut k = 0;
            loop {
                k += 1;
                let next = until_step(self.table, &inf, self.phi, &layer, self.semantics);
                if next == layer {
                    break;
                }
                for &s in &next {
                    ranks[s].get_or_insert(k);
                }
                layer = next;
            }
            self.ranks = Some(ranks);
        }
        self.attractor_tree(state)
    }

    fn attractor_tree(&self, state: StateId) -> Result<WitnessNode, ConcretizeError> {
        let ranks = self.ranks.as_ref().expect("ranks computed");
        let rank = ranks[state].ok_or_else(|| {
            ConcretizeError::Malformed(format!("state #{state} of an unbounded leaf cannot enforce the goal"))
        })?;
        let inf = BoundVec::infinite(self.resources);
        if rank == 0 {
            return Ok(WitnessNode::leaf(state, inf, LeafKind::Psi));
        }
        let mv = self
            .table
            .at(state)
            .iter()
            .find(|m| {
                m.allowed(&inf, self.semantics)
                    && m.outcomes.iter().all(|&t| ranks[t].is_some_and(|rt| rt < rank))
            })
            .expect("ranked state has a rank-decreasing move");
        let children = mv
            .outcomes
            .iter()
            .map(|&t| self.attractor_tree(t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WitnessNode {
            state,
            avail: inf,
            pumps: Vec::new(),
            body: NodeBody::Step { action: mv.action.clone(), cost: mv.cost.clone(), children },
        })
    }

    /// Least credit needed to play a fixed finite tree.
    fn need(&self, n: &WitnessNode) -> Result<Credit, ConcretizeError> {
        match &n.body {
            NodeBody::Leaf(_) => Ok(vec![0; self.dims.len()]),
            NodeBody::Step { cost, children, .. } => {
                let delta = self.project(cost);
                let filter = match self.semantics {
                    Semantics::RalFinite => self.project(&cost.consumption()),
                    _ => delta.clone(),
                };
                let mut out: Credit = filter.iter().map(|&x| x.max(0)).collect();
                for c in children {
                    let u = self.need(c)?;
                    for i in 0..out.len() {
                        let v = delta[i].checked_add(u[i]).ok_or(ConcretizeError::Overflow)?;
                        out[i] = out[i].max(v);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Antichains of minimal credits per position, for every level until
    /// they stabilize.
    fn solve(&self) -> Result<Vec<Vec<Vec<Credit>>>, ConcretizeError> {
        let mut levels: Vec<Vec<Vec<Credit>>> = vec![self
            .positions
            .iter()
            .map(|p| match &p.kind {
                PositionKind::Leaf { need, .. } => vec![need.clone()],
                PositionKind::Step { .. } => vec![],
            })
            .collect()];
        loop {
            let prev = levels.last().expect("at least one level");
            let mut next = Vec::with_capacity(self.positions.len());
            for p in &self.positions {
                let mut options = match &p.kind {
                    PositionKind::Leaf { need, .. } => vec![need.clone()],
                    PositionKind::Step { filter, delta, children, .. } => step_credits(filter, delta, children, prev)?,
                };
                for &j in &p.jumps {
                    options.extend(prev[j].iter().cloned());
                }
                next.push(minimal(options));
            }
            if next == *prev {
                return Ok(levels);
            }
            if levels.len() >= MAX_LEVELS {
                return Err(ConcretizeError::TooManyIterations(MAX_LEVELS));
            }
            levels.push(next);
        }
    }
}

/// One Jacobi step of the unbounded until fixpoint.
fn until_step(table: &MoveTable, inf: &BoundVec, phi: &StateSet, rho: &StateSet, sem: Semantics) -> StateSet {
    pre(table, rho, inf, sem)
        .intersection(phi)
        .chain(rho.iter())
        .copied()
        .collect()
}

fn step_credits(filter: &Credit, delta: &Credit, children: &[usize], prev: &[Vec<Credit>]) -> Result<Vec<Credit>, ConcretizeError> {
    let base: Credit = filter.iter().map(|&x| x.max(0)).collect();
    let mut acc = vec![base];
    for &c in children {
        let mut next = Vec::new();
        for a in &acc {
            for u in &prev[c] {
                let mut v = a.clone();
                for i in 0..v.len() {
                    let need = delta[i].checked_add(u[i]).ok_or(ConcretizeError::Overflow)?;
                    v[i] = v[i].max(need);
                }
                next.push(v);
            }
        }
        acc = minimal(next);
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}

struct Extract<'a, 'g> {
    game: &'a Game<'g>,
    levels: &'a [Vec<Vec<Credit>>],
    nodes: usize,
    repetitions: usize,
    bound: &'a BoundVec,
}

impl Extract<'_, '_> {
    fn avail(&self, v: &Credit) -> BoundVec {
        let mut out = self.bound.clone();
        for (k, &i) in self.game.dims.iter().enumerate() {
            out.set(i, Amount::Finite(v[k] as u64));
        }
        out
    }

    fn node(&mut self, pos: usize, level: usize, v: Credit) -> Result<WitnessNode, ConcretizeError> {
        self.nodes += 1;
        if self.nodes > MAX_NODES {
            return Err(ConcretizeError::TooLarge(MAX_NODES));
        }
        let p = &self.game.positions[pos];
        match &p.kind {
            PositionKind::Leaf { need, completion } if need.iter().zip(&v).all(|(n, x)| n <= x) => {
                return Ok(match completion {
                    None => WitnessNode::leaf(p.state, self.avail(&v), LeafKind::Psi),
                    Some(tree) => self.graft(tree, v),
                });
            }
            PositionKind::Step { action, cost, filter, delta, children } if level > 0 => {
                let fits = filter.iter().zip(&v).all(|(f, x)| *f <= *x);
                let rest: Credit = v.iter().zip(delta).map(|(x, d)| x - d).collect();
                let below = &self.levels[level - 1];
                if fits && children.iter().all(|&c| covers(&rest, &below[c])) {
                    let kids = children
                        .iter()
                        .map(|&c| self.node(c, level - 1, rest.clone()))
                        .collect::<Result<Vec<_>, _>>()?;
                    return Ok(WitnessNode {
                        state: p.state,
                        avail: self.avail(&v),
                        pumps: Vec::new(),
                        body: NodeBody::Step { action: action.clone(), cost: cost.clone(), children: kids },
                    });
                }
            }
            _ => {}
        }
        if level > 0 {
            if let Some(&j) = p.jumps.iter().find(|&&j| covers(&v, &self.levels[level - 1][j])) {
                self.repetitions += 1;
                return self.node(j, level - 1, v);
            }
        }
        Err(ConcretizeError::Malformed("credit descent found no option".into()))
    }

    /// Copies a completion tree, filling in the actual availability.
    fn graft(&mut self, tree: &WitnessNode, v: Credit) -> WitnessNode {
        self.nodes += 1;
        let avail = self.avail(&v);
        match &tree.body {
            NodeBody::Step { action, cost, children } => {
                let rest: Credit = v
                    .iter()
                    .zip(self.game.project(cost))
                    .map(|(x, d)| x - d)
                    .collect();
                let kids = children.iter().map(|c| self.graft(c, rest.clone())).collect();
                WitnessNode {
                    state: tree.state,
                    avail,
                    pumps: Vec::new(),
                    body: NodeBody::Step { action: action.clone(), cost: cost.clone(), children: kids },
                }
            }
            NodeBody::Leaf(_) => WitnessNode::leaf(tree.state, avail, LeafKind::Psi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::Checker;
    use crate::fixtures;
    use crate::formula::parse_formula;

    fn run(m: &crate::model::Model, f: &str, state: &str) -> Concretized {
        let f = parse_formula(f).unwrap();
        let mut c = Checker::new(m, Semantics::Rbatl).unwrap();
        let w = c.witness(&f, m.state_id(state).unwrap()).unwrap().unwrap();
        concretize(&mut c, &f, &w).unwrap()
    }

    #[test]
    fn concrete_witness_unchanged() {
        let m = fixtures::shuttle();
        let f = parse_formula("<{a1}: 3,1> (true U p)").unwrap();
        let mut c = Checker::new(&m, Semantics::Rbatl).unwrap();
        let w = c.witness(&f, 0).unwrap().unwrap();
        assert!(w.root.is_concrete());
        assert_eq!(concretize(&mut c, &f, &w).unwrap().witness, w);
    }

    #[test]
    fn shuttle_loop_unrolled() {
        let m = fixtures::shuttle();
        let out = run(&m, "<{a1,a2}: 0,1> (true U p)", "s_I");
        let names: Vec<Vec<&str>> = out
            .witness
            .root
            .plays()
            .iter()
            .map(|p| p.iter().map(|&s| m.state_name(s)).collect())
            .collect();
        assert_eq!(names, vec![vec!["s_I", "s", "s_I", "s", "s_I", "s", "s_I", "s", "s'"]]);
        assert_eq!(out.repetitions, 2);
        assert!(out.witness.root.is_concrete());
    }

    #[test]
    fn single_loop_repetitions() {
        let m = fixtures::workshop();
        let out = run(&m, "<{w}: 0> (true U done)", "q");
        let play = &out.witness.root.plays()[0];
        let works = play.windows(2).filter(|w| w[0] == w[1]).count();
        assert_eq!(works as u64, repetitions_needed(5, 0, 2));
        assert_eq!(play.last(), Some(&m.state_id("goal").unwrap()));
    }

    #[test]
    fn minimal_antichain() {
        let got = minimal(vec![vec![1, 2], vec![2, 1], vec![2, 2], vec![1, 2]]);
        assert_eq!(got, vec![vec![1, 2], vec![2, 1]]);
    }
}
