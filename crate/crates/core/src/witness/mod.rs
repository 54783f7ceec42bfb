//! Strategy witnesses produced by the bounded searches.
//!
//! A witness is the successful part of a search tree: each internal node
//! records the joint action the coalition plays and one child per outcome.
//! Until-witnesses may still contain pumped (`inf`) components;
//! [`concretize`](concretize::concretize) unrolls the pumping loops into a
//! finite strategy tree, and [`certificate`] serializes and independently
//! re-checks the result.

pub mod certificate;
pub mod concretize;

use crate::checker::Semantics;
use crate::formula::Temporal;
use crate::model::{AgentId, JointAction, StateId};
use crate::vector::{BoundVec, CostVec};

/// A resource set to `inf` on arrival at a node because an ancestor with the
/// same state had pointwise smaller availability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pump {
    pub resource: usize,
    /// Depth of the witnessing ancestor on the root path (root = 0).
    pub ancestor: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafKind {
    /// The state satisfies the goal of an until.
    Psi,
    /// Every resource is unbounded; the rest of the strategy is a plain ATL
    /// strategy.
    AllInfinite,
    /// The play loops back to the ancestor at this depth, which has the same
    /// state and no more resources.
    Loopback { ancestor: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeBody {
    Leaf(LeafKind),
    Step {
        action: JointAction,
        cost: CostVec,
        /// One child per outcome, in increasing state order.
        children: Vec<WitnessNode>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessNode {
    pub state: StateId,
    /// Availability on arrival, before any pumping.
    pub avail: BoundVec,
    pub pumps: Vec<Pump>,
    pub body: NodeBody,
}

impl WitnessNode {
    pub fn leaf(state: StateId, avail: BoundVec, kind: LeafKind) -> Self {
        WitnessNode { state, avail, pumps: Vec::new(), body: NodeBody::Leaf(kind) }
    }

    /// Availability after pumping.
    pub fn effective_avail(&self) -> BoundVec {
        let mut e = self.avail.clone();
        for p in &self.pumps {
            e.set(p.resource, crate::vector::Amount::Infinite);
        }
        e
    }

    pub fn children(&self) -> &[WitnessNode] {
        match &self.body {
            NodeBody::Leaf(_) => &[],
            NodeBody::Step { children, .. } => children,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(WitnessNode::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.children().iter().map(WitnessNode::height).max().unwrap_or(0)
    }

    /// True when no node is pumped and no leaf relies on unbounded
    /// resources.
    pub fn is_concrete(&self) -> bool {
        self.pumps.is_empty()
            && !matches!(self.body, NodeBody::Leaf(LeafKind::AllInfinite))
            && self.children().iter().all(WitnessNode::is_concrete)
    }

    /// Every root-to-leaf sequence of states.
    pub fn plays(&self) -> Vec<Vec<StateId>> {
        let kids = self.children();
        if kids.is_empty() {
            return vec![vec![self.state]];
        }
        kids.iter()
            .flat_map(|c| {
                c.plays().into_iter().map(|mut p| {
                    p.insert(0, self.state);
                    p
                })
            })
            .collect()
    }
}

/// A witness for `<A: b> (phi U psi)` or `<A: b> G phi` at `root.state`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub kind: Temporal,
    pub semantics: Semantics,
    pub coalition: Vec<AgentId>,
    pub bound: BoundVec,
    pub root: WitnessNode,
}
