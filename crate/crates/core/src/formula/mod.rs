//! Formula syntax trees, concrete syntax and subformula orderings.

mod parse;
mod sub;

use std::collections::BTreeSet;
use std::fmt;

pub use parse::{parse_formula, translate_endowments, ParseError};
pub use sub::{split, sub_ordered, sub_plus};

use crate::vector::BoundVec;

/// A set of agent names acting jointly.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(BTreeSet<String>);

impl Coalition {
    pub fn new<I>(agents: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<String>,
    {
        Coalition(agents.into_iter().map(Into::into).collect())
    }

    pub fn empty() -> Self {
        Coalition(BTreeSet::new())
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, agent: &str) -> bool {
        self.0.contains(agent)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// The temporal operator under a coalition modality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Temporal {
    Next,
    Always,
    Until,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Prop(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Next {
        coalition: Coalition,
        bound: BoundVec,
        body: Box<Formula>,
    },
    Always {
        coalition: Coalition,
        bound: BoundVec,
        body: Box<Formula>,
    },
    Until {
        coalition: Coalition,
        bound: BoundVec,
        left: Box<Formula>,
        right: Box<Formula>,
    },
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Prop(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn next(coalition: Coalition, bound: BoundVec, body: Formula) -> Formula {
        Formula::Next { coalition, bound, body: Box::new(body) }
    }

    pub fn always(coalition: Coalition, bound: BoundVec, body: Formula) -> Formula {
        Formula::Always { coalition, bound, body: Box::new(body) }
    }

    pub fn until(coalition: Coalition, bound: BoundVec, left: Formula, right: Formula) -> Formula {
        Formula::Until {
            coalition,
            bound,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Direct subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) => vec![],
            Formula::Not(f) => vec![f],
            Formula::Or(l, r) | Formula::And(l, r) => vec![l, r],
            Formula::Next { body, .. } | Formula::Always { body, .. } => vec![body],
            Formula::Until { left, right, .. } => vec![left, right],
        }
    }

    pub fn temporal(&self) -> Option<Temporal> {
        match self {
            Formula::Next { .. } => Some(Temporal::Next),
            Formula::Always { .. } => Some(Temporal::Always),
            Formula::Until { .. } => Some(Temporal::Until),
            _ => None,
        }
    }

    pub fn is_modal(&self) -> bool {
        self.temporal().is_some()
    }

    pub fn coalition(&self) -> Option<&Coalition> {
        match self {
            Formula::Next { coalition, .. }
            | Formula::Always { coalition, .. }
            | Formula::Until { coalition, .. } => Some(coalition),
            _ => None,
        }
    }

    pub fn bound(&self) -> Option<&BoundVec> {
        match self {
            Formula::Next { bound, .. } | Formula::Always { bound, .. } | Formula::Until { bound, .. } => {
                Some(bound)
            }
            _ => None,
        }
    }

    /// The same modality with its bound replaced; non-modal formulas are
    /// returned unchanged.
    pub fn with_bound(&self, b: BoundVec) -> Formula {
        let mut f = self.clone();
        match &mut f {
            Formula::Next { bound, .. } | Formula::Always { bound, .. } | Formula::Until { bound, .. } => {
                *bound = b
            }
            _ => {}
        }
        f
    }

    /// The unbounded counterpart of a modality.
    pub fn infinite_version(&self) -> Formula {
        match self.bound() {
            Some(b) => self.with_bound(BoundVec::infinite(b.len())),
            None => self.clone(),
        }
    }

    pub fn modal_depth(&self) -> usize {
        let inner = self.children().iter().map(|c| c.modal_depth()).max().unwrap_or(0);
        inner + usize::from(self.is_modal())
    }

    /// Proposition names occurring in the formula.
    pub fn propositions(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        if let Formula::Prop(p) = self {
            out.insert(p);
        }
        for c in self.children() {
            c.collect_props(out);
        }
    }

    /// Every modality bound in the formula, outermost first.
    pub fn bounds(&self) -> Vec<&BoundVec> {
        let mut out = Vec::new();
        self.collect_bounds(&mut out);
        out
    }

    fn collect_bounds<'a>(&'a self, out: &mut Vec<&'a BoundVec>) {
        if let Some(b) = self.bound() {
            out.push(b);
        }
        for c in self.children() {
            c.collect_bounds(out);
        }
    }

    /// Every coalition in the formula, outermost first.
    pub fn coalitions(&self) -> Vec<&Coalition> {
        let mut out: Vec<&Coalition> = self.coalition().into_iter().collect();
        for c in self.children() {
            out.extend(c.coalitions());
        }
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn prefix(f: &mut fmt::Formatter<'_>, c: &Coalition, b: &BoundVec) -> fmt::Result {
            if b.is_empty() {
                write!(f, "<{c}>")
            } else {
                write!(f, "<{c}: {b}>")
            }
        }
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Prop(p) => write!(f, "{p}"),
            Formula::Not(g) => write!(f, "!{g}"),
            Formula::Or(l, r) => write!(f, "({l} | {r})"),
            Formula::And(l, r) => write!(f, "({l} & {r})"),
            Formula::Next { coalition, bound, body } => {
                prefix(f, coalition, bound)?;
                write!(f, " X {body}")
            }
            Formula::Always { coalition, bound, body } => {
                prefix(f, coalition, bound)?;
                write!(f, " G {body}")
            }
            Formula::Until { coalition, bound, left, right } => {
                prefix(f, coalition, bound)?;
                write!(f, " ({left} U {right})")
            }
        }
    }
}
