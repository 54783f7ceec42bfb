//! Resource quantity vectors.
//!
//! Three flavours are used throughout the crate:
//!
//! * [`CostVec`]: signed per-resource cost of an action (positive consumes,
//!   negative produces).
//! * [`BoundVec`]: per-resource availability or budget over the naturals
//!   extended with infinity.
//! * markings, which are plain natural vectors and live in [`crate::petri`].
//!
//! Comparisons are pointwise. Infinity absorbs finite arithmetic.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VectorError {
    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("arithmetic overflow in resource component {component}")]
    Overflow { component: usize },
    #[error("invalid amount `{0}`")]
    InvalidAmount(String),
}

fn same_len(left: usize, right: usize) -> Result<(), VectorError> {
    if left == right {
        Ok(())
    } else {
        Err(VectorError::LengthMismatch { left, right })
    }
}

/// A quantity of one resource: a natural number or infinity.
///
/// The derived order puts every finite amount below `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Amount {
    Finite(u64),
    Infinite,
}

impl Amount {
    pub const ZERO: Amount = Amount::Finite(0);

    pub fn is_infinite(self) -> bool {
        matches!(self, Amount::Infinite)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Amount::Finite(n) => Some(n),
            Amount::Infinite => None,
        }
    }

    pub fn checked_add(self, other: Amount) -> Option<Amount> {
        match (self, other) {
            (Amount::Finite(a), Amount::Finite(b)) => a.checked_add(b).map(Amount::Finite),
            _ => Some(Amount::Infinite),
        }
    }

    /// `self - cost`; `None` when a finite amount would go negative or
    /// overflow.
    pub fn checked_sub_cost(self, cost: i64) -> Option<Amount> {
        match self {
            Amount::Infinite => Some(Amount::Infinite),
            Amount::Finite(n) => {
                if cost >= 0 {
                    n.checked_sub(cost as u64).map(Amount::Finite)
                } else {
                    n.checked_add(cost.unsigned_abs()).map(Amount::Finite)
                }
            }
        }
    }

    /// Whether a signed cost fits within this amount (`cost <= self`).
    pub fn admits(self, cost: i64) -> bool {
        match self {
            Amount::Infinite => true,
            Amount::Finite(n) => cost <= 0 || (cost as u64) <= n,
        }
    }
}

impl From<u64> for Amount {
    fn from(n: u64) -> Self {
        Amount::Finite(n)
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Amount::Finite(n) => write!(f, "{n}"),
            Amount::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Amount {
    type Err = VectorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Amount::Infinite);
        }
        s.parse::<u64>()
            .map(Amount::Finite)
            .map_err(|_| VectorError::InvalidAmount(s.to_string()))
    }
}

// Finite amounts serialize as JSON numbers, infinity as the string "inf".
impl Serialize for Amount {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Amount::Finite(n) => serializer.serialize_u64(*n),
            Amount::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Amount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct AmountVisitor;

        impl Visitor<'_> for AmountVisitor {
            type Value = Amount;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a natural number or \"inf\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Amount, E> {
                Ok(Amount::Finite(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Amount, E> {
                u64::try_from(v)
                    .map(Amount::Finite)
                    .map_err(|_| E::custom(format!("negative amount {v}")))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Amount, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(AmountVisitor)
    }
}

/// Availability / bound vector over `N ∪ {∞}`.
///
/// The derived `Ord` is lexicographic and only used for deterministic
/// ordering; use [`BoundVec::leq`] and friends for the pointwise order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundVec(Vec<Amount>);

impl BoundVec {
    pub fn new(components: Vec<Amount>) -> Self {
        BoundVec(components)
    }

    pub fn finite(components: &[u64]) -> Self {
        BoundVec(components.iter().copied().map(Amount::Finite).collect())
    }

    pub fn zero(len: usize) -> Self {
        BoundVec(vec![Amount::ZERO; len])
    }

    pub fn infinite(len: usize) -> Self {
        BoundVec(vec![Amount::Infinite; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[Amount] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Amount> + '_ {
        self.0.iter().copied()
    }

    pub fn set(&mut self, i: usize, value: Amount) {
        self.0[i] = value;
    }

    pub fn is_all_infinite(&self) -> bool {
        self.0.iter().all(|a| a.is_infinite())
    }

    /// True when every component is `0` or `∞`.
    pub fn is_zero_or_infinite(&self) -> bool {
        self.0
            .iter()
            .all(|a| matches!(a, Amount::Infinite | Amount::Finite(0)))
    }

    /// The vector with `∞` where `self` is infinite and `0` elsewhere.
    pub fn infinite_part(&self) -> BoundVec {
        BoundVec(
            self.0
                .iter()
                .map(|a| if a.is_infinite() { Amount::Infinite } else { Amount::ZERO })
                .collect(),
        )
    }

    pub fn infinite_count(&self) -> usize {
        self.0.iter().filter(|a| a.is_infinite()).count()
    }

    /// Sum of the finite components (saturating).
    pub fn finite_sum(&self) -> u64 {
        self.0
            .iter()
            .filter_map(|a| a.finite())
            .fold(0u64, u64::saturating_add)
    }

    /// Pointwise `self <= other`.
    pub fn leq(&self, other: &BoundVec) -> Result<bool, VectorError> {
        same_len(self.len(), other.len())?;
        Ok(self.le(other))
    }

    /// Pointwise `self <= other` for vectors already known to be the same
    /// length.
    pub fn le(&self, other: &BoundVec) -> bool {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Pointwise `self >= other`.
    pub fn ge(&self, other: &BoundVec) -> bool {
        other.le(self)
    }

    /// `self - cost`, with `∞ - k = ∞`.
    ///
    /// Returns `Ok(None)` when a finite component would become negative.
    pub fn minus_cost(&self, cost: &CostVec) -> Result<Option<BoundVec>, VectorError> {
        same_len(self.len(), cost.len())?;
        let mut out = Vec::with_capacity(self.len());
        for (i, (a, &k)) in self.0.iter().zip(&cost.0).enumerate() {
            match a.checked_sub_cost(k) {
                Some(v) => out.push(v),
                None if k < 0 => return Err(VectorError::Overflow { component: i }),
                None => return Ok(None),
            }
        }
        Ok(Some(BoundVec(out)))
    }

    /// Pointwise sum with `∞` absorbing.
    pub fn checked_add(&self, other: &BoundVec) -> Result<BoundVec, VectorError> {
        same_len(self.len(), other.len())?;
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .map(|(i, (a, b))| a.checked_add(*b).ok_or(VectorError::Overflow { component: i }))
            .collect::<Result<Vec<_>, _>>()
            .map(BoundVec)
    }
}

impl Index<usize> for BoundVec {
    type Output = Amount;

    fn index(&self, i: usize) -> &Amount {
        &self.0[i]
    }
}

impl From<Vec<Amount>> for BoundVec {
    fn from(v: Vec<Amount>) -> Self {
        BoundVec(v)
    }
}

impl fmt::Display for BoundVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Signed per-resource cost vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CostVec(Vec<i64>);

impl CostVec {
    pub fn new(components: Vec<i64>) -> Self {
        CostVec(components)
    }

    pub fn zero(len: usize) -> Self {
        CostVec(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// True when no component produces a resource.
    pub fn is_consumption_only(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// Componentwise positive part: the amount consumed.
    pub fn consumption(&self) -> CostVec {
        CostVec(self.0.iter().map(|&c| c.max(0)).collect())
    }

    pub fn checked_add(&self, other: &CostVec) -> Result<CostVec, VectorError> {
        same_len(self.len(), other.len())?;
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .map(|(i, (a, b))| a.checked_add(*b).ok_or(VectorError::Overflow { component: i }))
            .collect::<Result<Vec<_>, _>>()
            .map(CostVec)
    }

    /// Pointwise `self <= bound`.
    pub fn fits_within(&self, bound: &BoundVec) -> bool {
        debug_assert_eq!(self.len(), bound.len());
        self.0.iter().zip(bound.iter()).all(|(&k, b)| b.admits(k))
    }
}

impl Index<usize> for CostVec {
    type Output = i64;

    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl From<Vec<i64>> for CostVec {
    fn from(v: Vec<i64>) -> Self {
        CostVec(v)
    }
}

impl fmt::Display for CostVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ">")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const INF: Amount = Amount::Infinite;

    fn b(v: &[u64]) -> BoundVec {
        BoundVec::finite(v)
    }

    #[test]
    fn leq_examples() {
        assert!(b(&[0, 0]).leq(&b(&[0, 0])).unwrap());
        let with_inf = BoundVec::new(vec![INF, Amount::Finite(1)]);
        assert!(b(&[3, 1]).leq(&with_inf).unwrap());
        assert!(!b(&[2, 1]).leq(&b(&[1, 2])).unwrap());
        assert!(!b(&[1, 2]).leq(&b(&[2, 1])).unwrap());
    }

    #[test]
    fn leq_length_mismatch() {
        assert_eq!(
            b(&[1]).leq(&b(&[1, 2])),
            Err(VectorError::LengthMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn minus_cost_examples() {
        let out = b(&[3, 1]).minus_cost(&CostVec::new(vec![-2, 1])).unwrap();
        assert_eq!(out, Some(b(&[5, 0])));

        let inf = BoundVec::infinite(2);
        assert_eq!(inf.minus_cost(&CostVec::new(vec![5, 0])).unwrap(), Some(inf.clone()));

        assert_eq!(b(&[0, 1]).minus_cost(&CostVec::new(vec![1, -1])).unwrap(), None);
    }

    #[test]
    fn minus_cost_overflow_is_an_error() {
        let e = b(&[u64::MAX]);
        assert_eq!(
            e.minus_cost(&CostVec::new(vec![-1])),
            Err(VectorError::Overflow { component: 0 })
        );
    }

    #[test]
    fn cost_add_overflow() {
        let a = CostVec::new(vec![i64::MAX]);
        assert!(a.checked_add(&CostVec::new(vec![1])).is_err());
    }

    #[test]
    fn amount_json() {
        let v = BoundVec::new(vec![Amount::Finite(3), INF]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[3,"inf"]"#);
        assert_eq!(serde_json::from_str::<BoundVec>(&s).unwrap(), v);
        assert!(serde_json::from_str::<BoundVec>("[-1]").is_err());
    }

    fn amount() -> impl Strategy<Value = Amount> {
        prop_oneof![4 => (0u64..6).prop_map(Amount::Finite), 1 => Just(INF)]
    }

    fn bound(len: usize) -> impl Strategy<Value = BoundVec> {
        proptest::collection::vec(amount(), len).prop_map(BoundVec::new)
    }

    fn cost(len: usize) -> impl Strategy<Value = CostVec> {
        proptest::collection::vec(-4i64..5, len).prop_map(CostVec::new)
    }

    proptest! {
        #[test]
        fn pointwise_order_is_partial_order(x in bound(3), y in bound(3), z in bound(3)) {
            prop_assert!(x.le(&x));
            if x.le(&y) && y.le(&x) {
                prop_assert_eq!(&x, &y);
            }
            if x.le(&y) && y.le(&z) {
                prop_assert!(x.le(&z));
            }
        }

        #[test]
        fn subtracting_zero_is_identity(e in bound(3)) {
            prop_assert_eq!(e.minus_cost(&CostVec::zero(3)).unwrap(), Some(e.clone()));
        }

        #[test]
        fn subtraction_composes(e in bound(3), k1 in cost(3), k2 in cost(3)) {
            let stepwise = e.minus_cost(&k1).unwrap().and_then(|m| m.minus_cost(&k2).unwrap());
            let joint = e.minus_cost(&k1.checked_add(&k2).unwrap()).unwrap();
            if let (Some(a), Some(b)) = (stepwise, joint) {
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn fits_within_matches_subtraction(e in bound(3), k in cost(3)) {
            prop_assert_eq!(k.fits_within(&e), e.minus_cost(&k).unwrap().is_some());
        }
    }
}
