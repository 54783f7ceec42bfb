//! Controllable predecessors and classical ATL fixpoints.

use super::{MoveTable, Semantics, StateSet};
use crate::formula::Temporal;
use crate::vector::BoundVec;

/// States where the coalition has a move allowed under `bound` whose
/// outcomes all lie in `rho`.
pub fn pre(table: &MoveTable, rho: &StateSet, bound: &BoundVec, semantics: Semantics) -> StateSet {
    (0..table.state_count())
        .filter(|&s| {
            table
                .at(s)
                .iter()
                .any(|m| m.allowed(bound, semantics) && m.outcomes.iter().all(|t| rho.contains(t)))
        })
        .collect()
}

/// Least fixpoint of `rho = psi ∪ (phi ∩ pre(rho))`.
pub fn until_fixpoint(
    table: &MoveTable,
    bound: &BoundVec,
    phi: &StateSet,
    psi: &StateSet,
    semantics: Semantics,
) -> StateSet {
    let mut rho = psi.clone();
    loop {
        let next: StateSet = pre(table, &rho, bound, semantics)
            .intersection(phi)
            .chain(rho.iter())
            .copied()
            .collect();
        if next == rho {
            return rho;
        }
        rho = next;
    }
}

/// Greatest fixpoint of `rho = phi ∩ pre(rho)`.
pub fn always_fixpoint(table: &MoveTable, bound: &BoundVec, phi: &StateSet, semantics: Semantics) -> StateSet {
    let mut rho = phi.clone();
    loop {
        let next: StateSet = pre(table, &rho, bound, semantics).intersection(phi).copied().collect();
        if next == rho {
            return rho;
        }
        rho = next;
    }
}

/// Satisfaction set of an unbounded modality given the sets of its
/// arguments (`psi` is ignored for `X` and `G`).
pub fn atl_label(
    table: &MoveTable,
    temporal: Temporal,
    resources: usize,
    phi: &StateSet,
    psi: &StateSet,
    semantics: Semantics,
) -> StateSet {
    let inf = BoundVec::infinite(resources);
    match temporal {
        Temporal::Next => pre(table, phi, &inf, semantics),
        Temporal::Until => until_fixpoint(table, &inf, phi, psi, semantics),
        Temporal::Always => always_fixpoint(table, &inf, phi, semantics),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(v: &[usize]) -> StateSet {
        v.iter().copied().collect()
    }

    #[test]
    fn pre_of_empty_set_in_total_model() {
        let m = fixtures::shuttle();
        let t = MoveTable::new(&m, &[0]).unwrap();
        assert!(pre(&t, &StateSet::new(), &BoundVec::infinite(2), Semantics::Rbatl).is_empty());
    }

    #[test]
    fn gamma_needs_five() {
        let m = fixtures::shuttle();
        let t = MoveTable::new(&m, &[0]).unwrap();
        let s = m.state_id("s").unwrap();
        let target = set(&[m.state_id("s'").unwrap()]);
        assert!(pre(&t, &target, &BoundVec::finite(&[5, 0]), Semantics::Rbatl).contains(&s));
        assert!(!pre(&t, &target, &BoundVec::finite(&[4, 0]), Semantics::Rbatl).contains(&s));
    }

    #[test]
    fn exchange_separates_ral() {
        let m = fixtures::exchange(1);
        let t = MoveTable::new(&m, &[0, 1]).unwrap();
        let s = m.state_id("s").unwrap();
        let target = set(&[m.state_id("t").unwrap()]);
        let zero = BoundVec::finite(&[0]);
        assert!(pre(&t, &target, &zero, Semantics::Rbatl).contains(&s));
        assert!(pre(&t, &target, &zero, Semantics::Nt).contains(&s));
        assert!(!pre(&t, &target, &zero, Semantics::RalFinite).contains(&s));
        assert!(pre(&t, &target, &BoundVec::finite(&[1]), Semantics::RalFinite).contains(&s));
    }

    #[test]
    fn deadlock_only_counts_without_outcome_requirement() {
        let m = fixtures::exchange(1);
        let t = MoveTable::new(&m, &[]).unwrap();
        let d = m.state_id("d").unwrap();
        let inf = BoundVec::infinite(1);
        assert!(pre(&t, &StateSet::new(), &inf, Semantics::Rbatl).contains(&d));
        assert!(!pre(&t, &StateSet::new(), &inf, Semantics::Nt).contains(&d));
    }

    #[test]
    fn classical_fixpoints() {
        let m = fixtures::shuttle();
        let all = set(&[0, 1, 2]);
        let p = m.label("p").unwrap().clone();
        let a1 = MoveTable::new(&m, &[0]).unwrap();
        let reach = atl_label(&a1, Temporal::Until, 2, &all, &p, Semantics::Rbatl);
        assert!(reach.contains(&m.state_id("s_I").unwrap()));
        assert_eq!(atl_label(&a1, Temporal::Next, 2, &all, &all, Semantics::Rbatl), all);
        assert!(atl_label(&a1, Temporal::Always, 2, &StateSet::new(), &all, Semantics::Rbatl).is_empty());
    }
}
