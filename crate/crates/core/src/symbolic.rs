//! Fixpoint labelling for models without production.
//!
//! When no action produces resources, a bounded modality can be decided by
//! splitting the bound into a first costly step and a cheaper remainder,
//! labelling the cheaper variants first. This avoids the tree search
//! entirely and serves as an independent engine for cross-checking it.

use std::collections::HashMap;
use std::rc::Rc;

use crate::checker::atl::{always_fixpoint, pre, until_fixpoint};
use crate::checker::{check_formula, label_boolean, resolve_coalition, CheckError, Labelling, MoveTable, Semantics, StateSet};
use crate::formula::{split, sub_plus, Formula};
use crate::model::{AgentId, Model};
use crate::vector::BoundVec;

/// Fails with the first action that produces some resource.
pub fn require_consumption_only(model: &Model) -> Result<(), CheckError> {
    for s in 0..model.state_count() {
        for a in 0..model.agent_count() {
            if let Some(e) = model.menu(s, a).iter().find(|e| !e.cost.is_consumption_only()) {
                return Err(CheckError::ProductionNotSupported {
                    state: model.state_name(s).to_string(),
                    agent: model.agent_name(a).to_string(),
                    action: model.action_name(e.action).to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Labels `phi` and every formula of its extended closure.
///
/// ```
/// use rbatl::checker::Semantics;
/// use rbatl::fixtures::chain;
/// use rbatl::formula::parse_formula;
/// use rbatl::symbolic::rb_atl_label;
///
/// let m = chain();
/// let two = parse_formula("<{1}: 2> (true U p)").unwrap();
/// let labels = rb_atl_label(&m, &two, Semantics::Rbatl).unwrap();
/// assert!(labels.of(&two).contains(&m.state_id("u0").unwrap()));
/// ```
pub fn rb_atl_label(model: &Model, phi: &Formula, semantics: Semantics) -> Result<Labelling, CheckError> {
    let violations = model.validate();
    if !violations.is_empty() {
        return Err(CheckError::InvalidModel(violations));
    }
    require_consumption_only(model)?;
    check_formula(model, phi)?;

    let mut tables: HashMap<Vec<AgentId>, Rc<MoveTable>> = HashMap::new();
    let mut labels = Labelling::new();
    for f in sub_plus(phi) {
        let set = match label_boolean(model, &f, &labels) {
            Some(set) => set,
            None => {
                let coalition = resolve_coalition(model, f.coalition().expect("modal formula"))?;
                let table = match tables.get(&coalition) {
                    Some(t) => t.clone(),
                    None => {
                        let t = Rc::new(MoveTable::new(model, &coalition)?);
                        tables.insert(coalition, t.clone());
                        t
                    }
                };
                label_modal(&table, &f, &labels, semantics)
            }
        };
        labels.insert(f, set);
    }
    Ok(labels)
}

fn label_modal(table: &MoveTable, f: &Formula, labels: &Labelling, semantics: Semantics) -> StateSet {
    let b = f.bound().expect("modal formula");
    match f {
        Formula::Next { body, .. } => pre(table, labels.of(body), b, semantics),
        Formula::Until { left, right, .. } => {
            let phi = labels.of(left);
            let psi = labels.of(right);
            if b.is_zero_or_infinite() {
                return until_fixpoint(table, b, phi, psi, semantics);
            }
            let zero_cost = b.infinite_part();
            let mut rho = psi.clone();
            for (d, rest) in split(b) {
                let cheaper = labels.of(&f.with_bound(rest));
                let tau: StateSet = pre(table, cheaper, &d, semantics).intersection(phi).copied().collect();
                rho = grow(table, &zero_cost, phi, rho, tau, semantics);
            }
            rho
        }
        Formula::Always { body, .. } => {
            let phi = labels.of(body);
            if b.is_zero_or_infinite() {
                return always_fixpoint(table, b, phi, semantics);
            }
            let zero_cost = b.infinite_part();
            let mut rho = StateSet::new();
            for (d, rest) in split(b) {
                let cheaper = labels.of(&f.with_bound(rest));
                let tau: StateSet = pre(table, cheaper, &d, semantics).intersection(phi).copied().collect();
                rho = grow(table, &zero_cost, phi, rho, tau, semantics);
            }
            rho
        }
        _ => unreachable!("boolean formulas are labelled elsewhere"),
    }
}

/// Adds `tau` to `rho`, then everything in `phi` that can reach `rho` with
/// moves affordable under `bound`.
fn grow(
    table: &MoveTable,
    bound: &BoundVec,
    phi: &StateSet,
    mut rho: StateSet,
    mut tau: StateSet,
    semantics: Semantics,
) -> StateSet {
    while !tau.is_subset(&rho) {
        rho.extend(tau);
        tau = pre(table, &rho, bound, semantics).intersection(phi).copied().collect();
    }
    rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::model_check;
    use crate::fixtures;
    use crate::formula::parse_formula;

    fn holds(m: &Model, f: &str, s: &str) -> bool {
        let f = parse_formula(f).unwrap();
        rb_atl_label(m, &f, Semantics::Rbatl).unwrap().of(&f).contains(&m.state_id(s).unwrap())
    }

    #[test]
    fn chain_needs_two() {
        let m = fixtures::chain();
        assert!(holds(&m, "<{1}: 2> (true U p)", "u0"));
        assert!(!holds(&m, "<{1}: 1> (true U p)", "u0"));
        assert!(holds(&m, "<{1}: inf> (true U p)", "u0"));
        assert!(holds(&m, "<{1}: 0> G true", "u0"));
    }

    #[test]
    fn agrees_with_tree_search_on_chain() {
        let m = fixtures::chain();
        for f in [
            "<{1}: 2> (true U p)",
            "<{1}: 1> (!p U p)",
            "<{1}: 3> G !p",
            "<{1}: 1> X <{1}: 1> (true U p)",
            "<{}: 2> (true U p)",
        ] {
            let f = parse_formula(f).unwrap();
            let a = rb_atl_label(&m, &f, Semantics::Rbatl).unwrap();
            let b = model_check(&m, &f, Semantics::Rbatl).unwrap();
            assert_eq!(a.of(&f), b.of(&f), "{f}");
        }
    }

    #[test]
    fn production_refused() {
        let err = rb_atl_label(&fixtures::shuttle(), &parse_formula("p").unwrap(), Semantics::Rbatl).unwrap_err();
        assert!(matches!(err, CheckError::ProductionNotSupported { ref action, .. } if action == "alpha"));
    }
}
