//! Subformula closures in labelling order.

use std::collections::BTreeSet;

use super::Formula;
use crate::vector::{Amount, BoundVec};

/// Sort key: smaller formulas first; among equally sized formulas,
/// non-modal and unbounded ones before bounded ones, and smaller bounds
/// before larger ones.
fn order_key(f: &Formula) -> (usize, u8, usize, u64, &Formula) {
    match f.bound() {
        Some(b) if !b.is_all_infinite() => (f.size(), 1, b.infinite_count(), b.finite_sum(), f),
        _ => (f.size(), 0, 0, 0, f),
    }
}

fn sorted(set: BTreeSet<Formula>) -> Vec<Formula> {
    let mut v: Vec<Formula> = set.into_iter().collect();
    v.sort_by(|a, b| order_key(a).cmp(&order_key(b)));
    v
}

fn close(f: &Formula, out: &mut BTreeSet<Formula>, extra: &dyn Fn(&Formula) -> Vec<Formula>) {
    if out.contains(f) {
        return;
    }
    for c in f.children() {
        close(c, out, extra);
    }
    out.insert(f.clone());
    if f.is_modal() {
        for g in extra(f) {
            close(&g, out, extra);
        }
    }
}

/// All subformulas of `phi`, plus the unbounded version of every bounded
/// modality, ordered so that each formula comes after everything it
/// depends on and `phi` itself comes last.
pub fn sub_ordered(phi: &Formula) -> Vec<Formula> {
    let mut out = BTreeSet::new();
    close(phi, &mut out, &|f| vec![f.infinite_version()]);
    sorted(out)
}

/// [`sub_ordered`] extended, for every bounded `G` and `U` modality, with
/// the variants bounded by the second halves of [`split`] of its bound
/// (closed under repetition).
pub fn sub_plus(phi: &Formula) -> Vec<Formula> {
    let mut out = BTreeSet::new();
    close(phi, &mut out, &|f| {
        let mut v = vec![f.infinite_version()];
        if matches!(f, Formula::Always { .. } | Formula::Until { .. }) {
            let b = f.bound().expect("modal formula has a bound");
            v.extend(split(b).into_iter().map(|(_, d2)| f.with_bound(d2)));
        }
        v
    });
    sorted(out)
}

/// All ways `(d, d')` of writing `b = d + d'`, where both halves are `inf`
/// wherever `b` is, and `d` has at least one non-zero finite component.
/// Pairs are ordered by increasing `d'` (total finite amount, then
/// lexicographically).
///
/// ```
/// use rbatl::formula::split;
/// use rbatl::vector::BoundVec;
///
/// let pairs = split(&BoundVec::finite(&[2]));
/// assert_eq!(pairs, vec![
///     (BoundVec::finite(&[2]), BoundVec::finite(&[0])),
///     (BoundVec::finite(&[1]), BoundVec::finite(&[1])),
/// ]);
/// ```
pub fn split(b: &BoundVec) -> Vec<(BoundVec, BoundVec)> {
    let mut halves: Vec<Vec<Amount>> = vec![Vec::new()];
    for a in b.iter() {
        let options: Vec<Amount> = match a {
            Amount::Infinite => vec![Amount::Infinite],
            Amount::Finite(n) => (0..=n).map(Amount::Finite).collect(),
        };
        halves = halves
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |&o| {
                    let mut v = prefix.clone();
                    v.push(o);
                    v
                })
            })
            .collect();
    }
    let mut out: Vec<(BoundVec, BoundVec)> = halves
        .into_iter()
        .filter(|d| d.iter().any(|a| matches!(a, Amount::Finite(n) if *n > 0)))
        .map(|d| {
            let rest = d
                .iter()
                .zip(b.iter())
                .map(|(&di, bi)| match (di, bi) {
                    (Amount::Finite(x), Amount::Finite(y)) => Amount::Finite(y - x),
                    _ => Amount::Infinite,
                })
                .collect();
            (BoundVec::new(d), BoundVec::new(rest))
        })
        .collect();
    out.sort_by(|(_, x), (_, y)| (x.finite_sum(), x).cmp(&(y.finite_sum(), y)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn index(list: &[Formula], f: &str) -> usize {
        let f = p(f);
        list.iter().position(|g| *g == f).unwrap_or_else(|| panic!("{f} missing"))
    }

    #[test]
    fn sub_of_proposition() {
        assert_eq!(sub_ordered(&p("p")), vec![p("p")]);
    }

    #[test]
    fn infinite_version_precedes_bounded() {
        let list = sub_ordered(&p("<{a1}: 3,1> (true U p)"));
        assert_eq!(list.len(), 4);
        let t = index(&list, "true");
        let q = index(&list, "p");
        let inf = index(&list, "<{a1}: inf,inf> (true U p)");
        let fin = index(&list, "<{a1}: 3,1> (true U p)");
        assert!(t < inf && q < inf && inf < fin);
        assert_eq!(fin, list.len() - 1);
    }

    #[test]
    fn nested_modalities() {
        let list = sub_ordered(&p("<{a}: 2> G <{b}: 1> X q"));
        let inner = index(&list, "<{b}: 1> X q").max(index(&list, "<{b}: inf> X q"));
        let outer = index(&list, "<{a}: 2> G <{b}: 1> X q").min(index(&list, "<{a}: inf> G <{b}: 1> X q"));
        assert!(inner < outer);
        assert_eq!(list.len(), 5);
    }

    #[test]
    fn duplicates_are_merged() {
        let list = sub_ordered(&p("(p | p) & <{a}: inf> X p"));
        assert_eq!(list.iter().filter(|f| **f == p("p")).count(), 1);
    }

    #[test]
    fn split_examples() {
        assert_eq!(split(&BoundVec::finite(&[1])), vec![(BoundVec::finite(&[1]), BoundVec::finite(&[0]))]);
        assert!(split(&BoundVec::infinite(1)).is_empty());
        assert!(split(&BoundVec::finite(&[0, 0])).is_empty());
        let mixed = split(&BoundVec::new(vec![Amount::Finite(1), Amount::Infinite]));
        assert_eq!(
            mixed,
            vec![(
                BoundVec::new(vec![Amount::Finite(1), Amount::Infinite]),
                BoundVec::new(vec![Amount::Finite(0), Amount::Infinite])
            )]
        );
        // (b1+1)(b2+1) - 1 pairs for finite b.
        assert_eq!(split(&BoundVec::finite(&[2, 3])).len(), 11);
    }

    #[test]
    fn sub_plus_adds_split_variants() {
        assert_eq!(sub_plus(&p("<{a}: inf> G q")), sub_ordered(&p("<{a}: inf> G q")));
        let list = sub_plus(&p("<{a}: 2> G q"));
        let zero = index(&list, "<{a}: 0> G q");
        let one = index(&list, "<{a}: 1> G q");
        let two = index(&list, "<{a}: 2> G q");
        assert!(index(&list, "<{a}: inf> G q") < zero);
        assert!(zero < one && one < two);
        assert_eq!(list.len(), 5);
        // X modalities get no split variants.
        assert_eq!(sub_plus(&p("<{a}: 2> X q")).len(), 3);
    }
}
