use proptest::prelude::*;

use rbatl::formula::{parse_formula, sub_ordered, sub_plus, Coalition, Formula};
use rbatl::vector::{Amount, BoundVec};

fn bound() -> impl Strategy<Value = BoundVec> {
    let amount = prop_oneof![4 => (0u64..4).prop_map(Amount::Finite), 1 => Just(Amount::Infinite)];
    proptest::collection::vec(amount, 1..3).prop_map(BoundVec::new)
}

fn coalition() -> impl Strategy<Value = Coalition> {
    proptest::sample::subsequence(vec!["a", "b", "c"], 0..=3).prop_map(Coalition::new)
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        prop_oneof![Just("p"), Just("q"), Just("busy_1")].prop_map(Formula::prop),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (coalition(), bound(), inner.clone()).prop_map(|(c, b, f)| Formula::next(c, b, f)),
            (coalition(), bound(), inner.clone()).prop_map(|(c, b, f)| Formula::always(c, b, f)),
            (coalition(), bound(), inner.clone(), inner).prop_map(|(c, b, l, r)| Formula::until(c, b, l, r)),
        ]
    })
}

proptest! {
    #[test]
    fn printing_then_parsing_is_identity(f in formula()) {
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn sub_ordered_respects_dependencies(f in formula()) {
        let order = sub_ordered(&f);
        prop_assert_eq!(order.last(), Some(&f));
        let pos = |g: &Formula| order.iter().position(|h| h == g);
        for (i, g) in order.iter().enumerate() {
            prop_assert_eq!(pos(g), Some(i), "duplicate {}", g);
            for c in g.children() {
                prop_assert!(pos(c).unwrap() < i);
            }
            if g.is_modal() && !g.bound().unwrap().is_all_infinite() {
                prop_assert!(pos(&g.infinite_version()).unwrap() < i);
            }
        }
    }

    #[test]
    fn sub_plus_orders_variants_by_bound(f in formula()) {
        let order = sub_plus(&f);
        prop_assert_eq!(order.last(), Some(&f));
        for (i, g) in order.iter().enumerate() {
            for h in &order[i + 1..] {
                if let (Some(b), Some(c)) = (g.bound(), h.bound()) {
                    // The unbounded version always comes first.
                    if b.is_all_infinite() {
                        continue;
                    }
                    if g.with_bound(c.clone()) == *h && c.le(b) && c != b {
                        prop_assert!(false, "{} after {}", h, g);
                    }
                }
            }
        }
    }
}
