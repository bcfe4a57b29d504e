//! Printing and parsing, regular-tree equality and unfolding.

use mpst::parse::{parse_expr, parse_global_type, parse_process, parse_session, parse_session_type, ParseErrorKind};
use mpst::syntax::Recursive;
use mpst::{regular_tree_eq, Var};
use mpst_testkit::*;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn session_types_round_trip(seed in any::<u64>()) {
        let t = session_type(&mut rng(seed), &Shape::new(3, 4, 5));
        prop_assert_eq!(parse_session_type(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn global_types_round_trip(seed in any::<u64>()) {
        let g = global_type(&mut rng(seed), &Shape::new(4, 3, 5));
        prop_assert_eq!(parse_global_type(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn processes_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = session_type(&mut r, &Shape::new(3, 3, 4));
        let p = inhabitant(&mut r, &t, false);
        prop_assert_eq!(parse_process(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn sessions_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = projectable_global(&mut r, &Shape::new(3, 3, 3));
        let m = session_for(&mut r, &g, false);
        prop_assert_eq!(parse_session(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn expressions_round_trip(seed in any::<u64>()) {
        let vars = [Var::new("x"), Var::new("y")];
        let e = expr(&mut rng(seed), 4, &vars);
        prop_assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    }
}

proptest! {
    #![proptest_config(config(300))]

    #[test]
    fn regular_tree_eq_is_an_equivalence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = Shape::new(2, 2, 3);
        let a = session_type(&mut r, &shape);
        // Unfolding and rolling give equal trees with different terms.
        let b = if let Some((_, _)) = a.as_rec() { a.unfold() } else { a.clone() };
        let c = session_type(&mut r, &shape);
        prop_assert!(regular_tree_eq(&a, &a));
        prop_assert_eq!(regular_tree_eq(&a, &b), regular_tree_eq(&b, &a));
        prop_assert_eq!(regular_tree_eq(&a, &c), regular_tree_eq(&c, &a));
        if regular_tree_eq(&a, &b) && regular_tree_eq(&b, &c) {
            prop_assert!(regular_tree_eq(&a, &c));
        }
        if regular_tree_eq(&a, &c) && regular_tree_eq(&c, &b) {
            prop_assert!(regular_tree_eq(&a, &b));
        }
    }

    #[test]
    fn unfolding_preserves_the_tree(seed in any::<u64>()) {
        let shape = Shape::new(3, 3, 4).with_rec_chance(0.5);
        let t = session_type(&mut rng(seed), &shape);
        prop_assert!(regular_tree_eq(&t, &t.unfold()));
        prop_assert!(regular_tree_eq(&t, &t.unfold_head()));
        let g = global_type(&mut rng(seed), &shape);
        prop_assert!(regular_tree_eq(&g, &g.unfold()));
    }
}

#[test]
fn duplicate_labels_are_rejected() {
    for text in ["p?a(nat).end & p?a(int).end", "p!a(nat).end \\/ q!b(nat).end \\/ p!a(nat).end"] {
        let err = parse_session_type(text).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::DuplicateLabel | ParseErrorKind::Syntax), "{text}: {err}");
    }
    assert_eq!(parse_global_type("p -> q : { a(nat), a(int) }").unwrap_err().kind, ParseErrorKind::DuplicateLabel);
    assert_eq!(parse_session_type("p?a(nat).end & p?a(int).end").unwrap_err().kind, ParseErrorKind::DuplicateLabel);
}
