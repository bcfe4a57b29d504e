//! Subtyping against its negation.

use mpst::syntax::Recursive;
use mpst::{decide, nsub, sub, sub_stats, Verdict};
use mpst_testkit::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, ..ProptestConfig::default() })]

    #[test]
    fn exactly_one_of_sub_and_nsub_holds(seed in any::<u64>()) {
        let (a, b) = type_pair(&mut rng(seed), &Shape::new(3, 4, 5));
        match (sub(&a, &b), nsub(&a, &b)) {
            (true, None) => {}
            (false, Some(d)) => prop_assert!(d.verify().is_ok(), "{}", d),
            (holds, d) => prop_assert!(false, "sub = {} and nsub = {:?} on {} vs {}", holds, d, a, b),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    #[test]
    fn sub_is_reflexive(seed in any::<u64>()) {
        let t = session_type(&mut rng(seed), &Shape::new(3, 4, 5));
        prop_assert!(sub(&t, &t));
        prop_assert!(nsub(&t, &t).is_none());
    }

    #[test]
    fn sub_is_transitive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = Shape::new(3, 3, 4);
        let t1 = session_type(&mut r, &shape);
        let t2 = widen(&mut r, &shape, &t1);
        let t3 = if seed % 3 == 0 { mutate(&mut r, &shape, &t2) } else { widen(&mut r, &shape, &t2) };
        if sub(&t1, &t2) && sub(&t2, &t3) {
            prop_assert!(sub(&t1, &t3), "{} <= {} <= {}", t1, t2, t3);
        }
    }

    #[test]
    fn sub_ignores_unfolding(seed in any::<u64>()) {
        let shape = Shape::new(3, 3, 4).with_rec_chance(0.4);
        let (a, b) = type_pair(&mut rng(seed), &shape);
        let holds = sub(&a, &b);
        prop_assert_eq!(sub(&a.unfold(), &b), holds);
        prop_assert_eq!(sub(&a, &b.unfold()), holds);
        prop_assert_eq!(nsub(&a.unfold(), &b.unfold()).is_none(), holds);
    }

    #[test]
    fn assumptions_are_bounded_by_subterm_pairs(seed in any::<u64>()) {
        let (a, b) = type_pair(&mut rng(seed), &Shape::new(3, 4, 5));
        let stats = sub_stats(&a, &b);
        prop_assert!(stats.assumed <= stats.left_nodes * stats.right_nodes);
        prop_assert!(stats.assumed <= a.size() * b.size());
    }

    #[test]
    fn decide_agrees_with_both_procedures(seed in any::<u64>()) {
        let (a, b) = type_pair(&mut rng(seed), &Shape::new(2, 3, 4));
        match decide(&a, &b).unwrap() {
            Verdict::Leq => prop_assert!(sub(&a, &b)),
            Verdict::Nleq(d) => {
                prop_assert!(!sub(&a, &b));
                prop_assert_eq!(&d.left, &a);
                prop_assert_eq!(&d.right, &b);
            }
        }
    }
}
