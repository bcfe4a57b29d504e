//! Subject reduction, progress and safety of typed sessions, and
//! canonical states.

use std::path::PathBuf;

use mpst::parse::{parse_global_type, parse_session};
use mpst::{stuck_search, GlobalType, Session, SessionState};
use mpst_testkit::*;
use proptest::prelude::*;

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn typed_fixture(session: &str, global: &str) -> (Session, GlobalType) {
    (parse_session(&fixture(session)).unwrap(), parse_global_type(&fixture(global)).unwrap())
}

const TYPED: [(&str, &str); 4] = [
    ("adder.mps", "adder.gt"),
    ("adder_nat.mps", "adder_nat.gt"),
    ("adder_neg.mps", "adder.gt"),
    ("swap_ok.mps", "swap_ok.gt"),
];

#[test]
fn typed_fixtures_keep_their_types_and_progress() {
    for (session, global) in TYPED {
        let (m, g) = typed_fixture(session, global);
        let explored = explore_typed(&m, &g, 100_000).unwrap_or_else(|e| panic!("{session}: {e}"));
        assert!(explored.terminated > 0, "{session}: {explored:?}");
    }
}

#[test]
fn typed_fixtures_never_get_stuck() {
    for (session, global) in TYPED {
        let (m, _) = typed_fixture(session, global);
        let report = stuck_search(&SessionState::new(&m), 10_000).unwrap();
        assert!(!report.verdict.is_stuck(), "{session}: {:?}", report.verdict);
    }
}

#[test]
fn untyped_fixtures_can_get_stuck() {
    for session in ["mismatch.mps", "adder_quiet.mps"] {
        let m = parse_session(&fixture(session)).unwrap();
        let report = stuck_search(&SessionState::new(&m), 10_000).unwrap();
        assert!(report.verdict.is_stuck(), "{session}: {:?}", report.verdict);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn random_typed_sessions_reduce_safely(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = projectable_global(&mut r, &Shape::new(3, 3, 4));
        let m = session_for(&mut r, &g, false);
        let explored = explore_typed(&m, &g, 2000);
        prop_assert!(explored.is_ok(), "{}\n{}\n{}", g, m, explored.unwrap_err());
        let report = stuck_search(&SessionState::new(&m), 10_000).unwrap();
        prop_assert!(!report.verdict.is_stuck(), "{}\n{}\n{:?}", g, m, report.verdict);
    }

    #[test]
    fn congruent_sessions_share_a_state(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = projectable_global(&mut r, &Shape::new(3, 3, 4));
        let m = session_for(&mut r, &g, false);
        let text = shuffled_session_text(&mut r, &m);
        let shuffled = parse_session(&text).unwrap();
        prop_assert_eq!(SessionState::new(&shuffled), SessionState::new(&m), "{}", text);
    }
}
