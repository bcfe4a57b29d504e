//! Every fixture replays to its recorded verdict.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn mpst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpst"))
        .args(args)
        .env("MPST_FIXTURES", fixtures())
        .output()
        .expect("binary runs")
}

fn expect(args: &[&str], code: i32, needles: &[&str]) {
    let out = mpst(args);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(code), "{args:?}\nstdout:\n{stdout}\nstderr:\n{stderr}");
    for needle in needles {
        assert!(stdout.contains(needle) || stderr.contains(needle), "{args:?}: missing `{needle}` in\n{stdout}{stderr}");
    }
}

#[test]
fn subtyping() {
    expect(&["subtype", "sec5_nat.mpst", "sec5_int.mpst"], 0, &["≤"]);
    expect(&["subtype", "swap_T.mpst", "swap_Tp.mpst"], 1, &["⋬", "nsub-out-out", "label l1 unmatched"]);
    expect(&["subtype", "inin_T.mpst", "inin_Tp.mpst"], 1, &["nsub-in-in", "int is not a subsort of nat"]);
    expect(&["subtype", "ex2_T.mpst", "ex2_Tp.mpst"], 1, &["nsub-diff-part"]);
}

#[test]
fn projection() {
    expect(&["project", "sec3_G.gt", "r"], 0, &["q?l3(int).end & q?l5(nat).end"]);
    expect(&["project", "ex1_G.gt", "r"], 0, &["q?l1(bool).q!l1(bool).p!l2(int)"]);
    expect(&["project", "adder.gt", "inc"], 0, &["mu t. add?l4(bool).end & add?l5(int).add!l6(int).t"]);
}

#[test]
fn typing() {
    expect(&["check-session", "adder.mps", "adder.gt"], 0, &["ok"]);
    expect(&["check-session", "adder_nat.mps", "adder_nat.gt"], 0, &["ok"]);
    expect(&["check-session", "adder_neg.mps", "adder.gt"], 0, &["ok"]);
    expect(&["check-session", "adder_nat.mps", "adder.gt"], 1, &["[t-"]);
    expect(&["check-session", "swap_ok.mps", "swap_ok.gt"], 0, &["ok"]);
    expect(&["check-session", "mismatch.mps", "swap_ok.gt"], 1, &["[t-out] at @cl"]);
    expect(&["check-proc", "client.proc", "sec5_nat.mpst"], 0, &["ok"]);
    expect(&["check-proc", "client.proc", "sec5_int.mpst"], 0, &["ok"]);
    expect(&["check-proc", "client_swapped.proc", "swap_Tp.mpst"], 0, &["ok"]);
    expect(&["check-proc", "client_swapped.proc", "swap_T.mpst"], 1, &["[t-out]"]);
}

#[test]
fn execution() {
    expect(&["run", "adder.mps", "--trace"], 0, &["add --l3(9)--> cl", "terminated"]);
    expect(&["run", "adder_nat.mps", "--trace"], 0, &["add --l3(9)--> cl", "terminated"]);
    expect(&["run", "adder_neg.mps", "--trace"], 0, &["add --l3(1)--> cl", "terminated"]);
    expect(&["run", "mismatch.mps"], 1, &["stuck after 0 steps"]);
    expect(&["run", "adder.mps", "--fuel", "3"], 1, &["outOfFuel after 3 steps"]);
    expect(&["stuck", "adder.mps"], 0, &["terminated"]);
    expect(&["stuck", "swap_ok.mps"], 0, &["terminated"]);
    expect(&["stuck", "mismatch.mps"], 1, &["stuckFound", "no steps"]);
    expect(&["stuck", "adder_quiet.mps"], 1, &["stuckFound", "add --l5(5)--> inc"]);
    expect(&["stuck", "adder.mps", "--fuel", "10"], 1, &["diverged"]);
}

#[test]
fn characteristic() {
    expect(
        &["char-global", "ex1_T.mpst", "p"],
        0,
        &["p -> q : { l1(nat). q -> r : l1(bool). r -> q : l1(bool). r -> p : l2(int)"],
    );
    expect(&["char-global", "ex1_T.mpst", "q"], 2, &["already occurs"]);
    expect(&["char-proc", "inin_T.mpst"], 0, &["p?l(x).if succ x > 0 then 0 else 0"]);
    expect(&["precise", "ex2_T.mpst", "ex2_Tp.mpst"], 1, &["⋬ stuck", "stuck trace", "nsub-diff-part"]);
    expect(&["precise", "swap_T.mpst", "swap_Tp.mpst"], 1, &["⋬ stuck", "nsub-out-out"]);
    expect(&["precise", "inin_T.mpst", "inin_Tp.mpst"], 1, &["p --l(-5)--> _c0"]);
    expect(&["precise", "sec5_nat.mpst", "sec5_int.mpst"], 0, &["≤ safe", "search: terminated"]);
}

#[test]
fn usage_errors() {
    expect(&["subtype", "sec5_nat.mpst"], 2, &[]);
    expect(&["subtype", "missing.mpst", "sec5_int.mpst"], 2, &["missing.mpst"]);
    expect(&["subtype", "adder.gt", "sec5_int.mpst"], 2, &["adder.gt:"]);
    expect(&["stuck", "adder.mps", "--fuel", "0"], 2, &["fuel"]);
    expect(&["project", "sec3_G.gt", "not a name"], 2, &["participant"]);
    expect(&["frobnicate"], 2, &[]);
}

#[test]
fn every_fixture_parses() {
    for entry in std::fs::read_dir(fixtures()).unwrap() {
        let path = entry.unwrap().path();
        expect(&["parse", path.to_str().unwrap()], 0, &[]);
    }
}

#[test]
fn json_reports_are_stable() {
    for args in [
        &["--json", "subtype", "swap_T.mpst", "swap_Tp.mpst"][..],
        &["--json", "precise", "ex2_T.mpst", "ex2_Tp.mpst"],
        &["--json", "stuck", "adder_quiet.mps"],
    ] {
        let runs: Vec<Value> = (0..2)
            .map(|_| {
                let mut doc: Value = serde_json::from_slice(&mpst(args).stdout).unwrap();
                let timings = doc.as_object_mut().unwrap().remove("timings").unwrap();
                assert!(timings["check_ms"].is_number());
                doc
            })
            .collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[0]["command"], args[1]);
    }
    let doc: Value = serde_json::from_slice(&mpst(&["--json", "precise", "ex2_T.mpst", "ex2_Tp.mpst"]).stdout).unwrap();
    assert_eq!(doc["verdict"], "⋬ stuck");
    assert!(doc["witness"]["derivation"].as_str().unwrap().starts_with("nsub-diff-part"));
}
