use std::process::Command;

use collar_index::cli::{parse_scenarios, Kind, THEOREM_SUITE};

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_collar-index"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn bundled_catalog_covers_every_kind() {
    let s = parse_scenarios(THEOREM_SUITE).unwrap();
    for kind in [
        Kind::Theorem,
        Kind::ExitEverywhere,
        Kind::NoExit,
        Kind::HomotopicToInclusion,
        Kind::BallBoundaryDegree,
        Kind::BoundaryNeighborhood,
        Kind::Morse,
        Kind::AxiomSuite,
    ] {
        assert!(s.iter().any(|x| x.kind == kind), "{kind:?}");
    }
    assert!(s.iter().all(|x| !x.fixture));
}

#[test]
fn listing_and_filters() {
    let (code, text) = run(&["--list", "--filter", "morse"]);
    assert_eq!(code, 0);
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains("field-constant"));
    let (code, text) = run(&["--list", "--filter", "no_such_kind"]);
    assert_eq!((code, text.as_str()), (0, ""));
}

#[test]
fn self_test_checks_fixture_exit_codes() {
    let (code, text) = run(&["--self-test"]);
    assert_eq!(code, 0, "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("ok")).count(), 4);
}

#[test]
fn report_goes_to_the_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let (code, text) = run(&[
        "--filter",
        "morse",
        "--report",
        "structured",
        "--jobs",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!((code, text.as_str()), (0, ""));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["totals"]["pass"], 2);
    assert_eq!(v["scenarios"][0]["name"], "field-radial");
}

#[test]
fn invalid_files_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let one = r#"{"name": "a", "kind": "no_exit", "domain": {"kind": "ball", "center": [0, 0], "radius": 2, "collar_width": 1}, "map": "x1/2; x2/2"}"#;
    let cases = [
        format!(r#"{{"scenarios": [{one}, {one}]}}"#),
        format!(r#"{{"scenarios": [{}]}}"#, one.replace("x1/2; x2/2", "x1/2")),
        r#"{"scenarios": [{"name": "a", "kind": "no_exit", "domain": {"kind": "ball", "center": [0, 0], "radius": 2, "collar_width": 1}, "map": "x1/2; x2/2", "budgets": {"grid_resolution": 0}}]}"#.to_string(),
        r#"{"scenarios": [{"name": "a", "kind": "theorem", "domain": {"kind": "ball", "center": [0, 0], "radius": 2, "collar_width": 1}, "map": "x1/2; x2/2", "lefschetz_patch": 1}]}"#.to_string(),
        r#"{"scenarios": [{"name": "a", "kind": "flux"}]}"#.to_string(),
    ];
    for (i, body) in cases.iter().enumerate() {
        let path = write(&dir, &format!("bad{i}.json"), body);
        assert_eq!(run(&["--file", &path]).0, 3, "{body}");
    }
    assert_eq!(run(&["--file", "/nonexistent/scenarios.json"]).0, 3);
}

#[test]
fn precondition_failures_are_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"scenarios": [{"name": "through-the-hole", "kind": "homotopic_to_inclusion",
        "domain": {"kind": "annulus", "inner": 1, "outer": 2, "collar_width": 0.75}, "map": "-x1; -x2"}]}"#;
    let path = write(&dir, "hole.json", body);
    let (code, text) = run(&["--file", &path]);
    assert_eq!(code, 2);
    assert!(text.starts_with("INCONCLUSIVE"), "{text}");
}
