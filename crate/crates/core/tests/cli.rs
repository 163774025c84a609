use std::process::Command;

use netrig::catalog::one_two_network;
use netrig::netgraph::build_ring;

fn netrig(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_netrig")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn analyze_reports_properties() {
    let dir = tempfile::tempdir().unwrap();
    let ring = dir.path().join("ring3.json");
    std::fs::write(&ring, build_ring(3).unwrap().to_json()).unwrap();
    let (code, out, _) = netrig(&["analyze", ring.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "NDCS:true ECS:true PFIS:[0.5,0.5,0.5]");

    let redundant = dir.path().join("redundant.json");
    std::fs::write(
        &redundant,
        r#"{"parties": ["A", "B", "C"], "sources": [{"id": "S1", "parties": ["A", "B", "C"]}, {"id": "S2", "parties": ["B", "C"]}]}"#,
    )
    .unwrap();
    let (code, out, _) = netrig(&["analyze", redundant.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("NDCS:false ECS:false"));

    let one_two = dir.path().join("one_two.json");
    std::fs::write(&one_two, one_two_network().to_json()).unwrap();
    let (_, out, _) = netrig(&["analyze", "--json", one_two.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pfis"], serde_json::json!([0.5, 0.25, 0.25, 0.5]));

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"parties": [], "sources": []}"#).unwrap();
    let (code, _, err) = netrig(&["analyze", empty.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn simulate_writes_distributions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    let (code, _, _) = netrig(&["simulate", "5-0", "--theta", "0.3927", "--coarse", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let d = netrig::quantum::JointDistribution::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let n = netrig::quantum::OutcomeLabel::token;
    assert!((d.prob(&[n(1), n(1), n(2), n(1)]) - 0.09375).abs() < 1e-12);

    let (code, text, _) = netrig(&["simulate", "1-2", "--theta", "0"]);
    assert_eq!(code, 0);
    assert!(text.contains("all-ambiguous 0.111111111111"));
}

#[test]
fn certify_gives_verdicts_and_stable_reports() {
    let (code, out, _) = netrig(&["certify", "5-0", "--theta", "pi/8"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("verdict: NONLOCAL"));
    let (_, out, _) = netrig(&["certify", "5-0", "--theta", "0"]);
    assert!(out.starts_with("verdict: INCONCLUSIVE"));

    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    netrig(&["certify", "ring:4", "--theta", "0.1", "--out", a.to_str().unwrap()]);
    netrig(&["certify", "ring:4", "--theta", "0.1", "--out", b.to_str().unwrap()]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(v["verdict"], "NONLOCAL");

    let (code, _, err) = netrig(&["certify", "ring:x"]);
    assert_eq!(code, 2);
    assert!(err.contains("ring:x"));
}

#[test]
fn scan_emits_reproducible_csv() {
    let args = ["scan", "5-0", "--from", "0", "--to", "0.7854", "--steps", "64", "--omit-timing"];
    let (code, a, _) = netrig(&args);
    assert_eq!(code, 0);
    let (_, b, _) = netrig(&args);
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "theta,verdict,margin,event_prob,ms");
    assert_eq!(lines.len(), 65);
    assert!(a.contains(",NONLOCAL,") && a.contains(",INCONCLUSIVE,"));
}

#[test]
fn finner_reports_both_distributions() {
    let (code, out, _) = netrig(&["finner", "kn:4", "--theta", "0.2", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["decohered"]["gap"].as_f64().unwrap().abs() < 1e-10);
    assert!(v["quantum"]["lhs"].as_f64().is_some());
    let (code, _, _) = netrig(&["finner", "ring:3", "--label", "bogus"]);
    assert_eq!(code, 2);
}
