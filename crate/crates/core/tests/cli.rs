use std::process::{Command, Output};

use serde_json::Value;
use wci::analysis::{AnalysisReport, ExactRational, TheoremStatus};
use wci::census::CensusSummary;
use wci::oracle::{ConePoint, QsStatus, QsVerdict, SearchStatus, WitnessSearchReport};

fn wci(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wci")).args(args).output().unwrap()
}

fn ok_json<T: serde::de::DeserializeOwned>(args: &[&str]) -> T {
    let out = wci(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_line_on_a_cone() {
    let r: AnalysisReport = ok_json(&["analyze", "1,1,2", "--degrees", "1"]);
    assert!(r.linear_cone);
    assert!(!r.well_formed && !r.weakly_well_formed);
    assert_eq!(r.dim_x, 1);
}

#[test]
fn analyze_smooth_surface_report_is_exact() {
    let r: AnalysisReport = ok_json(&["--json", "analyze", "1,1,2,2,2", "--degrees", "3,4"]);
    assert!(!r.well_formed && r.weakly_well_formed);
    assert_eq!(r.amplitude, -1);
    assert_eq!(r.canonical_self_intersection, ExactRational::new(3, 2));
    assert_eq!(r.theorem_status, TheoremStatus::NotApplicableDim);
    let v: Value = serde_json::from_slice(&wci(&["analyze", "1,1,2,2,2", "--degrees", "3,4"]).stdout).unwrap();
    assert_eq!(v["canonical_self_intersection"], serde_json::json!({"num": 3, "den": 2}));
    assert_eq!(v["dim_X"], 2);
}

#[test]
fn analyze_rejects_bad_input() {
    for args in [
        &["analyze", "1,1", "--degrees", "3,4,5"][..],
        &["analyze", "1,0,2", "--degrees", "2"],
        &["analyze", "1,1,2", "--degrees", "0"],
        &["analyze", "1,x,2", "--degrees", "1"],
        &["analyze", "1,1,2"],
    ] {
        let out = wci(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn analyze_reports_ill_formed_space_as_a_verdict() {
    let r: AnalysisReport = ok_json(&["analyze", "2,4,6", "--degrees", "2"]);
    assert!(!r.space_well_formed && !r.well_formed && !r.weakly_well_formed);
}

#[test]
fn wellform_prints_normal_form_and_trace() {
    let v: Value = ok_json(&["wellform", "1,2,2"]);
    assert_eq!(v["weights"], "1,1,1");
    let v: Value = ok_json(&["wellform", "4,6,10"]);
    assert_eq!(v["weights"], "2,3,5");
    assert_eq!(v["trace"], serde_json::json!([{"kind": "overall-gcd", "divisor": 2}]));
    let v: Value = ok_json(&["wellform", "1,1"]);
    assert_eq!(v["trace"], serde_json::json!([]));
    assert_eq!(wci(&["wellform", "1"]).status.code(), Some(2));
}

#[test]
fn strata_lists_maximal_and_all() {
    let v: Value = ok_json(&["strata", "1,1,2,2,2"]);
    assert_eq!(v["strata"].as_array().unwrap().len(), 1);
    let v: Value = ok_json(&["strata", "1,1,2,2,2", "--all"]);
    assert_eq!(v["strata"].as_array().unwrap().len(), 7);
    assert_eq!(wci(&["strata", "2,4"]).status.code(), Some(2));
}

#[test]
fn witness_search_on_fourfold() {
    let r: WitnessSearchReport = ok_json(&["witness", "1,1,2,2,2,2", "--degrees", "3,4", "--seed", "1", "--prime", "5"]);
    assert_eq!(r.status, SearchStatus::Engaged);
    assert_eq!(r.r, 1);
    assert!(r.origin_in_z);
    assert!(!r.s_points.is_empty());
    for p in &r.s_points {
        assert_eq!(&p.coords[..2], &[0, 0]);
    }
}

#[test]
fn witness_search_escapes_on_linear_cone() {
    let r: WitnessSearchReport = ok_json(&["witness", "1,1,2", "--degrees", "1", "--prime", "5"]);
    assert_eq!(r.status, SearchStatus::LinearConeEscape);
    assert!(!r.origin_in_z);
}

#[test]
fn witness_rejects_bad_strata_and_primes() {
    let base = ["witness", "1,1,2,2,2", "--degrees", "3,4", "--prime"];
    for extra in [&["5", "--stratum", "0,1"][..], &["5", "--stratum", "2,9"], &["6"], &["70001"]] {
        let args: Vec<&str> = base.iter().chain(extra).copied().collect();
        assert_eq!(wci(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn probe_with_explicit_polynomials() {
    let dir = tempfile::tempdir().unwrap();
    let fermat = dir.path().join("fermat.txt");
    std::fs::write(&fermat, "x0^3 + x1^3 + x2^3 + x3^3\n").unwrap();
    let v: QsVerdict = ok_json(&["probe", "1,1,1,1", "--degrees", "3", "--poly-file", fermat.to_str().unwrap(), "--primes", "5,7"]);
    assert_eq!(v.status, QsStatus::NoWitnessFound);
    assert_eq!(v.fields_probed, vec![5, 7]);

    let node = dir.path().join("node.txt");
    std::fs::write(&node, "x0*x1\n").unwrap();
    let v: QsVerdict = ok_json(&["probe", "1,1,1", "--degrees", "2", "--poly-file", node.to_str().unwrap(), "--primes", "5"]);
    assert_eq!(v.status, QsStatus::SingularWitness);
    assert!(v.witnesses.iter().any(|w| w.point == ConePoint::new(vec![0, 0, 1]).unwrap()));

    std::fs::write(&node, "x0*x1 + x2\n").unwrap();
    let out = wci(&["probe", "1,1,1", "--degrees", "2", "--poly-file", node.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("x2"));
}

#[test]
fn census_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.jsonl");
    let out = wci(&[
        "--output", path.to_str().unwrap(), "census", "--max-n", "4", "--max-weight", "2",
        "--max-weight-sum", "8", "--max-k", "2", "--max-degree", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let reports: Vec<AnalysisReport> = text
        .lines()
        .map(|l| serde_json::from_value(serde_json::from_str::<Value>(l).unwrap()["report"].clone()).unwrap())
        .collect();
    let ex5 = reports.iter().find(|r| r.spec.to_string() == "P(1,1,2,2,2)/(3,4)").unwrap();
    assert!(ex5.weakly_well_formed && !ex5.well_formed);
    let summary: CensusSummary = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out.summary.json")).unwrap()).unwrap();
    assert_eq!(summary.records as usize, reports.len());
}

#[test]
fn census_from_config_and_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bounds.json");
    std::fs::write(&cfg, r#"{"max_n": 3, "max_weight": 3, "max_weight_sum": 8, "max_k": 2, "max_degree": 3, "min_dim": 40}"#).unwrap();
    let out = wci(&["census", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let summary: CensusSummary = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(summary, CensusSummary::default());

    std::fs::write(&cfg, r#"{"max_n": 3, "typo": 1}"#).unwrap();
    assert_eq!(wci(&["census", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(wci(&["census", "--max-n", "3"]).status.code(), Some(2));
}

#[test]
fn census_refuses_unwritable_output() {
    let out = wci(&[
        "--output", "/nonexistent-dir/out.jsonl", "census", "--max-n", "3", "--max-weight", "2",
        "--max-weight-sum", "6", "--max-k", "1", "--max-degree", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
