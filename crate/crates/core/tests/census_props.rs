use wci::analysis::{is_linear_cone, TheoremStatus, WciSpec};
use wci::census::{enumerate_specs, run_census, summary_path, write_census, write_jsonl, CensusBounds, CensusSummary};
use wci::oracle::ProbeOptions;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn bounds(max_n: usize, max_weight: u64, max_weight_sum: u64, max_k: usize, max_degree: u64) -> CensusBounds {
    CensusBounds {
        max_n,
        max_weight,
        max_weight_sum,
        max_k,
        max_degree,
        require_non_linear_cone: false,
        min_dim: 0,
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Counts specs straight from the definitions: every ascending weight tuple
/// whose entries with one removed are coprime, times the multisets of degrees.
fn expected_count(b: &CensusBounds) -> u64 {
    let mut total = 0;
    for len in 2..=b.max_n + 1 {
        let mut w = vec![1u64; len];
        loop {
            let sum: u64 = w.iter().sum();
            let wf = (0..len).all(|i| {
                w.iter().enumerate().filter(|&(j, _)| j != i).fold(0, |g, (_, &a)| gcd(g, a)) == 1
            });
            if sum <= b.max_weight_sum && wf {
                let n = len - 1;
                for k in 1..=b.max_k.min(n) {
                    if n - k >= b.min_dim {
                        total += binomial(b.max_degree + k as u64 - 1, k as u64);
                    }
                }
            }
            // next ascending tuple in 1..=max_weight
            match (0..len).rev().find(|&i| w[i] < b.max_weight) {
                Some(i) => {
                    let v = w[i] + 1;
                    w[i..].iter_mut().for_each(|x| *x = v);
                }
                None => break,
            }
        }
    }
    total
}

#[test]
fn enumeration_is_complete() {
    for b in [
        bounds(3, 4, 9, 2, 6),
        bounds(4, 5, 12, 3, 5),
        CensusBounds { min_dim: 2, ..bounds(5, 3, 10, 3, 4) },
    ] {
        let specs: Vec<WciSpec> = enumerate_specs(&b).collect();
        assert_eq!(specs.len() as u64, expected_count(&b), "{b:?}");
        let mut sorted = specs.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), specs.len());
    }
}

#[test]
fn linear_cone_filter_only_drops_linear_cones() {
    let b = bounds(4, 4, 10, 2, 6);
    let all = run_census(&b, None).unwrap();
    let filtered = run_census(&CensusBounds { require_non_linear_cone: true, ..b.clone() }, None).unwrap();
    let cones = all.records.iter().filter(|r| r.report.linear_cone).count() as u64;
    assert!(cones > 0);
    assert_eq!(filtered.summary.linear_cone_skipped, cones);
    assert_eq!(filtered.summary.records + cones, all.summary.records);
    assert!(filtered.records.iter().all(|r| !is_linear_cone(&r.report.spec)));
}

#[test]
fn census_is_deterministic() {
    let b = bounds(4, 4, 10, 2, 6);
    let probe = ProbeOptions {
        primes: vec![3],
        max_points: 2000,
        ..ProbeOptions::default()
    };
    let render = || {
        let out = run_census(&b, Some(&probe)).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&out.records, &mut buf).unwrap();
        buf.extend(serde_json::to_vec(&out.summary).unwrap());
        buf
    };
    assert_eq!(render(), render());
}

#[test]
fn known_families_are_found() {
    let out = run_census(&bounds(6, 2, 12, 2, 4), None).unwrap();
    let find = |w: &str, d: &str| {
        let s = WciSpec::parse(w, d).unwrap();
        out.records.iter().find(|r| r.report.spec == s).map(|r| &r.report).unwrap_or_else(|| panic!("{s} missing"))
    };
    let r = find("1,1,2,2,2", "3,4");
    assert!(!r.well_formed && r.weakly_well_formed);
    for w in ["1,1,2,2,2,2", "1,1,2,2,2,2,2"] {
        let r = find(w, "3,4");
        assert!(!r.well_formed && r.weakly_well_formed);
        assert_eq!(r.theorem_status, TheoremStatus::ImpliesNotQuasismooth);
    }
    assert!(out.summary.weakly_only >= 3);
    assert!(out.summary.structure_violations.is_empty());
}

#[test]
fn straight_projective_space_has_no_weak_only_families() {
    let out = run_census(&bounds(6, 1, 7, 3, 6), None).unwrap();
    assert!(out.summary.records > 0);
    assert_eq!(out.summary.weakly_only, 0);
    assert_eq!(out.summary.neither, 0);
}

#[test]
fn probed_consistent_families_never_refute() {
    let b = CensusBounds { min_dim: 3, require_non_linear_cone: true, ..bounds(5, 2, 8, 2, 4) };
    let probe = ProbeOptions {
        primes: vec![3, 5],
        max_points: 20_000,
        ..ProbeOptions::default()
    };
    let out = run_census(&b, Some(&probe)).unwrap();
    assert!(out.summary.probed > 0);
    assert!(out.summary.refutations.is_empty());
    for r in &out.records {
        assert_eq!(r.oracle_verdict.is_some(), r.report.theorem_status == TheoremStatus::Consistent);
    }
}

#[test]
fn written_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("census.jsonl");
    let out = run_census(&bounds(4, 2, 8, 2, 4), None).unwrap();
    write_census(&out, &path).unwrap();
    assert!(!dir.path().join("census.jsonl.partial").exists());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count() as u64, out.summary.records);
    let summary: CensusSummary = serde_json::from_str(&std::fs::read_to_string(summary_path(&path)).unwrap()).unwrap();
    assert_eq!(summary, out.summary);
    assert_eq!(summary_path(&path), dir.path().join("census.summary.json"));
}

#[test]
fn unsatisfiable_bounds_give_an_empty_census() {
    let out = run_census(&CensusBounds { min_dim: 50, ..bounds(3, 3, 9, 2, 4) }, None).unwrap();
    assert!(out.records.is_empty());
    assert_eq!(out.summary, CensusSummary::default());
    assert!(run_census(&bounds(0, 3, 9, 2, 4), None).is_err());
}
