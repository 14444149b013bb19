//! Bounded enumeration of families `P(a)/(d)` with classification and
//! optional finite-field spot probes, persisted as JSONL.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{classify, is_linear_cone, AnalysisReport, TheoremStatus, WciSpec};
use crate::error::{Error, Result};
use crate::oracle::{probe_generic, ProbeOptions, QsStatus, QsVerdict};
use crate::weights::{is_well_formed_space, Weights};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusBounds {
    pub max_n: usize,
    pub max_weight: u64,
    pub max_weight_sum: u64,
    pub max_k: usize,
    pub max_degree: u64,
    #[serde(default)]
    pub require_non_linear_cone: bool,
    #[serde(default)]
    pub min_dim: usize,
}

impl CensusBounds {
    pub fn validate(&self) -> Result<()> {
        let zero = [
            ("max_n", self.max_n == 0),
            ("max_weight", self.max_weight == 0),
            ("max_weight_sum", self.max_weight_sum == 0),
            ("max_k", self.max_k == 0),
            ("max_degree", self.max_degree == 0),
        ];
        match zero.iter().find(|(_, z)| *z) {
            Some((name, _)) => Err(Error::InvalidBounds(format!("{name} must be positive"))),
            None => Ok(()),
        }
    }
}

/// Non-decreasing tuples of `len` entries from `1..=max`, lexicographic.
struct Ascending {
    max: u64,
    next: Option<Vec<u64>>,
}

impl Ascending {
    fn new(len: usize, max: u64) -> Ascending {
        Ascending {
            max,
            next: (len > 0 && max > 0).then(|| vec![1; len]),
        }
    }
}

impl Iterator for Ascending {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        if let Some(i) = (0..succ.len()).rev().find(|&i| succ[i] < self.max) {
            let v = succ[i] + 1;
            succ[i..].iter_mut().for_each(|x| *x = v);
            self.next = Some(succ);
        }
        Some(cur)
    }
}

fn weight_tuples(b: &CensusBounds) -> Vec<Weights> {
    let mut out = Vec::new();
    for n in 1..=b.max_n {
        // ascending tuples with bounded sum, pruned as they grow
        fn go(len: usize, min: u64, b: &CensusBounds, cur: &mut Vec<u64>, sum: u64, out: &mut Vec<Weights>) {
            if cur.len() == len {
                let w = Weights::new(cur.clone()).expect("positive entries");
                if is_well_formed_space(&w) {
                    out.push(w);
                }
                return;
            }
            let left = (len - cur.len()) as u64;
            let mut a = min;
            while a <= b.max_weight && sum + a * left <= b.max_weight_sum {
                cur.push(a);
                go(len, a, b, cur, sum + a, out);
                cur.pop();
                a += 1;
            }
        }
        go(n + 1, 1, b, &mut Vec::new(), 0, &mut out);
    }
    out
}

fn all_specs(b: &CensusBounds) -> impl Iterator<Item = WciSpec> + '_ {
    weight_tuples(b).into_iter().flat_map(move |w| {
        let n = w.n();
        let kmax = b.max_k.min(n);
        (1..=kmax)
            .filter(move |&k| n - k >= b.min_dim)
            .flat_map(move |k| {
                let w = w.clone();
                Ascending::new(k, b.max_degree).map(move |d| WciSpec {
                    weights: w.clone(),
                    degrees: d,
                })
            })
    })
}

/// Every family within `b`: weights and degrees ascending, weights well
/// formed, linear cones dropped when requested. Ordered by `N`, weights,
/// `k`, degrees.
pub fn enumerate_specs(b: &CensusBounds) -> impl Iterator<Item = WciSpec> + '_ {
    all_specs(b).filter(move |s| !(b.require_non_linear_cone && is_linear_cone(s)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub report: AnalysisReport,
    pub oracle_verdict: Option<QsVerdict>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CensusSummary {
    pub records: u64,
    pub well_formed: u64,
    pub weakly_only: u64,
    pub neither: u64,
    pub linear_cone_skipped: u64,
    pub theorem_implies_not_quasismooth: u64,
    pub probed: u64,
    /// Probed families whose seeded member has a singular witness.
    pub probed_with_witness: u64,
    /// Reports breaking the implications between their own fields.
    pub structure_violations: Vec<String>,
    /// Families flagged not quasi-smooth yet verified quasi-smooth. Always
    /// empty: the probe can only ever verify non-quasi-smoothness.
    pub refutations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusOutput {
    pub records: Vec<CensusRecord>,
    pub summary: CensusSummary,
}

/// Classifies every family within `b`. With `probe`, each family the theorem
/// applies to and finds consistent also gets a seeded finite-field probe.
pub fn run_census(b: &CensusBounds, probe: Option<&ProbeOptions>) -> Result<CensusOutput> {
    b.validate()?;
    if let Some(opts) = probe {
        for &p in &opts.primes {
            crate::poly::Field::prime(p as u64)?;
        }
    }
    let mut linear_cone_skipped = 0u64;
    let specs: Vec<WciSpec> = all_specs(b)
        .filter(|s| {
            let skip = b.require_non_linear_cone && is_linear_cone(s);
            linear_cone_skipped += skip as u64;
            !skip
        })
        .collect();

    let records: Vec<CensusRecord> = specs
        .par_iter()
        .map(|s| {
            let report = classify(s);
            let oracle_verdict = match probe {
                Some(opts) if report.theorem_status == TheoremStatus::Consistent => {
                    Some(probe_generic(s, opts)?)
                }
                _ => None,
            };
            Ok(CensusRecord {
                report,
                oracle_verdict,
            })
        })
        .collect::<Result<_>>()?;

    let mut summary = CensusSummary {
        linear_cone_skipped,
        records: records.len() as u64,
        ..CensusSummary::default()
    };
    for rec in &records {
        let r = &rec.report;
        match (r.well_formed, r.weakly_well_formed) {
            (true, _) => summary.well_formed += 1,
            (false, true) => summary.weakly_only += 1,
            (false, false) => summary.neither += 1,
        }
        if r.theorem_status == TheoremStatus::ImpliesNotQuasismooth {
            summary.theorem_implies_not_quasismooth += 1;
        }
        if let Some(v) = r.structure_violation() {
            summary.structure_violations.push(v);
        }
        if let Some(v) = &rec.oracle_verdict {
            summary.probed += 1;
            if v.status == QsStatus::SingularWitness {
                summary.probed_with_witness += 1;
            }
            if r.theorem_status == TheoremStatus::ImpliesNotQuasismooth && v.verifies_quasi_smooth() {
                summary.refutations.push(r.spec.to_string());
            }
        }
    }
    Ok(CensusOutput { records, summary })
}

/// Sidecar path for the summary: `out.jsonl` becomes `out.summary.json`.
pub fn summary_path(records: &Path) -> PathBuf {
    records.with_extension("summary.json")
}

pub fn write_jsonl<W: Write>(records: &[CensusRecord], mut out: W) -> Result<()> {
    for rec in records {
        let line = serde_json::to_string(rec).map_err(|e| Error::Io(e.to_string()))?;
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Writes records to `path` and the summary to its sidecar. Records go to
/// `<path>.partial` first and are renamed into place only once complete, so
/// a leftover `.partial` file marks an aborted run.
pub fn write_census(output: &CensusOutput, path: &Path) -> Result<()> {
    let mut partial = path.as_os_str().to_owned();
    partial.push(".partial");
    let partial = PathBuf::from(partial);
    let write = || -> Result<()> {
        let f = File::create(&partial)?;
        write_jsonl(&output.records, BufWriter::new(f))?;
        std::fs::rename(&partial, path)?;
        let summary = serde_json::to_string_pretty(&output.summary)
            .map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(summary_path(path), summary + "\n")?;
        Ok(())
    };
    write().map_err(|e| match e {
        Error::Io(msg) => Error::Io(format!(
            "{msg} (census output incomplete; partial file {})",
            partial.display()
        )),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CensusBounds {
        CensusBounds {
            max_n: 2,
            max_weight: 2,
            max_weight_sum: 4,
            max_k: 1,
            max_degree: 2,
            require_non_linear_cone: false,
            min_dim: 0,
        }
    }

    fn keys(b: &CensusBounds) -> Vec<String> {
        enumerate_specs(b).map(|s| s.to_string()).collect()
    }

    #[test]
    fn ascending_tuples() {
        let v: Vec<_> = Ascending::new(2, 3).collect();
        assert_eq!(v, vec![vec![1, 1], vec![1, 2], vec![1, 3], vec![2, 2], vec![2, 3], vec![3, 3]]);
        assert_eq!(Ascending::new(0, 3).count(), 0);
    }

    #[test]
    fn enumeration_examples() {
        let k = keys(&small());
        assert!(k.contains(&"P(1,1,2)/(1)".to_string()));
        assert!(k.contains(&"P(1,1,2)/(2)".to_string()));
        // (1,2,2) and (2,2) are not well formed
        assert!(!k.iter().any(|s| s.starts_with("P(1,2,2)") || s.starts_with("P(2,2)")));

        let b = CensusBounds {
            require_non_linear_cone: true,
            ..small()
        };
        assert!(!keys(&b).contains(&"P(1,1,2)/(1)".to_string()));

        let b = CensusBounds {
            min_dim: 3,
            max_n: 3,
            max_k: 2,
            ..small()
        };
        assert_eq!(enumerate_specs(&b).count(), 0);
    }

    #[test]
    fn bounds_validation() {
        let b = CensusBounds { max_k: 0, ..small() };
        assert!(matches!(run_census(&b, None), Err(Error::InvalidBounds(_))));
        let js = r#"{"max_n":2,"max_weight":2,"max_weight_sum":4,"max_k":1,"max_degree":2}"#;
        let parsed: CensusBounds = serde_json::from_str(js).unwrap();
        assert_eq!(parsed, small());
    }

    #[test]
    fn straight_projective_spaces_have_no_weakly_only() {
        let b = CensusBounds {
            max_n: 5,
            max_weight: 1,
            max_weight_sum: 6,
            max_k: 3,
            max_degree: 4,
            require_non_linear_cone: false,
            min_dim: 0,
        };
        let out = run_census(&b, None).unwrap();
        assert!(out.summary.records > 0);
        assert_eq!(out.summary.weakly_only, 0);
        assert_eq!(out.summary.neither, 0);
    }

    #[test]
    fn linear_cone_skips_are_counted() {
        let b = CensusBounds {
            require_non_linear_cone: true,
            ..small()
        };
        let out = run_census(&b, None).unwrap();
        let all = run_census(&small(), None).unwrap();
        assert_eq!(out.summary.records + out.summary.linear_cone_skipped, all.summary.records);
        assert!(out.summary.linear_cone_skipped > 0);
    }
}
