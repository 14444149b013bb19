//! Weights of a weighted projective space `P(a_0, ..., a_N)`: well-formedness,
//! normalization to a well-formed representative and the singular strata.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, gcd_all, prime_divisors, MAX_ENTRY};
use crate::error::{Error, Result};

/// Ordered weights `(a_0, ..., a_N)` with `N >= 1` and every entry positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weights(Vec<u64>);

impl Weights {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidWeights(format!(
                "need at least two weights, got {}",
                entries.len()
            )));
        }
        if let Some(&bad) = entries.iter().find(|&&a| a == 0 || a > MAX_ENTRY) {
            return Err(Error::InvalidWeights(format!(
                "weight {bad} outside 1..=2^63-1"
            )));
        }
        Ok(Weights(entries))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// `N`, the dimension of the ambient space.
    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> u64 {
        self.0[i]
    }

    /// gcd of every entry except the one at `skip`.
    pub fn gcd_excluding(&self, skip: usize) -> u64 {
        gcd_all(
            self.0
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &a)| a),
        )
    }

    /// Ascending copy; census keys use this order.
    pub fn sorted(&self) -> Weights {
        let mut v = self.0.clone();
        v.sort_unstable();
        Weights(v)
    }
}

impl std::ops::Deref for Weights {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        &self.0
    }
}

/// Parses a comma-separated list of positive integers such as `"1,1,2,2,2"`.
pub fn parse_int_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<u64>()
                .map_err(|_| Error::InvalidWeights(format!("not a positive integer: {t:?}")))
        })
        .collect()
}

pub fn format_int_list(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl FromStr for Weights {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Weights::new(parse_int_list(s)?)
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_int_list(&self.0))
    }
}

impl Serialize for Weights {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Weights {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u64>::deserialize(d)?;
        Weights::new(v).map_err(serde::de::Error::custom)
    }
}

/// True iff no `N` of the `N + 1` weights share a common factor.
pub fn is_well_formed_space(w: &Weights) -> bool {
    let n = w.len();
    // prefix[i] = gcd(a_0..a_{i-1}), suffix[i] = gcd(a_i..a_N)
    let mut prefix = vec![0u64; n + 1];
    let mut suffix = vec![0u64; n + 1];
    for i in 0..n {
        prefix[i + 1] = gcd(prefix[i], w[i]);
        suffix[n - 1 - i] = gcd(suffix[n - i], w[n - 1 - i]);
    }
    (0..n).all(|i| gcd(prefix[i], suffix[i + 1]) == 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    OverallGcd,
    ExcludedIndex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationStep {
    pub kind: StepKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub index: Option<usize>,
    pub divisor: u64,
}

impl NormalizationStep {
    /// Applies this step to `w`.
    pub fn apply(&self, w: &[u64]) -> Vec<u64> {
        w.iter()
            .enumerate()
            .map(|(i, &a)| match self.kind {
                StepKind::OverallGcd => a / self.divisor,
                StepKind::ExcludedIndex if Some(i) == self.index => a,
                StepKind::ExcludedIndex => a / self.divisor,
            })
            .collect()
    }
}

/// Audit trail of [`well_form`]. Serializes as the bare array of steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NormalizationTrace {
    pub steps: Vec<NormalizationStep>,
}

impl NormalizationTrace {
    pub fn replay(&self, input: &Weights) -> Result<Weights> {
        let v = self
            .steps
            .iter()
            .fold(input.as_slice().to_vec(), |acc, s| s.apply(&acc));
        Weights::new(v)
    }
}

/// Normalizes `w` to an isomorphic well-formed weight vector.
///
/// Repeats two moves until the result is well formed: divide everything by the
/// overall gcd, then for the smallest index `i` whose complement has gcd
/// `g > 1`, divide every other entry by `g`. After the first move `a_i` is
/// coprime to `g`, which is what the second isomorphism needs. Entry order is
/// preserved.
pub fn well_form(w: &Weights) -> (Weights, NormalizationTrace) {
    let mut cur = w.as_slice().to_vec();
    let mut steps = Vec::new();
    loop {
        let g = gcd_all(cur.iter().copied());
        if g > 1 {
            let step = NormalizationStep {
                kind: StepKind::OverallGcd,
                index: None,
                divisor: g,
            };
            cur = step.apply(&cur);
            steps.push(step);
            continue;
        }
        let next = (0..cur.len()).find_map(|i| {
            let g = gcd_all(
                cur.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &a)| a),
            );
            (g > 1).then_some((i, g))
        });
        match next {
            Some((i, g)) => {
                let step = NormalizationStep {
                    kind: StepKind::ExcludedIndex,
                    index: Some(i),
                    divisor: g,
                };
                cur = step.apply(&cur);
                steps.push(step);
            }
            None => break,
        }
    }
    (Weights(cur), NormalizationTrace { steps })
}

/// A linear stratum `Lambda_J`: the coordinates outside `J` vanish.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Stratum {
    pub indices: Vec<usize>,
    pub delta: u64,
    pub dim: usize,
}

impl Stratum {
    /// Builds the stratum on `indices` (sorted and deduplicated here).
    pub fn new(w: &Weights, indices: &[usize]) -> Result<Self> {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if idx.is_empty() {
            return Err(Error::InvalidStratum("empty index set".into()));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= w.len()) {
            return Err(Error::StratumOutOfRange {
                index: bad,
                len: w.len(),
            });
        }
        let delta = gcd_all(idx.iter().map(|&i| w[i]));
        let dim = idx.len() - 1;
        Ok(Stratum {
            indices: idx,
            delta,
            dim,
        })
    }

    pub fn is_singular(&self) -> bool {
        self.delta > 1
    }

    pub fn weights_on<'a>(&'a self, w: &'a [u64]) -> impl Iterator<Item = u64> + 'a {
        self.indices.iter().map(move |&i| w[i])
    }

    /// Coordinates not in the stratum, ascending.
    pub fn complement(&self, len: usize) -> Vec<usize> {
        (0..len).filter(|i| self.indices.binary_search(i).is_err()).collect()
    }
}

fn sort_strata(v: &mut [Stratum]) {
    v.sort_by(|a, b| b.dim.cmp(&a.dim).then_with(|| a.indices.cmp(&b.indices)));
}

/// Index sets `J_p = {j : p | a_j}` for every prime `p` dividing some weight,
/// deduplicated.
fn prime_index_sets(w: &Weights) -> BTreeSet<Vec<usize>> {
    let primes: BTreeSet<u64> = w.iter().flat_map(|&a| prime_divisors(a)).collect();
    primes
        .into_iter()
        .map(|p| (0..w.len()).filter(|&j| w[j].is_multiple_of(p)).collect())
        .collect()
}

/// Singular strata of a well-formed space.
///
/// With `maximal_only`, one stratum per distinct `J_p`. Otherwise every index
/// set with gcd > 1, which is exponential in the size of the largest `J_p`.
/// Sorted by dimension descending, then indices.
pub fn singular_strata(w: &Weights, maximal_only: bool) -> Result<Vec<Stratum>> {
    if !is_well_formed_space(w) {
        return Err(Error::NotWellFormed(w.to_string()));
    }
    let maximal = prime_index_sets(w);
    let sets: BTreeSet<Vec<usize>> = if maximal_only {
        maximal
    } else {
        maximal.iter().flat_map(|j| nonempty_subsets(j)).collect()
    };
    let mut out: Vec<Stratum> = sets
        .iter()
        .map(|j| Stratum::new(w, j))
        .collect::<Result<_>>()?;
    out.retain(Stratum::is_singular);
    sort_strata(&mut out);
    Ok(out)
}

/// Singular strata with exactly `size` coordinates (`dim = size - 1`).
pub fn singular_strata_of_size(w: &Weights, size: usize) -> Result<Vec<Stratum>> {
    if !is_well_formed_space(w) {
        return Err(Error::NotWellFormed(w.to_string()));
    }
    if size == 0 {
        return Ok(Vec::new());
    }
    let sets: BTreeSet<Vec<usize>> = prime_index_sets(w)
        .iter()
        .flat_map(|j| subsets_of_size(j, size))
        .collect();
    let mut out: Vec<Stratum> = sets
        .iter()
        .map(|j| Stratum::new(w, j))
        .collect::<Result<_>>()?;
    sort_strata(&mut out);
    Ok(out)
}

fn nonempty_subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (1..=items.len())
        .flat_map(|k| subsets_of_size(items, k))
        .collect()
}

pub(crate) fn subsets_of_size(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..=items.len().saturating_sub(need) {
            if i >= items.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= items.len() {
        go(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}
