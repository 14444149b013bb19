//! Classification of a weighted complete intersection family from its
//! weights and degrees alone.
//!
//! Every predicate here describes the *general* member: a polynomial of
//! degree `d` restricted to a stratum `Lambda_J` vanishes identically exactly
//! when `d` is not a non-negative combination of the weights on `J`, and each
//! restriction that does not vanish cuts the stratum once more.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_representable, MAX_ENTRY};
use crate::error::{Error, Result};
use crate::weights::{
    format_int_list, is_well_formed_space, singular_strata, singular_strata_of_size, Stratum,
    Weights,
};

/// Weights plus multidegree `(d_1, ..., d_k)` with `1 <= k <= N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WciSpec {
    pub weights: Weights,
    pub degrees: Vec<u64>,
}

impl WciSpec {
    pub fn new(weights: Weights, degrees: Vec<u64>) -> Result<WciSpec> {
        if degrees.is_empty() {
            return Err(Error::InvalidSpec("need at least one degree".into()));
        }
        if degrees.len() > weights.n() {
            return Err(Error::InvalidSpec(format!(
                "codimension {} exceeds N = {}",
                degrees.len(),
                weights.n()
            )));
        }
        if let Some(&bad) = degrees.iter().find(|&&d| d == 0 || d > MAX_ENTRY) {
            return Err(Error::InvalidSpec(format!("degree {bad} outside 1..=2^63-1")));
        }
        Ok(WciSpec { weights, degrees })
    }

    pub fn parse(weights: &str, degrees: &str) -> Result<WciSpec> {
        let w: Weights = weights.parse()?;
        let d = crate::weights::parse_int_list(degrees)
            .map_err(|_| Error::InvalidSpec(format!("bad degree list {degrees:?}")))?;
        WciSpec::new(w, d)
    }

    pub fn k(&self) -> usize {
        self.degrees.len()
    }

    /// Weights and degrees both ascending.
    pub fn canonical(&self) -> WciSpec {
        let mut degrees = self.degrees.clone();
        degrees.sort_unstable();
        WciSpec {
            weights: self.weights.sorted(),
            degrees,
        }
    }
}

impl fmt::Display for WciSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({})/({})", self.weights, format_int_list(&self.degrees))
    }
}

/// `dim X = N - k`.
pub fn dimension(s: &WciSpec) -> i64 {
    s.weights.n() as i64 - s.k() as i64
}

/// Some degree equals some weight.
pub fn is_linear_cone(s: &WciSpec) -> bool {
    s.degrees.iter().any(|d| s.weights.contains(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumIntersection {
    pub stratum: Stratum,
    /// Positions in the degree tuple whose general restriction is nonzero.
    pub cutting_degrees: Vec<usize>,
    /// `-1` encodes the empty intersection.
    pub dim_general: i64,
    pub contained: bool,
}

pub fn stratum_intersection(s: &WciSpec, stratum: &Stratum) -> Result<StratumIntersection> {
    if let Some(&bad) = stratum.indices.iter().find(|&&i| i >= s.weights.len()) {
        return Err(Error::StratumOutOfRange {
            index: bad,
            len: s.weights.len(),
        });
    }
    let on: Vec<u64> = stratum.weights_on(&s.weights).collect();
    let cutting_degrees: Vec<usize> = s
        .degrees
        .iter()
        .enumerate()
        .filter(|&(_, &d)| is_representable(d, &on))
        .map(|(j, _)| j)
        .collect();
    let dim_general = general_dimension(&s.degrees, &s.weights, &stratum.indices)?;
    Ok(StratumIntersection {
        stratum: stratum.clone(),
        contained: cutting_degrees.is_empty(),
        cutting_degrees,
        dim_general,
    })
}

const MAX_DISTINCT_WEIGHTS: usize = 24;

/// Dimension of a general member meeting the stratum, computed orbit by
/// orbit: on the torus orbit with support `T`, each degree representable on
/// `T` cuts once and the others vanish identically. Representability only
/// sees the distinct weight values, so `T` ranges over those and takes every
/// coordinate carrying them.
fn general_dimension(degrees: &[u64], weights: &[u64], indices: &[usize]) -> Result<i64> {
    let mut values: Vec<(u64, i64)> = Vec::new();
    for &i in indices {
        match values.iter_mut().find(|(v, _)| *v == weights[i]) {
            Some((_, count)) => *count += 1,
            None => values.push((weights[i], 1)),
        }
    }
    if values.len() > MAX_DISTINCT_WEIGHTS {
        return Err(Error::Overflow("too many distinct weights on one stratum"));
    }
    let mut best = -1i64;
    let mut on = Vec::with_capacity(values.len());
    for mask in 1u32..(1 << values.len()) {
        on.clear();
        let mut size = 0;
        for (b, &(v, count)) in values.iter().enumerate() {
            if mask >> b & 1 == 1 {
                on.push(v);
                size += count;
            }
        }
        let cuts = degrees.iter().filter(|&&d| is_representable(d, &on)).count() as i64;
        best = best.max(size - 1 - cuts);
    }
    Ok(best)
}

/// `k(delta) - N(delta) + N - k + 1`: the codimension in `X` of `X` meeting
/// the stratum of weights divisible by `delta`, when that meeting is proper.
pub fn dimca_codim(s: &WciSpec, delta: u64) -> i64 {
    let k_delta = s.degrees.iter().filter(|&&d| d % delta == 0).count() as i64;
    let n_delta = s.weights.iter().filter(|&&a| a % delta == 0).count() as i64;
    k_delta - n_delta + s.weights.n() as i64 - s.k() as i64 + 1
}

fn maximal_intersections(s: &WciSpec) -> Vec<StratumIntersection> {
    match singular_strata(&s.weights, true) {
        Ok(strata) => strata
            .iter()
            .map(|l| stratum_intersection(s, l).expect("stratum of these weights"))
            .collect(),
        Err(_) => Vec::new(),
    }
}

fn max_dim(xs: &[StratumIntersection]) -> i64 {
    xs.iter().map(|x| x.dim_general).max().unwrap_or(-1).max(-1)
}

/// `dim X - dim(X cap Sing P) >= 2` for the general member; the evidence is
/// every maximal stratum breaking the bound.
pub fn is_well_formed(s: &WciSpec) -> (bool, Vec<StratumIntersection>) {
    if !is_well_formed_space(&s.weights) {
        return (false, Vec::new());
    }
    let dim = dimension(s);
    let evidence: Vec<_> = maximal_intersections(s)
        .into_iter()
        .filter(|x| dim - x.dim_general < 2)
        .collect();
    (evidence.is_empty(), evidence)
}

/// The general member contains no singular stratum of codimension one in
/// itself. Every singular index set of size `dim X` is checked, not just the
/// maximal ones.
pub fn is_weakly_well_formed(s: &WciSpec) -> (bool, Vec<Stratum>) {
    if !is_well_formed_space(&s.weights) {
        return (false, Vec::new());
    }
    let dim = dimension(s);
    if dim <= 0 {
        return (true, Vec::new());
    }
    let evidence: Vec<Stratum> = singular_strata_of_size(&s.weights, dim as usize)
        .expect("weights checked well formed")
        .into_iter()
        .filter(|l| {
            let on: Vec<u64> = l.weights_on(&s.weights).collect();
            !s.degrees.iter().any(|&d| is_representable(d, &on))
        })
        .collect();
    (evidence.is_empty(), evidence)
}

/// Amplitude `sum d_j - sum a_i` and `amplitude^dim * prod d_j / prod a_i`.
pub fn adjunction_data(s: &WciSpec) -> (i128, BigRational) {
    let amplitude = s.degrees.iter().map(|&d| d as i128).sum::<i128>()
        - s.weights.iter().map(|&a| a as i128).sum::<i128>();
    let dim = dimension(s).max(0) as u32;
    let num: BigInt = s.degrees.iter().map(|&d| BigInt::from(d)).product();
    let den: BigInt = s.weights.iter().map(|&a| BigInt::from(a)).product();
    let power = num_traits::pow(BigInt::from(amplitude), dim as usize);
    (amplitude, BigRational::new(power * num, den))
}

/// Exact rational serialized as `{"num": .., "den": ..}` in lowest terms with
/// positive denominator. Parts that do not fit in 64 bits become strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactRational(pub BigRational);

impl ExactRational {
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BigPart {
    Small(i64),
    Big(String),
}

impl BigPart {
    fn of(n: &BigInt) -> BigPart {
        n.to_i64().map_or_else(|| BigPart::Big(n.to_string()), BigPart::Small)
    }

    fn to_big(&self) -> Option<BigInt> {
        match self {
            BigPart::Small(v) => Some(BigInt::from(*v)),
            BigPart::Big(s) => s.parse().ok(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: BigPart,
    den: BigPart,
}

impl Serialize for ExactRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalRepr {
            num: BigPart::of(self.0.numer()),
            den: BigPart::of(self.0.denom()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = RationalRepr::deserialize(d)?;
        let (Some(n), Some(m)) = (r.num.to_big(), r.den.to_big()) else {
            return Err(D::Error::custom("rational parts must be integers"));
        };
        if m.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(ExactRational(BigRational::new(n, m)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremStatus {
    NotApplicableDim,
    NotApplicableLinearCone,
    Consistent,
    ImpliesNotQuasismooth,
}

/// A maximal stratum where the codimension from the containment model and
/// the codimension from `dimca_codim` disagree, because some degree divisible
/// by `delta` has no monomial on the stratum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimcaDiscrepancy {
    pub indices: Vec<usize>,
    pub delta: u64,
    pub dimca_codim: i64,
    pub model_codim: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReportFlags {
    /// `canonical_self_intersection` is not an integer although `dim X >= 1`:
    /// the adjunction formula cannot hold for a smooth member.
    pub non_integral_canonical_degree: bool,
    /// Some singular stratum of dimension `>= dim X` lies in the general
    /// member, so it cannot be a complete intersection of the stated
    /// dimension.
    pub degenerate_containment: bool,
    pub dimca_discrepancies: Vec<DimcaDiscrepancy>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub spec: WciSpec,
    pub space_well_formed: bool,
    #[serde(rename = "dim_X")]
    pub dim_x: i64,
    pub linear_cone: bool,
    pub amplitude: i128,
    pub canonical_self_intersection: ExactRational,
    pub strata: Vec<StratumIntersection>,
    pub sing_intersection_dim: i64,
    pub well_formed: bool,
    pub weakly_well_formed: bool,
    pub theorem_status: TheoremStatus,
    pub flags: ReportFlags,
}

impl AnalysisReport {
    /// Whether the report satisfies the structural implications between its
    /// fields; `None` when it does, otherwise what failed.
    pub fn structure_violation(&self) -> Option<String> {
        if self.well_formed && !self.weakly_well_formed {
            return Some(format!("{}: well formed but not weakly well formed", self.spec));
        }
        let applicable = self.dim_x >= 3 && !self.linear_cone;
        let differs = self.well_formed != self.weakly_well_formed;
        if (self.theorem_status == TheoremStatus::ImpliesNotQuasismooth) != (applicable && differs) {
            return Some(format!(
                "{}: theorem status {:?} does not match dim {} / linear cone {} / wf {} / weak {}",
                self.spec,
                self.theorem_status,
                self.dim_x,
                self.linear_cone,
                self.well_formed,
                self.weakly_well_formed
            ));
        }
        if self.sing_intersection_dim != max_dim(&self.strata) {
            return Some(format!("{}: sing_intersection_dim out of sync", self.spec));
        }
        None
    }
}

fn dimca_discrepancies(s: &WciSpec, strata: &[StratumIntersection]) -> Vec<DimcaDiscrepancy> {
    let dim = dimension(s);
    strata
        .iter()
        .filter_map(|x| {
            let l = &x.stratum;
            let model_codim = dim - (l.dim as i64 - x.cutting_degrees.len() as i64);
            let dimca = dimca_codim(s, l.delta);
            (model_codim != dimca).then(|| DimcaDiscrepancy {
                indices: l.indices.clone(),
                delta: l.delta,
                dimca_codim: dimca,
                model_codim,
            })
        })
        .collect()
}

fn degenerate_containment(s: &WciSpec) -> bool {
    let dim = dimension(s);
    if !is_well_formed_space(&s.weights) || dim < 0 {
        return false;
    }
    // containment is inherited by subsets, so size dim + 1 is enough
    singular_strata_of_size(&s.weights, dim as usize + 1)
        .expect("weights checked well formed")
        .iter()
        .any(|l| {
            let on: Vec<u64> = l.weights_on(&s.weights).collect();
            !s.degrees.iter().any(|&d| is_representable(d, &on))
        })
}

/// Full general-member report for one family.
pub fn classify(s: &WciSpec) -> AnalysisReport {
    let space_well_formed = is_well_formed_space(&s.weights);
    let dim_x = dimension(s);
    let linear_cone = is_linear_cone(s);
    let (amplitude, k_power) = adjunction_data(s);
    let strata = maximal_intersections(s);
    let sing_intersection_dim = max_dim(&strata);
    let (well_formed, _) = is_well_formed(s);
    let (weakly_well_formed, _) = is_weakly_well_formed(s);

    let theorem_status = if dim_x < 3 {
        TheoremStatus::NotApplicableDim
    } else if linear_cone {
        TheoremStatus::NotApplicableLinearCone
    } else if well_formed == weakly_well_formed {
        TheoremStatus::Consistent
    } else {
        TheoremStatus::ImpliesNotQuasismooth
    };

    let flags = ReportFlags {
        non_integral_canonical_degree: dim_x >= 1 && !k_power.is_integer(),
        degenerate_containment: degenerate_containment(s),
        dimca_discrepancies: dimca_discrepancies(s, &strata),
    };

    AnalysisReport {
        spec: s.clone(),
        space_well_formed,
        dim_x,
        linear_cone,
        amplitude,
        canonical_self_intersection: ExactRational(k_power),
        strata,
        sing_intersection_dim,
        well_formed,
        weakly_well_formed,
        theorem_status,
        flags,
    }
}

impl ExactRational {
    pub fn new(num: i64, den: i64) -> ExactRational {
        ExactRational(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> ExactRational {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> ExactRational {
        ExactRational(BigRational::one())
    }
}
