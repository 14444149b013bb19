//! Finite-field probing of quasi-smoothness.
//!
//! A point of `F_p^{N+1} \ {0}` where every equation vanishes and the
//! Jacobian drops rank is a singular point of the punctured affine cone of
//! that explicit member over `F_p`. Finding one proves non-quasi-smoothness
//! of the member over `F_p`; finding none proves nothing.
//!
//! [`wf_witness_search`] replays the argument that a quasi-smooth member of
//! dimension at least 3 meets every singular stratum in codimension at least
//! two: the equations that vanish on a stratum give a matrix `G` of restricted
//! partials, its rank-drop locus `Z` on the stratum cone, and the points `S`
//! of `Z` on the remaining equations, all of which are singular cone points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::WciSpec;
use crate::arith::prime_divisors;
use crate::error::{Error, Result};
use crate::poly::{inv_mod, mul_mod, sub_mod, ModPoly, PolySystem, Scalar};
use crate::weights::Stratum;

/// Largest point count scanned exhaustively.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000_000;

pub const DEFAULT_PRIMES: [u32; 3] = [3, 5, 7];

const CHUNK: u64 = 4096;

/// A nonzero point of `F_p^{N+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConePoint {
    pub coords: Vec<u32>,
}

impl ConePoint {
    pub fn new(coords: Vec<u32>) -> Result<ConePoint> {
        if coords.iter().all(|&c| c == 0) {
            return Err(Error::InvalidSpec("the origin is not a point of the punctured cone".into()));
        }
        Ok(ConePoint { coords })
    }

    /// `(t^{a_0} x_0, ..., t^{a_N} x_N)`.
    pub fn scale(&self, t: u32, weights: &[u64], p: u32) -> ConePoint {
        ConePoint {
            coords: self
                .coords
                .iter()
                .zip(weights)
                .map(|(&x, &a)| mul_mod(x, crate::poly::pow_mod(t, a, p), p))
                .collect(),
        }
    }
}

/// Rank of a matrix over `F_p`, by elimination pivoting on the first nonzero
/// entry of each column.
pub fn rank_mod_p(mut rows: Vec<Vec<u32>>, p: u32) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = inv_mod(rows[rank][col], p);
        for v in &mut rows[rank][col..] {
            *v = mul_mod(*v, inv, p);
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            let f = row[col];
            if r != rank && f != 0 {
                for (v, &pv) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *v = sub_mod(*v, mul_mod(f, pv, p), p);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn prime_of(sys: &PolySystem) -> Result<u32> {
    match sys.field() {
        crate::poly::Field::PrimeField(p) => Ok(p),
        crate::poly::Field::Rational => Err(Error::FieldMismatch(
            "Jacobian ranks are computed over a prime field; reduce the system first".into(),
        )),
    }
}

/// Rank over `F_p` of the `k x (N+1)` Jacobian matrix at `point`.
pub fn jacobian_rank(sys: &PolySystem, point: &ConePoint) -> Result<usize> {
    let p = prime_of(sys)?;
    let at: Vec<Scalar> = point.coords.iter().map(|&c| Scalar::Mod(c)).collect();
    let n = sys.weights().len();
    let rows = sys
        .polys()
        .iter()
        .map(|f| {
            (0..n)
                .map(|i| {
                    f.partial_derivative(i)
                        .evaluate(&at)
                        .map(|v| v.as_mod().expect("prime field value"))
                })
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rank_mod_p(rows, p))
}

/// Re-checks a claimed witness through the generic evaluation path:
/// every equation vanishes and the Jacobian rank is below `k`.
pub fn verify_witness(sys: &PolySystem, point: &ConePoint) -> Result<bool> {
    let at: Vec<Scalar> = point.coords.iter().map(|&c| Scalar::Mod(c)).collect();
    for f in sys.polys() {
        if !f.evaluate(&at)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(point.coords.iter().any(|&c| c != 0) && jacobian_rank(sys, point)? < sys.len())
}

struct Compiled {
    p: u32,
    fs: Vec<ModPoly>,
    jac: Vec<Vec<ModPoly>>,
}

impl Compiled {
    fn new(sys: &PolySystem) -> Result<Compiled> {
        let p = prime_of(sys)?;
        let n = sys.weights().len();
        let fs = sys.polys().iter().map(|f| f.to_mod_poly().unwrap()).collect();
        let jac = sys
            .polys()
            .iter()
            .map(|f| (0..n).map(|i| f.partial_derivative(i).to_mod_poly().unwrap()).collect())
            .collect();
        Ok(Compiled { p, fs, jac })
    }

    /// Jacobian rank at `x` when every equation vanishes there.
    fn singular_rank(&self, x: &[u32]) -> Option<usize> {
        if self.fs.iter().any(|f| f.eval(x) != 0) {
            return None;
        }
        let rows: Vec<Vec<u32>> = self
            .jac
            .iter()
            .map(|row| row.iter().map(|g| g.eval(x)).collect())
            .collect();
        let rank = rank_mod_p(rows, self.p);
        (rank < self.fs.len()).then_some(rank)
    }
}

fn checked_pow(p: u32, e: usize) -> Option<u64> {
    (0..e).try_fold(1u64, |acc, _| acc.checked_mul(p as u64))
}

/// Writes the base-`p` digits of `idx` into `out` (most significant first).
fn decode(mut idx: u64, p: u32, out: &mut [u32]) {
    for slot in out.iter_mut().rev() {
        *slot = (idx % p as u64) as u32;
        idx /= p as u64;
    }
}

fn increment(x: &mut [u32], p: u32) {
    for slot in x.iter_mut().rev() {
        *slot += 1;
        if *slot < p {
            return;
        }
        *slot = 0;
    }
}

/// Exhaustively applies `visit` to every point of `F_p^dim` with index in
/// `1..total`, in parallel chunks; results come back in index order.
fn scan_all<T, F>(p: u32, dim: usize, total: u64, visit: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[u32]) -> Option<T> + Sync,
{
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = (c * CHUNK).max(1);
            let end = ((c + 1) * CHUNK).min(total);
            let mut x = vec![0u32; dim];
            let mut found = Vec::new();
            if start >= end {
                return found;
            }
            decode(start, p, &mut x);
            for _ in start..end {
                if let Some(t) = visit(&x) {
                    found.push(t);
                }
                increment(&mut x, p);
            }
            found
        })
        .collect();
    parts.into_iter().flatten().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QsStatus {
    NoWitnessFound,
    SingularWitness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub prime: u32,
    pub point: ConePoint,
    pub jacobian_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldCoverage {
    pub prime: u32,
    pub points_scanned: u64,
    /// Every nonzero point of `F_p^{N+1}` was visited.
    pub exhaustive: bool,
    pub witness_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QsVerdict {
    pub status: QsStatus,
    /// Canonically sorted; truncated to the probe's `max_witnesses`.
    pub witnesses: Vec<Witness>,
    pub witness_count: u64,
    pub fields_probed: Vec<u32>,
    /// Primes skipped because they divide a weight or a degree.
    pub primes_skipped: Vec<u32>,
    pub points_scanned: u64,
    pub coverage: Vec<FieldCoverage>,
}

impl QsVerdict {
    /// Finite-field probing never certifies quasi-smoothness; only its
    /// failure is ever proved.
    pub fn verifies_quasi_smooth(&self) -> bool {
        false
    }

    /// True when some probed field was not covered exhaustively.
    pub fn budget_exceeded(&self) -> bool {
        self.coverage.iter().any(|c| !c.exhaustive)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeOptions {
    pub primes: Vec<u32>,
    /// Exhaustive when `p^{N+1}` is at most this, otherwise this many
    /// seeded uniform samples.
    pub max_points: u64,
    pub seed: u64,
    /// Probe primes dividing a weight or a degree anyway.
    pub allow_bad_characteristic: bool,
    pub max_witnesses: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            primes: DEFAULT_PRIMES.to_vec(),
            max_points: EXHAUSTIVE_LIMIT,
            seed: 1,
            allow_bad_characteristic: false,
            max_witnesses: 64,
        }
    }
}

/// Primes among `primes` dividing none of `weights` and `degrees`.
pub fn good_primes(primes: &[u32], weights: &[u64], degrees: &[u64]) -> (Vec<u32>, Vec<u32>) {
    let bad: Vec<u64> = weights
        .iter()
        .chain(degrees)
        .flat_map(|&n| prime_divisors(n))
        .collect();
    primes.iter().partition(|&&p| !bad.contains(&(p as u64)))
}

fn scan_field(sys: &PolySystem, opts: &ProbeOptions) -> Result<(FieldCoverage, Vec<Witness>)> {
    let c = Compiled::new(sys)?;
    let p = c.p;
    let dim = sys.weights().len();
    let total = checked_pow(p, dim).filter(|&t| t <= opts.max_points.min(EXHAUSTIVE_LIMIT));
    let (scanned, exhaustive, mut found) = match total {
        Some(total) => {
            let found = scan_all(p, dim, total, |x| {
                c.singular_rank(x).map(|rank| Witness {
                    prime: p,
                    point: ConePoint { coords: x.to_vec() },
                    jacobian_rank: rank,
                })
            });
            (total - 1, true, found)
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (p as u64).rotate_left(32));
            let mut found = Vec::new();
            let mut x = vec![0u32; dim];
            for _ in 0..opts.max_points {
                loop {
                    x.iter_mut().for_each(|v| *v = rng.random_range(0..p));
                    if x.iter().any(|&v| v != 0) {
                        break;
                    }
                }
                if let Some(rank) = c.singular_rank(&x) {
                    found.push(Witness {
                        prime: p,
                        point: ConePoint { coords: x.clone() },
                        jacobian_rank: rank,
                    });
                }
            }
            found.sort_by(|a, b| a.point.cmp(&b.point));
            found.dedup();
            (opts.max_points, false, found)
        }
    };
    found.sort_by(|a, b| a.point.cmp(&b.point));
    Ok((
        FieldCoverage {
            prime: p,
            points_scanned: scanned,
            exhaustive,
            witness_count: found.len() as u64,
        },
        found,
    ))
}

fn assemble(runs: Vec<(FieldCoverage, Vec<Witness>)>, skipped: Vec<u32>, max_witnesses: usize) -> QsVerdict {
    let mut witnesses = Vec::new();
    let mut coverage = Vec::new();
    for (cov, w) in runs {
        witnesses.extend(w);
        coverage.push(cov);
    }
    let witness_count = witnesses.len() as u64;
    witnesses.truncate(max_witnesses);
    QsVerdict {
        status: if witness_count > 0 {
            QsStatus::SingularWitness
        } else {
            QsStatus::NoWitnessFound
        },
        witnesses,
        witness_count,
        fields_probed: coverage.iter().map(|c| c.prime).collect(),
        primes_skipped: skipped,
        points_scanned: coverage.iter().map(|c| c.points_scanned).sum(),
        coverage,
    }
}

fn usable_primes(weights: &[u64], degrees: &[u64], opts: &ProbeOptions) -> Result<(Vec<u32>, Vec<u32>)> {
    for &p in &opts.primes {
        crate::poly::Field::prime(p as u64)?;
    }
    if opts.allow_bad_characteristic {
        Ok((opts.primes.clone(), Vec::new()))
    } else {
        Ok(good_primes(&opts.primes, weights, degrees))
    }
}

/// Scans an explicit system over each requested prime. A system over `Q` is
/// reduced modulo each prime; a system over `F_q` can only be probed at `q`.
pub fn quasi_smooth_probe(sys: &PolySystem, opts: &ProbeOptions) -> Result<QsVerdict> {
    let degrees: Vec<u64> = sys.degrees().iter().map(|&d| d.max(0) as u64).collect();
    let (primes, skipped) = usable_primes(sys.weights(), &degrees, opts)?;
    let runs = primes
        .iter()
        .map(|&p| scan_field(&sys.reduce_mod(p)?, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(runs, skipped, opts.max_witnesses))
}

/// Probes the seeded general member of `spec` over each requested prime
/// (coefficients are drawn in each field separately).
pub fn probe_generic(spec: &WciSpec, opts: &ProbeOptions) -> Result<QsVerdict> {
    let (primes, skipped) = usable_primes(&spec.weights, &spec.degrees, opts)?;
    let runs = primes
        .iter()
        .map(|&p| {
            let sys = PolySystem::generic(&spec.weights, &spec.degrees, p, opts.seed)?;
            scan_field(&sys, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(runs, skipped, opts.max_witnesses))
}

/// Upper bound `(r - u)(m - u)` on the codimension of the locus where an
/// `r x m` matrix of functions has rank at most `u` (when nonempty); zero once
/// `u >= min(r, m)`.
pub fn determinantal_codim_bound(r: u64, m: u64, u: u64) -> u64 {
    if u >= r.min(m) {
        0
    } else {
        (r - u) * (m - u)
    }
}

/// Rank-drop locus of a polynomial matrix on a coordinate subspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankDropScan {
    pub origin_in_z: bool,
    /// Nonzero points (in ambient coordinates) where the rank is below the
    /// row count, sorted.
    pub z_points: Vec<ConePoint>,
}

/// Scans every point of `F_p^{|support|}` (embedded with zeros off `support`)
/// for `rank G(P) < rows`.
pub fn scan_rank_drop(
    matrix: &[Vec<ModPoly>],
    support: &[usize],
    nvars: usize,
    p: u32,
) -> Result<RankDropScan> {
    let rows = matrix.len();
    let eval_rank = |x: &[u32]| -> usize {
        let m: Vec<Vec<u32>> = matrix
            .iter()
            .map(|row| row.iter().map(|g| g.eval(x)).collect())
            .collect();
        rank_mod_p(m, p)
    };
    let origin = vec![0u32; nvars];
    let origin_in_z = eval_rank(&origin) < rows;
    let total = checked_pow(p, support.len())
        .filter(|&t| t <= EXHAUSTIVE_LIMIT)
        .ok_or_else(|| {
            Error::InvalidSpec(format!(
                "stratum scan of {p}^{} points exceeds the exhaustive limit",
                support.len()
            ))
        })?;
    let z_points = scan_all(p, support.len(), total, |y| {
        let mut x = vec![0u32; nvars];
        for (&i, &v) in support.iter().zip(y) {
            x[i] = v;
        }
        (eval_rank(&x) < rows).then_some(ConePoint { coords: x })
    });
    let mut z_points = z_points;
    z_points.sort();
    Ok(RankDropScan {
        origin_in_z,
        z_points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    /// Some equations vanish on the stratum and `G` drops rank at the origin.
    Engaged,
    /// No equation vanishes identically on the stratum (`r = 0`).
    NoVanishingRestriction,
    /// `G` has full rank at the origin, which needs a constant entry and
    /// hence a linear cone.
    LinearConeEscape,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSearchReport {
    pub status: SearchStatus,
    pub prime: u32,
    pub stratum: Vec<usize>,
    pub delta: u64,
    pub r: usize,
    /// `k - k(delta)`, the count of degrees not divisible by `delta`.
    pub dimca_r: usize,
    pub vanishing_poly_indices: Vec<usize>,
    #[serde(rename = "G_columns")]
    pub g_columns: Vec<usize>,
    pub constant_g_entries: bool,
    #[serde(rename = "Z_points")]
    pub z_points: Vec<ConePoint>,
    #[serde(rename = "S_points")]
    pub s_points: Vec<ConePoint>,
    #[serde(rename = "origin_in_Z")]
    pub origin_in_z: bool,
}

impl WitnessSearchReport {
    pub fn r_agrees_with_dimca(&self) -> bool {
        self.r == self.dimca_r
    }
}

/// Runs the stratum argument on an explicit system over `F_p`.
pub fn wf_witness_search(
    spec: &WciSpec,
    sys: &PolySystem,
    stratum: &Stratum,
    p: u32,
) -> Result<WitnessSearchReport> {
    let sys = sys.reduce_mod(p)?;
    if sys.weights() != spec.weights.as_slice() {
        return Err(Error::InvalidSpec("system weights differ from the family".into()));
    }
    let degrees: Vec<i64> = spec.degrees.iter().map(|&d| d as i64).collect();
    if sys.degrees() != degrees {
        return Err(Error::InvalidSpec(format!(
            "system degrees {:?} differ from the family {:?}",
            sys.degrees(),
            spec.degrees
        )));
    }
    let n = spec.weights.len();
    if let Some(&bad) = stratum.indices.iter().find(|&&i| i >= n) {
        return Err(Error::StratumOutOfRange { index: bad, len: n });
    }
    let stratum = Stratum::new(&spec.weights, &stratum.indices)?;
    if !stratum.is_singular() {
        return Err(Error::InvalidStratum(format!(
            "stratum {:?} has gcd 1 and is not singular",
            stratum.indices
        )));
    }
    let delta = stratum.delta;
    let dimca_r = spec.degrees.iter().filter(|&&d| d % delta != 0).count();
    let vanishing: Vec<usize> = sys
        .polys()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.restrict(&stratum.indices).is_zero())
        .map(|(j, _)| j)
        .collect();
    let columns = stratum.complement(n);
    let mut report = WitnessSearchReport {
        status: SearchStatus::NoVanishingRestriction,
        prime: p,
        stratum: stratum.indices.clone(),
        delta,
        r: vanishing.len(),
        dimca_r,
        vanishing_poly_indices: vanishing.clone(),
        g_columns: columns.clone(),
        constant_g_entries: false,
        z_points: Vec::new(),
        s_points: Vec::new(),
        origin_in_z: false,
    };
    if vanishing.is_empty() {
        return Ok(report);
    }

    let g: Vec<Vec<ModPoly>> = vanishing
        .iter()
        .map(|&j| {
            let f = &sys.polys()[j];
            columns
                .iter()
                .map(|&i| f.partial_derivative(i).restrict(&stratum.indices).to_mod_poly().unwrap())
                .collect()
        })
        .collect();
    report.constant_g_entries = g.iter().flatten().any(ModPoly::is_nonzero_constant);

    let scan = scan_rank_drop(&g, &stratum.indices, n, p)?;
    report.origin_in_z = scan.origin_in_z;
    report.status = if scan.origin_in_z {
        SearchStatus::Engaged
    } else {
        SearchStatus::LinearConeEscape
    };

    let rest: Vec<ModPoly> = (0..sys.len())
        .filter(|j| !vanishing.contains(j))
        .map(|j| sys.polys()[j].to_mod_poly().unwrap())
        .collect();
    let s_points: Vec<ConePoint> = scan
        .z_points
        .iter()
        .filter(|pt| rest.iter().all(|f| f.eval(&pt.coords) == 0))
        .cloned()
        .collect();
    for pt in &s_points {
        if !verify_witness(&sys, pt)? {
            return Err(Error::Invariant(format!(
                "S point {:?} is not a singular cone point",
                pt.coords
            )));
        }
    }
    report.z_points = scan.z_points;
    report.s_points = s_points;
    Ok(report)
}
