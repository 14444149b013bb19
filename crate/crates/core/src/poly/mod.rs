//! Sparse weighted-homogeneous polynomials over `Q` and `F_p`.
//!
//! A polynomial carries its grading (the weight of each variable), its
//! coefficient field and its weighted degree. Terms are kept in a sorted map
//! so iteration order, printing and generic coefficient assignment are all
//! deterministic.

mod field;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use field::{add_mod, inv_mod, mul_mod, pow_mod, sub_mod, Field, Scalar};
pub use parse::parse_poly;

/// Exponent vector, one entry per coordinate. Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn weighted_degree(&self, weights: &[u64]) -> Option<u64> {
        self.0.iter().zip(weights).try_fold(0u64, |acc, (&e, &a)| {
            (e as u64).checked_mul(a).and_then(|t| acc.checked_add(t))
        })
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Nonzero `(variable, exponent)` pairs.
    pub fn support(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e > 0)
            .map(|(i, &e)| (i, e))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return f.write_str("1");
        }
        let mut first = true;
        for (i, e) in self.support() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A weighted-homogeneous polynomial with nonzero stored coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    field: Field,
    weights: Vec<u64>,
    degree: i64,
    terms: BTreeMap<Monomial, Scalar>,
}

impl SparsePoly {
    pub fn zero(weights: &[u64], field: Field, degree: i64) -> SparsePoly {
        SparsePoly {
            field,
            weights: weights.to_vec(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a polynomial from terms, summing repeated monomials and dropping
    /// zero coefficients. Every monomial must have weighted degree `degree`.
    pub fn from_terms<I>(weights: &[u64], field: Field, degree: i64, terms: I) -> Result<SparsePoly>
    where
        I: IntoIterator<Item = (Monomial, Scalar)>,
    {
        let mut poly = SparsePoly::zero(weights, field, degree);
        for (m, c) in terms {
            if m.0.len() != weights.len() {
                return Err(Error::InvalidSpec(format!(
                    "monomial {m} has {} exponents for {} variables",
                    m.0.len(),
                    weights.len()
                )));
            }
            field.check(&c)?;
            let md = m.weighted_degree(weights).ok_or(Error::Overflow("monomial degree"))?;
            if md as i128 != degree as i128 {
                return Err(Error::MixedDegree {
                    first: format!("declared degree {degree}"),
                    first_degree: degree.max(0) as u64,
                    second: m.to_string(),
                    second_degree: md,
                });
            }
            poly.add_term(m, c);
        }
        Ok(poly)
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        let field = self.field;
        match self.terms.remove(&m) {
            Some(old) => {
                let s = field.add(&old, &c);
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None if !c.is_zero() => {
                self.terms.insert(m, c);
            }
            None => {}
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending lexicographic order of exponent vectors.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&Scalar> {
        self.terms.get(m)
    }

    /// Formal partial derivative in `x_i`.
    pub fn partial_derivative(&self, i: usize) -> SparsePoly {
        assert!(i < self.nvars(), "variable x{i} out of range");
        let field = self.field;
        let mut out = SparsePoly::zero(&self.weights, field, self.degree - self.weights[i] as i64);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mult = field.from_int(&BigInt::from(e));
            let mut dm = m.clone();
            dm.0[i] -= 1;
            out.add_term(dm, field.mul(c, &mult));
        }
        out
    }

    /// Sets every coordinate outside `keep` to zero.
    pub fn restrict(&self, keep: &[usize]) -> SparsePoly {
        let mut inside = vec![false; self.nvars()];
        for &j in keep {
            if j < inside.len() {
                inside[j] = true;
            }
        }
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.support().all(|(i, _)| inside[i]))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        SparsePoly {
            terms,
            ..SparsePoly::zero(&self.weights, self.field, self.degree)
        }
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.nvars() {
            return Err(Error::FieldMismatch(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.nvars()
            )));
        }
        for x in point {
            self.field.check(x)?;
        }
        let field = self.field;
        let mut acc = field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, e) in m.support() {
                t = field.mul(&t, &field.pow(&point[i], e as u64));
            }
            acc = field.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Image of this polynomial over `F_p`.
    ///
    /// Rational coefficients are reduced (a denominator divisible by `p` is an
    /// error); a polynomial already over `F_p` is returned unchanged.
    pub fn reduce_mod(&self, p: u32) -> Result<SparsePoly> {
        let target = Field::prime(p as u64)?;
        match self.field {
            Field::PrimeField(q) if q == p => Ok(self.clone()),
            Field::PrimeField(q) => Err(Error::FieldMismatch(format!(
                "cannot move a polynomial over F_{q} to F_{p}"
            ))),
            Field::Rational => {
                let mut out = SparsePoly::zero(&self.weights, target, self.degree);
                for (m, c) in &self.terms {
                    let Scalar::Rational(q) = c else { unreachable!() };
                    let r = target.from_ratio(q).ok_or_else(|| {
                        Error::FieldMismatch(format!("coefficient {q} has a denominator divisible by {p}"))
                    })?;
                    out.add_term(m.clone(), r);
                }
                Ok(out)
            }
        }
    }

    /// Redeclares the degree of a zero polynomial (a nonzero one keeps its own).
    pub fn with_degree(mut self, degree: i64) -> Result<SparsePoly> {
        if !self.is_zero() && degree != self.degree {
            return Err(Error::InvalidSpec(format!(
                "polynomial {self} has degree {}, not {degree}",
                self.degree
            )));
        }
        self.degree = degree;
        Ok(self)
    }

    pub fn to_mod_poly(&self) -> Option<ModPoly> {
        let Field::PrimeField(p) = self.field else { return None };
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (c.as_mod().expect("prime field coefficient"), m.support().collect()))
            .collect();
        Some(ModPoly { p, terms })
    }
}

/// All exponent vectors of weighted degree `d`, in descending lexicographic
/// order (the order terms are printed in).
pub fn monomials_of_degree(weights: &[u64], d: u64) -> Vec<Monomial> {
    fn go(weights: &[u64], i: usize, left: u64, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == weights.len() {
            if left == 0 {
                out.push(Monomial(cur.clone()));
            }
            return;
        }
        let a = weights[i];
        let max = left / a;
        for e in (0..=max).rev() {
            cur.push(e as u32);
            go(weights, i + 1, left - e * a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(weights, 0, d, &mut Vec::with_capacity(weights.len()), &mut out);
    out
}

/// A general member of degree `d`: every monomial of that degree with an
/// independent nonzero coefficient drawn from a generator seeded by `seed`.
/// Returns the zero polynomial when no such monomial exists.
pub fn generic_poly(weights: &[u64], d: u64, p: u32, seed: u64) -> Result<SparsePoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generic_poly_with(weights, d, p, &mut rng)
}

fn generic_poly_with(weights: &[u64], d: u64, p: u32, rng: &mut ChaCha8Rng) -> Result<SparsePoly> {
    let field = Field::prime(p as u64)?;
    if d == 0 {
        return Err(Error::InvalidSpec("generic polynomial degree must be positive".into()));
    }
    let degree = i64::try_from(d).map_err(|_| Error::Overflow("degree"))?;
    let mut poly = SparsePoly::zero(weights, field, degree);
    for m in monomials_of_degree(weights, d) {
        let c = rng.random_range(1..p);
        poly.terms.insert(m, Scalar::Mod(c));
    }
    Ok(poly)
}

/// Polynomials sharing one grading and one coefficient field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem {
    polys: Vec<SparsePoly>,
}

impl PolySystem {
    pub fn new(polys: Vec<SparsePoly>) -> Result<PolySystem> {
        let Some(first) = polys.first() else {
            return Err(Error::InvalidSpec("empty polynomial system".into()));
        };
        for f in &polys[1..] {
            if f.weights != first.weights {
                return Err(Error::InvalidSpec("polynomials use different weights".into()));
            }
            if f.field != first.field {
                return Err(Error::FieldMismatch(format!(
                    "system mixes {} and {}",
                    first.field, f.field
                )));
            }
        }
        Ok(PolySystem { polys })
    }

    /// One general member per degree, all drawn from a single seeded stream.
    pub fn generic(weights: &[u64], degrees: &[u64], p: u32, seed: u64) -> Result<PolySystem> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let polys = degrees
            .iter()
            .map(|&d| generic_poly_with(weights, d, p, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        PolySystem::new(polys)
    }

    pub fn polys(&self) -> &[SparsePoly] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.polys.iter().map(SparsePoly::degree).collect()
    }

    pub fn weights(&self) -> &[u64] {
        &self.polys[0].weights
    }

    pub fn field(&self) -> Field {
        self.polys[0].field
    }

    pub fn reduce_mod(&self, p: u32) -> Result<PolySystem> {
        PolySystem::new(
            self.polys
                .iter()
                .map(|f| f.reduce_mod(p))
                .collect::<Result<_>>()?,
        )
    }
}

/// Flattened polynomial over `F_p` for tight evaluation loops.
#[derive(Debug, Clone)]
pub struct ModPoly {
    p: u32,
    terms: Vec<(u32, Vec<(usize, u32)>)>,
}

impl ModPoly {
    pub fn eval(&self, x: &[u32]) -> u32 {
        let p = self.p;
        let mut acc = 0u32;
        for (c, factors) in &self.terms {
            let mut t = *c;
            for &(i, e) in factors {
                if t == 0 {
                    break;
                }
                t = mul_mod(t, pow_mod(x[i], e as u64, p), p);
            }
            acc = add_mod(acc, t, p);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the polynomial is a nonzero constant.
    pub fn is_nonzero_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].1.is_empty()
    }
}
