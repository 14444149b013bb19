//! Text form of polynomials.
//!
//! ```text
//! expression := ['-'] term (('+' | '-') term)*
//! term       := factor ('*' factor)*
//! factor     := variable ['^' positive-integer] | integer ['/' integer]
//! variable   := 'x' decimal-index
//! ```
//!
//! Whitespace is ignored. The printer emits terms in descending
//! lexicographic order of exponent vectors with coefficient 1 elided.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Field, Monomial, Scalar, SparsePoly};
use crate::error::{Error, Result};

struct Parser {
    // non-whitespace characters with their byte offset in the input
    chars: Vec<(usize, char)>,
    at: usize,
    nvars: usize,
    src_len: usize,
}

impl Parser {
    fn new(src: &str, nvars: usize) -> Self {
        Parser {
            chars: src.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(),
            at: 0,
            nvars,
            src_len: src.len(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.at).map_or(self.src_len, |&(p, _)| p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.at;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.at += 1;
        }
        (self.at > start).then(|| self.chars[start..self.at].iter().map(|&(_, c)| c).collect())
    }

    fn expression(&mut self) -> Result<Vec<(BigRational, Vec<u32>, usize)>> {
        let mut terms = Vec::new();
        let mut negate = self.eat('-');
        loop {
            let (pos, (c, m)) = (self.pos(), self.term()?);
            terms.push((if negate { -c } else { c }, m, pos));
            match self.peek() {
                Some('+') => {
                    self.at += 1;
                    negate = false;
                }
                Some('-') => {
                    self.at += 1;
                    negate = true;
                }
                None => return Ok(terms),
                Some(c) => return self.err(format!("unexpected {c:?}")),
            }
        }
    }

    fn term(&mut self) -> Result<(BigRational, Vec<u32>)> {
        let mut coeff = BigRational::one();
        let mut exps = vec![0u32; self.nvars];
        loop {
            self.factor(&mut coeff, &mut exps)?;
            if !self.eat('*') {
                return Ok((coeff, exps));
            }
        }
    }

    fn factor(&mut self, coeff: &mut BigRational, exps: &mut [u32]) -> Result<()> {
        match self.peek() {
            Some('x') => {
                self.at += 1;
                let pos = self.pos();
                let Some(idx) = self.digits() else {
                    return self.err("expected a variable index after 'x'");
                };
                let index: usize = idx.parse().map_err(|_| Error::Syntax {
                    pos,
                    msg: format!("variable index {idx} too large"),
                })?;
                if index >= self.nvars {
                    return Err(Error::UnknownVariable {
                        index,
                        max: self.nvars - 1,
                    });
                }
                let mut e = 1u32;
                if self.eat('^') {
                    let pos = self.pos();
                    let Some(ds) = self.digits() else {
                        return self.err("expected an exponent after '^'");
                    };
                    e = match ds.parse::<u32>() {
                        Ok(v) if v > 0 => v,
                        _ => {
                            return Err(Error::Syntax {
                                pos,
                                msg: format!("exponent {ds} is not a positive 32-bit integer"),
                            })
                        }
                    };
                }
                exps[index] = exps[index]
                    .checked_add(e)
                    .ok_or(Error::Overflow("exponent"))?;
                Ok(())
            }
            Some(c) if c.is_ascii_digit() => {
                let n: BigInt = self.digits().unwrap().parse().expect("ascii digits");
                let mut value = BigRational::from_integer(n);
                if self.eat('/') {
                    let pos = self.pos();
                    let Some(ds) = self.digits() else {
                        return self.err("expected a denominator after '/'");
                    };
                    let d: BigInt = ds.parse().expect("ascii digits");
                    if d.is_zero() {
                        return Err(Error::Syntax {
                            pos,
                            msg: "zero denominator".into(),
                        });
                    }
                    value /= BigRational::from_integer(d);
                }
                *coeff *= value;
                Ok(())
            }
            Some(c) => self.err(format!("unexpected {c:?}, expected a variable or integer")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `text` as a weighted-homogeneous polynomial in `x0..xN` graded by
/// `weights`, with coefficients reduced into `field`.
pub fn parse_poly(text: &str, weights: &[u64], field: Field) -> Result<SparsePoly> {
    let mut p = Parser::new(text, weights.len());
    if p.peek().is_none() {
        return p.err("empty polynomial");
    }
    let terms = p.expression()?;

    let mut reference: Option<(Monomial, u64)> = None;
    let mut out = Vec::with_capacity(terms.len());
    for (c, exps, pos) in terms {
        let m = Monomial(exps);
        let d = m.weighted_degree(weights).ok_or(Error::Overflow("monomial degree"))?;
        match &reference {
            None => reference = Some((m.clone(), d)),
            Some((first, fd)) if *fd != d => {
                return Err(Error::MixedDegree {
                    first: first.to_string(),
                    first_degree: *fd,
                    second: m.to_string(),
                    second_degree: d,
                })
            }
            Some(_) => {}
        }
        let s = field.from_ratio(&c).ok_or_else(|| Error::Syntax {
            pos,
            msg: format!("coefficient {c} is undefined in {field}"),
        })?;
        out.push((m, s));
    }
    let degree = reference.map_or(0, |(_, d)| d);
    let degree = i64::try_from(degree).map_err(|_| Error::Overflow("degree"))?;
    SparsePoly::from_terms(weights, field, degree, out)
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms().rev().enumerate() {
            let (neg, mag) = match c {
                Scalar::Rational(q) if q.is_negative() => (true, Scalar::Rational(-q)),
                _ => (false, c.clone()),
            };
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_constant() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}
