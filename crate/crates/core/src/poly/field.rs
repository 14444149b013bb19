use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Coefficient field of a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Rational,
    PrimeField(u32),
}

impl Field {
    /// `F_p` for a prime `p < 2^16`.
    pub fn prime(p: u64) -> Result<Field> {
        if p < (1 << 16) && is_prime(p) {
            Ok(Field::PrimeField(p as u32))
        } else {
            Err(Error::InvalidPrime(p))
        }
    }

    pub fn characteristic(self) -> u32 {
        match self {
            Field::Rational => 0,
            Field::PrimeField(p) => p,
        }
    }

    pub fn zero(self) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::zero()),
            Field::PrimeField(_) => Scalar::Mod(0),
        }
    }

    pub fn one(self) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::one()),
            Field::PrimeField(_) => Scalar::Mod(1),
        }
    }

    /// Image of an integer in this field.
    pub fn from_int(self, n: &BigInt) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(n.clone())),
            Field::PrimeField(p) => {
                let r = n.mod_floor_u32(p);
                Scalar::Mod(r)
            }
        }
    }

    /// Image of `num / den`; `None` when `den` vanishes in the field.
    pub fn from_ratio(self, q: &BigRational) -> Option<Scalar> {
        match self {
            Field::Rational => Some(Scalar::Rational(q.clone())),
            Field::PrimeField(p) => {
                let n = q.numer().mod_floor_u32(p);
                let d = q.denom().mod_floor_u32(p);
                if d == 0 {
                    None
                } else {
                    Some(Scalar::Mod(mul_mod(n, inv_mod(d, p), p)))
                }
            }
        }
    }

    pub fn check(self, s: &Scalar) -> Result<()> {
        match (self, s) {
            (Field::Rational, Scalar::Rational(_)) => Ok(()),
            (Field::PrimeField(p), Scalar::Mod(v)) if *v < p => Ok(()),
            _ => Err(Error::FieldMismatch(format!("{s} is not an element of {self}"))),
        }
    }

    pub fn add(self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::PrimeField(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod(add_mod(*x, *y, p)),
            (_, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x + y),
            _ => unreachable!("operands checked against the field"),
        }
    }

    pub fn mul(self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::PrimeField(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod(mul_mod(*x, *y, p)),
            (_, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
            _ => unreachable!("operands checked against the field"),
        }
    }

    pub fn pow(self, a: &Scalar, mut e: u64) -> Scalar {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => f.write_str("Q"),
            Field::PrimeField(p) => write!(f, "F_{p}"),
        }
    }
}

/// An element of a coefficient field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    /// Canonical representative in `[0, p)`.
    Mod(u32),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Mod(v) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Mod(v) => *v == 1,
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Rational(q) if q.is_negative())
    }

    pub fn neg(&self, field: Field) -> Scalar {
        match (self, field) {
            (Scalar::Rational(q), _) => Scalar::Rational(-q),
            (Scalar::Mod(v), Field::PrimeField(p)) => Scalar::Mod(if *v == 0 { 0 } else { p - v }),
            (Scalar::Mod(_), Field::Rational) => unreachable!("operands checked against the field"),
        }
    }

    pub fn as_mod(&self) -> Option<u32> {
        match self {
            Scalar::Mod(v) => Some(*v),
            Scalar::Rational(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Mod(v) => write!(f, "{v}"),
        }
    }
}

trait ModFloor {
    fn mod_floor_u32(&self, p: u32) -> u32;
}

impl ModFloor for BigInt {
    fn mod_floor_u32(&self, p: u32) -> u32 {
        let m = BigInt::from(p);
        let r = ((self % &m) + &m) % &m;
        r.to_u32().expect("residue below p")
    }
}

pub fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + b as u64) % p as u64) as u32
}

pub fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + p as u64 - b as u64) % p as u64) as u32
}

pub fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub fn pow_mod(mut a: u32, mut e: u64, p: u32) -> u32 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Inverse of a nonzero `a` modulo the prime `p`.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p as u64 - 2, p)
}
