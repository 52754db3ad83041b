//! Exact rationals, rational vectors and phase vectors.
//!
//! Every number in the crate is either an `i64` (weights, exponents) or a
//! [`Rat`]. There is no floating point anywhere.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseError;

pub type Rat = num_rational::BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

/// Formats as `"n"` or `"n/d"`.
pub fn fmt_rat(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"n"` or `"n/d"` (optional sign, no decimal point).
pub fn parse_rat(s: &str) -> Result<Rat, ParseError> {
    let s = s.trim();
    let bad = || ParseError::new(format!("not a rational literal: {s:?}"), 0);
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n = BigInt::from_str(num).map_err(|_| bad())?;
    let d = match den {
        Some(d) => BigInt::from_str(d).map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(ParseError::new(format!("zero denominator in {s:?}"), 0));
    }
    Ok(Rat::new(n, d))
}

pub fn to_i64(x: &Rat) -> Option<i64> {
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator(xs: &[Rat]) -> BigInt {
    xs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// A vector of exact rationals (characters, levels, functionals).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RatVector(pub Vec<Rat>);

impl RatVector {
    pub fn zeros(n: usize) -> Self {
        RatVector(vec![Rat::zero(); n])
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        RatVector(xs.iter().map(|&x| rat(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn neg(&self) -> Self {
        RatVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn dot(&self, other: &RatVector) -> Rat {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, k: &Rat) -> Self {
        RatVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn add(&self, other: &RatVector) -> Self {
        RatVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn parse_list(s: &str) -> Result<Self, ParseError> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        if s.trim().is_empty() {
            return Ok(RatVector(Vec::new()));
        }
        s.split(',').map(parse_rat).collect::<Result<_, _>>().map(RatVector)
    }
}

impl std::ops::Index<usize> for RatVector {
    type Output = Rat;
    fn index(&self, i: usize) -> &Rat {
        &self.0[i]
    }
}

impl fmt::Display for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_rat).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for RatVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(fmt_rat))
    }
}

impl<'de> Deserialize<'de> for RatVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rat(s))
            .collect::<Result<Vec<_>, _>>()
            .map(RatVector)
            .map_err(serde::de::Error::custom)
    }
}

/// A diagonal torus element of finite order, stored as exponents `t` of
/// `exp(2 pi i t)`, each normalized to `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseVector(Vec<Rat>);

impl PhaseVector {
    pub fn new(entries: Vec<Rat>) -> Self {
        PhaseVector(entries.iter().map(frac).collect())
    }

    pub fn identity(n: usize) -> Self {
        PhaseVector(vec![Rat::zero(); n])
    }

    pub fn entries(&self) -> &[Rat] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Group law: entrywise addition mod 1.
    pub fn mul(&self, other: &PhaseVector) -> PhaseVector {
        PhaseVector::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn inverse(&self) -> PhaseVector {
        PhaseVector::new(self.0.iter().map(|a| -a).collect())
    }

    pub fn pow(&self, k: i64) -> PhaseVector {
        let k = rat(k);
        PhaseVector::new(self.0.iter().map(|a| a * &k).collect())
    }

    /// Order in the torus: lcm of the entry denominators.
    pub fn order(&self) -> BigInt {
        common_denominator(&self.0)
    }

    /// Indices `j` with `t_j = 0`, i.e. coordinates on which the element acts trivially.
    pub fn fixed_indices(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&j| self.0[j].is_zero()).collect()
    }
}

impl fmt::Display for PhaseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_rat).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Serialize for PhaseVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(fmt_rat))
    }
}

/// Serde helper for a single rational written as a string.
pub mod rat_string {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rat(&raw).map_err(serde::de::Error::custom)
    }
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn gcd_all(xs: &[i64]) -> i64 {
    xs.iter().fold(0, |g, &x| g.gcd(&x))
}

pub fn sign(x: &Rat) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("-3/6").unwrap(), ratio(-1, 2));
        assert_eq!(fmt_rat(&ratio(4, 2)), "2");
        assert_eq!(fmt_rat(&ratio(-1, 5)), "-1/5");
        assert!(parse_rat("1.5").is_err());
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn phases_normalize() {
        let p = PhaseVector::new(vec![ratio(6, 5), ratio(-1, 5), rat(3)]);
        assert_eq!(p.entries(), &[ratio(1, 5), ratio(4, 5), rat(0)]);
        assert_eq!(p.order(), BigInt::from(5));
        assert!(p.pow(5).is_identity());
        assert!(p.mul(&p.inverse()).is_identity());
    }
}
