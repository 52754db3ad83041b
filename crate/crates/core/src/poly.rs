//! Sparse multivariate polynomials over the rationals.
//!
//! Text grammar (whitespace is ignored):
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom ('^' integer)?
//! atom   := integer ['/' integer] | variable | '(' expr ')'
//! ```
//!
//! Printing emits the same grammar, monomials in decreasing lexicographic
//! order of exponent vectors (declared variable order).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;
use crate::rational::{fmt_rat, rat, Rat, RatVector};

pub type Exponent = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    vars: Vec<String>,
    terms: BTreeMap<Exponent, Rat>,
}

/// Result of a weighted-degree query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightedDegree {
    /// Every monomial has this weighted degree.
    Homogeneous(Rat),
    /// Monomials of different degrees occur.
    NotHomogeneous,
    /// `P = 0`; kept apart so invariance checks never pass vacuously.
    ZeroPolynomial,
}

impl WeightedDegree {
    pub fn degree(&self) -> Option<&Rat> {
        match self {
            WeightedDegree::Homogeneous(d) => Some(d),
            _ => None,
        }
    }
}

impl Polynomial {
    pub fn zero(vars: &[String]) -> Self {
        Polynomial { vars: vars.to_vec(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[String], c: Rat) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn variable(vars: &[String], i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = Self::zero(vars);
        p.add_term(e, Rat::one());
        p
    }

    pub fn from_terms(vars: &[String], terms: impl IntoIterator<Item = (Exponent, Rat)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len());
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponent, c: Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &[u32]) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    /// Indices of variables that occur in some monomial.
    pub fn occurring_variables(&self) -> Vec<usize> {
        (0..self.nvars()).filter(|&i| self.terms.keys().any(|e| e[i] > 0)).collect()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Self::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Self::constant(&self.vars, Rat::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Formal partial derivative in variable `i`.
    pub fn partial(&self, i: usize) -> Polynomial {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * rat(i64::from(e[i])));
            }
        }
        out
    }

    /// Sets the variables outside `keep` to zero.
    pub fn restrict_to(&self, keep: &[usize]) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| (0..e.len()).all(|i| e[i] == 0 || keep.contains(&i)))
            .map(|(e, c)| (e.clone(), c.clone()));
        Self::from_terms(&self.vars, terms)
    }

    /// Common `w`-degree of the monomials.
    pub fn weighted_degree(&self, w: &RatVector) -> WeightedDegree {
        assert_eq!(w.len(), self.nvars(), "weight vector length");
        let mut degree: Option<Rat> = None;
        for e in self.terms.keys() {
            let d: Rat = e.iter().zip(&w.0).map(|(&k, wi)| rat(i64::from(k)) * wi).sum();
            match &degree {
                None => degree = Some(d),
                Some(prev) if *prev != d => return WeightedDegree::NotHomogeneous,
                _ => {}
            }
        }
        match degree {
            Some(d) => WeightedDegree::Homogeneous(d),
            None => WeightedDegree::ZeroPolynomial,
        }
    }

    pub fn parse(text: &str, vars: &[String]) -> Result<Polynomial, ParseError> {
        let mut p = Parser { src: text, pos: 0, vars };
        p.skip_ws();
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(ParseError::new(format!("unexpected input {:?}", &text[p.pos..]), p.pos));
        }
        Ok(out)
    }

    fn fmt_monomial(&self, e: &Exponent) -> String {
        let parts: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| if k == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], k) })
            .collect();
        parts.join("*")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono = self.fmt_monomial(e);
            let mag = c.abs();
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{}", fmt_rat(&mag))?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{}*{}", fmt_rat(&mag), mono)?,
            }
        }
        Ok(())
    }
}

impl serde::Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += self.peek().map_or(0, char::len_utf8);
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(msg, self.pos)
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.add(&self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        if self.eat('-') {
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            if self.peek() == Some('-') {
                return Err(self.err("negative exponent"));
            }
            let start = self.pos;
            let digits = self.digits();
            let k: u32 = digits.parse().map_err(|_| ParseError::new("expected exponent", start))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num: BigInt = self.digits().parse().expect("digits");
                let mut value = Rat::from_integer(num);
                // Only a literal denominator may follow '/'.
                let save = self.pos;
                if self.eat('/') {
                    self.skip_ws();
                    let start = self.pos;
                    let den = self.digits();
                    if den.is_empty() {
                        return Err(ParseError::new("expected integer denominator", start));
                    }
                    let den: BigInt = den.parse().expect("digits");
                    if den.is_zero() {
                        return Err(ParseError::new("zero denominator", start));
                    }
                    value /= Rat::from_integer(den);
                } else {
                    self.pos = save;
                }
                Ok(Polynomial::constant(self.vars, value))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
                    self.pos += self.peek().map_or(0, char::len_utf8);
                }
                let name = &self.src[start..self.pos];
                match self.vars.iter().position(|v| v == name) {
                    Some(i) => Ok(Polynomial::variable(self.vars, i)),
                    None => Err(ParseError::new(format!("unknown variable {name:?}"), start)),
                }
            }
            Some(c) => Err(self.err(format!("unexpected character {c:?}"))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
