//! Countable ordinals below ω^ω^ω in Cantor normal form.
//!
//! An ordinal is a finite sum `ω^e1·k1 + … + ω^er·kr` with `e1 > … > er`
//! and every `ki ≥ 1`. Exponents are ordinals themselves.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, ParseError, Result};

/// Maximum nesting of `w^(...)` accepted by the parser.
pub const MAX_DEPTH: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub exp: Ordinal,
    pub coeff: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Ordinal {
    terms: Vec<Term>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Ordinal::nat(1)
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            return Ordinal::zero();
        }
        Ordinal { terms: vec![Term { exp: Ordinal::zero(), coeff: n }] }
    }

    pub fn omega() -> Self {
        Ordinal::omega_pow(Ordinal::one())
    }

    /// `ω^e`.
    pub fn omega_pow(e: Ordinal) -> Self {
        Ordinal { terms: vec![Term { exp: e, coeff: 1 }] }
    }

    /// `ω^e·k`.
    pub fn monomial(e: Ordinal, k: u64) -> Self {
        if k == 0 {
            return Ordinal::zero();
        }
        Ordinal { terms: vec![Term { exp: e, coeff: k }] }
    }

    /// Builds an ordinal from terms, checking the normal-form invariants.
    pub fn from_terms(terms: Vec<Term>) -> Result<Self> {
        for w in terms.windows(2) {
            if w[0].exp <= w[1].exp {
                return Err(Error::Precondition("exponents must strictly decrease".into()));
            }
        }
        if terms.iter().any(|t| t.coeff == 0) {
            return Err(Error::Precondition("coefficients must be positive".into()));
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a natural number, if finite.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exp.is_zero() => Some(t.coeff),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_nat().is_some()
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exp.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && !self.is_successor()
    }

    pub fn succ(&self) -> Self {
        self.add(&Ordinal::one())
    }

    pub fn pred(&self) -> Result<Self> {
        if !self.is_successor() {
            return Err(Error::Precondition(format!("pred of non-successor {self}")));
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().unwrap();
        last.coeff -= 1;
        if last.coeff == 0 {
            terms.pop();
        }
        Ok(Ordinal { terms })
    }

    pub fn leading_exp(&self) -> Option<&Ordinal> {
        self.terms.first().map(|t| &t.exp)
    }

    /// Ordinal addition: terms of `self` below the leading exponent of `other` are absorbed.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(head) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = self.terms.iter().take_while(|t| t.exp > head.exp).cloned().collect();
        let mut rest = other.terms.clone();
        if let Some(same) = self.terms.iter().find(|t| t.exp == head.exp) {
            rest[0].coeff += same.coeff;
        }
        terms.append(&mut rest);
        Ordinal { terms }
    }

    /// The unique `c` with `self + c = other`; requires `self ≤ other`.
    pub fn sub_left(&self, other: &Ordinal) -> Result<Ordinal> {
        if self > other {
            return Err(Error::Precondition(format!("{self} > {other} in left subtraction")));
        }
        let common = self.terms.iter().zip(&other.terms).take_while(|(a, b)| a == b).count();
        let Some(a) = self.terms.get(common) else {
            return Ok(Ordinal { terms: other.terms[common..].to_vec() });
        };
        let b = &other.terms[common];
        let mut terms = other.terms[common..].to_vec();
        if a.exp == b.exp {
            terms[0].coeff -= a.coeff;
        }
        Ok(Ordinal { terms })
    }

    /// The natural (Hessenberg) sum: merge normal forms adding coefficients.
    pub fn natural_sum(&self, other: &Ordinal) -> Ordinal {
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => a.exp.cmp(&b.exp),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    terms.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    terms.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let mut t = self.terms[i].clone();
                    t.coeff += other.terms[j].coeff;
                    terms.push(t);
                    i += 1;
                    j += 1;
                }
            }
        }
        Ordinal { terms }
    }

    /// `self·n` for a natural `n`: the leading coefficient is multiplied and the tail kept once.
    pub fn mul_nat(&self, n: u64) -> Ordinal {
        if n == 0 || self.is_zero() {
            return Ordinal::zero();
        }
        let mut terms = self.terms.clone();
        terms[0].coeff *= n;
        Ordinal { terms }
    }

    /// Standard fundamental sequence for a limit ordinal.
    pub fn fund_seq(&self, n: u64) -> Result<Ordinal> {
        if !self.is_limit() {
            return Err(Error::Precondition(format!("fund_seq of non-limit {self}")));
        }
        let mut terms = self.terms.clone();
        let last = terms.pop().unwrap();
        if last.coeff > 1 {
            terms.push(Term { exp: last.exp.clone(), coeff: last.coeff - 1 });
        }
        let base = Ordinal { terms };
        let tail = if last.exp.is_successor() {
            Ordinal::monomial(last.exp.pred()?, n + 1)
        } else {
            Ordinal::omega_pow(last.exp.fund_seq(n)?)
        };
        Ok(base.add(&tail))
    }

    /// Least `η` with `self ≤ ω^η`.
    fn level(&self) -> Ordinal {
        match self.terms.as_slice() {
            [] => Ordinal::zero(),
            [t] if t.coeff == 1 => t.exp.clone(),
            [t, ..] => t.exp.succ(),
        }
    }

    /// `L(self)`; defined for `self ≥ 1`.
    pub fn xi_level(&self) -> Result<Ordinal> {
        if self.is_zero() {
            return Err(Error::Precondition("xi_level of 0".into()));
        }
        Ok(self.level())
    }

    /// The coarsening `self ≲ other`, decided by comparing ω-power bounds.
    pub fn coarse_le(&self, other: &Ordinal) -> bool {
        self.level() <= other.level()
    }

    /// Nesting depth of exponents (0 for naturals).
    pub fn depth(&self) -> usize {
        self.terms
            .iter()
            .filter(|t| !t.exp.is_zero())
            .map(|t| 1 + t.exp.depth())
            .max()
            .unwrap_or(0)
    }

    pub fn parse(text: &str) -> Result<Ordinal> {
        let mut p = OrdParser { text, pos: 0, depth: 0 };
        let o = p.ord()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input", &["+", "end of input"]));
        }
        Ok(o)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let c = a.exp.cmp(&b.exp).then(a.coeff.cmp(&b.coeff));
            if c != Ordering::Equal {
                return c;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::nat(n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match t.exp.as_nat() {
                Some(0) => write!(f, "{}", t.coeff)?,
                Some(1) => write!(f, "w")?,
                Some(e) => write!(f, "w^{e}")?,
                None => write!(f, "w^({})", t.exp)?,
            }
            if t.coeff > 1 && !t.exp.is_zero() {
                write!(f, "*{}", t.coeff)?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Ordinal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ordinal::parse(s)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ordinal::parse(&s).map_err(serde::de::Error::custom)
    }
}

struct OrdParser<'a> {
    text: &'a str,
    pos: usize,
    depth: usize,
}

impl<'a> OrdParser<'a> {
    fn error(&self, msg: &str, expected: &[&str]) -> Error {
        Error::Parse(ParseError::at(self.text, self.pos, msg, expected))
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
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

    fn nat(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a natural number", &["digit"]));
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| Error::Parse(ParseError::at(self.text, start, "number too large", &[])))
    }

    fn ord(&mut self) -> Result<Ordinal> {
        let mut acc = self.term()?;
        while self.eat('+') {
            acc = acc.add(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal> {
        self.skip_ws();
        if self.eat('w') || self.eat('ω') {
            let exp = if self.eat('^') {
                if self.eat('(') {
                    self.depth += 1;
                    if self.depth > MAX_DEPTH {
                        return Err(self.error("exponent nesting too deep", &[]));
                    }
                    let e = self.ord()?;
                    self.depth -= 1;
                    if !self.eat(')') {
                        return Err(self.error("unclosed exponent", &[")", "+"]));
                    }
                    e
                } else if self.eat('w') || self.eat('ω') {
                    Ordinal::omega()
                } else {
                    Ordinal::nat(self.nat()?)
                }
            } else {
                Ordinal::one()
            };
            let k = if self.eat('*') { self.nat()? } else { 1 };
            Ok(Ordinal::monomial(exp, k))
        } else if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            Ok(Ordinal::nat(self.nat()?))
        } else {
            Err(self.error("expected an ordinal term", &["w", "digit"]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        Ordinal::parse(s).unwrap()
    }

    #[test]
    fn comparison() {
        assert_eq!(o("0").cmp(&o("0")), Ordering::Equal);
        assert!(o("w") < o("w^2"));
        assert!(o("w*2+1") > o("w*2"));
    }

    #[test]
    fn addition_absorbs() {
        assert_eq!(o("1").add(&o("w")), o("w"));
        assert_eq!(o("w").add(&o("1")).to_string(), "w + 1");
        assert_eq!(o("w+3").add(&o("w*2")), o("w*3"));
    }

    #[test]
    fn natural_sums() {
        assert_eq!(o("w+1").natural_sum(&o("w+1")), o("w*2+2"));
        assert_eq!(o("w^2").natural_sum(&o("w*3+4")), o("w^2+w*3+4"));
        assert_eq!(o("w").natural_sum(&o("0")), o("w"));
    }

    #[test]
    fn multiplication_by_naturals() {
        assert_eq!(o("w+1").mul_nat(2), o("w*2+1"));
        assert_eq!(o("w^2+w").mul_nat(3), o("w^2*3+w"));
        assert_eq!(o("w^2+w").mul_nat(1), o("w^2+w"));
    }

    #[test]
    fn successors() {
        assert!(!o("w").is_successor());
        assert!(!o("0").is_successor());
        assert_eq!(o("w*2+3").pred().unwrap(), o("w*2+2"));
        assert!(o("w").pred().is_err());
    }

    #[test]
    fn fundamental_sequences() {
        assert_eq!(o("w").fund_seq(3).unwrap(), o("4"));
        assert_eq!(o("w^2").fund_seq(2).unwrap(), o("w*3"));
        assert_eq!(o("w*2").fund_seq(1).unwrap(), o("w+2"));
        assert_eq!(o("w^w").fund_seq(2).unwrap(), o("w^3"));
        assert!(o("w+1").fund_seq(0).is_err());
    }

    #[test]
    fn coarsening() {
        assert!(o("w").coarse_le(&o("2")));
        assert!(!o("w+1").coarse_le(&o("w")));
        assert!(o("w*5").coarse_le(&o("w+1")));
        assert_eq!(o("1").xi_level().unwrap(), o("0"));
        assert_eq!(o("w").xi_level().unwrap(), o("1"));
        assert_eq!(o("w^2*3+5").xi_level().unwrap(), o("3"));
    }

    #[test]
    fn left_subtraction() {
        assert_eq!(o("w*2").sub_left(&o("w*3+2")).unwrap(), o("w+2"));
        assert_eq!(o("3").sub_left(&o("w")).unwrap(), o("w"));
        assert_eq!(o("w+1").sub_left(&o("w+1")).unwrap(), o("0"));
        assert!(o("w").sub_left(&o("5")).is_err());
    }

    #[test]
    fn text_round_trip() {
        for s in ["w^2*3 + w + 4", "0", "w^(w + 1)", "w^(w^(w))*2 + 7"] {
            assert_eq!(o(s).to_string(), s);
        }
        assert_eq!(o("w^(w+1)"), Ordinal::omega_pow(o("w + 1")));
        assert_eq!(o("w^1*1"), o("w"));
        assert_eq!(o("1 + w").to_string(), "w");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let Err(Error::Parse(e)) = Ordinal::parse("w + x") else { panic!() };
        assert_eq!((e.line, e.col), (1, 5));
        let deep = format!("{}1{}", "w^(".repeat(9), ")".repeat(9));
        assert!(Ordinal::parse(&deep).is_err());
        let ok = format!("{}1{}", "w^(".repeat(8), ")".repeat(8));
        assert!(Ordinal::parse(&ok).is_ok());
    }
}
