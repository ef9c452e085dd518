//! Queryable mind-change and scaffolding sequences.
//!
//! Set indices follow the cover: `C_0 = f⁻¹((-∞, p+ε))` and `C_1 = f⁻¹((p-ε, ∞))`.

use std::sync::Arc;

use serde::Serialize;

use crate::derivation::engine::{Engine, Region, Rho};
use crate::derivation::normal::{restrict, Node};
use crate::derivation::Symbolic;
use crate::error::Result;
use crate::funcalc::{word_to_string, FuncExpr, Point, Word};
use crate::ordinal::Ordinal;
use crate::rational::Rational;

/// The set index whose complement is the region `r`.
pub fn index_avoiding(r: Region) -> u8 {
    match r {
        Region::High => 0,
        _ => 1,
    }
}

/// The outer region outside set `i`.
pub fn region_outside(i: u8) -> Region {
    if i == 0 {
        Region::High
    } else {
        Region::Low
    }
}

pub fn opposite(r: Region) -> Region {
    match r {
        Region::Low => Region::High,
        Region::High => Region::Low,
        Region::Mid => Region::Mid,
    }
}

/// A neighbourhood removal read off a summary: `μ` and the outer regions whose
/// set contains everything left at stage `μ`. A region `r` here means "every
/// surviving point is in the set that avoids the opposite of `r`".
pub fn removal(rho: &Rho) -> Option<(Ordinal, Vec<Region>)> {
    let (lo, hi) = (rho.get(Region::Low), rho.get(Region::High));
    let mu = lo.clone().min(hi.clone());
    if mu >= rho.alpha() {
        return None;
    }
    let mut sides = Vec::new();
    if *hi == mu {
        sides.push(Region::Low);
    }
    if *lo == mu {
        sides.push(Region::High);
    }
    Some((mu, sides))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Triple {
    pub mu: Ordinal,
    pub sigma: String,
    pub i: u8,
}

pub struct MindChangeOracle {
    pub subject: FuncExpr,
    pub p: Rational,
    pub eps: Rational,
    root: Arc<Node>,
    engine: Engine,
}

impl MindChangeOracle {
    pub fn new(f: &FuncExpr, p: &Rational, eps: &Rational) -> Result<Self> {
        let s = Symbolic::new(f)?;
        let engine = s.engine(p, eps)?;
        Ok(MindChangeOracle { subject: f.clone(), p: p.clone(), eps: eps.clone(), root: s.root, engine })
    }

    /// Triples at the prefixes of `prefix`, with strictly decreasing `μ`.
    pub fn observe(&self, prefix: &[bool]) -> Result<Vec<Triple>> {
        let mut out: Vec<Triple> = Vec::new();
        let mut node = self.root.clone();
        for k in 0..=prefix.len() {
            if k > 0 {
                node = restrict(&node, &prefix[k - 1..k])?;
            }
            if let Some((mu, sides)) = removal(&self.engine.rho(&node)?) {
                if out.last().is_none_or(|t| mu < t.mu) {
                    let i = if sides.contains(&Region::Low) { 0 } else { 1 };
                    out.push(Triple { mu, sigma: word_to_string(&prefix[..k]), i });
                }
            }
        }
        Ok(out)
    }
}

pub struct ScaffoldOracle {
    pub subject: FuncExpr,
    pub q: Rational,
    pub delta: Rational,
    root: Arc<Node>,
    engine: Engine,
}

impl ScaffoldOracle {
    pub fn new(g: &FuncExpr, q: &Rational, delta: &Rational) -> Result<Self> {
        let s = Symbolic::new(g)?;
        let engine = s.engine(q, delta)?;
        Ok(ScaffoldOracle { subject: g.clone(), q: q.clone(), delta: delta.clone(), root: s.root, engine })
    }

    /// A point of `[σ]` with rank above `ν` outside set `i`, if any.
    pub fn query(&self, nu: &Ordinal, sigma: &[bool], i: u8) -> Result<Option<Point>> {
        self.witness(nu, sigma, region_outside(i))
    }

    /// A point of `[σ]` in region `r` with rank above `ν`, if any.
    pub fn witness(&self, nu: &Ordinal, sigma: &[bool], r: Region) -> Result<Option<Point>> {
        let node = restrict(&self.root, sigma)?;
        Ok(self.engine.witness(&node, r, nu)?.map(|x| x.prepend(sigma)))
    }

    pub fn rho(&self) -> Result<Rho> {
        self.engine.rho(&self.root)
    }

    pub fn point_rank(&self, x: &Point) -> Result<Ordinal> {
        self.engine.point_rank(&self.root, x)
    }

    pub fn region_at(&self, x: &Point) -> Region {
        self.engine.region(&self.subject.eval(x))
    }
}

/// Convenience: a fresh prefix word.
pub fn word(bits: &str) -> Word {
    bits.chars().map(|c| c == '1').collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalc::Sidedness;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn mind_change_triples() {
        let c = MindChangeOracle::new(&FuncExpr::constant(0), &r(1, 2), &r(1, 4)).unwrap();
        assert_eq!(c.observe(&[]).unwrap(), vec![Triple { mu: Ordinal::zero(), sigma: String::new(), i: 0 }]);
        let l = FuncExpr::canon(Ordinal::nat(2), Sidedness::Left).unwrap();
        let m = MindChangeOracle::new(&l, &r(1, 2), &r(1, 4)).unwrap();
        let ts = m.observe(&word("1")).unwrap();
        assert_eq!(ts.last().unwrap(), &Triple { mu: Ordinal::zero(), sigma: "1".into(), i: 1 });
        assert!(ts.windows(2).all(|w| w[1].mu < w[0].mu));
        // Near 0^ω only the root triple is visible.
        let deep = m.observe(&word("0000")).unwrap();
        assert_eq!(deep.len(), 1);
        assert_eq!(deep[0].mu, Ordinal::one());
    }

    #[test]
    fn scaffold_queries() {
        let l = FuncExpr::canon(Ordinal::nat(2), Sidedness::Left).unwrap();
        let s = ScaffoldOracle::new(&l, &r(1, 2), &r(1, 4)).unwrap();
        assert_eq!(s.query(&Ordinal::one(), &[], 1).unwrap(), Some(Point::constant(false)));
        assert_eq!(s.query(&Ordinal::one(), &word("1"), 1).unwrap(), None);
        assert_eq!(s.query(&Ordinal::one(), &word("1"), 0).unwrap(), None);
        let c = ScaffoldOracle::new(&FuncExpr::constant(0), &r(1, 2), &r(1, 4)).unwrap();
        assert_eq!(c.query(&Ordinal::zero(), &[], 0).unwrap(), None);
        let w = s.query(&Ordinal::zero(), &word("01"), 0).unwrap().unwrap();
        assert!(w.has_prefix(&word("01")) && s.region_at(&w) == Region::High);
    }
}
