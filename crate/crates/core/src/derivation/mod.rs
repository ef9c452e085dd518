//! Optimal derivation sequences: `α(f,p,ε)`, `|f|_α`, point ranks, maximal pairs, sidedness.
//!
//! The symbolic path works on the normal form (see [`normal`]) and computes
//! per-region vanishing stages (see [`engine`]). The brute path in [`brute`]
//! iterates the derivation on cylinders of bounded depth and serves as an
//! independent oracle, and as the only route for sums and products.

pub mod brute;
pub mod engine;
pub mod normal;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcalc::{critical_pairs, pairs_for_values, FuncExpr, Point, Sidedness, StackSeq};
use crate::ordinal::Ordinal;
use crate::rational::Rational;

pub use brute::{brute_alpha, brute_derive, check_l1, L1Report, Residue, ResidueApprox};
pub use engine::{Coloring, Engine, Region, Rho};
pub use normal::{normalize, Node};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Profile {
    pub alpha: Ordinal,
    /// Least `μ` with `f(P^μ) ⊆ (-∞, p+ε)`.
    pub mu_low: Ordinal,
    /// Least `μ` with `f(P^μ) ⊆ (p-ε, ∞)`.
    pub mu_high: Ordinal,
    pub last_sides: BTreeSet<Region>,
}

impl Profile {
    fn from_rho(r: &Rho) -> Profile {
        Profile {
            alpha: r.alpha(),
            mu_low: r.get(Region::High).clone(),
            mu_high: r.get(Region::Low).clone(),
            last_sides: r.last_regions().into_iter().collect(),
        }
    }

    pub fn has_outer_side(&self) -> bool {
        self.last_sides.contains(&Region::Low) || self.last_sides.contains(&Region::High)
    }

    pub fn two_sided(&self) -> bool {
        self.last_sides.contains(&Region::Low) && self.last_sides.contains(&Region::High)
    }
}

/// A function in normal form, reusable across pairs.
#[derive(Clone)]
pub struct Symbolic {
    pub expr: FuncExpr,
    pub root: Arc<Node>,
}

impl Symbolic {
    pub fn new(f: &FuncExpr) -> Result<Self> {
        Ok(Symbolic { expr: f.clone(), root: normalize(f)? })
    }

    pub fn engine(&self, p: &Rational, eps: &Rational) -> Result<Engine> {
        Ok(Engine::new(Coloring::new(p, eps)?))
    }

    pub fn profile(&self, p: &Rational, eps: &Rational) -> Result<Profile> {
        let e = self.engine(p, eps)?;
        Ok(Profile::from_rho(&e.rho(&self.root)?))
    }
}

pub fn derive_profile(f: &FuncExpr, p: &Rational, eps: &Rational) -> Result<Profile> {
    Symbolic::new(f)?.profile(p, eps)
}

pub fn point_rank(f: &FuncExpr, p: &Rational, eps: &Rational, x: &Point) -> Result<Ordinal> {
    let s = Symbolic::new(f)?;
    s.engine(p, eps)?.point_rank(&s.root, x)
}

/// Profile through the brute oracle; fails unless the oracle is exact.
pub fn brute_profile(f: &FuncExpr, p: &Rational, eps: &Rational) -> Result<Profile> {
    let c = Coloring::new(p, eps)?;
    let r = brute_derive(f, &c, brute::default_depth(f));
    let regions = brute::stage_regions(f, &c, &r).filter(|_| r.exact).ok_or_else(|| {
        Error::Unsupported(format!("brute oracle is not exact for {f}"))
    })?;
    let first_without = |reg: Region| regions.iter().position(|s| !s.contains(&reg)).unwrap_or(regions.len());
    Ok(Profile {
        alpha: Ordinal::nat(regions.len() as u64),
        mu_low: Ordinal::nat(first_without(Region::High) as u64),
        mu_high: Ordinal::nat(first_without(Region::Low) as u64),
        last_sides: regions.last().cloned().unwrap_or_default(),
    })
}

/// Profile by whichever route applies to the expression.
pub fn profile_any(f: &FuncExpr, p: &Rational, eps: &Rational) -> Result<Profile> {
    if f.has_sum_or_prod() {
        brute_profile(f, p, eps)
    } else {
        derive_profile(f, p, eps)
    }
}

/// Representative pairs, including sums and products (through their exact brute range).
pub fn candidate_pairs(f: &FuncExpr) -> Result<Vec<(Rational, Rational)>> {
    if f.has_sum_or_prod() {
        let vals = brute::exact_range(f, brute::default_depth(f))
            .filter(|_| f.is_stack_free())
            .ok_or_else(|| Error::Unsupported(format!("no exact range for {f}")))?;
        Ok(pairs_for_values(&vals.into_iter().collect::<Vec<_>>()))
    } else {
        Ok(critical_pairs(f))
    }
}

/// Whether the function takes a single value.
pub fn is_constant(f: &FuncExpr) -> Result<bool> {
    if f.has_sum_or_prod() {
        Ok(candidate_pairs(f)?.is_empty())
    } else {
        let r = f.range_of();
        Ok(r.is_finite() && r.values.len() == 1)
    }
}

/// `|f|_α`.
pub fn alpha_rank(f: &FuncExpr) -> Result<Ordinal> {
    if f.has_sum_or_prod() {
        let mut best = Ordinal::one();
        for (p, e) in candidate_pairs(f)? {
            best = best.max(brute_profile(f, &p, &e)?.alpha);
        }
        return Ok(best);
    }
    if f.range_of().is_finite() {
        let s = Symbolic::new(f)?;
        let mut best = Ordinal::one();
        for (p, e) in critical_pairs(f) {
            best = best.max(s.profile(&p, &e)?.alpha);
        }
        Ok(best)
    } else {
        structural_rank(f)
    }
}

/// Rank of an expression with infinite range, as the supremum over pairs.
fn structural_rank(f: &FuncExpr) -> Result<Ordinal> {
    if f.range_of().is_finite() {
        return alpha_rank(f);
    }
    match f {
        FuncExpr::Affine(_, _, g) => structural_rank(g),
        FuncExpr::Glue(a, b) => Ok(structural_rank(a)?.max(structural_rank(b)?)),
        FuncExpr::Canon(o, Sidedness::LimitClass) => Ok(o.clone()),
        FuncExpr::Stack(StackSeq::Fund { ord, shrink: true, .. }, _) => Ok(ord.clone()),
        FuncExpr::Spike(g, _, _) => {
            let r = structural_rank(g)?;
            if r.is_limit() {
                Ok(r)
            } else {
                Err(Error::Unsupported(format!("spike over infinite-range successor rank in {f}")))
            }
        }
        _ => Err(Error::Unsupported(format!("infinite range in this position: {f}"))),
    }
}

/// All representative pairs attaining the (successor) rank with a low or high value at the last stage.
pub fn maximal_pairs(f: &FuncExpr) -> Result<Vec<(Rational, Rational)>> {
    let rank = alpha_rank(f)?;
    if !rank.is_successor() {
        return Err(Error::Precondition(format!("maximal pairs need a successor rank, got {rank}")));
    }
    let mut out = Vec::new();
    for (p, e) in candidate_pairs(f)? {
        let pr = profile_any(f, &p, &e)?;
        if pr.alpha == rank && pr.has_outer_side() {
            out.push((p, e));
        }
    }
    Ok(out)
}

/// Maximal pairs with their profiles.
pub fn maximal_profiles(f: &FuncExpr) -> Result<Vec<((Rational, Rational), Profile)>> {
    let rank = alpha_rank(f)?;
    let mut out = Vec::new();
    for (p, e) in candidate_pairs(f)? {
        let pr = profile_any(f, &p, &e)?;
        if pr.alpha == rank && pr.has_outer_side() {
            out.push(((p, e), pr));
        }
    }
    Ok(out)
}

pub fn classify(f: &FuncExpr) -> Result<Sidedness> {
    let rank = alpha_rank(f)?;
    if rank == Ordinal::one() {
        return Ok(Sidedness::ContinuousClass);
    }
    if rank.is_limit() {
        return Ok(Sidedness::LimitClass);
    }
    let maxes = maximal_profiles(f)?;
    if maxes.iter().any(|(_, p)| p.two_sided()) {
        Ok(Sidedness::Two)
    } else if maxes.iter().all(|(_, p)| !p.last_sides.contains(&Region::High)) {
        Ok(Sidedness::Left)
    } else if maxes.iter().all(|(_, p)| !p.last_sides.contains(&Region::Low)) {
        Ok(Sidedness::Right)
    } else {
        Ok(Sidedness::OneNeither)
    }
}

/// Lower semicontinuity of a normalized tree.
fn node_lsc(node: &Arc<Node>) -> Option<bool> {
    use normal::Tail;
    match node.as_ref() {
        Node::Leaf(_) => Some(true),
        Node::Glue(a, b) => Some(node_lsc(a)? && node_lsc(b)?),
        Node::Stack(s) => {
            let Tail::Cycle { items, .. } = &s.tail else {
                // Copies of rank three or more are neither lower nor upper semicontinuous.
                return Some(false);
            };
            for c in s.head.iter().chain(items) {
                if !node_lsc(c)? {
                    return Some(false);
                }
            }
            let liminf = items.iter().map(node_min).collect::<Option<Vec<_>>>()?.into_iter().min()?;
            Some(s.limit <= liminf)
        }
    }
}

fn node_min(node: &Arc<Node>) -> Option<Rational> {
    use normal::Tail;
    match node.as_ref() {
        Node::Leaf(v) => Some(v.clone()),
        Node::Glue(a, b) => Some(node_min(a)?.min(node_min(b)?)),
        Node::Stack(s) => {
            let Tail::Cycle { items, .. } = &s.tail else { return None };
            let mut m = s.limit.clone();
            for c in s.head.iter().chain(items) {
                m = m.min(node_min(c)?);
            }
            Some(m)
        }
    }
}

/// Lower (or, with `lower = false`, upper) semicontinuity, decided structurally.
pub fn semicontinuous(f: &FuncExpr, lower: bool) -> Result<bool> {
    if f.has_sum_or_prod() {
        return brute::semicontinuous_by_views(f, brute::default_depth(f), lower)
            .filter(|_| f.is_stack_free())
            .ok_or_else(|| Error::Unsupported(format!("semicontinuity of {f}")));
    }
    let g = if lower { f.clone() } else { FuncExpr::neg(f.clone()) };
    node_lsc(&normalize(&g)?).ok_or_else(|| Error::Unsupported(format!("semicontinuity of {f}")))
}

/// Continuity, checked without ranks: cylinder views for stack-free functions, both semicontinuities otherwise.
pub fn is_continuous(f: &FuncExpr) -> Result<bool> {
    if f.is_stack_free() {
        let d = brute::default_depth(f).max(f.depth() + 1);
        return brute::continuous_by_views(f, d).ok_or_else(|| Error::Unsupported(format!("continuity of {f}")));
    }
    Ok(semicontinuous(f, true)? && semicontinuous(f, false)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalc::one_sided_example;

    fn o(s: &str) -> Ordinal {
        Ordinal::parse(s).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn profiles_of_small_functions() {
        let c = derive_profile(&FuncExpr::constant(0), &r(1, 2), &r(1, 4)).unwrap();
        assert_eq!(c.alpha, o("1"));
        assert_eq!(c.last_sides, [Region::Low].into());
        let l = derive_profile(&FuncExpr::canon(o("2"), Sidedness::Left).unwrap(), &r(1, 2), &r(1, 4)).unwrap();
        assert_eq!(l.alpha, o("2"));
        assert_eq!(l.last_sides, [Region::Low].into());
        assert_eq!((l.mu_low, l.mu_high), (o("1"), o("2")));
        let f = one_sided_example();
        assert_eq!(derive_profile(&f, &r(1, 2), &r(1, 4)).unwrap().last_sides, [Region::Low].into());
        assert_eq!(derive_profile(&f, &r(1, 2), &r(1, 4)).unwrap().alpha, o("2"));
        assert_eq!(derive_profile(&f, &r(0, 1), &r(1, 4)).unwrap().alpha, o("1"));
        assert!(derive_profile(&f, &r(0, 1), &r(0, 1)).is_err());
        assert!(derive_profile(&FuncExpr::sum(f.clone(), f), &r(0, 1), &r(1, 4)).is_err());
    }

    #[test]
    fn ranks_and_classes() {
        assert_eq!(alpha_rank(&FuncExpr::constant(5)).unwrap(), o("1"));
        assert_eq!(alpha_rank(&one_sided_example()).unwrap(), o("2"));
        assert_eq!(alpha_rank(&FuncExpr::canon(o("w"), Sidedness::LimitClass).unwrap()).unwrap(), o("w"));
        assert_eq!(classify(&FuncExpr::canon(o("2"), Sidedness::Left).unwrap()).unwrap(), Sidedness::Left);
        assert_eq!(classify(&one_sided_example()).unwrap(), Sidedness::OneNeither);
        assert_eq!(classify(&FuncExpr::constant(5)).unwrap(), Sidedness::ContinuousClass);
    }

    #[test]
    fn point_ranks() {
        let l = FuncExpr::canon(o("2"), Sidedness::Left).unwrap();
        let pr = |s: &str| point_rank(&l, &r(1, 2), &r(1, 4), &Point::parse(s).unwrap()).unwrap();
        assert_eq!(pr("~0"), o("2"));
        assert_eq!(pr("1~0"), o("1"));
        assert_eq!(point_rank(&FuncExpr::constant(0), &r(1, 2), &r(1, 4), &Point::constant(true)).unwrap(), o("1"));
    }

    #[test]
    fn maximal_pair_lists() {
        assert!(maximal_pairs(&FuncExpr::canon(o("2"), Sidedness::Left).unwrap()).unwrap().contains(&(r(1, 2), r(1, 4))));
        assert!(maximal_pairs(&FuncExpr::constant(0)).unwrap().is_empty());
        let t = FuncExpr::canon(o("3"), Sidedness::Two).unwrap();
        let ps = maximal_profiles(&t).unwrap();
        assert!(!ps.is_empty() && ps.iter().any(|(_, p)| p.two_sided()));
        assert!(maximal_pairs(&FuncExpr::canon(o("w"), Sidedness::LimitClass).unwrap()).is_err());
    }

    #[test]
    fn semicontinuity() {
        let l = FuncExpr::canon(o("2"), Sidedness::Left).unwrap();
        assert!(semicontinuous(&l, true).unwrap());
        assert!(!semicontinuous(&FuncExpr::canon(o("2"), Sidedness::Right).unwrap(), true).unwrap());
        assert!(semicontinuous(&FuncExpr::constant(0), true).unwrap());
        assert!(is_continuous(&FuncExpr::glue(FuncExpr::constant(0), FuncExpr::constant(1))).unwrap());
        assert!(!is_continuous(&l).unwrap());
        assert!(!is_continuous(&FuncExpr::canon(o("w+1"), Sidedness::Left).unwrap()).unwrap());
    }
}
