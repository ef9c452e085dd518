//! Rank computation on normalized trees for one fixed pair `(p, ε)`.
//!
//! Every value gets a region: low (`≤ p-ε`), mid, or high (`≥ p+ε`). Mid values
//! lie in both sets of the cover, so a neighbourhood is removable exactly when it
//! lacks surviving low points or lacks surviving high points. For a region `r`
//! the tree's summary records `ρ_r`, the least stage at which no surviving point
//! has region `r`. The rank is the largest of the three.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::normal::{child, fund_copy_map, Map, Node, StackNode, Tail};
use crate::error::{Error, Result};
use crate::funcalc::{fund_copy_rank, Point, Sidedness};
use crate::ordinal::Ordinal;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Low,
    Mid,
    High,
}

impl Region {
    pub const ALL: [Region; 3] = [Region::Low, Region::Mid, Region::High];
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub lo: Rational,
    pub hi: Rational,
}

impl Coloring {
    pub fn new(p: &Rational, eps: &Rational) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::Precondition("ε must be positive".into()));
        }
        Ok(Coloring { lo: p - eps, hi: p + eps })
    }

    pub fn region(&self, v: &Rational) -> Region {
        if *v <= self.lo {
            Region::Low
        } else if *v >= self.hi {
            Region::High
        } else {
            Region::Mid
        }
    }
}

/// Per-region vanishing stages `ρ_low, ρ_mid, ρ_high`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Rho([Ordinal; 3]);

impl Rho {
    pub fn get(&self, r: Region) -> &Ordinal {
        &self.0[r as usize]
    }

    fn raise(&mut self, r: Region, v: Ordinal) {
        if v > self.0[r as usize] {
            self.0[r as usize] = v;
        }
    }

    pub fn join(&mut self, other: &Rho) {
        for r in Region::ALL {
            self.raise(r, other.get(r).clone());
        }
    }

    pub fn alpha(&self) -> Ordinal {
        self.0.iter().max().cloned().unwrap_or_default()
    }

    /// Regions still present at the last nonempty stage.
    pub fn last_regions(&self) -> Vec<Region> {
        let a = self.alpha();
        Region::ALL.into_iter().filter(|&r| *self.get(r) == a && !a.is_zero()).collect()
    }

    pub fn single(r: Region, v: Ordinal) -> Rho {
        let mut out = Rho::default();
        out.raise(r, v);
        out
    }
}

/// The summary of a canonical function of successor rank `s`, given the region of each value.
///
/// Left-type pieces have one special value (carried by the points of top rank) and
/// a generic value; when the two straddle the band the special side lasts `s`
/// stages and the generic side `s-1`, otherwise everything goes at stage 1.
pub fn canon_rho(s: &Ordinal, side: Sidedness, region_of: impl Fn(i64) -> Region) -> Result<Rho> {
    let below = s.pred()?;
    let piece = |special: Region, generic: Region| {
        let mut out = Rho::default();
        let split = matches!((special, generic), (Region::Low, Region::High) | (Region::High, Region::Low));
        if split {
            out.raise(special, s.clone());
            out.raise(generic, below.clone());
        } else {
            out.raise(special, Ordinal::one());
            out.raise(generic, Ordinal::one());
        }
        out
    };
    let (zero, one) = (region_of(0), region_of(1));
    Ok(match side {
        Sidedness::Left => piece(zero, one),
        Sidedness::Right => piece(one, zero),
        Sidedness::Two => {
            let mut r = piece(zero, one);
            r.join(&piece(one, zero));
            r
        }
        Sidedness::OneNeither => {
            let mut r = piece(zero, one);
            r.join(&piece(zero, region_of(-1)));
            r
        }
        _ => return Err(Error::Precondition(format!("no closed form for side {side}"))),
    })
}

pub struct Engine {
    pub coloring: Coloring,
    memo: RefCell<HashMap<usize, (Arc<Node>, Rho)>>,
}

impl Engine {
    pub fn new(coloring: Coloring) -> Self {
        Engine { coloring, memo: RefCell::new(HashMap::new()) }
    }

    pub fn region(&self, v: &Rational) -> Region {
        self.coloring.region(v)
    }

    pub fn rho(&self, node: &Arc<Node>) -> Result<Rho> {
        let key = Arc::as_ptr(node) as usize;
        if let Some((_, r)) = self.memo.borrow().get(&key) {
            return Ok(r.clone());
        }
        let r = match node.as_ref() {
            Node::Leaf(v) => Rho::single(self.region(v), Ordinal::one()),
            Node::Glue(a, b) => {
                let mut r = self.rho(a)?;
                r.join(&self.rho(b)?);
                r
            }
            Node::Stack(s) => self.stack_rho(s)?,
        };
        self.memo.borrow_mut().insert(key, (node.clone(), r.clone()));
        Ok(r)
    }

    fn fund_copy_rho(&self, ord: &Ordinal, side: Sidedness, shrink: bool, n: u64, map: &Map) -> Result<Rho> {
        let m = fund_copy_map(shrink, n, map);
        canon_rho(&fund_copy_rank(ord, n)?, side, |v| self.region(&m.apply(&Rational::int(v))))
    }

    /// First absolute copy index from which the regions of a shrinking tail no longer change.
    fn shrink_stable_index(&self, map: &Map) -> u64 {
        let b = &map.b;
        let d = [(b - &self.coloring.lo).abs(), (b - &self.coloring.hi).abs()]
            .into_iter()
            .filter(Rational::is_positive)
            .min()
            .expect("lo < hi");
        let mut n = 0;
        while &map.a.abs() * &Rational::pow2_neg(n) >= d {
            n += 1;
        }
        n
    }

    /// `(sup over tail copies, accumulation summary at the limit point)`.
    fn tail_rho(&self, tail: &Tail) -> Result<(Rho, Rho)> {
        match tail {
            Tail::Cycle { items, .. } => {
                let mut r = Rho::default();
                for it in items {
                    r.join(&self.rho(it)?);
                }
                Ok((r.clone(), r))
            }
            Tail::Fund { ord, side, shrink: false, start, map } => {
                let first = self.fund_copy_rho(ord, *side, false, *start, map)?;
                let mut r = Rho::default();
                for reg in Region::ALL {
                    let v = first.get(reg);
                    // Entries that follow the copy's rank grow to the limit; the others are 0 or 1 throughout.
                    let grows = *v >= Ordinal::nat(2) || (*v == Ordinal::one() && self.fund_copy_rho(ord, *side, false, start + 1, map)?.get(reg) > v);
                    r.raise(reg, if grows { ord.clone() } else { v.clone() });
                }
                Ok((r.clone(), r))
            }
            Tail::Fund { ord, side, shrink: true, start, map } => {
                let stable = self.shrink_stable_index(map).max(*start);
                let lim = self.fund_copy_rho(ord, *side, true, stable, map)?;
                let mut sup = lim.clone();
                for n in *start..stable {
                    sup.join(&self.fund_copy_rho(ord, *side, true, n, map)?);
                }
                Ok((sup, lim))
            }
        }
    }

    /// Rank of the limit point from its region and the accumulation summary around it.
    fn limit_rank(&self, region: Region, acc: &Rho) -> Ordinal {
        let other = match region {
            Region::Low => acc.get(Region::High).clone(),
            Region::High => acc.get(Region::Low).clone(),
            Region::Mid => acc.get(Region::Low).clone().min(acc.get(Region::High).clone()),
        };
        other.succ()
    }

    fn stack_rho(&self, s: &StackNode) -> Result<Rho> {
        let (mut r, acc) = self.tail_rho(&s.tail)?;
        for c in &s.head {
            r.join(&self.rho(c)?);
        }
        let reg = self.region(&s.limit);
        r.raise(reg, self.limit_rank(reg, &acc));
        Ok(r)
    }

    /// Summary of the `k`-th copy without materializing fundamental-sequence copies.
    fn copy_rho(&self, s: &StackNode, k: usize) -> Result<Rho> {
        if k < s.head.len() {
            return self.rho(&s.head[k]);
        }
        match &s.tail {
            Tail::Cycle { .. } => self.rho(&s.copy(k)?),
            Tail::Fund { ord, side, shrink, start, map } => {
                self.fund_copy_rho(ord, *side, *shrink, start + (k - s.head.len()) as u64, map)
            }
        }
    }

    /// `|x|`: the least stage not containing `x`.
    pub fn point_rank(&self, node: &Arc<Node>, x: &Point) -> Result<Ordinal> {
        match node.as_ref() {
            Node::Leaf(_) => Ok(Ordinal::one()),
            Node::Glue(a, b) => self.point_rank(if x.first() { b } else { a }, &x.rest()),
            Node::Stack(s) => match x.leading_run(s.dir) {
                None => {
                    let (_, acc) = self.tail_rho(&s.tail)?;
                    Ok(self.limit_rank(self.region(&s.limit), &acc))
                }
                Some(n) => self.point_rank(&s.copy(n)?, &x.shift(n + 1)),
            },
        }
    }

    /// A point of region `r` with rank above `mu`, if one exists.
    pub fn witness(&self, node: &Arc<Node>, r: Region, mu: &Ordinal) -> Result<Option<Point>> {
        if self.rho(node)?.get(r) <= mu {
            return Ok(None);
        }
        match node.as_ref() {
            Node::Leaf(_) => Ok(Some(Point::constant(true))),
            Node::Glue(a, b) => {
                if let Some(x) = self.witness(a, r, mu)? {
                    return Ok(Some(x.prepend(&[false])));
                }
                Ok(self.witness(b, r, mu)?.map(|x| x.prepend(&[true])))
            }
            Node::Stack(s) => {
                let reg = self.region(&s.limit);
                if reg == r {
                    let (_, acc) = self.tail_rho(&s.tail)?;
                    if self.limit_rank(reg, &acc) > *mu {
                        return Ok(Some(Point::constant(s.dir)));
                    }
                }
                let period = match &s.tail {
                    Tail::Cycle { items, .. } => s.head.len() + items.len(),
                    Tail::Fund { .. } => usize::MAX,
                };
                for k in 0..period.min(s.head.len() + 100_000) {
                    if self.copy_rho(s, k)?.get(r) > mu {
                        let inner = self.witness(&s.copy(k)?, r, mu)?.ok_or_else(|| {
                            Error::Invariant("copy summary promised a witness".into())
                        })?;
                        let mut pre = vec![s.dir; k];
                        pre.push(!s.dir);
                        return Ok(Some(inner.prepend(&pre)));
                    }
                }
                Err(Error::Invariant("no copy carries the promised witness".into()))
            }
        }
    }
}

/// An incremental view of the tree restricted to a growing prefix.
pub struct Cursor {
    pub node: Arc<Node>,
    pub prefix: Vec<bool>,
}

impl Cursor {
    pub fn new(root: Arc<Node>) -> Self {
        Cursor { node: root, prefix: Vec::new() }
    }

    pub fn push(&mut self, bit: bool) -> Result<()> {
        self.node = child(&self.node, bit)?;
        self.prefix.push(bit);
        Ok(())
    }
}
