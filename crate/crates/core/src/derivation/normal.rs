//! Normal form: affine maps and spikes pushed down to leaves.
//!
//! A normalized tree is a leaf (constant), a glue of two trees, or a stack of
//! copies accumulating at `dir^ω`, where copy `k` lives on `[dir^k (1-dir)]`.
//! Early copies may be materialized explicitly (after a spike landed in them);
//! the rest come from a periodic cycle or a fundamental-sequence generator.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::funcalc::{canon_expr, fund_copy_rank, FuncExpr, Point, Sidedness, StackSeq};
use crate::ordinal::Ordinal;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Map {
    pub a: Rational,
    pub b: Rational,
}

impl Map {
    pub fn identity() -> Self {
        Map { a: Rational::one(), b: Rational::zero() }
    }

    pub fn apply(&self, v: &Rational) -> Rational {
        &self.a * v + &self.b
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &Map) -> Map {
        Map { a: &outer.a * &self.a, b: outer.apply(&self.b) }
    }
}

#[derive(Debug)]
pub enum Node {
    Leaf(Rational),
    Glue(Arc<Node>, Arc<Node>),
    Stack(StackNode),
}

#[derive(Clone, Debug)]
pub struct StackNode {
    pub dir: bool,
    pub head: Vec<Arc<Node>>,
    pub tail: Tail,
    pub limit: Rational,
}

#[derive(Clone, Debug)]
pub enum Tail {
    /// Copy `head.len() + j` is `items[(offset + j) % len]`.
    Cycle { items: Vec<Arc<Node>>, offset: usize },
    /// Copy `head.len() + j` is `map(scale_n · canon(fund_seq(ord, n) + 1, side))` with `n = start + j`.
    Fund { ord: Ordinal, side: Sidedness, shrink: bool, start: u64, map: Map },
}

impl Tail {
    fn advance(&self, by: usize) -> Tail {
        match self {
            Tail::Cycle { items, offset } => Tail::Cycle { items: items.clone(), offset: (offset + by) % items.len() },
            Tail::Fund { ord, side, shrink, start, map } => Tail::Fund {
                ord: ord.clone(),
                side: *side,
                shrink: *shrink,
                start: start + by as u64,
                map: map.clone(),
            },
        }
    }

    /// The `j`-th copy produced by the tail.
    pub fn copy(&self, j: usize) -> Result<Arc<Node>> {
        match self {
            Tail::Cycle { items, offset } => Ok(items[(offset + j) % items.len()].clone()),
            Tail::Fund { ord, side, shrink, start, map } => fund_copy(ord, *side, *shrink, start + j as u64, map),
        }
    }
}

/// The effective value map of copy `n` in a fundamental-sequence tail.
pub fn fund_copy_map(shrink: bool, n: u64, map: &Map) -> Map {
    if shrink {
        Map { a: &map.a * &Rational::pow2_neg(n), b: map.b.clone() }
    } else {
        map.clone()
    }
}

pub fn fund_copy(ord: &Ordinal, side: Sidedness, shrink: bool, n: u64, map: &Map) -> Result<Arc<Node>> {
    let s = fund_copy_rank(ord, n)?;
    let base = normalize(&FuncExpr::Canon(s, side))?;
    Ok(map_node(&base, &fund_copy_map(shrink, n, map)))
}

impl StackNode {
    pub fn copy(&self, k: usize) -> Result<Arc<Node>> {
        match self.head.get(k) {
            Some(c) => Ok(c.clone()),
            None => self.tail.copy(k - self.head.len()),
        }
    }

    /// The stack restricted to `[dir^k]`.
    pub fn shift(&self, k: usize) -> StackNode {
        if k <= self.head.len() {
            StackNode { dir: self.dir, head: self.head[k..].to_vec(), tail: self.tail.clone(), limit: self.limit.clone() }
        } else {
            StackNode {
                dir: self.dir,
                head: Vec::new(),
                tail: self.tail.advance(k - self.head.len()),
                limit: self.limit.clone(),
            }
        }
    }

    /// Moves copies into the explicit head until copy `k` is explicit.
    fn materialize(&mut self, k: usize) -> Result<()> {
        let have = self.head.len();
        if k < have {
            return Ok(());
        }
        for j in 0..=(k - have) {
            self.head.push(self.tail.copy(j)?);
        }
        self.tail = self.tail.advance(k - have + 1);
        Ok(())
    }
}

/// Converts an expression into normal form. Sums and products are rejected.
pub fn normalize(f: &FuncExpr) -> Result<Arc<Node>> {
    Ok(match f {
        FuncExpr::Const(v) => Arc::new(Node::Leaf(v.clone())),
        FuncExpr::Affine(a, b, g) => map_node(&normalize(g)?, &Map { a: a.clone(), b: b.clone() }),
        FuncExpr::Glue(f0, f1) => Arc::new(Node::Glue(normalize(f0)?, normalize(f1)?)),
        FuncExpr::Spike(g, z, v) => spike_node(&normalize(g)?, z, v)?,
        FuncExpr::Stack(StackSeq::Cycle(items), v) => Arc::new(Node::Stack(StackNode {
            dir: true,
            head: Vec::new(),
            tail: Tail::Cycle { items: items.iter().map(normalize).collect::<Result<_>>()?, offset: 0 },
            limit: v.clone(),
        })),
        FuncExpr::Stack(StackSeq::Fund { ord, side, shrink }, v) => Arc::new(Node::Stack(StackNode {
            dir: true,
            head: Vec::new(),
            tail: Tail::Fund { ord: ord.clone(), side: *side, shrink: *shrink, start: 0, map: Map::identity() },
            limit: v.clone(),
        })),
        FuncExpr::Canon(o, s) => normalize(&canon_expr(o, *s)?)?,
        FuncExpr::Sum(..) | FuncExpr::Prod(..) => {
            return Err(Error::Unsupported("sums and products have no symbolic rank; use the brute oracle".into()))
        }
    })
}

pub fn map_node(node: &Arc<Node>, m: &Map) -> Arc<Node> {
    if *m == Map::identity() {
        return node.clone();
    }
    Arc::new(match node.as_ref() {
        Node::Leaf(v) => Node::Leaf(m.apply(v)),
        Node::Glue(a, b) => Node::Glue(map_node(a, m), map_node(b, m)),
        Node::Stack(s) => Node::Stack(StackNode {
            dir: s.dir,
            head: s.head.iter().map(|c| map_node(c, m)).collect(),
            tail: match &s.tail {
                Tail::Cycle { items, offset } => {
                    Tail::Cycle { items: items.iter().map(|c| map_node(c, m)).collect(), offset: *offset }
                }
                Tail::Fund { ord, side, shrink, start, map } => Tail::Fund {
                    ord: ord.clone(),
                    side: *side,
                    shrink: *shrink,
                    start: *start,
                    map: map.then(m),
                },
            },
            limit: m.apply(&s.limit),
        }),
    })
}

/// Overrides the value at `z`.
pub fn spike_node(node: &Arc<Node>, z: &Point, v: &Rational) -> Result<Arc<Node>> {
    Ok(match node.as_ref() {
        Node::Leaf(c) => {
            if z.word().is_empty() {
                Arc::new(Node::Stack(StackNode {
                    dir: z.tail(),
                    head: Vec::new(),
                    tail: Tail::Cycle { items: vec![node.clone()], offset: 0 },
                    limit: v.clone(),
                }))
            } else {
                let leaf = Arc::new(Node::Leaf(c.clone()));
                let spiked = spike_node(&leaf, &z.rest(), v)?;
                if z.first() {
                    Arc::new(Node::Glue(leaf, spiked))
                } else {
                    Arc::new(Node::Glue(spiked, leaf))
                }
            }
        }
        Node::Glue(a, b) => {
            if z.first() {
                Arc::new(Node::Glue(a.clone(), spike_node(b, &z.rest(), v)?))
            } else {
                Arc::new(Node::Glue(spike_node(a, &z.rest(), v)?, b.clone()))
            }
        }
        Node::Stack(s) => {
            let mut s = s.clone();
            match z.leading_run(s.dir) {
                None => s.limit = v.clone(),
                Some(n) => {
                    s.materialize(n)?;
                    s.head[n] = spike_node(&s.head[n], &z.shift(n + 1), v)?;
                }
            }
            Arc::new(Node::Stack(s))
        }
    })
}

/// The subtree on `[bit]`.
pub fn child(node: &Arc<Node>, bit: bool) -> Result<Arc<Node>> {
    Ok(match node.as_ref() {
        Node::Leaf(_) => node.clone(),
        Node::Glue(a, b) => {
            if bit { b.clone() } else { a.clone() }
        }
        Node::Stack(s) => {
            if bit == s.dir {
                Arc::new(Node::Stack(s.shift(1)))
            } else {
                s.copy(0)?
            }
        }
    })
}

pub fn restrict(node: &Arc<Node>, sigma: &[bool]) -> Result<Arc<Node>> {
    let mut cur = node.clone();
    for &b in sigma {
        cur = child(&cur, b)?;
    }
    Ok(cur)
}

/// Value of the normalized tree at a point; mirrors `FuncExpr::eval`.
pub fn node_eval(node: &Arc<Node>, x: &Point) -> Result<Rational> {
    match node.as_ref() {
        Node::Leaf(v) => Ok(v.clone()),
        Node::Glue(a, b) => node_eval(if x.first() { b } else { a }, &x.rest()),
        Node::Stack(s) => match x.leading_run(s.dir) {
            None => Ok(s.limit.clone()),
            Some(n) => node_eval(&s.copy(n)?, &x.shift(n + 1)),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalc::one_sided_example;

    fn pts() -> Vec<Point> {
        ["~0", "~1", "0~1", "1~0", "01~0", "10~1", "110~0", "1110~1", "0010~1", "11110~0", "101~0"]
            .iter()
            .map(|s| Point::parse(s).unwrap())
            .collect()
    }

    #[test]
    fn normal_form_preserves_values() {
        let o = |s: &str| Ordinal::parse(s).unwrap();
        let z = Point::parse("10~1").unwrap();
        let exprs = vec![
            one_sided_example(),
            FuncExpr::spike(FuncExpr::Canon(o("3"), Sidedness::Two), z.clone(), 7),
            FuncExpr::spike(FuncExpr::cycle(vec![FuncExpr::constant(1), FuncExpr::constant(2)], 0).unwrap(), Point::parse("110~0").unwrap(), 5),
            FuncExpr::affine(Rational::int(-2), Rational::int(3), FuncExpr::Canon(o("w+1"), Sidedness::OneNeither)).unwrap(),
            FuncExpr::spike(FuncExpr::Canon(o("w"), Sidedness::LimitClass), Point::parse("1110~1").unwrap(), 9),
        ];
        for f in exprs {
            let n = normalize(&f).unwrap();
            for x in pts() {
                assert_eq!(node_eval(&n, &x).unwrap(), f.eval(&x), "{f} at {x}");
            }
        }
    }

    #[test]
    fn restriction_matches_shifted_evaluation() {
        let f = FuncExpr::Canon(Ordinal::parse("w+2").unwrap(), Sidedness::Left);
        let n = normalize(&f).unwrap();
        for x in pts() {
            for k in 0..5 {
                let r = restrict(&n, &x.prefix(k)).unwrap();
                assert_eq!(node_eval(&r, &x.shift(k)).unwrap(), f.eval(&x));
            }
        }
    }
}
