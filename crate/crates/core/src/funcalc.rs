//! Finitely presented Baire-1 functions `2^ω → Q`.
//!
//! Inputs that can be represented exactly are eventually constant points
//! `word⌢tail^ω`. Functions are built from constants, affine maps, gluing
//! along the first bit, single-point overrides, and stacks of copies that
//! accumulate at `1^ω`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::ordinal::Ordinal;
use crate::rational::Rational;

/// A finite bit string.
pub type Word = Vec<bool>;

pub fn word_to_string(w: &[bool]) -> String {
    w.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_word(s: &str) -> Result<Word> {
    s.chars()
        .enumerate()
        .map(|(i, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Parse(ParseError::at(s, i, "expected a bit", &["0", "1"]))),
        })
        .collect()
}

/// An eventually constant point `word⌢tail^ω`, kept canonical: the word never ends in `tail`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    word: Word,
    tail: bool,
}

impl Point {
    pub fn new(mut word: Word, tail: bool) -> Self {
        while word.last() == Some(&tail) {
            word.pop();
        }
        Point { word, tail }
    }

    /// `b^ω`.
    pub fn constant(b: bool) -> Self {
        Point { word: Vec::new(), tail: b }
    }

    pub fn word(&self) -> &[bool] {
        &self.word
    }

    pub fn tail(&self) -> bool {
        self.tail
    }

    pub fn bit(&self, i: usize) -> bool {
        self.word.get(i).copied().unwrap_or(self.tail)
    }

    pub fn first(&self) -> bool {
        self.bit(0)
    }

    /// The point with its first bit removed.
    pub fn rest(&self) -> Point {
        self.shift(1)
    }

    pub fn shift(&self, n: usize) -> Point {
        Point { word: self.word.iter().skip(n).copied().collect(), tail: self.tail }
    }

    pub fn prefix(&self, n: usize) -> Word {
        (0..n).map(|i| self.bit(i)).collect()
    }

    pub fn prepend(&self, bits: &[bool]) -> Point {
        let mut word = bits.to_vec();
        word.extend_from_slice(&self.word);
        Point::new(word, self.tail)
    }

    pub fn has_prefix(&self, sigma: &[bool]) -> bool {
        sigma.iter().enumerate().all(|(i, &b)| self.bit(i) == b)
    }

    /// Number of leading bits equal to `b`; `None` when the point is `b^ω`.
    pub fn leading_run(&self, b: bool) -> Option<usize> {
        let n = self.word.iter().take_while(|&&x| x == b).count();
        if n == self.word.len() && self.tail == b {
            None
        } else {
            Some(n)
        }
    }

    pub fn parse(text: &str) -> Result<Point> {
        let t = text.trim();
        let Some((w, tail)) = t.split_once('~') else {
            return Err(Error::Parse(ParseError::at(text, t.len(), "point needs `~`", &["~"])));
        };
        let word = parse_word(w)?;
        let tail = match tail {
            "0" => false,
            "1" => true,
            _ => return Err(Error::Parse(ParseError::at(text, w.len() + 1, "tail must be one bit", &["0", "1"]))),
        };
        Ok(Point::new(word, tail))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}~{}", word_to_string(&self.word), u8::from(self.tail))
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Point::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    #[serde(rename = "two")]
    Two,
    Left,
    Right,
    #[serde(rename = "one")]
    OneNeither,
    #[serde(rename = "limit")]
    LimitClass,
    #[serde(rename = "cont")]
    ContinuousClass,
}

impl Sidedness {
    pub const ALL: [Sidedness; 6] = [
        Sidedness::Two,
        Sidedness::Left,
        Sidedness::Right,
        Sidedness::OneNeither,
        Sidedness::LimitClass,
        Sidedness::ContinuousClass,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Sidedness::Two => "two",
            Sidedness::Left => "left",
            Sidedness::Right => "right",
            Sidedness::OneNeither => "one",
            Sidedness::LimitClass => "limit",
            Sidedness::ContinuousClass => "cont",
        }
    }

    pub fn parse(s: &str) -> Option<Sidedness> {
        Sidedness::ALL.into_iter().find(|x| x.name() == s.trim())
    }

    /// Whether `canon(o, self)` is defined.
    pub fn compatible(self, o: &Ordinal) -> bool {
        match self {
            Sidedness::ContinuousClass => *o == Ordinal::one(),
            Sidedness::LimitClass => o.is_limit(),
            _ => o.is_successor() && *o >= Ordinal::nat(2),
        }
    }

    /// The sidedness of `-f` given that of `f`.
    pub fn negated(self) -> Sidedness {
        match self {
            Sidedness::Left => Sidedness::Right,
            Sidedness::Right => Sidedness::Left,
            s => s,
        }
    }
}

impl fmt::Display for Sidedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StackSeq {
    /// Copy `n` is `items[n mod len]`.
    Cycle(Vec<FuncExpr>),
    /// Copy `n` is `canon(fund_seq(ord, n) + 1, side)`, scaled by `2^-n` when `shrink` is set.
    Fund { ord: Ordinal, side: Sidedness, shrink: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FuncExpr {
    Const(Rational),
    Affine(Rational, Rational, Box<FuncExpr>),
    Glue(Box<FuncExpr>, Box<FuncExpr>),
    Spike(Box<FuncExpr>, Point, Rational),
    Stack(StackSeq, Rational),
    Sum(Box<FuncExpr>, Box<FuncExpr>),
    Prod(Box<FuncExpr>, Box<FuncExpr>),
    Canon(Ordinal, Sidedness),
}

/// The ordinal of copy `n` in a fundamental-sequence stack over `o`.
pub fn fund_copy_rank(o: &Ordinal, n: u64) -> Result<Ordinal> {
    Ok(o.fund_seq(n)?.succ())
}

impl FuncExpr {
    pub fn constant(v: impl Into<Rational>) -> Self {
        FuncExpr::Const(v.into())
    }

    pub fn affine(a: Rational, b: Rational, f: FuncExpr) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::Semantic("affine slope must be nonzero".into()));
        }
        Ok(FuncExpr::Affine(a, b, Box::new(f)))
    }

    pub fn neg(f: FuncExpr) -> Self {
        FuncExpr::Affine(Rational::int(-1), Rational::zero(), Box::new(f))
    }

    pub fn glue(f0: FuncExpr, f1: FuncExpr) -> Self {
        FuncExpr::Glue(Box::new(f0), Box::new(f1))
    }

    pub fn spike(f: FuncExpr, z: Point, v: impl Into<Rational>) -> Self {
        FuncExpr::Spike(Box::new(f), z, v.into())
    }

    pub fn cycle(items: Vec<FuncExpr>, v: impl Into<Rational>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Semantic("cycle needs at least one item".into()));
        }
        Ok(FuncExpr::Stack(StackSeq::Cycle(items), v.into()))
    }

    pub fn fund(ord: Ordinal, side: Sidedness, shrink: bool, v: impl Into<Rational>) -> Result<Self> {
        if !ord.is_limit() {
            return Err(Error::Semantic(format!("fund stack needs a limit ordinal, got {ord}")));
        }
        if !matches!(side, Sidedness::Two | Sidedness::Left | Sidedness::Right | Sidedness::OneNeither) {
            return Err(Error::Semantic(format!("fund stack copies cannot have side {side}")));
        }
        Ok(FuncExpr::Stack(StackSeq::Fund { ord, side, shrink }, v.into()))
    }

    pub fn sum(f: FuncExpr, g: FuncExpr) -> Self {
        FuncExpr::Sum(Box::new(f), Box::new(g))
    }

    pub fn prod(f: FuncExpr, g: FuncExpr) -> Self {
        FuncExpr::Prod(Box::new(f), Box::new(g))
    }

    pub fn canon(o: Ordinal, side: Sidedness) -> Result<Self> {
        if !side.compatible(&o) {
            return Err(Error::Precondition(format!("no canonical function of rank {o} with side {side}")));
        }
        Ok(FuncExpr::Canon(o, side))
    }

    /// Checks the structural invariants of a hand-built tree.
    pub fn validate(&self) -> Result<()> {
        match self {
            FuncExpr::Const(_) => Ok(()),
            FuncExpr::Affine(a, _, f) => {
                if a.is_zero() {
                    return Err(Error::Semantic("affine slope must be nonzero".into()));
                }
                f.validate()
            }
            FuncExpr::Glue(a, b) | FuncExpr::Sum(a, b) | FuncExpr::Prod(a, b) => {
                a.validate()?;
                b.validate()
            }
            FuncExpr::Spike(f, _, _) => f.validate(),
            FuncExpr::Stack(StackSeq::Cycle(items), _) => {
                if items.is_empty() {
                    return Err(Error::Semantic("cycle needs at least one item".into()));
                }
                items.iter().try_for_each(FuncExpr::validate)
            }
            FuncExpr::Stack(StackSeq::Fund { ord, side, shrink }, v) => {
                FuncExpr::fund(ord.clone(), *side, *shrink, v.clone()).map(|_| ())
            }
            FuncExpr::Canon(o, s) => FuncExpr::canon(o.clone(), *s).map(|_| ()),
        }
    }

    /// Copy `n` of a stack sequence.
    pub fn stack_copy(seq: &StackSeq, n: u64) -> FuncExpr {
        match seq {
            StackSeq::Cycle(items) => items[(n % items.len() as u64) as usize].clone(),
            StackSeq::Fund { ord, side, shrink } => {
                let c = FuncExpr::Canon(fund_copy_rank(ord, n).expect("limit checked at construction"), *side);
                if *shrink {
                    FuncExpr::Affine(Rational::pow2_neg(n), Rational::zero(), Box::new(c))
                } else {
                    c
                }
            }
        }
    }

    /// Value at an eventually constant point.
    pub fn eval(&self, x: &Point) -> Rational {
        match self {
            FuncExpr::Const(v) => v.clone(),
            FuncExpr::Affine(a, b, f) => a * &f.eval(x) + b,
            FuncExpr::Glue(f0, f1) => {
                if x.first() { f1.eval(&x.rest()) } else { f0.eval(&x.rest()) }
            }
            FuncExpr::Spike(f, z, v) => {
                if x == z { v.clone() } else { f.eval(x) }
            }
            FuncExpr::Stack(seq, v) => match x.leading_run(true) {
                None => v.clone(),
                Some(n) => FuncExpr::stack_copy(seq, n as u64).eval(&x.shift(n + 1)),
            },
            FuncExpr::Sum(f, g) => f.eval(x) + g.eval(x),
            FuncExpr::Prod(f, g) => f.eval(x) * g.eval(x),
            FuncExpr::Canon(o, s) => canon_expr(o, *s).expect("validated").eval(x),
        }
    }

    /// Exact range for expressions without sums or products; see [`RangeSet`].
    pub fn range_of(&self) -> RangeSet {
        match self {
            FuncExpr::Const(v) => RangeSet::single(v.clone()),
            FuncExpr::Affine(a, b, f) => f.range_of().map_affine(a, b),
            FuncExpr::Glue(f0, f1) => f0.range_of().union(f1.range_of()),
            FuncExpr::Spike(f, z, v) => {
                let mut r = f.range_without(z);
                r.values.insert(v.clone());
                r
            }
            FuncExpr::Stack(StackSeq::Cycle(items), v) => {
                let mut r = RangeSet::single(v.clone());
                for it in items {
                    r = r.union(it.range_of());
                }
                r
            }
            FuncExpr::Stack(StackSeq::Fund { side, shrink, .. }, v) => {
                let base = canon_values(*side);
                let mut r = RangeSet::single(v.clone());
                if *shrink {
                    for c in base {
                        if c.is_zero() {
                            r.values.insert(c);
                        } else {
                            r.families.insert(Family { base: Rational::zero(), coeff: c });
                        }
                    }
                } else {
                    r.values.extend(base);
                }
                r
            }
            FuncExpr::Sum(f, g) | FuncExpr::Prod(f, g) => {
                let (rf, rg) = (f.range_of(), g.range_of());
                let is_sum = matches!(self, FuncExpr::Sum(..));
                let mut values = BTreeSet::new();
                for a in &rf.values {
                    for b in &rg.values {
                        values.insert(if is_sum { a + b } else { a * b });
                    }
                }
                RangeSet { values, families: BTreeSet::new(), exact: false }
            }
            FuncExpr::Canon(o, s) => match s {
                Sidedness::ContinuousClass => canon_expr(o, *s).expect("validated").range_of(),
                Sidedness::LimitClass => RangeSet {
                    values: [Rational::zero()].into(),
                    families: [Family { base: Rational::zero(), coeff: Rational::one() }].into(),
                    exact: true,
                },
                s => RangeSet { values: canon_values(*s).into_iter().collect(), families: BTreeSet::new(), exact: true },
            },
        }
    }

    /// Range of the function with the point `z` removed from the domain.
    ///
    /// Only spike points and stack limits can carry a value attained nowhere else.
    fn range_without(&self, z: &Point) -> RangeSet {
        match self {
            FuncExpr::Spike(f, w, _) if w == z => f.range_without(z),
            FuncExpr::Spike(f, _, v) => {
                let mut r = f.range_without(z);
                r.values.insert(v.clone());
                r
            }
            FuncExpr::Affine(a, b, f) => f.range_without(z).map_affine(a, b),
            FuncExpr::Glue(f0, f1) => {
                if z.first() {
                    f0.range_of().union(f1.range_without(&z.rest()))
                } else {
                    f0.range_without(&z.rest()).union(f1.range_of())
                }
            }
            FuncExpr::Stack(StackSeq::Cycle(items), _) if z.leading_run(true).is_none() => items
                .iter()
                .map(FuncExpr::range_of)
                .reduce(RangeSet::union)
                .expect("nonempty cycle"),
            FuncExpr::Canon(o, s) if !matches!(s, Sidedness::LimitClass) => {
                canon_expr(o, *s).expect("validated").range_without(z)
            }
            other => other.range_of(),
        }
    }

    /// Structural depth used to size the brute-force oracle.
    pub fn depth(&self) -> usize {
        match self {
            FuncExpr::Const(_) => 0,
            FuncExpr::Affine(_, _, f) => f.depth(),
            FuncExpr::Glue(a, b) => 1 + a.depth().max(b.depth()),
            FuncExpr::Sum(a, b) | FuncExpr::Prod(a, b) => a.depth().max(b.depth()),
            FuncExpr::Spike(f, z, _) => f.depth().max(z.word().len() + 1),
            FuncExpr::Stack(StackSeq::Cycle(items), _) => 1 + items.iter().map(FuncExpr::depth).max().unwrap_or(0),
            FuncExpr::Stack(StackSeq::Fund { .. }, _) => 2,
            FuncExpr::Canon(o, s) => match canon_expr(o, *s) {
                Ok(e) if o.as_nat().is_some_and(|n| n <= 2) => e.depth(),
                _ => 2,
            },
        }
    }

    /// No stacks anywhere, including inside canonical functions.
    pub fn is_stack_free(&self) -> bool {
        match self {
            FuncExpr::Const(_) => true,
            FuncExpr::Affine(_, _, f) | FuncExpr::Spike(f, _, _) => f.is_stack_free(),
            FuncExpr::Glue(a, b) | FuncExpr::Sum(a, b) | FuncExpr::Prod(a, b) => a.is_stack_free() && b.is_stack_free(),
            FuncExpr::Stack(..) => false,
            FuncExpr::Canon(o, s) => o.as_nat().is_some_and(|n| n <= 2) && canon_expr(o, *s).is_ok_and(|e| e.is_stack_free()),
        }
    }

    pub fn has_sum_or_prod(&self) -> bool {
        match self {
            FuncExpr::Sum(..) | FuncExpr::Prod(..) => true,
            FuncExpr::Const(_) | FuncExpr::Canon(..) => false,
            FuncExpr::Affine(_, _, f) | FuncExpr::Spike(f, _, _) => f.has_sum_or_prod(),
            FuncExpr::Glue(a, b) => a.has_sum_or_prod() || b.has_sum_or_prod(),
            FuncExpr::Stack(StackSeq::Cycle(items), _) => items.iter().any(FuncExpr::has_sum_or_prod),
            FuncExpr::Stack(..) => false,
        }
    }

    /// Replaces the stack's sequence by its first `n` copies followed by the constant `filler`.
    pub fn truncate_stack(seq: &StackSeq, n: usize, filler: Rational) -> FuncExpr {
        let mut f = FuncExpr::Const(filler);
        for k in (0..n).rev() {
            f = FuncExpr::glue(FuncExpr::stack_copy(seq, k as u64), f);
        }
        f
    }
}

/// An infinite family `{base + coeff·2^-n : n ≥ 0}` accumulating at `base`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Family {
    pub base: Rational,
    pub coeff: Rational,
}

impl Family {
    pub fn member(&self, n: u64) -> Rational {
        &self.base + &(&self.coeff * &Rational::pow2_neg(n))
    }
}

/// The set of values of a function: finitely many values plus accumulating families.
///
/// `exact` is false when the set is an over-approximation (sums and products).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeSet {
    pub values: BTreeSet<Rational>,
    pub families: BTreeSet<Family>,
    pub exact: bool,
}

impl RangeSet {
    pub fn single(v: Rational) -> Self {
        RangeSet { values: [v].into(), families: BTreeSet::new(), exact: true }
    }

    pub fn is_finite(&self) -> bool {
        self.families.is_empty()
    }

    pub fn union(mut self, other: RangeSet) -> RangeSet {
        self.values.extend(other.values);
        self.families.extend(other.families);
        self.exact &= other.exact;
        self
    }

    pub fn map_affine(self, a: &Rational, b: &Rational) -> RangeSet {
        RangeSet {
            values: self.values.iter().map(|v| a * v + b).collect(),
            families: self
                .families
                .iter()
                .map(|f| Family { base: a * &f.base + b, coeff: a * &f.coeff })
                .collect(),
            exact: self.exact,
        }
    }

    /// Finite values plus the first `k` members and the base of every family.
    pub fn truncated(&self, k: u64) -> BTreeSet<Rational> {
        let mut out = self.values.clone();
        for f in &self.families {
            out.insert(f.base.clone());
            out.extend((0..k).map(|n| f.member(n)));
        }
        out
    }
}

/// Family members used when choosing representative pairs for infinite ranges.
pub const FAMILY_RESOLUTION: u64 = 4;

fn canon_values(side: Sidedness) -> Vec<Rational> {
    match side {
        Sidedness::OneNeither => vec![Rational::int(-1), Rational::zero(), Rational::one()],
        _ => vec![Rational::zero(), Rational::one()],
    }
}

/// One representative `(p, ε)` per colouring of the sorted range into a lower block,
/// a middle band, and an upper block, with both outer blocks nonempty.
pub fn critical_pairs(f: &FuncExpr) -> Vec<(Rational, Rational)> {
    pairs_for_values(&f.range_of().truncated(FAMILY_RESOLUTION).into_iter().collect::<Vec<_>>())
}

pub fn pairs_for_values(v: &[Rational]) -> Vec<(Rational, Rational)> {
    let m = v.len();
    let four = Rational::int(4);
    let mut out = Vec::new();
    for a in 1..m {
        let gap = &v[a] - &v[a - 1];
        out.push((v[a - 1].midpoint(&v[a]), &gap / &four));
    }
    for a in 1..m {
        for b in a + 1..m {
            let g = (&v[a] - &v[a - 1]).min(&v[b] - &v[b - 1]);
            let lo = &v[a] - &(&g / &four);
            let hi = &v[b - 1] + &(&g / &four);
            let p = lo.midpoint(&hi);
            let eps = (&hi - &lo) / Rational::int(2);
            out.push((p, eps));
        }
    }
    out
}

/// One level of the canonical family; children are left as `Canon` nodes.
pub fn canon_expr(o: &Ordinal, side: Sidedness) -> Result<FuncExpr> {
    if !side.compatible(o) {
        return Err(Error::Precondition(format!("no canonical function of rank {o} with side {side}")));
    }
    let c = |x: i64| FuncExpr::constant(x);
    Ok(match side {
        Sidedness::ContinuousClass => FuncExpr::glue(c(0), c(1)),
        Sidedness::LimitClass => FuncExpr::Stack(
            StackSeq::Fund { ord: o.clone(), side: Sidedness::Left, shrink: true },
            Rational::zero(),
        ),
        Sidedness::Left => left_canon(o),
        Sidedness::Right => flip01(&left_canon(o)),
        Sidedness::Two => FuncExpr::glue(FuncExpr::Canon(o.clone(), Sidedness::Left), FuncExpr::Canon(o.clone(), Sidedness::Right)),
        Sidedness::OneNeither => FuncExpr::glue(
            FuncExpr::Canon(o.clone(), Sidedness::Left),
            FuncExpr::Affine(Rational::one(), Rational::int(-1), Box::new(FuncExpr::Canon(o.clone(), Sidedness::Right))),
        ),
    })
}

fn left_canon(o: &Ordinal) -> FuncExpr {
    let below = o.pred().expect("successor");
    if below == Ordinal::one() {
        FuncExpr::spike(FuncExpr::constant(1), Point::constant(false), 0)
    } else if below.is_successor() {
        FuncExpr::Stack(StackSeq::Cycle(vec![FuncExpr::Canon(below, Sidedness::Right)]), Rational::zero())
    } else {
        FuncExpr::Stack(StackSeq::Fund { ord: below, side: Sidedness::Right, shrink: false }, Rational::zero())
    }
}

/// Structural `v ↦ 1 - v` on the shapes produced by `left_canon`.
fn flip01(f: &FuncExpr) -> FuncExpr {
    let flip = |v: &Rational| Rational::one() - v;
    match f {
        FuncExpr::Const(v) => FuncExpr::Const(flip(v)),
        FuncExpr::Spike(g, z, v) => FuncExpr::Spike(Box::new(flip01(g)), z.clone(), flip(v)),
        FuncExpr::Stack(StackSeq::Cycle(items), v) => {
            FuncExpr::Stack(StackSeq::Cycle(items.iter().map(flip01).collect()), flip(v))
        }
        FuncExpr::Stack(StackSeq::Fund { ord, side, shrink }, v) => FuncExpr::Stack(
            StackSeq::Fund { ord: ord.clone(), side: side.negated(), shrink: *shrink },
            flip(v),
        ),
        FuncExpr::Canon(o, s) => FuncExpr::Canon(o.clone(), s.negated()),
        other => FuncExpr::Affine(Rational::int(-1), Rational::one(), Box::new(other.clone())),
    }
}

impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuncExpr::Const(v) => write!(f, "const {v}"),
            FuncExpr::Affine(a, b, g) => write!(f, "affine({a}, {b}, {g})"),
            FuncExpr::Glue(a, b) => write!(f, "glue({a}, {b})"),
            FuncExpr::Spike(g, z, v) => write!(f, "spike({g}, {z}, {v})"),
            FuncExpr::Stack(StackSeq::Cycle(items), v) => {
                write!(f, "stack(cycle[")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{it}")?;
                }
                write!(f, "], {v})")
            }
            FuncExpr::Stack(StackSeq::Fund { ord, side, shrink }, v) => {
                write!(f, "stack(fund({ord}, {side}{}), {v})", if *shrink { ", shrink" } else { "" })
            }
            FuncExpr::Sum(a, b) => write!(f, "sum({a}, {b})"),
            FuncExpr::Prod(a, b) => write!(f, "prod({a}, {b})"),
            FuncExpr::Canon(o, s) => write!(f, "canon({o}, {s})"),
        }
    }
}

/// The one-sided example function that is neither left- nor right-sided.
pub fn one_sided_example() -> FuncExpr {
    FuncExpr::glue(
        FuncExpr::spike(FuncExpr::constant(1), Point::constant(true), 0),
        FuncExpr::spike(FuncExpr::constant(-1), Point::constant(false), 0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Point {
        Point::parse(s).unwrap()
    }

    fn o(s: &str) -> Ordinal {
        Ordinal::parse(s).unwrap()
    }

    #[test]
    fn points_are_canonical() {
        assert_eq!(Point::new(vec![false, true, true], true), p("0~1"));
        assert_eq!(p("0110~0").to_string(), "011~0");
        assert_eq!(p("~1").leading_run(true), None);
        assert_eq!(p("110~0").leading_run(true), Some(2));
        assert!(p("01~1").has_prefix(&[false, true, true, true]));
    }

    #[test]
    fn evaluation() {
        let f = one_sided_example();
        assert_eq!(f.eval(&p("01~1")), Rational::zero());
        assert_eq!(f.eval(&p("0~0")), Rational::one());
        assert_eq!(f.eval(&p("1~0")), Rational::zero());
        assert_eq!(f.eval(&p("10~1")), Rational::int(-1));
        let s = FuncExpr::cycle(vec![FuncExpr::constant(1)], 0).unwrap();
        assert_eq!(s.eval(&p("~1")), Rational::zero());
        assert_eq!(s.eval(&p("1110~1")), Rational::one());
        assert_eq!(FuncExpr::constant(3).eval(&p("0101~1")), Rational::int(3));
    }

    #[test]
    fn ranges() {
        assert_eq!(FuncExpr::constant(2).range_of().values, [Rational::int(2)].into());
        let r = one_sided_example().range_of();
        assert_eq!(r.values, [Rational::int(-1), Rational::zero(), Rational::one()].into());
        let a = FuncExpr::affine(Rational::int(2), Rational::int(1), FuncExpr::constant(3)).unwrap();
        assert_eq!(a.range_of().values, [Rational::int(7)].into());
        // A spike on a spike replaces the first override.
        let ss = FuncExpr::spike(FuncExpr::spike(FuncExpr::constant(1), p("~0"), 5), p("~0"), 0);
        assert_eq!(ss.range_of().values, [Rational::zero(), Rational::one()].into());
        assert!(!FuncExpr::canon(o("w"), Sidedness::LimitClass).unwrap().range_of().is_finite());
    }

    #[test]
    fn critical_pair_representatives() {
        assert!(critical_pairs(&FuncExpr::constant(0)).is_empty());
        let two = critical_pairs(&FuncExpr::canon(o("2"), Sidedness::Left).unwrap());
        assert_eq!(two, vec![(Rational::new(1, 2), Rational::new(1, 4))]);
        let three = critical_pairs(&one_sided_example());
        for want in [(Rational::new(-1, 2), Rational::new(1, 4)), (Rational::new(1, 2), Rational::new(1, 4)), (Rational::zero(), Rational::new(1, 4))] {
            assert!(three.contains(&want), "{want:?}");
        }
        assert_eq!(three.len(), 3);
    }

    #[test]
    fn canonical_literals() {
        assert_eq!(
            canon_expr(&o("2"), Sidedness::Left).unwrap(),
            FuncExpr::spike(FuncExpr::constant(1), p("~0"), 0)
        );
        assert_eq!(
            canon_expr(&o("2"), Sidedness::Right).unwrap(),
            FuncExpr::spike(FuncExpr::constant(0), p("~0"), 1)
        );
        assert_eq!(
            canon_expr(&o("1"), Sidedness::ContinuousClass).unwrap(),
            FuncExpr::glue(FuncExpr::constant(0), FuncExpr::constant(1))
        );
        assert!(FuncExpr::canon(o("w"), Sidedness::Left).is_err());
        assert!(FuncExpr::canon(o("3"), Sidedness::LimitClass).is_err());
        assert!(FuncExpr::canon(o("1"), Sidedness::Two).is_err());
    }

    #[test]
    fn truncation_layout_matches_stack() {
        let seq = StackSeq::Cycle(vec![FuncExpr::constant(1), FuncExpr::constant(2)]);
        let full = FuncExpr::Stack(seq.clone(), Rational::zero());
        let t = FuncExpr::truncate_stack(&seq, 3, Rational::int(9));
        for x in ["0~0", "10~1", "110~0", "1110~0", "~1"] {
            let x = p(x);
            let want = if x.leading_run(true).is_none_or(|n| n >= 3) { Rational::int(9) } else { full.eval(&x) };
            assert_eq!(t.eval(&x), want, "{x}");
        }
    }

    #[test]
    fn display_is_dsl_text() {
        let f = FuncExpr::fund(o("w^2"), Sidedness::Two, true, Rational::new(1, 2)).unwrap();
        assert_eq!(f.to_string(), "stack(fund(w^2, two, shrink), 1/2)");
        assert_eq!(one_sided_example().to_string(), "glue(spike(const 1, ~1, 0), spike(const -1, ~0, 0))");
    }
}
