//! Finite-depth derivation oracle.
//!
//! Works directly on the expression tree, independently of the normal form.
//! On a cylinder where every Glue has been resolved and no stack remains, a
//! stack-free function is constant apart from finitely many exception points.
//! Generic points always have a removable neighbourhood, and an exception
//! survives the first stage exactly when no set of the cover contains both its
//! value and the generic value; survivors are isolated and go at stage 2.
//! Cylinders that stay unresolved at the depth limit are counted as removed at
//! stage 1, so inexact results are lower bounds.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::funcalc::{canon_expr, word_to_string, FuncExpr, Point, Word};
use crate::ordinal::Ordinal;
use crate::rational::Rational;

use super::engine::{Coloring, Region};

/// Largest depth the oracle accepts.
pub const MAX_DEPTH: usize = 14;

/// Default oracle depth for an expression.
pub fn default_depth(f: &FuncExpr) -> usize {
    (f.depth() + 4).min(MAX_DEPTH)
}

/// A function restricted to a cylinder: a generic value plus exceptions at relative points.
#[derive(Clone, Debug)]
pub struct View {
    pub generic: Rational,
    pub exceptions: BTreeMap<Point, Rational>,
}

impl View {
    pub fn at(&self, x: &Point) -> Rational {
        self.exceptions.get(x).cloned().unwrap_or_else(|| self.generic.clone())
    }

    fn combine(self, other: View, op: impl Fn(&Rational, &Rational) -> Rational) -> View {
        let keys: BTreeSet<Point> = self.exceptions.keys().chain(other.exceptions.keys()).cloned().collect();
        let exceptions = keys.into_iter().map(|x| {
            let v = op(&self.at(&x), &other.at(&x));
            (x, v)
        });
        View { generic: op(&self.generic, &other.generic), exceptions: exceptions.collect() }
    }
}

/// The view of `f` on `[sigma]`, or `None` when `f` is not of that shape there.
pub fn view(f: &FuncExpr, sigma: &[bool]) -> Option<View> {
    match f {
        FuncExpr::Const(v) => Some(View { generic: v.clone(), exceptions: BTreeMap::new() }),
        FuncExpr::Affine(a, b, g) => {
            let v = view(g, sigma)?;
            Some(View {
                generic: a * &v.generic + b,
                exceptions: v.exceptions.into_iter().map(|(x, y)| (x, a * &y + b)).collect(),
            })
        }
        FuncExpr::Glue(f0, f1) => {
            let (&b, rest) = sigma.split_first()?;
            view(if b { f1 } else { f0 }, rest)
        }
        FuncExpr::Spike(g, z, v) => {
            let mut out = view(g, sigma)?;
            if z.has_prefix(sigma) {
                out.exceptions.insert(z.shift(sigma.len()), v.clone());
            }
            Some(out)
        }
        FuncExpr::Stack(seq, _) => {
            let k = sigma.iter().take_while(|&&b| b).count();
            if k == sigma.len() {
                return None;
            }
            view(&FuncExpr::stack_copy(seq, k as u64), &sigma[k + 1..])
        }
        FuncExpr::Sum(f, g) => Some(view(f, sigma)?.combine(view(g, sigma)?, |a, b| a + b)),
        FuncExpr::Prod(f, g) => Some(view(f, sigma)?.combine(view(g, sigma)?, |a, b| a * b)),
        FuncExpr::Canon(o, s) => view(&canon_expr(o, *s).ok()?, sigma),
    }
}

fn max_spike_word(f: &FuncExpr) -> usize {
    match f {
        FuncExpr::Const(_) | FuncExpr::Stack(..) => 0,
        FuncExpr::Affine(_, _, g) => max_spike_word(g),
        FuncExpr::Spike(g, z, _) => max_spike_word(g).max(z.word().len()),
        FuncExpr::Glue(a, b) | FuncExpr::Sum(a, b) | FuncExpr::Prod(a, b) => max_spike_word(a).max(max_spike_word(b)),
        FuncExpr::Canon(o, s) => canon_expr(o, *s).map_or(0, |e| if f.is_stack_free() { max_spike_word(&e) } else { 0 }),
    }
}

/// Resolved cylinders of a tuple of functions, split adaptively down to `depth`.
pub struct Sweep {
    /// `(cylinder, one view per function)`.
    pub cells: Vec<(Word, Vec<View>)>,
    /// Cylinders still unresolved at the depth limit.
    pub blobs: Vec<Word>,
}

pub fn sweep(fs: &[&FuncExpr], depth: usize) -> Sweep {
    let mut out = Sweep { cells: Vec::new(), blobs: Vec::new() };
    let mut stack = vec![Vec::new()];
    while let Some(sigma) = stack.pop() {
        let views: Option<Vec<View>> = fs.iter().map(|f| view(f, &sigma)).collect();
        match views {
            Some(v) => out.cells.push((sigma, v)),
            None if sigma.len() >= depth => out.blobs.push(sigma),
            None => {
                let mut one = sigma.clone();
                one.push(true);
                let mut zero = sigma;
                zero.push(false);
                stack.push(one);
                stack.push(zero);
            }
        }
    }
    out.cells.sort_by(|a, b| a.0.cmp(&b.0));
    out.blobs.sort();
    out
}

/// A finite union of cylinders together with finitely many isolated points.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Residue {
    #[serde(serialize_with = "ser_words")]
    pub cylinders: Vec<Word>,
    pub points: Vec<Point>,
}

fn ser_words<S: serde::Serializer>(ws: &[Word], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ws.iter().map(|w| word_to_string(w)))
}

impl Residue {
    pub fn everything() -> Self {
        Residue { cylinders: vec![Vec::new()], points: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty() && self.points.is_empty()
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.cylinders.iter().any(|c| x.has_prefix(c)) || self.points.contains(x)
    }

    pub fn covers_cylinder(&self, sigma: &[bool]) -> bool {
        self.cylinders.iter().any(|c| sigma.starts_with(c))
    }

    pub fn is_subset_of_union(&self, a: &Residue, b: &Residue) -> Option<String> {
        for c in &self.cylinders {
            if !a.covers_cylinder(c) && !b.covers_cylinder(c) {
                return Some(format!("cylinder [{}]", word_to_string(c)));
            }
        }
        for x in &self.points {
            if !a.contains(x) && !b.contains(x) {
                return Some(format!("point {x}"));
            }
        }
        None
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueApprox {
    pub depth: usize,
    /// Stage 0 first; the final entry is the first empty stage.
    pub stages: Vec<Residue>,
    pub exact: bool,
}

impl ResidueApprox {
    /// Number of nonempty stages.
    pub fn length(&self) -> usize {
        self.stages.iter().take_while(|r| !r.is_empty()).count()
    }

    /// One JSON object per stage.
    pub fn to_json_lines(&self) -> String {
        self.stages
            .iter()
            .enumerate()
            .map(|(i, r)| serde_json::json!({"stage": i, "cylinders": r.cylinders.iter().map(|w| word_to_string(w)).collect::<Vec<_>>(), "points": r.points.iter().map(Point::to_string).collect::<Vec<_>>()}).to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Derivation for the cover given by `mask`: bit `k` of `mask(values)` says the tuple lies in set `k`.
pub fn derive_cover(fs: &[&FuncExpr], mask: &dyn Fn(&[Rational]) -> u32, depth: usize) -> ResidueApprox {
    let sw = sweep(fs, depth);
    let mut survivors = Vec::new();
    for (sigma, views) in &sw.cells {
        let generic: Vec<Rational> = views.iter().map(|v| v.generic.clone()).collect();
        let gm = mask(&generic);
        let points: BTreeSet<&Point> = views.iter().flat_map(|v| v.exceptions.keys()).collect();
        for x in points {
            let vals: Vec<Rational> = views.iter().map(|v| v.at(x)).collect();
            if mask(&vals) & gm == 0 {
                survivors.push(x.prepend(sigma));
            }
        }
    }
    survivors.sort();
    let spikes = fs.iter().map(|f| max_spike_word(f)).max().unwrap_or(0);
    let exact = sw.blobs.is_empty() && fs.iter().all(|f| f.is_stack_free()) && spikes < depth;
    let mut stages = vec![Residue::everything()];
    if !survivors.is_empty() {
        stages.push(Residue { cylinders: Vec::new(), points: survivors });
    }
    stages.push(Residue::default());
    ResidueApprox { depth, stages, exact }
}

/// Bits: 0 for `f^-1((-∞, p+ε))`, 1 for `f^-1((p-ε, ∞))`.
pub fn pair_mask(c: &Coloring) -> impl Fn(&Rational) -> u32 + '_ {
    move |v| u32::from(*v < c.hi) | (u32::from(*v > c.lo) << 1)
}

pub fn brute_derive(f: &FuncExpr, c: &Coloring, depth: usize) -> ResidueApprox {
    let m = pair_mask(c);
    derive_cover(&[f], &|vs| m(&vs[0]), depth.max(1))
}

pub fn brute_alpha(f: &FuncExpr, c: &Coloring, depth: usize) -> (Ordinal, bool) {
    let r = brute_derive(f, c, depth);
    (Ordinal::nat(r.length() as u64), r.exact)
}

/// Attained values, when every cylinder resolves.
pub fn exact_range(f: &FuncExpr, depth: usize) -> Option<BTreeSet<Rational>> {
    let sw = sweep(&[f], depth);
    if !sw.blobs.is_empty() {
        return None;
    }
    let mut out = BTreeSet::new();
    for (_, v) in &sw.cells {
        out.insert(v[0].generic.clone());
        out.extend(v[0].exceptions.values().cloned());
    }
    Some(out)
}

/// Regions met by each nonempty stage.
pub fn stage_regions(f: &FuncExpr, c: &Coloring, r: &ResidueApprox) -> Option<Vec<BTreeSet<Region>>> {
    let all = exact_range(f, r.depth)?;
    Some(
        r.stages
            .iter()
            .take_while(|s| !s.is_empty())
            .map(|s| {
                if s.cylinders.is_empty() {
                    s.points.iter().map(|x| c.region(&f.eval(x))).collect()
                } else {
                    all.iter().map(|v| c.region(v)).collect()
                }
            })
            .collect(),
    )
}

/// Result of checking `Q^(ν#μ) ⊆ P^ν ∪ R^μ` for all finite stages.
#[derive(Clone, Debug, Serialize)]
pub struct L1Report {
    pub holds: bool,
    pub exact: bool,
    pub counterexample: Option<String>,
}

/// Compares the derivation of the intersection cover with those of the two covers.
pub fn check_l1(f: &FuncExpr, cf: &Coloring, g: &FuncExpr, cg: &Coloring, depth: usize) -> L1Report {
    let mf = pair_mask(cf);
    let mg = pair_mask(cg);
    let p = derive_cover(&[f], &|v| mf(&v[0]), depth);
    let r = derive_cover(&[g], &|v| mg(&v[0]), depth);
    let joint = |v: &[Rational]| {
        let (a, b) = (mf(&v[0]), mg(&v[1]));
        let mut m = 0;
        for i in 0..2 {
            for j in 0..2 {
                if a & (1 << i) != 0 && b & (1 << j) != 0 {
                    m |= 1 << (2 * i + j);
                }
            }
        }
        m
    };
    let q = derive_cover(&[f, g], &joint, depth);
    let exact = p.exact && r.exact && q.exact;
    let empty = Residue::default();
    let stage = |a: &ResidueApprox, k: usize| a.stages.get(k).cloned().unwrap_or_else(|| empty.clone());
    for nu in 0..p.stages.len() {
        for mu in 0..r.stages.len() {
            let qs = stage(&q, nu + mu);
            if let Some(bad) = qs.is_subset_of_union(&stage(&p, nu), &stage(&r, mu)) {
                return L1Report { holds: false, exact, counterexample: Some(format!("stage {nu}#{mu}: {bad}")) };
            }
        }
    }
    L1Report { holds: true, exact, counterexample: None }
}

/// Direct continuity check for stack-free functions: no exception differs from its generic value.
pub fn continuous_by_views(f: &FuncExpr, depth: usize) -> Option<bool> {
    let sw = sweep(&[f], depth);
    if !sw.blobs.is_empty() {
        return None;
    }
    Some(sw.cells.iter().all(|(_, v)| v[0].exceptions.values().all(|x| *x == v[0].generic)))
}

/// Semicontinuity on stack-free functions: every exception lies below (lower) or above the generic value.
pub fn semicontinuous_by_views(f: &FuncExpr, depth: usize, lower: bool) -> Option<bool> {
    let sw = sweep(&[f], depth);
    if !sw.blobs.is_empty() {
        return None;
    }
    Some(sw.cells.iter().all(|(_, v)| {
        v[0].exceptions.values().all(|x| if lower { *x <= v[0].generic } else { *x >= v[0].generic })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalc::{one_sided_example, Sidedness};

    fn half() -> Coloring {
        Coloring::new(&Rational::new(1, 2), &Rational::new(1, 4)).unwrap()
    }

    #[test]
    fn constant_dies_at_stage_one() {
        let r = brute_derive(&FuncExpr::constant(0), &half(), 3);
        assert_eq!(r.stages, vec![Residue::everything(), Residue::default()]);
        assert!(r.exact);
    }

    #[test]
    fn left_witness_keeps_its_spike() {
        let f = FuncExpr::canon(Ordinal::nat(2), Sidedness::Left).unwrap();
        let r = brute_derive(&f, &half(), 6);
        assert_eq!(r.length(), 2);
        assert!(r.exact);
        assert_eq!(r.stages[1].points, vec![Point::constant(false)]);
    }

    #[test]
    fn stacks_are_inexact() {
        let f = FuncExpr::canon(Ordinal::omega(), Sidedness::LimitClass).unwrap();
        let c = Coloring::new(&Rational::new(1, 2), &Rational::new(1, 4)).unwrap();
        let (a, exact) = brute_alpha(&f, &c, 8);
        assert!(!exact);
        assert!(a >= Ordinal::one());
    }

    #[test]
    fn sums_stay_below_three() {
        let f = FuncExpr::sum(
            FuncExpr::canon(Ordinal::nat(2), Sidedness::Left).unwrap(),
            FuncExpr::canon(Ordinal::nat(2), Sidedness::Right).unwrap(),
        );
        let vals: Vec<Rational> = exact_range(&f, 8).unwrap().into_iter().collect();
        assert_eq!(vals, vec![Rational::one()]);
        let g = FuncExpr::sum(FuncExpr::canon(Ordinal::nat(2), Sidedness::Left).unwrap(), one_sided_example());
        for (p, e) in crate::funcalc::pairs_for_values(&exact_range(&g, 8).unwrap().into_iter().collect::<Vec<_>>()) {
            let (a, exact) = brute_alpha(&g, &Coloring::new(&p, &e).unwrap(), 8);
            assert!(exact && a <= Ordinal::nat(3));
        }
    }

    #[test]
    fn lemma_inclusions_on_small_cases() {
        let z = FuncExpr::constant(0);
        assert!(check_l1(&z, &half(), &z, &half(), 4).holds);
        let l = FuncExpr::canon(Ordinal::nat(2), Sidedness::Left).unwrap();
        let r = FuncExpr::canon(Ordinal::nat(2), Sidedness::Right).unwrap();
        let rep = check_l1(&l, &half(), &r, &half(), 8);
        assert!(rep.holds && rep.exact, "{rep:?}");
    }
}
