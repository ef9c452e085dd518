//! Seeded verification suites shared by the acceptance tests and the `verify` command.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::corpus::{canon_corpus, full_corpus, rng, sample_points, stack_free_corpus};
use crate::degrees::{decide_m, decide_tt, decide_tt1, degree_diagram, m_clause, tt1_holds, tt_holds, Diagram, Facts};
use crate::derivation::brute::default_depth;
use crate::derivation::{alpha_rank, brute_alpha, check_l1, classify, derive_profile, semicontinuous, Coloring};
use crate::funcalc::{critical_pairs, one_sided_example, FuncExpr, Sidedness};
use crate::ordinal::Ordinal;
use crate::reduction::{synth, verify_reduction, Kind, Layout, DEFAULT_FUEL};

/// Outcome of one suite: how many cases ran and which failed.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Check {
        Check { name, cases: 0, failures: Vec::new() }
    }

    fn case(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn canon(o: &Ordinal, s: Sidedness) -> FuncExpr {
    FuncExpr::Canon(o.clone(), s)
}

fn node_of(d: &Diagram, f: &FuncExpr) -> Option<usize> {
    let text = f.to_string();
    d.nodes.iter().position(|n| n.members.contains(&text))
}

/// Checks that `fs` form degrees whose covering relation is exactly `expected` (indices into `fs`).
fn diagram_matches(c: &mut Check, fs: &[FuncExpr], expected: &[(usize, usize)], label: &str) {
    let d = match degree_diagram(fs) {
        Ok(d) => d,
        Err(e) => return c.case(false, || format!("{label}: {e}")),
    };
    let ids: Vec<Option<usize>> = fs.iter().map(|f| node_of(&d, f)).collect();
    let distinct = ids.iter().flatten().collect::<std::collections::BTreeSet<_>>().len();
    c.case(distinct == fs.len() && d.nodes.len() == fs.len(), || {
        format!("{label}: {} degrees for {} functions", d.nodes.len(), fs.len())
    });
    let mut want: Vec<(usize, usize)> = expected.iter().filter_map(|&(a, b)| Some((ids[a]?, ids[b]?))).collect();
    let mut got = d.edges.clone();
    want.sort();
    got.sort();
    c.case(want == got, || format!("{label}: edges {got:?}, expected {want:?}"));
}

/// The six-degree picture: constant < continuous < {lsc, usc} < one-sided < two-sided.
pub fn fig2_diagram() -> Check {
    let mut c = Check::new("many-one diagram at rank 2");
    let two = Ordinal::nat(2);
    let fs = [
        FuncExpr::constant(0),
        FuncExpr::glue(FuncExpr::constant(0), FuncExpr::constant(1)),
        canon(&two, Sidedness::Left),
        canon(&two, Sidedness::Right),
        one_sided_example(),
        canon(&two, Sidedness::Two),
    ];
    diagram_matches(&mut c, &fs, &[(0, 1), (1, 2), (1, 3), (2, 4), (3, 4), (4, 5)], "rank 2");
    c
}

/// The diamond left, right < one-sided < two-sided at every listed successor rank.
pub fn diamonds() -> Check {
    let mut c = Check::new("sidedness diamonds");
    let ranks = ["2", "3", "4", "5", "w+1", "w^2+1"];
    for r in ranks {
        let o = Ordinal::parse(r).expect("rank literal");
        let fs = [Sidedness::Left, Sidedness::Right, Sidedness::OneNeither, Sidedness::Two].map(|s| canon(&o, s));
        diagram_matches(&mut c, &fs, &[(0, 2), (1, 2), (2, 3)], r);
    }
    c
}

/// Symbolic ranks against brute-force stage counts at every representative pair.
pub fn oracle_agreement(seed: u64, n: usize, depth: usize) -> Check {
    let mut c = Check::new("symbolic vs brute derivation");
    for f in stack_free_corpus(seed, n, depth) {
        for (p, e) in critical_pairs(&f) {
            let sym = derive_profile(&f, &p, &e).map(|pr| pr.alpha);
            let (b, exact) = brute_alpha(&f, &Coloring::new(&p, &e).expect("positive ε"), default_depth(&f));
            c.case(exact && sym.as_ref() == Ok(&b), || format!("{f} at ({p}, {e}): symbolic {sym:?}, brute {b} exact={exact}"));
        }
    }
    c
}

fn facts_of(fs: &[FuncExpr]) -> Vec<(FuncExpr, Facts)> {
    fs.iter().filter_map(|f| Facts::of(f).ok().map(|x| (f.clone(), x))).collect()
}

/// Truth-table decisions against rank comparison, the coarsening, and ξ-levels.
pub fn tt_consistency(seed: u64) -> Check {
    let mut c = Check::new("truth-table decisions vs ranks");
    let items = facts_of(&full_corpus(seed, 60, 40));
    for (f, a) in &items {
        for (g, b) in &items {
            c.case(tt1_holds(a, b) == (a.rank <= b.rank), || format!("tt1 {f} vs {g}"));
            if a.continuous() || b.continuous() {
                continue;
            }
            let tt = tt_holds(a, b);
            c.case(tt == a.rank.coarse_le(&b.rank), || format!("tt vs coarse_le: {f} vs {g}"));
            let xi = a.rank.xi_level().expect("rank ≥ 1") <= b.rank.xi_level().expect("rank ≥ 1");
            c.case(tt == xi, || format!("tt vs xi levels: {f} vs {g}"));
        }
    }
    // The expression-level deciders agree with the fact-level rules.
    let mut r = rng(seed);
    for _ in 0..300 {
        let (f, a) = items.choose(&mut r).expect("nonempty corpus");
        let (g, b) = items.choose(&mut r).expect("nonempty corpus");
        c.case(decide_tt1(f, g).ok() == Some(tt1_holds(a, b)), || format!("decide_tt1 {f} vs {g}"));
        c.case(decide_tt(f, g).ok() == Some(tt_holds(a, b)), || format!("decide_tt {f} vs {g}"));
    }
    c
}

/// The functions reductions are synthesized between.
pub fn reduction_corpus(seed: u64) -> Vec<FuncExpr> {
    let mut out = vec![FuncExpr::constant(0), FuncExpr::constant(1), FuncExpr::glue(FuncExpr::constant(0), FuncExpr::constant(1))];
    for r in 2..=4 {
        for s in [Sidedness::Left, Sidedness::Right, Sidedness::OneNeither, Sidedness::Two] {
            out.push(canon(&Ordinal::nat(r), s));
        }
    }
    out.push(one_sided_example());
    out.extend(stack_free_corpus(seed, 14, 4).into_iter().skip(7));
    out
}

/// Runs synthesized reducers of one kind on `pairs` reducible pairs and `samples` inputs each.
pub fn executor(kind: Kind, seed: u64, pairs: usize, samples: usize) -> Check {
    let name = match kind {
        Kind::M => "m-reducers",
        Kind::Tt1 => "tt1-reducers",
        Kind::Tt => "tt-reducers",
    };
    let mut c = Check::new(name);
    let fs = reduction_corpus(seed);
    let mut all: Vec<(usize, usize)> = (0..fs.len()).flat_map(|i| (0..fs.len()).map(move |j| (i, j))).collect();
    all.shuffle(&mut rng(seed));
    let points = sample_points(seed, samples, 5);
    let mut used = 0;
    for (i, j) in all {
        if used == pairs {
            break;
        }
        let Ok(red) = synth(kind, &fs[i], &fs[j]) else { continue };
        used += 1;
        let rep = verify_reduction(&red, &points, DEFAULT_FUEL);
        c.cases += rep.runs;
        c.failures.extend(rep.violations);
        for (p, e) in critical_pairs(&fs[i]) {
            let Ok(plan) = red.plan(&p, &e) else {
                c.failures.push(format!("{} -> {}: no plan at ({p}, {e})", fs[i], fs[j]));
                continue;
            };
            let n = plan.components();
            let ok = match (kind, &plan.layout) {
                (Kind::Tt, Layout::Blocks { n: b, .. }) => n == 3 * *b as usize,
                (Kind::Tt, Layout::Padded { .. }) => n == 3,
                (Kind::Tt, Layout::Single { .. }) => false,
                (_, layout) => n == 1 && matches!(layout, Layout::Single { .. }),
            };
            if !ok {
                c.failures.push(format!("{} -> {}: {n} queries at ({p}, {e})", fs[i], fs[j]));
            }
        }
    }
    if used < pairs {
        c.failures.push(format!("only {used} reducible pairs available"));
    }
    c
}

/// `f ≤_m g` or `g ≤_m -f` on sampled corpus pairs.
pub fn dichotomy(seed: u64, samples: usize) -> Check {
    let mut c = Check::new("many-one dichotomy");
    let items: Vec<(FuncExpr, Facts, Facts)> = full_corpus(seed, 120, 40)
        .into_iter()
        .filter_map(|f| {
            let a = Facts::of(&f).ok()?;
            let n = Facts::of(&FuncExpr::neg(f.clone())).ok()?;
            Some((f, a, n))
        })
        .collect();
    let mut r = rng(seed);
    for k in 0..samples {
        let (f, a, neg_a) = items.choose(&mut r).expect("nonempty corpus");
        let (g, b, _) = items.choose(&mut r).expect("nonempty corpus");
        let holds = m_clause(a, b).holds() || m_clause(b, neg_a).holds();
        c.case(holds, || format!("neither {f} ≤m {g} nor {g} ≤m -({f})"));
        if k < 100 {
            let direct = decide_m(f, g).map(|x| x.0).unwrap_or(false) || decide_m(g, &FuncExpr::neg(f.clone())).map(|x| x.0).unwrap_or(false);
            c.case(direct == holds, || format!("decide_m disagrees with facts on {f}, {g}"));
        }
    }
    c
}

/// Joint derivation of two covers against the union of the separate derivations.
pub fn l1_inclusion(seed: u64, pairs: usize, depth: usize) -> Check {
    let mut c = Check::new("joint derivation inclusion");
    let fs = stack_free_corpus(seed, 2 * pairs, 5);
    let mut r = rng(seed);
    for k in 0..pairs {
        let (f, g) = (&fs[2 * k], &fs[2 * k + 1]);
        let pick = |h: &FuncExpr, r: &mut rand_chacha::ChaCha8Rng| {
            let ps = critical_pairs(h);
            let (p, e) = if ps.is_empty() {
                (h.eval(&crate::funcalc::Point::constant(false)), crate::rational::Rational::one())
            } else {
                ps[r.gen_range(0..ps.len())].clone()
            };
            Coloring::new(&p, &e).expect("positive ε")
        };
        let (cf, cg) = (pick(f, &mut r), pick(g, &mut r));
        let rep = check_l1(f, &cf, g, &cg, depth);
        c.case(rep.holds, || format!("{f} / {g}: {}", rep.counterexample.clone().unwrap_or_default()));
    }
    c
}

/// Largest brute-force stage count over representative pairs; `None` when a derivation is inexact.
pub fn brute_rank(f: &FuncExpr) -> Option<Ordinal> {
    let mut best = Ordinal::one();
    for (p, e) in critical_pairs(f) {
        let (a, exact) = brute_alpha(f, &Coloring::new(&p, &e).ok()?, default_depth(f));
        if !exact {
            return None;
        }
        best = best.max(a);
    }
    Some(best)
}

/// Ranks of sums and products stay within the coarsening of the larger rank.
pub fn sum_prod(seed: u64, pairs: usize) -> Check {
    let mut c = Check::new("sum and product ranks");
    let fs = stack_free_corpus(seed ^ 0x5u64, 2 * pairs, 4);
    for k in 0..pairs {
        let (f, g) = (&fs[2 * k], &fs[2 * k + 1]);
        let (Some(a), Some(b)) = (brute_rank(f), brute_rank(g)) else {
            c.case(false, || format!("inexact brute rank for {f} or {g}"));
            continue;
        };
        let max = a.max(b);
        for h in [FuncExpr::sum(f.clone(), g.clone()), FuncExpr::prod(f.clone(), g.clone())] {
            match brute_rank(&h) {
                Some(r) => c.case(r.coarse_le(&max), || format!("{h}: rank {r} not ≲ {max}")),
                None => c.case(false, || format!("{h}: inexact brute rank")),
            }
        }
    }
    c
}

fn random_ordinal(r: &mut impl Rng) -> Ordinal {
    let mut o = Ordinal::zero();
    if r.gen_bool(0.1) {
        o = Ordinal::omega_pow(Ordinal::omega()).mul_nat(r.gen_range(1..=2));
    }
    for e in (0..=3u64).rev() {
        if r.gen_bool(0.6) {
            o = o.add(&Ordinal::monomial(Ordinal::nat(e), r.gen_range(1..=4)));
        }
    }
    o
}

/// Largest `δ < b` when `b` is a successor, otherwise a few members of its fundamental sequence.
fn below(b: &Ordinal, k: u64) -> Vec<Ordinal> {
    if b.is_zero() {
        Vec::new()
    } else if b.is_successor() {
        vec![b.pred().expect("successor")]
    } else {
        (0..k).map(|n| b.fund_seq(n).expect("limit")).collect()
    }
}

/// The quantifier definition of `a ≲ b`, bounded: `γ` over a cofinal sample, `n ≤ 64`.
pub fn coarse_search(a: &Ordinal, b: &Ordinal) -> bool {
    below(a, 8).iter().all(|g| below(b, 8).iter().any(|d| (1..=64).any(|n| *g < d.mul_nat(n))))
}

/// Natural sum laws, the coarsening against its definition, and fundamental sequences.
pub fn ordinal_algebra(seed: u64, triples: usize) -> Check {
    let mut c = Check::new("ordinal algebra");
    let mut r = rng(seed);
    for _ in 0..triples {
        let (a, b, d) = (random_ordinal(&mut r), random_ordinal(&mut r), random_ordinal(&mut r));
        c.case(a.natural_sum(&b) == b.natural_sum(&a), || format!("{a} # {b} not commutative"));
        c.case(a.natural_sum(&b).natural_sum(&d) == a.natural_sum(&b.natural_sum(&d)), || format!("{a}, {b}, {d} not associative"));
        if a < b {
            c.case(a.natural_sum(&d) < b.natural_sum(&d), || format!("{a} < {b} but not after adding {d}"));
        }
    }
    let grid: Vec<Ordinal> = (0..=2u64)
        .flat_map(|x| (0..=2u64).flat_map(move |y| (0..=2u64).map(move |z| (x, y, z))))
        .map(|(x, y, z)| Ordinal::monomial(Ordinal::nat(2), x).add(&Ordinal::monomial(Ordinal::one(), y)).add(&Ordinal::nat(z)))
        .collect();
    for a in &grid {
        for b in grid.iter().filter(|b| **b >= Ordinal::nat(2)) {
            c.case(a.coarse_le(b) == coarse_search(a, b), || format!("coarse_le({a}, {b}) disagrees with the search"));
            if a >= &Ordinal::one() {
                c.case(a.coarse_le(b) == (a.xi_level().expect("a ≥ 1") <= b.xi_level().expect("b ≥ 1")), || format!("xi levels of {a}, {b}"));
            }
        }
    }
    for lam in crate::corpus::ordinal_corpus().into_iter().filter(Ordinal::is_limit) {
        let seq: Vec<Ordinal> = (0..=64).map(|n| lam.fund_seq(n).expect("limit")).collect();
        c.case(seq.windows(2).all(|w| w[0] < w[1]) && seq.iter().all(|x| *x < lam), || format!("fund_seq({lam}) not increasing below it"));
        for beta in crate::corpus::ordinal_corpus().into_iter().filter(|x| *x < lam) {
            c.case(seq.iter().any(|x| beta < *x), || format!("fund_seq({lam}) never passes {beta}"));
        }
    }
    c
}

/// Lower semicontinuity against `≤_m canon(2, left)` at ranks ≤ 2, and the sidedness of lsc functions.
pub fn p9_coherence(seed: u64) -> Check {
    let mut c = Check::new("lower semicontinuity coherence");
    let left = Facts::of(&canon(&Ordinal::nat(2), Sidedness::Left)).expect("canon facts");
    let mut fs = full_corpus(seed, 150, 40);
    fs.extend(canon_corpus());
    for f in fs {
        let Ok(lsc) = semicontinuous(&f, true) else { continue };
        let (Ok(facts), Ok(side)) = (Facts::of(&f), classify(&f)) else {
            c.case(false, || format!("{f}: not rankable"));
            continue;
        };
        if facts.rank <= Ordinal::nat(2) {
            let m = m_clause(&facts, &left).holds();
            c.case(lsc == m, || format!("{f}: lsc={lsc}, ≤m canon(2,left)={m}"));
        }
        if lsc && !facts.continuous() {
            c.case(side == Sidedness::Left, || format!("{f}: lsc but classified {side}"));
        }
        debug_assert_eq!(alpha_rank(&f).ok(), Some(facts.rank.clone()));
    }
    c
}
