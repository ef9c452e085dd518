//! Property tests for the algebraic and structural invariants.

use bourgain::checks::{coarse_search, reduction_corpus};
use bourgain::corpus::{canon_corpus, full_corpus, ordinal_corpus, random_stack_free, random_stacked, rng, sample_points};
use bourgain::degrees::{m_clause, t_holds, tt1_holds, tt_holds, Facts};
use bourgain::derivation::brute::{continuous_by_views, default_depth, Residue};
use bourgain::derivation::{alpha_rank, brute_derive, classify, derive_profile, Coloring};
use bourgain::funcalc::{critical_pairs, parse_word, FuncExpr, Point, RangeSet, Sidedness, StackSeq};
use bourgain::reduction::{run_reducer, synth, Kind, DEFAULT_FUEL};
use bourgain::{Ordinal, Rational};
use proptest::prelude::*;

fn ordinal(depth: u32) -> BoxedStrategy<Ordinal> {
    if depth == 0 {
        return (0u64..6).prop_map(Ordinal::nat).boxed();
    }
    prop::collection::vec((ordinal(depth - 1), 1u64..=5), 0..4)
        .prop_map(|terms| {
            let mut ts = terms;
            ts.sort_by(|a, b| b.0.cmp(&a.0));
            ts.into_iter().fold(Ordinal::zero(), |acc, (e, k)| acc.add(&Ordinal::monomial(e, k)))
        })
        .boxed()
}

fn small_ordinal() -> BoxedStrategy<Ordinal> {
    (0u64..=3, 0u64..=3, 0u64..=3)
        .prop_map(|(a, b, c)| {
            Ordinal::monomial(Ordinal::nat(2), a).add(&Ordinal::monomial(Ordinal::one(), b)).add(&Ordinal::nat(c))
        })
        .boxed()
}

fn point() -> impl Strategy<Value = Point> {
    (prop::collection::vec(any::<bool>(), 0..8), any::<bool>()).prop_map(|(w, t)| Point::new(w, t))
}

fn stack_free() -> impl Strategy<Value = FuncExpr> {
    (any::<u64>(), 1usize..=5).prop_map(|(s, d)| random_stack_free(&mut rng(s), d))
}

fn stacked() -> impl Strategy<Value = FuncExpr> {
    (any::<u64>(), 1usize..=3).prop_map(|(s, d)| random_stacked(&mut rng(s), d))
}

fn in_range(r: &RangeSet, v: &Rational) -> bool {
    r.values.contains(v) || r.families.iter().any(|f| f.base == *v || (0..64).any(|n| f.member(n) == *v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ordinal_order_and_addition(a in ordinal(2), b in ordinal(2), c in ordinal(2)) {
        prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        if a <= b && b <= c { prop_assert!(a <= c); }
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.add(&Ordinal::zero()), a.clone());
        prop_assert_eq!(Ordinal::zero().add(&a), a);
    }

    #[test]
    fn natural_sum_laws(a in ordinal(3), b in ordinal(3), c in ordinal(3)) {
        prop_assert_eq!(a.natural_sum(&b), b.natural_sum(&a));
        prop_assert_eq!(a.natural_sum(&b).natural_sum(&c), a.natural_sum(&b.natural_sum(&c)));
        prop_assert_eq!(a.natural_sum(&Ordinal::zero()), a.clone());
        if a < b {
            prop_assert!(a.natural_sum(&c) < b.natural_sum(&c));
            prop_assert!(c.natural_sum(&a) < c.natural_sum(&b));
        }
    }

    #[test]
    fn coarsening_is_a_preorder(a in ordinal(2), b in ordinal(2), c in ordinal(2)) {
        prop_assert!(a.coarse_le(&a));
        if a.coarse_le(&b) && b.coarse_le(&c) { prop_assert!(a.coarse_le(&c)); }
        if a <= b { prop_assert!(a.coarse_le(&b)); }
        if !a.is_zero() && !b.is_zero() {
            prop_assert_eq!(a.coarse_le(&b), a.xi_level().unwrap() <= b.xi_level().unwrap());
        }
    }

    #[test]
    fn coarsening_matches_its_definition(a in small_ordinal(), b in small_ordinal()) {
        prop_assume!(b >= Ordinal::nat(2));
        prop_assert_eq!(a.coarse_le(&b), coarse_search(&a, &b));
    }

    #[test]
    fn points_round_trip(x in point(), y in point()) {
        prop_assert_eq!(Point::parse(&x.to_string()).unwrap(), x.clone());
        if x != y {
            let n = x.word().len().max(y.word().len()) + 1;
            prop_assert!((0..n).any(|i| x.bit(i) != y.bit(i)));
        }
    }

    #[test]
    fn evaluation_stays_in_range(f in stacked(), x in point()) {
        prop_assume!(!f.has_sum_or_prod());
        prop_assert!(in_range(&f.range_of(), &f.eval(&x)));
    }

    #[test]
    fn affine_evaluation(f in stack_free(), x in point(), a in 1i64..5, b in -3i64..3) {
        let a = Rational::new(-a, 2);
        let g = FuncExpr::affine(a.clone(), Rational::int(b), f.clone()).unwrap();
        prop_assert_eq!(g.eval(&x), &(&a * &f.eval(&x)) + &Rational::int(b));
    }

    #[test]
    fn pair_ranks_are_successors(f in stacked()) {
        for (p, e) in critical_pairs(&f) {
            prop_assert!(derive_profile(&f, &p, &e).unwrap().alpha.is_successor());
        }
    }

    #[test]
    fn brute_stages_shrink(f in stack_free()) {
        for (p, e) in critical_pairs(&f) {
            let r = brute_derive(&f, &Coloring::new(&p, &e).unwrap(), default_depth(&f));
            for w in r.stages.windows(2) {
                prop_assert!(w[1].is_subset_of_union(&w[0], &Residue::default()).is_none());
            }
        }
    }

    #[test]
    fn negation_duality(f in stacked()) {
        let g = FuncExpr::Affine(Rational::int(-1), Rational::zero(), Box::new(f.clone()));
        prop_assert_eq!(alpha_rank(&g).unwrap(), alpha_rank(&f).unwrap());
        prop_assert_eq!(classify(&g).unwrap(), classify(&f).unwrap().negated());
    }

    #[test]
    fn rank_one_iff_continuous(f in stack_free()) {
        let direct = continuous_by_views(&f, default_depth(&f)).unwrap();
        prop_assert_eq!(alpha_rank(&f).unwrap() == Ordinal::one(), direct);
    }

    #[test]
    fn reducer_outputs_extend_their_prefixes(i in 0usize..23, j in 0usize..23, k in 0usize..3, x in point()) {
        let fs = reduction_corpus(1);
        let kind = [Kind::M, Kind::Tt1, Kind::Tt][k];
        let Ok(red) = synth(kind, &fs[i], &fs[j]) else { return Ok(()) };
        for (p, e) in critical_pairs(&fs[i]) {
            let res = run_reducer(&red, &p, &e, &x, DEFAULT_FUEL).unwrap();
            prop_assert!(res.stabilized);
            for c in &res.components {
                let b = c.point.as_ref().unwrap();
                prop_assert!(b.has_prefix(&parse_word(&c.output_prefix).unwrap()));
            }
            if kind == Kind::Tt1 {
                prop_assert!(res.table_bits.is_some_and(|n| n <= DEFAULT_FUEL));
            }
        }
    }
}

fn ordinal_fund_sequences_increase() -> Vec<String> {
    let mut bad = Vec::new();
    for lam in ordinal_corpus().into_iter().filter(Ordinal::is_limit) {
        for n in 0..20 {
            let (a, b) = (lam.fund_seq(n).unwrap(), lam.fund_seq(n + 1).unwrap());
            if !(a < b && b < lam) {
                bad.push(format!("{lam} at {n}"));
            }
        }
    }
    bad
}

#[test]
fn fundamental_sequences() {
    assert!(ordinal_fund_sequences_increase().is_empty());
}

#[test]
fn canon_functions_have_their_rank_and_side() {
    for f in canon_corpus() {
        let FuncExpr::Canon(o, s) = &f else { unreachable!() };
        assert_eq!(&alpha_rank(&f).unwrap(), o);
        assert_eq!(classify(&f).unwrap(), *s);
    }
}

#[test]
fn truncated_cycle_stacks_approach_the_stack_rank() {
    let mut r = rng(11);
    let mut checked = 0;
    while checked < 40 {
        let f = random_stacked(&mut r, 3);
        let FuncExpr::Stack(seq @ StackSeq::Cycle(_), v) = &f else { continue };
        let full = alpha_rank(&f).unwrap();
        let ranks: Vec<Ordinal> = (1..=6).map(|n| alpha_rank(&FuncExpr::truncate_stack(seq, n, v.clone())).unwrap()).collect();
        assert!(ranks.windows(2).all(|w| w[0] <= w[1]), "{f}: {ranks:?}");
        let sup = ranks.last().unwrap().clone();
        assert!(full == sup || full == sup.succ(), "{f}: full {full}, truncations {ranks:?}");
        checked += 1;
    }
}

fn facts_corpus() -> Vec<(FuncExpr, Facts)> {
    let mut fs = full_corpus(3, 12, 8);
    fs.truncate(70);
    fs.into_iter().map(|f| {
        let x = Facts::of(&f).unwrap();
        (f, x)
    }).collect()
}

#[test]
fn reducibilities_are_preorders() {
    let items = facts_corpus();
    type Rel = fn(&Facts, &Facts) -> bool;
    let rels: [(&str, Rel); 4] = [
        ("m", |a, b| m_clause(a, b).holds()),
        ("tt1", tt1_holds),
        ("tt", tt_holds),
        ("T", t_holds),
    ];
    for (name, rel) in rels {
        for (f, a) in &items {
            assert!(rel(a, a), "{name} not reflexive at {f}");
            for (g, b) in &items {
                if !rel(a, b) {
                    continue;
                }
                for (h, c) in &items {
                    assert!(!rel(b, c) || rel(a, c), "{name}: {f} ≤ {g} ≤ {h} but not {f} ≤ {h}");
                }
            }
        }
    }
}

#[test]
fn reducibility_chain_and_rank_rules() {
    let items = facts_corpus();
    for (f, a) in &items {
        for (g, b) in &items {
            let m = m_clause(a, b).holds();
            if !b.constant {
                assert!(!m || tt1_holds(a, b), "m without tt1: {f}, {g}");
                assert!(!tt1_holds(a, b) || tt_holds(a, b), "tt1 without tt: {f}, {g}");
            }
            assert!(!tt_holds(a, b) || t_holds(a, b), "tt without T: {f}, {g}");
            if !a.continuous() && !b.continuous() && a.rank < b.rank {
                assert!(m, "rank gap without m: {f}, {g}");
            }
            let neg = Facts::of(&FuncExpr::neg(f.clone())).unwrap();
            assert!(m || m_clause(b, &neg).holds(), "dichotomy fails for {f}, {g}");
        }
    }
}

#[test]
fn limit_classes_collapse() {
    for o in ordinal_corpus().into_iter().filter(Ordinal::is_limit) {
        let f = FuncExpr::Canon(o.clone(), Sidedness::LimitClass);
        let variants = [
            f.clone(),
            FuncExpr::neg(f.clone()),
            FuncExpr::glue(f.clone(), FuncExpr::constant(0)),
            FuncExpr::affine(Rational::int(2), Rational::one(), f.clone()).unwrap(),
        ];
        let facts: Vec<Facts> = variants.iter().map(|v| Facts::of(v).unwrap()).collect();
        for a in &facts {
            for b in &facts {
                assert!(m_clause(a, b).holds(), "{o}: {a:?} vs {b:?}");
            }
        }
    }
}

#[test]
fn synthesis_succeeds_exactly_when_decided() {
    let fs = reduction_corpus(1);
    for f in &fs {
        let a = Facts::of(f).unwrap();
        for g in &fs {
            let b = Facts::of(g).unwrap();
            for (kind, holds) in [(Kind::M, m_clause(&a, &b).holds()), (Kind::Tt1, tt1_holds(&a, &b)), (Kind::Tt, tt_holds(&a, &b))] {
                assert_eq!(synth(kind, f, g).is_ok(), holds, "{kind:?}: {f} -> {g}");
            }
        }
    }
}

#[test]
fn samples_are_deterministic() {
    assert_eq!(sample_points(5, 20, 5), sample_points(5, 20, 5));
}
