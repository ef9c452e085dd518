//! Seeded test corpora: ordinals, stack-free expressions, mixed expressions, sample points.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::funcalc::{one_sided_example, FuncExpr, Point, Sidedness};
use crate::ordinal::Ordinal;
use crate::rational::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every ordinal `w^2*a + w*b + c` up to `w^2*2` with coefficients at most 3, except 0.
pub fn ordinal_corpus() -> Vec<Ordinal> {
    let mut out = Vec::new();
    for a in 0..=2u64 {
        for b in 0..=3u64 {
            for c in 0..=3u64 {
                if (a, b, c) == (0, 0, 0) || (a == 2 && (b, c) != (0, 0)) {
                    continue;
                }
                let o = Ordinal::monomial(Ordinal::nat(2), a)
                    .add(&Ordinal::monomial(Ordinal::one(), b))
                    .add(&Ordinal::nat(c));
                out.push(o);
            }
        }
    }
    out.sort();
    out
}

/// Every canonical function over the ordinal corpus, with every compatible side.
pub fn canon_corpus() -> Vec<FuncExpr> {
    let mut out = Vec::new();
    for o in ordinal_corpus() {
        for side in Sidedness::ALL {
            if side.compatible(&o) {
                out.push(FuncExpr::Canon(o.clone(), side));
            }
        }
    }
    out
}

fn small_value(r: &mut impl Rng) -> Rational {
    Rational::new(r.gen_range(-4..=4), *[1, 2].choose(r).unwrap())
}

fn small_point(r: &mut impl Rng, max_word: usize) -> Point {
    let len = r.gen_range(0..=max_word);
    Point::new((0..len).map(|_| r.gen()).collect(), r.gen())
}

/// A random expression built from constants, affine maps, glues and spikes, of depth at most `depth`.
pub fn random_stack_free(r: &mut impl Rng, depth: usize) -> FuncExpr {
    let roll = if depth == 0 { 0 } else { r.gen_range(0..10) };
    match roll {
        0 | 1 => FuncExpr::constant(small_value(r)),
        2 => {
            let a = [Rational::int(-1), Rational::int(2), Rational::new(1, 2), Rational::int(-3)].choose(r).unwrap().clone();
            FuncExpr::Affine(a, small_value(r), Box::new(random_stack_free(r, depth)))
        }
        3..=5 => FuncExpr::glue(random_stack_free(r, depth - 1), random_stack_free(r, depth - 1)),
        _ => {
            let z = small_point(r, depth - 1);
            FuncExpr::spike(random_stack_free(r, depth - 1), z, small_value(r))
        }
    }
}

/// `n` distinct stack-free expressions of structural depth at most `max_depth`, seeded.
pub fn stack_free_corpus(seed: u64, n: usize, max_depth: usize) -> Vec<FuncExpr> {
    let mut r = rng(seed);
    let mut out: Vec<FuncExpr> = vec![
        FuncExpr::constant(0),
        FuncExpr::glue(FuncExpr::constant(0), FuncExpr::constant(1)),
        FuncExpr::Canon(Ordinal::nat(2), Sidedness::Left),
        FuncExpr::Canon(Ordinal::nat(2), Sidedness::Right),
        FuncExpr::Canon(Ordinal::nat(2), Sidedness::Two),
        FuncExpr::Canon(Ordinal::nat(2), Sidedness::OneNeither),
        one_sided_example(),
    ];
    let mut seen: std::collections::HashSet<String> = out.iter().map(|f| f.to_string()).collect();
    while out.len() < n {
        let d = r.gen_range(1..=max_depth);
        let f = random_stack_free(&mut r, d);
        if f.depth() <= max_depth && seen.insert(f.to_string()) {
            out.push(f);
        }
    }
    out
}

/// A random expression that may contain cycle stacks and low-rank canonical pieces.
pub fn random_stacked(r: &mut impl Rng, depth: usize) -> FuncExpr {
    let roll = if depth == 0 { r.gen_range(0..3) } else { r.gen_range(0..12) };
    match roll {
        0 => FuncExpr::constant(small_value(r)),
        1 | 2 => {
            let o = Ordinal::nat(r.gen_range(2..=4));
            let side = *[Sidedness::Left, Sidedness::Right, Sidedness::Two, Sidedness::OneNeither].choose(r).unwrap();
            FuncExpr::Canon(o, side)
        }
        3 | 4 => FuncExpr::glue(random_stacked(r, depth - 1), random_stacked(r, depth - 1)),
        5 => FuncExpr::Affine(Rational::int(-1), small_value(r), Box::new(random_stacked(r, depth - 1))),
        6 | 7 => {
            let z = small_point(r, 3);
            FuncExpr::spike(random_stacked(r, depth - 1), z, small_value(r))
        }
        _ => {
            let k = r.gen_range(1..=2);
            let items = (0..k).map(|_| random_stacked(r, depth - 1)).collect();
            FuncExpr::Stack(crate::funcalc::StackSeq::Cycle(items), small_value(r))
        }
    }
}

/// The mixed corpus: stack-free expressions, canonical functions, and random stacked expressions.
pub fn full_corpus(seed: u64, stack_free: usize, stacked: usize) -> Vec<FuncExpr> {
    let mut out = stack_free_corpus(seed, stack_free, 4);
    out.extend(canon_corpus());
    let mut r = rng(seed ^ 0x5eed);
    let mut seen: std::collections::HashSet<String> = out.iter().map(|f| f.to_string()).collect();
    let mut added = 0;
    while added < stacked {
        let f = random_stacked(&mut r, 3);
        if seen.insert(f.to_string()) {
            out.push(f);
            added += 1;
        }
    }
    out
}

/// Eventually constant sample points, always including both constant points.
pub fn sample_points(seed: u64, n: usize, max_word: usize) -> Vec<Point> {
    let mut r = rng(seed);
    let mut out = vec![Point::constant(false), Point::constant(true)];
    while out.len() < n {
        let p = small_point(&mut r, max_word);
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpora_are_deterministic_and_sized() {
        assert_eq!(stack_free_corpus(3, 50, 6), stack_free_corpus(3, 50, 6));
        assert!(stack_free_corpus(3, 50, 6).iter().all(|f| f.is_stack_free() && f.depth() <= 6));
        assert_eq!(ordinal_corpus().len(), 32);
        assert_eq!(sample_points(1, 20, 4).len(), 20);
        assert!(full_corpus(1, 20, 10).iter().all(|f| f.validate().is_ok()));
    }
}
