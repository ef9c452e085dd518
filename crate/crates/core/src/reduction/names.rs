//! Correct answers to `y ≲_ε p` and separation names.
//!
//! Index `k` of a separation name asks about the `k`-th pair `(p, ε)` in a fixed
//! enumeration of `Q × Q⁺`: pairs are grouped by height `max(|a|+b, c+d)` for
//! `p = a/b`, `ε = c/d` in lowest terms, and sorted by `(p, ε)` within a height.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Bit 1 is correct iff `y < p+ε`; bit 0 is correct iff `y > p-ε`.
pub fn answer_correct(y: &Rational, p: &Rational, eps: &Rational, bit: bool) -> bool {
    if bit {
        *y < p + eps
    } else {
        *y > p - eps
    }
}

/// The answer given by a fixed oracle: 1 whenever 1 is correct.
pub fn oracle_bit(y: &Rational, p: &Rational, eps: &Rational) -> bool {
    answer_correct(y, p, eps, true)
}

/// Both correct answers, 1 first.
pub fn correct_answers(y: &Rational, p: &Rational, eps: &Rational) -> Vec<bool> {
    [true, false].into_iter().filter(|&b| answer_correct(y, p, eps, b)).collect()
}

fn fractions(max_height: i64, signed: bool) -> Vec<(Rational, i64)> {
    let mut out = Vec::new();
    for b in 1..max_height {
        for a in 0..=(max_height - b) {
            if a.gcd(&b) != 1 && !(a == 0 && b == 1) {
                continue;
            }
            if !signed && a == 0 {
                continue;
            }
            out.push((Rational::new(a, b), a + b));
            if signed && a != 0 {
                out.push((Rational::new(-a, b), a + b));
            }
        }
    }
    out
}

/// All pairs of height exactly `h`, in index order.
pub fn pairs_of_height(h: i64) -> Vec<(Rational, Rational)> {
    let ps = fractions(h, true);
    let es = fractions(h, false);
    let mut out = Vec::new();
    for (p, hp) in &ps {
        for (e, he) in &es {
            if (*hp).max(*he) == h {
                out.push((p.clone(), e.clone()));
            }
        }
    }
    out.sort();
    out
}

/// The first `count` pairs of the enumeration.
pub fn pairs_prefix(count: usize) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    let mut h = 2;
    while out.len() < count {
        out.extend(pairs_of_height(h));
        h += 1;
    }
    out.truncate(count);
    out
}

/// All pairs up to height `h`.
pub fn pairs_up_to_height(h: i64) -> Vec<(Rational, Rational)> {
    (2..=h).flat_map(pairs_of_height).collect()
}

pub fn pair_at(index: usize) -> (Rational, Rational) {
    pairs_prefix(index + 1).pop().expect("nonempty")
}

pub fn sepname_bit(y: &Rational, index: usize) -> bool {
    let (p, e) = pair_at(index);
    oracle_bit(y, &p, &e)
}

/// The first `count` bits of the separation name of `y` under the fixed oracle policy.
pub fn sepname_bits(y: &Rational, count: usize) -> Vec<bool> {
    pairs_prefix(count).iter().map(|(p, e)| oracle_bit(y, p, e)).collect()
}

/// The open interval `(lo, hi)` of values consistent with a name prefix.
pub fn sepname_decode(bits: &[bool], precision: &Rational) -> Result<(Rational, Rational)> {
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for ((p, e), &b) in pairs_prefix(bits.len()).iter().zip(bits) {
        if b {
            let u = p + e;
            if hi.as_ref().is_none_or(|h| u < *h) {
                hi = Some(u);
            }
        } else {
            let l = p - e;
            if lo.as_ref().is_none_or(|x| l > *x) {
                lo = Some(l);
            }
        }
    }
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(Error::Precondition("name prefix leaves the value unbounded".into()));
    };
    if lo >= hi {
        return Err(Error::Semantic(format!("inconsistent separation name: needs {lo} < y < {hi}")));
    }
    if &hi - &lo > *precision {
        return Err(Error::Precondition(format!("name prefix only pins the value to ({lo}, {hi})")));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn correct_answers_follow_the_definition() {
        assert!(answer_correct(&r(0, 1), &r(1, 2), &r(1, 4), true));
        assert!(answer_correct(&r(1, 2), &r(1, 2), &r(1, 4), true));
        assert!(answer_correct(&r(1, 2), &r(1, 2), &r(1, 4), false));
        assert!(!answer_correct(&r(1, 1), &r(0, 1), &r(1, 4), true));
        assert_eq!(correct_answers(&r(1, 1), &r(1, 2), &r(1, 4)), vec![false]);
    }

    #[test]
    fn enumeration_is_stable() {
        assert_eq!(pairs_of_height(2), vec![(r(-1, 1), r(1, 1)), (r(0, 1), r(1, 1)), (r(1, 1), r(1, 1))]);
        let ps = pairs_up_to_height(8);
        let mut dedup = ps.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), ps.len());
        assert_eq!(pair_at(4), pairs_prefix(5)[4]);
        assert!(ps.iter().all(|(_, e)| e.is_positive()));
    }

    #[test]
    fn name_bits_and_decoding() {
        let half = r(1, 2);
        let quarter = r(1, 4);
        let idx = pairs_up_to_height(6).iter().position(|q| *q == (half.clone(), quarter.clone())).unwrap();
        assert!(sepname_bit(&r(0, 1), idx));
        assert!(!sepname_bit(&r(1, 1), idx));
        let y = r(2, 3);
        let n = pairs_up_to_height(30).len();
        let (lo, hi) = sepname_decode(&sepname_bits(&y, n), &r(1, 10)).unwrap();
        assert!(lo < y && y < hi);
        let mut bad = sepname_bits(&y, n);
        bad[idx] = true;
        let flipped = pairs_prefix(n).iter().position(|(p, e)| p - e > y).unwrap();
        bad[flipped] = false;
        assert!(sepname_decode(&bad, &r(1, 10)).is_err());
    }
}
