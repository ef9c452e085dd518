//! The symbolic engine agrees with the brute-force oracle on stack-free expressions.

use bourgain::corpus::{full_corpus, stack_free_corpus};
use bourgain::derivation::brute::default_depth;
use bourgain::derivation::{alpha_rank, brute_alpha, derive_profile, Coloring};
use bourgain::funcalc::critical_pairs;

#[test]
fn symbolic_rank_matches_brute_stage_count() {
    let mut mismatches = Vec::new();
    for f in stack_free_corpus(7, 200, 6) {
        for (p, e) in critical_pairs(&f) {
            let sym = derive_profile(&f, &p, &e).unwrap().alpha;
            let (b, exact) = brute_alpha(&f, &Coloring::new(&p, &e).unwrap(), default_depth(&f));
            if !exact || sym != b {
                mismatches.push(format!("{f} at ({p},{e}): symbolic {sym}, brute {b} exact={exact}"));
            }
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

#[test]
fn full_corpus_is_rankable() {
    for f in full_corpus(7, 50, 60) {
        let r = alpha_rank(&f);
        assert!(r.as_ref().is_ok_and(|r| r.is_successor() || r.is_limit()), "{f}: {r:?}");
    }
}
