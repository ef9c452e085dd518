//! Canonical functions realize their rank and sidedness.

use bourgain::corpus::canon_corpus;
use bourgain::derivation::{alpha_rank, classify};
use bourgain::FuncExpr;

#[test]
fn canon_round_trip_over_ordinal_corpus() {
    for f in canon_corpus() {
        let FuncExpr::Canon(o, side) = &f else { unreachable!() };
        assert_eq!(&alpha_rank(&f).unwrap(), o, "rank of {f}");
        assert_eq!(classify(&f).unwrap(), *side, "side of {f}");
    }
}
