use super::*;
use crate::corpus::sample_points;
use crate::funcalc::{one_sided_example, Sidedness};

fn canon(o: &str, s: Sidedness) -> FuncExpr {
    FuncExpr::canon(Ordinal::parse(o).unwrap(), s).unwrap()
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

#[test]
fn continuous_source_uses_a_separating_pair() {
    let red = synth_m(&FuncExpr::constant(0), &canon("2", Sidedness::Left)).unwrap();
    let res = run_reducer(&red, &r(1, 2), &r(1, 4), &Point::constant(false), 64).unwrap();
    assert!(res.stabilized);
    assert_eq!(res.answer, Some(1));
    assert_eq!(res.components.len(), 1);
}

#[test]
fn many_one_reducers() {
    let l = canon("2", Sidedness::Left);
    let red = synth_m(&l, &canon("3", Sidedness::Two)).unwrap();
    let rep = verify_reduction(&red, &sample_points(1, 20, 4), DEFAULT_FUEL);
    assert!(rep.ok(), "{:?}", rep.violations);
    assert!(matches!(synth_m(&l, &canon("2", Sidedness::Right)), Err(Error::NotReducible(_))));
    let red = synth_m(&one_sided_example(), &canon("2", Sidedness::Two)).unwrap();
    assert!(verify_reduction(&red, &sample_points(2, 20, 4), DEFAULT_FUEL).ok());
}

#[test]
fn one_query_truth_tables() {
    let (l, rt) = (canon("2", Sidedness::Left), canon("2", Sidedness::Right));
    let red = synth_tt1(&rt, &l).unwrap();
    let plan = red.plan(&r(1, 2), &r(1, 4)).unwrap();
    let Layout::Single { cover, .. } = &plan.layout else { panic!() };
    assert!(cover.iter().any(|e| e.inverted));
    let rep = verify_reduction(&red, &sample_points(3, 20, 4), DEFAULT_FUEL);
    assert!(rep.ok(), "{:?}", rep.violations);
    let same = synth_tt1(&l, &l).unwrap();
    let plan = same.plan(&r(1, 2), &r(1, 4)).unwrap();
    let Layout::Single { cover, .. } = &plan.layout else { panic!() };
    assert!(cover.iter().all(|e| !e.inverted));
    assert!(synth_tt1(&canon("3", Sidedness::Left), &rt).is_err());
}

#[test]
fn truth_table_block_counts() {
    let f = canon("5", Sidedness::Left);
    let red = synth_tt(&f, &canon("2", Sidedness::Right)).unwrap();
    let max = critical_pairs(&f).iter().map(|(p, e)| red.plan(p, e).unwrap().components()).max().unwrap();
    assert_eq!(max, 9);
    let g = canon("4", Sidedness::Two);
    let same = synth_tt(&g, &g).unwrap();
    let max = critical_pairs(&g).iter().map(|(p, e)| same.plan(p, e).unwrap().components()).max().unwrap();
    assert_eq!(max, 6);
    assert!(synth_tt(&canon("w", Sidedness::LimitClass), &canon("3", Sidedness::Two)).is_ok());
    assert!(synth_tt(&canon("w^2", Sidedness::LimitClass), &canon("3", Sidedness::Two)).is_err());
    let rep = verify_reduction(&red, &sample_points(4, 20, 4), DEFAULT_FUEL);
    assert!(rep.ok(), "{:?}", rep.violations);
}
