//! Deciding `≤_m`, `≤_tt1`, `≤_tt` and `≤_T` from rank and sidedness, and drawing `≤_m` Hasse diagrams.

use std::fmt::Write as _;

use serde::Serialize;

use crate::derivation::{alpha_rank, classify, is_constant, semicontinuous};
use crate::error::Result;
use crate::funcalc::{FuncExpr, Sidedness};
use crate::ordinal::Ordinal;

/// The rank data every decision is read from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Facts {
    pub rank: Ordinal,
    pub side: Sidedness,
    pub constant: bool,
}

impl Facts {
    pub fn of(f: &FuncExpr) -> Result<Facts> {
        Ok(Facts { rank: alpha_rank(f)?, side: classify(f)?, constant: is_constant(f)? })
    }

    pub fn continuous(&self) -> bool {
        self.rank == Ordinal::one()
    }
}

/// Why `f ≤_m g` holds or fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MClause {
    BothConstant,
    ContinuousSource,
    RankGap,
    LimitRank,
    TargetTwoSided,
    OneSidedToNeither,
    MatchingSide,
    TargetConstant,
    RankTooHigh,
    SideMismatch,
}

impl MClause {
    pub fn holds(self) -> bool {
        !matches!(self, MClause::TargetConstant | MClause::RankTooHigh | MClause::SideMismatch)
    }

    pub fn describe(self) -> &'static str {
        match self {
            MClause::BothConstant => "both functions are constant",
            MClause::ContinuousSource => "f is continuous and g is nonconstant",
            MClause::RankGap => "|f| < |g|",
            MClause::LimitRank => "equal limit ranks",
            MClause::TargetTwoSided => "equal ranks and g is two-sided",
            MClause::OneSidedToNeither => "equal ranks, f one-sided, g neither left- nor right-sided",
            MClause::MatchingSide => "equal ranks, both left-sided or both right-sided",
            MClause::TargetConstant => "f is nonconstant and g is constant",
            MClause::RankTooHigh => "|f| > |g|",
            MClause::SideMismatch => "equal ranks with incompatible sidedness",
        }
    }
}

/// `≤_m` from precomputed facts.
pub fn m_clause(f: &Facts, g: &Facts) -> MClause {
    use Sidedness::*;
    if f.constant && g.constant {
        return MClause::BothConstant;
    }
    if g.constant {
        return MClause::TargetConstant;
    }
    if f.continuous() {
        return MClause::ContinuousSource;
    }
    if f.rank < g.rank {
        return MClause::RankGap;
    }
    if f.rank > g.rank {
        return MClause::RankTooHigh;
    }
    if f.rank.is_limit() {
        return MClause::LimitRank;
    }
    match (f.side, g.side) {
        (_, Two) => MClause::TargetTwoSided,
        (Left | Right | OneNeither, OneNeither) => MClause::OneSidedToNeither,
        (Left, Left) | (Right, Right) => MClause::MatchingSide,
        _ => MClause::SideMismatch,
    }
}

pub fn decide_m(f: &FuncExpr, g: &FuncExpr) -> Result<(bool, MClause)> {
    let c = m_clause(&Facts::of(f)?, &Facts::of(g)?);
    Ok((c.holds(), c))
}

pub fn tt1_holds(f: &Facts, g: &Facts) -> bool {
    f.rank <= g.rank
}

pub fn decide_tt1(f: &FuncExpr, g: &FuncExpr) -> Result<bool> {
    Ok(alpha_rank(f)? <= alpha_rank(g)?)
}

pub fn tt_holds(f: &Facts, g: &Facts) -> bool {
    if f.continuous() {
        return f.constant || !g.constant;
    }
    if g.continuous() {
        return false;
    }
    f.rank.coarse_le(&g.rank)
}

pub fn decide_tt(f: &FuncExpr, g: &FuncExpr) -> Result<bool> {
    Ok(tt_holds(&Facts::of(f)?, &Facts::of(g)?))
}

pub fn t_holds(f: &Facts, g: &Facts) -> bool {
    f.continuous() || !g.continuous()
}

pub fn decide_t(f: &FuncExpr, g: &FuncExpr) -> Result<bool> {
    Ok(alpha_rank(f)? == Ordinal::one() || alpha_rank(g)? > Ordinal::one())
}

/// `f ≤_m g` or `g ≤_m -f`; must always hold.
pub fn dichotomy_check(f: &FuncExpr, g: &FuncExpr) -> Result<bool> {
    Ok(decide_m(f, g)?.0 || decide_m(g, &FuncExpr::neg(f.clone()))?.0)
}

pub fn is_lsc(f: &FuncExpr) -> Result<bool> {
    semicontinuous(f, true)
}

pub fn is_usc(f: &FuncExpr) -> Result<bool> {
    semicontinuous(f, false)
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeNode {
    /// DSL text of every listed function in this degree, sorted.
    pub members: Vec<String>,
    pub rank: Ordinal,
    pub side: Sidedness,
}

/// Hasse diagram of `≤_m` on a finite list: nodes are degrees, edges go from lower to upper.
#[derive(Clone, Debug, Serialize)]
pub struct Diagram {
    pub nodes: Vec<DegreeNode>,
    pub edges: Vec<(usize, usize)>,
}

impl Diagram {
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph degrees {\n  rankdir=BT;\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(
                out,
                "  n{i} [label=\"rank={}, side={}\", tooltip=\"{}\"];",
                n.rank,
                n.side,
                n.members.join("; ")
            );
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "  n{a} -> n{b};");
        }
        out.push_str("}\n");
        out
    }
}

pub fn degree_diagram(fs: &[FuncExpr]) -> Result<Diagram> {
    let mut items: Vec<(String, Facts)> = fs.iter().map(|f| Ok((f.to_string(), Facts::of(f)?))).collect::<Result<_>>()?;
    items.sort_by(|a, b| a.0.cmp(&b.0));
    items.dedup_by(|a, b| a.0 == b.0);
    let n = items.len();
    let le: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| m_clause(&items[i].1, &items[j].1).holds()).collect()).collect();

    // Quotient by mutual reducibility; a class is named by its first member in text order.
    let mut class_of = vec![usize::MAX; n];
    let mut nodes: Vec<DegreeNode> = Vec::new();
    let mut reps = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let id = nodes.len();
        let mut members = Vec::new();
        for j in i..n {
            if class_of[j] == usize::MAX && le[i][j] && le[j][i] {
                class_of[j] = id;
                members.push(items[j].0.clone());
            }
        }
        nodes.push(DegreeNode { members, rank: items[i].1.rank.clone(), side: items[i].1.side });
        reps.push(i);
    }
    let k = nodes.len();
    let lt = |a: usize, b: usize| a != b && le[reps[a]][reps[b]];
    let mut edges = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if lt(a, b) && !(0..k).any(|c| c != a && c != b && lt(a, c) && lt(c, b)) {
                edges.push((a, b));
            }
        }
    }
    Ok(Diagram { nodes, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalc::one_sided_example;

    fn canon(o: &str, s: Sidedness) -> FuncExpr {
        FuncExpr::canon(Ordinal::parse(o).unwrap(), s).unwrap()
    }

    #[test]
    fn many_one_examples() {
        let (l, r) = (canon("2", Sidedness::Left), canon("2", Sidedness::Right));
        assert!(!decide_m(&l, &r).unwrap().0);
        assert!(!decide_m(&r, &l).unwrap().0);
        assert_eq!(decide_m(&l, &l).unwrap(), (true, MClause::MatchingSide));
        assert!(decide_m(&canon("2", Sidedness::OneNeither), &canon("2", Sidedness::Two)).unwrap().0);
        assert!(!decide_m(&canon("2", Sidedness::Two), &one_sided_example()).unwrap().0);
        assert_eq!(decide_m(&l, &canon("3", Sidedness::Two)).unwrap(), (true, MClause::RankGap));
        assert_eq!(decide_m(&FuncExpr::constant(1), &FuncExpr::constant(2)).unwrap().1, MClause::BothConstant);
        assert_eq!(decide_m(&l, &FuncExpr::constant(2)).unwrap().1, MClause::TargetConstant);
    }

    #[test]
    fn truth_table_examples() {
        let (l, r) = (canon("2", Sidedness::Left), canon("2", Sidedness::Right));
        assert!(decide_tt1(&l, &r).unwrap());
        assert!(!decide_tt1(&canon("3", Sidedness::Left), &canon("2", Sidedness::Two)).unwrap());
        let lim = canon("w", Sidedness::LimitClass);
        assert!(!decide_tt(&canon("w+1", Sidedness::Left), &lim).unwrap());
        // Every γ < ω is below 1·(γ+1), so ω ≲ 4 holds.
        assert!(decide_tt(&lim, &canon("4", Sidedness::Two)).unwrap());
        assert!(!decide_tt(&canon("w^2", Sidedness::LimitClass), &canon("4", Sidedness::Two)).unwrap());
        assert!(decide_tt(&canon("4", Sidedness::Two), &lim).unwrap());
        assert!(decide_tt(&canon("5", Sidedness::Left), &r).unwrap());
    }

    #[test]
    fn turing_examples() {
        let cont = FuncExpr::glue(FuncExpr::constant(0), FuncExpr::constant(1));
        assert!(decide_t(&canon("9", Sidedness::Two), &canon("2", Sidedness::Left)).unwrap());
        assert!(!decide_t(&canon("2", Sidedness::Left), &cont).unwrap());
        assert!(decide_t(&FuncExpr::constant(0), &FuncExpr::constant(7)).unwrap());
    }

    #[test]
    fn semicontinuity_and_dichotomy() {
        let (l, r) = (canon("2", Sidedness::Left), canon("2", Sidedness::Right));
        assert!(is_lsc(&l).unwrap() && !is_lsc(&r).unwrap() && is_usc(&r).unwrap());
        assert!(is_lsc(&FuncExpr::constant(0)).unwrap());
        assert!(dichotomy_check(&l, &r).unwrap());
        assert!(dichotomy_check(&l, &l).unwrap());
    }

    #[test]
    fn diagrams() {
        let one = degree_diagram(&[FuncExpr::constant(3)]).unwrap();
        assert_eq!((one.nodes.len(), one.edges.len()), (1, 0));
        let sides = [Sidedness::Left, Sidedness::Right, Sidedness::OneNeither, Sidedness::Two];
        let d = degree_diagram(&sides.map(|s| canon("3", s))).unwrap();
        assert_eq!(d.nodes.len(), 4);
        assert_eq!(d.edges.len(), 3);
        assert!(d.to_dot().contains("rank=3, side=two"));
    }
}
