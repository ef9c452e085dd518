//! The stagewise transducer, run results, and sweep verification.

use serde::{Deserialize, Serialize};

use super::names::{answer_correct, correct_answers, oracle_bit};
use super::oracles::{opposite, removal};
use super::{answer_of, CoverEntry, Kind, Layout, Plan, Reducer};
use crate::derivation::engine::{Engine, Region};
use crate::derivation::normal::{child, Node};
use crate::error::{Error, Result};
use crate::funcalc::{critical_pairs, word_to_string, Point, Word};
use crate::ordinal::Ordinal;
use crate::rational::Rational;

use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Main,
    Detector,
    Tracker,
    Indicator,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Component {
    pub role: Role,
    pub block: usize,
    pub q: Rational,
    pub delta: Rational,
    pub output_prefix: String,
    pub point: Option<Point>,
    pub bit: Option<u8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairText {
    pub p: Rational,
    pub eps: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunResult {
    pub kind: Kind,
    pub pair: PairText,
    pub input: Point,
    pub components: Vec<Component>,
    pub answer: Option<u8>,
    pub stabilized: bool,
    pub steps: usize,
    /// The bound `μ` after each change, in order.
    pub mind_changes: Vec<Ordinal>,
    /// Input bits read before the answer table was fixed (single-query plans).
    pub table_bits: Option<usize>,
    #[serde(skip)]
    decode: Decode,
}

#[derive(Clone, Debug, Default)]
enum Decode {
    #[default]
    Direct,
    Invert,
    Blocks {
        n: usize,
        natural_bit: bool,
    },
}

impl RunResult {
    /// The final answer for a given vector of oracle bits, one per component.
    pub fn answer_for(&self, bits: &[bool]) -> bool {
        match self.decode {
            Decode::Direct => bits[0],
            Decode::Invert => !bits[0],
            Decode::Blocks { n, natural_bit } => {
                let moved = |b: bool| b != natural_bit;
                let i = (0..n).find(|&i| moved(bits[i])).unwrap_or(n - 1);
                bits[n + i] ^ moved(bits[2 * n + i])
            }
        }
    }
}

struct Lane {
    role: Role,
    block: usize,
    committed: Word,
    target: Option<Point>,
    region: Option<Region>,
    moved: bool,
    inverted: bool,
}

impl Lane {
    fn new(role: Role, block: usize, target: Option<(Point, Region)>) -> Lane {
        let (target, region) = match target {
            Some((p, r)) => (Some(p), Some(r)),
            None => (None, None),
        };
        Lane { role, block, committed: Vec::new(), target, region, moved: false, inverted: false }
    }
}

struct Machine<'a> {
    reducer: &'a Reducer,
    plan: &'a Plan,
    g_root: Arc<Node>,
    g_engine: &'a Engine,
    a_rank: Ordinal,
    lanes: Vec<Lane>,
    mu: Option<Ordinal>,
    side: Option<Region>,
    block: Option<usize>,
    changes: Vec<Ordinal>,
    table_bits: Option<usize>,
    decode: Decode,
}

impl Machine<'_> {
    /// A point of `[π]` in region `r` with rank above `nu`, checked.
    fn witness(&self, pi: &[bool], r: Region, nu: &Ordinal) -> Result<Point> {
        let node = crate::derivation::normal::restrict(&self.g_root, pi)?;
        let w = self.g_engine.witness(&node, r, nu)?.ok_or_else(|| {
            Error::Invariant(format!("no oracle point in [{}] of region {r:?} above rank {nu}", word_to_string(pi)))
        })?;
        let b = w.prepend(pi);
        let rank = self.g_engine.point_rank(&self.g_root, &b)?;
        let reg = self.g_engine.region(&self.reducer.g.eval(&b));
        if rank <= *nu || reg != r {
            return Err(Error::Invariant(format!("scaffold point {b} has rank {rank} and region {reg:?}")));
        }
        Ok(b)
    }

    fn move_lane(&mut self, k: usize, r: Region, nu: &Ordinal) -> Result<()> {
        if self.lanes[k].region == Some(r) {
            return Ok(());
        }
        let b = self.witness(&self.lanes[k].committed.clone(), r, nu)?;
        let lane = &mut self.lanes[k];
        lane.target = Some(b);
        lane.region = Some(r);
        lane.moved = true;
        Ok(())
    }

    /// Reacts to a new bound `μ` with the sides allowed by the latest removal.
    fn update(&mut self, mu: Ordinal, sides: Vec<Region>, tau: &[bool]) -> Result<()> {
        if let Some(old) = &self.mu {
            if mu > *old {
                return Err(Error::Invariant(format!("bound rose from {old} to {mu}")));
            }
            if mu == *old && self.side.is_some_and(|s| sides.contains(&s)) {
                return Ok(());
            }
        }
        if self.a_rank > mu.succ() {
            return Err(Error::Invariant(format!("input rank {} exceeds bound {mu}+1", self.a_rank)));
        }
        let first = self.mu.is_none();
        match &self.plan.layout {
            Layout::Single { cover, .. } | Layout::Padded { cover, .. } => {
                let main = self.lanes.iter().position(|l| l.role == Role::Main).expect("main lane");
                let side = if first {
                    let entry = find_entry(cover, tau, &mu)?;
                    self.lanes[main].inverted = entry.inverted;
                    self.table_bits = Some(tau.len());
                    if entry.inverted {
                        self.decode = Decode::Invert;
                    }
                    entry.side
                } else {
                    pick(&sides, self.side)
                };
                let r = if self.lanes[main].inverted { opposite(side) } else { side };
                self.move_lane(main, r, &mu)?;
                self.side = Some(side);
            }
            Layout::Blocks { nu, n, natural, .. } => {
                let (nu, n, natural) = (nu.clone(), *n as usize, *natural);
                let i = (0..n).find(|&i| mu < nu.mul_nat(i as u64 + 1)).ok_or_else(|| {
                    Error::Invariant(format!("bound {mu} lies beyond {n} blocks of {nu}"))
                })?;
                let mu0 = nu.mul_nat(i as u64).sub_left(&mu)?;
                let entering = self.block != Some(i);
                let side = if entering { pick(&sides, Some(natural)) } else { pick(&sides, self.side) };
                for d in i..n {
                    self.move_lane(d, opposite(natural), &Ordinal::zero())?;
                }
                let t = n + i;
                if entering {
                    self.lanes[t].inverted = side != natural;
                    if self.lanes[t].inverted {
                        self.move_lane(2 * n + i, opposite(natural), &Ordinal::zero())?;
                    }
                }
                let r = if self.lanes[t].inverted { opposite(side) } else { side };
                self.move_lane(t, r, &mu0)?;
                self.block = Some(i);
                self.side = Some(side);
            }
        }
        self.changes.push(mu.clone());
        self.mu = Some(mu);
        Ok(())
    }
}

fn find_entry<'c>(cover: &'c [CoverEntry], tau: &[bool], mu: &Ordinal) -> Result<&'c CoverEntry> {
    let sigma = word_to_string(tau);
    cover
        .iter()
        .find(|e| e.sigma == sigma && e.mu == *mu)
        .ok_or_else(|| Error::Invariant("first removal missing from the cover".into()))
}

fn pick(sides: &[Region], prefer: Option<Region>) -> Region {
    match prefer {
        Some(s) if sides.contains(&s) => s,
        _ => sides[0],
    }
}

impl Reducer {
    pub fn run(&self, p: &Rational, eps: &Rational, a: &Point, fuel: usize) -> Result<RunResult> {
        if fuel == 0 {
            return Err(Error::Precondition("fuel must be at least 1".into()));
        }
        let plan = self.plan(p, eps)?;
        let f_engine = self.f_engine(p, eps)?;
        let g = self.g_engine(&plan.q, &plan.delta)?;
        let a_rank = f_engine.point_rank(&self.fs.root, a)?;
        let lanes = match &plan.layout {
            Layout::Single { .. } => vec![Lane::new(Role::Main, 0, None)],
            Layout::Padded { default, .. } => {
                let r = g.1.region(&self.g.eval(default));
                vec![
                    Lane::new(Role::Detector, 0, Some((default.clone(), r))),
                    Lane::new(Role::Main, 0, None),
                    Lane::new(Role::Indicator, 0, Some((default.clone(), r))),
                ]
            }
            Layout::Blocks { n, natural, default, .. } => [Role::Detector, Role::Tracker, Role::Indicator]
                .into_iter()
                .flat_map(|role| (0..*n as usize).map(move |i| (role, i)))
                .map(|(role, i)| Lane::new(role, i, Some((default.clone(), *natural))))
                .collect(),
        };
        let decode = match &plan.layout {
            Layout::Blocks { n, natural, .. } => Decode::Blocks { n: *n as usize, natural_bit: answer_of(*natural) },
            Layout::Padded { default, .. } => {
                let natural_bit = oracle_bit(&self.g.eval(default), &plan.q, &plan.delta);
                Decode::Blocks { n: 1, natural_bit }
            }
            Layout::Single { .. } => Decode::Direct,
        };
        let mut m = Machine {
            reducer: self,
            plan: &plan,
            g_root: g.0.clone(),
            g_engine: &g.1,
            a_rank,
            lanes,
            mu: None,
            side: None,
            block: None,
            changes: Vec::new(),
            table_bits: None,
            decode,
        };
        let mut node = self.fs.root.clone();
        let mut tau: Word = Vec::new();
        let mut steps = 0;
        let mut stabilized = false;
        loop {
            if let Some((mu, sides)) = removal(&f_engine.rho(&node)?) {
                m.update(mu, sides, &tau)?;
            }
            let settled = m.mu.as_ref().is_some_and(|mu| mu.succ() == m.a_rank);
            if settled && m.lanes.iter().all(|l| l.target.is_some()) {
                stabilized = true;
                break;
            }
            if steps == fuel {
                break;
            }
            for lane in &mut m.lanes {
                if let Some(t) = &lane.target {
                    lane.committed.push(t.bit(lane.committed.len()));
                }
            }
            tau.push(a.bit(steps));
            node = child(&node, a.bit(steps))?;
            steps += 1;
        }
        let components: Vec<Component> = m
            .lanes
            .iter()
            .map(|l| Component {
                role: l.role,
                block: l.block,
                q: plan.q.clone(),
                delta: plan.delta.clone(),
                output_prefix: word_to_string(&l.committed),
                point: l.target.clone(),
                bit: l.target.as_ref().map(|b| oracle_bit(&self.g.eval(b), &plan.q, &plan.delta) as u8),
            })
            .collect();
        let mut res = RunResult {
            kind: self.kind,
            pair: PairText { p: p.clone(), eps: eps.clone() },
            input: a.clone(),
            components,
            answer: None,
            stabilized,
            steps,
            mind_changes: m.changes,
            table_bits: m.table_bits,
            decode: m.decode,
        };
        if let Some(bits) = res.components.iter().map(|c| c.bit.map(|b| b == 1)).collect::<Option<Vec<_>>>() {
            let ans = res.answer_for(&bits);
            res.answer = Some(ans as u8);
            if stabilized {
                let side = m.side.expect("settled runs have a side");
                if !answer_correct(&self.f.eval(a), p, eps, answer_of(side)) {
                    return Err(Error::Invariant(format!("side {side:?} is wrong for {} at {a}", self.f)));
                }
            }
        }
        Ok(res)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub runs: usize,
    pub queries: usize,
    pub violations: Vec<String>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs the reducer on every sample and every representative pair of the source and checks every answer.
pub fn verify_reduction(r: &Reducer, samples: &[Point], fuel: usize) -> Report {
    let mut rep = Report::default();
    for (p, eps) in critical_pairs(&r.f) {
        for a in samples {
            rep.runs += 1;
            let tag = format!("{} -> {} at ({p}, {eps}) on {a}", r.f, r.g);
            let res = match r.run(&p, &eps, a, fuel) {
                Ok(res) => res,
                Err(e) => {
                    rep.violations.push(format!("{tag}: {e}"));
                    continue;
                }
            };
            rep.queries += res.components.len();
            if !res.stabilized {
                rep.violations.push(format!("{tag}: no stabilization within {fuel} bits"));
                continue;
            }
            if let Ok(plan) = r.plan(&p, &eps) {
                if res.components.len() != plan.components() {
                    rep.violations.push(format!("{tag}: {} queries, plan has {}", res.components.len(), plan.components()));
                }
            }
            if res.mind_changes.windows(2).any(|w| w[1] >= w[0]) {
                rep.violations.push(format!("{tag}: bounds not strictly decreasing"));
            }
            let y = r.f.eval(a);
            let mut options: Vec<Vec<bool>> = vec![Vec::new()];
            for c in &res.components {
                let b = c.point.as_ref().expect("stabilized");
                let allowed = correct_answers(&r.g.eval(b), &c.q, &c.delta);
                if c.bit.is_some_and(|bit| !allowed.contains(&(bit == 1))) {
                    rep.violations.push(format!("{tag}: oracle bit incorrect at {b}"));
                }
                options = options
                    .into_iter()
                    .flat_map(|o| {
                        allowed.iter().map(move |&x| {
                            let mut o = o.clone();
                            o.push(x);
                            o
                        })
                    })
                    .collect();
            }
            for bits in options {
                if !answer_correct(&y, &p, &eps, res.answer_for(&bits)) {
                    rep.violations.push(format!("{tag}: answer wrong for oracle bits {bits:?}"));
                }
            }
        }
    }
    rep
}
