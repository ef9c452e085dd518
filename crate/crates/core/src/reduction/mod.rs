//! Executable reductions: query semantics, oracles, and stagewise transducers for `≤_m`, `≤_tt1`, `≤_tt`.
//!
//! All three reducers share one engine. The input `A` is read bit by bit; the
//! source's summary on the current cylinder yields the running bound `μ` with
//! `|A| ≤ μ+1` and the side whose set must contain `A` if the bound is attained.
//! Each output lane holds a target point `B` of the oracle function that lies
//! in an outer region of `(q, δ)`, commits one bit of `B` per stage, and moves
//! `B` only inside the committed cylinder, to a scaffold witness of the
//! opposite region with enough rank left for the remaining mind changes.

pub mod names;
pub mod oracles;
mod run;

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::degrees::{m_clause, t_holds, tt1_holds, tt_holds, Facts};
use crate::derivation::engine::{Engine, Region, Rho};
use crate::derivation::normal::{restrict, Node};
use crate::derivation::Symbolic;
use crate::error::{Error, Result};
use crate::funcalc::{critical_pairs, pairs_for_values, word_to_string, FuncExpr, Point, Word, FAMILY_RESOLUTION};
use crate::ordinal::Ordinal;
use crate::rational::Rational;

pub use names::{answer_correct, sepname_bit, sepname_bits, sepname_decode};
pub use oracles::{MindChangeOracle, ScaffoldOracle, Triple};
pub use run::{verify_reduction, Component, Report, RunResult};

use oracles::{opposite, removal};

pub const DEFAULT_FUEL: usize = 256;
/// Resolution levels tried when looking for oracle pairs of infinite-range functions.
const MAX_LEVEL: u32 = 5;
/// Largest block count tried by truth-table plans.
const MAX_BLOCKS: u64 = 64;
const COVER_DEPTH: usize = 48;
const COVER_NODES: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    M,
    Tt1,
    Tt,
}

impl Kind {
    pub fn parse(s: &str) -> Option<Kind> {
        match s {
            "m" => Some(Kind::M),
            "tt1" => Some(Kind::Tt1),
            "tt" => Some(Kind::Tt),
            _ => None,
        }
    }
}

/// The region whose only correct answer is `bit`.
pub fn region_for_answer(bit: bool) -> Region {
    if bit {
        Region::Low
    } else {
        Region::High
    }
}

/// The only correct answer in an outer region.
pub fn answer_of(r: Region) -> bool {
    r == Region::Low
}

/// A first removal: the cylinder where the input's bound first becomes known.
#[derive(Clone, Debug, Serialize)]
pub struct CoverEntry {
    pub sigma: String,
    pub mu: Ordinal,
    pub side: Region,
    pub inverted: bool,
}

#[derive(Clone, Debug)]
pub enum Layout {
    /// One query; `allow_inverted` is the one-query truth-table relaxation.
    Single { allow_inverted: bool, cover: Vec<CoverEntry>, depth: usize },
    /// `3n` queries: detectors, trackers, indicators over blocks of width `nu`.
    Blocks { nu: Ordinal, n: u64, natural: Region, default: Point },
    /// Continuous oracle function: a single-query plan padded to three queries.
    Padded { default: Point, cover: Vec<CoverEntry> },
}

#[derive(Clone, Debug)]
pub struct Plan {
    pub q: Rational,
    pub delta: Rational,
    pub f_alpha: Ordinal,
    pub g_rho: Rho,
    pub layout: Layout,
}

impl Plan {
    pub fn components(&self) -> usize {
        match &self.layout {
            Layout::Single { .. } => 1,
            Layout::Blocks { n, .. } => 3 * *n as usize,
            Layout::Padded { .. } => 3,
        }
    }
}

struct Candidate {
    q: Rational,
    delta: Rational,
    rho: Rho,
}

/// A target engine together with the normal form it evaluates.
type GEngine = Rc<(Arc<Node>, Engine)>;

/// A synthesized reduction of `f` to `g`.
pub struct Reducer {
    pub kind: Kind,
    pub f: FuncExpr,
    pub g: FuncExpr,
    fs: Symbolic,
    gs: Symbolic,
    g_facts: Facts,
    plans: RefCell<BTreeMap<(Rational, Rational), Rc<Plan>>>,
    candidates: RefCell<Vec<Vec<Rc<Candidate>>>>,
    f_engines: RefCell<BTreeMap<(Rational, Rational), Rc<Engine>>>,
    g_engines: RefCell<BTreeMap<(Rational, Rational), GEngine>>,
}

pub fn synth_m(f: &FuncExpr, g: &FuncExpr) -> Result<Reducer> {
    Reducer::synth(Kind::M, f, g)
}

pub fn synth_tt1(f: &FuncExpr, g: &FuncExpr) -> Result<Reducer> {
    Reducer::synth(Kind::Tt1, f, g)
}

pub fn synth_tt(f: &FuncExpr, g: &FuncExpr) -> Result<Reducer> {
    Reducer::synth(Kind::Tt, f, g)
}

pub fn synth(kind: Kind, f: &FuncExpr, g: &FuncExpr) -> Result<Reducer> {
    Reducer::synth(kind, f, g)
}

pub fn run_reducer(r: &Reducer, p: &Rational, eps: &Rational, a: &Point, fuel: usize) -> Result<RunResult> {
    r.run(p, eps, a, fuel)
}

impl Reducer {
    fn synth(kind: Kind, f: &FuncExpr, g: &FuncExpr) -> Result<Reducer> {
        let (ff, gf) = (Facts::of(f)?, Facts::of(g)?);
        let holds = match kind {
            Kind::M => m_clause(&ff, &gf).holds(),
            Kind::Tt1 => tt1_holds(&ff, &gf),
            Kind::Tt => tt_holds(&ff, &gf) && t_holds(&ff, &gf),
        };
        if !holds {
            return Err(Error::NotReducible(format!("{f} is not {kind:?}-reducible to {g}")));
        }
        let r = Reducer {
            kind,
            f: f.clone(),
            g: g.clone(),
            fs: Symbolic::new(f)?,
            gs: Symbolic::new(g)?,
            g_facts: gf,
            plans: RefCell::new(BTreeMap::new()),
            candidates: RefCell::new(Vec::new()),
            f_engines: RefCell::new(BTreeMap::new()),
            g_engines: RefCell::new(BTreeMap::new()),
        };
        for (p, e) in critical_pairs(f) {
            r.plan(&p, &e)?;
        }
        Ok(r)
    }

    fn f_engine(&self, p: &Rational, eps: &Rational) -> Result<Rc<Engine>> {
        let key = (p.clone(), eps.clone());
        if let Some(e) = self.f_engines.borrow().get(&key) {
            return Ok(e.clone());
        }
        let e = Rc::new(self.fs.engine(p, eps)?);
        self.f_engines.borrow_mut().insert(key, e.clone());
        Ok(e)
    }

    fn g_engine(&self, q: &Rational, delta: &Rational) -> Result<GEngine> {
        let key = (q.clone(), delta.clone());
        if let Some(e) = self.g_engines.borrow().get(&key) {
            return Ok(e.clone());
        }
        let e = Rc::new((self.gs.root.clone(), self.gs.engine(q, delta)?));
        self.g_engines.borrow_mut().insert(key, e.clone());
        Ok(e)
    }

    /// Oracle pairs at a resolution level: representative pairs, plus two pairs
    /// putting the whole range in the low and in the high region.
    fn candidates(&self, level: u32) -> Result<Vec<Rc<Candidate>>> {
        while self.candidates.borrow().len() <= level as usize {
            let lvl = self.candidates.borrow().len() as u32;
            let vals: Vec<Rational> = self.g.range_of().truncated(FAMILY_RESOLUTION << lvl).into_iter().collect();
            let mut pairs = pairs_for_values(&vals);
            if lvl == 0 {
                let half = Rational::new(1, 2);
                let (lo, hi) = (vals.first().expect("nonempty range"), vals.last().expect("nonempty range"));
                pairs.push((hi + &Rational::one(), half.clone()));
                pairs.push((lo - &Rational::one(), half));
            }
            let mut out = Vec::new();
            for (q, d) in pairs {
                let rho = self.gs.engine(&q, &d)?.rho(&self.gs.root)?;
                out.push(Rc::new(Candidate { q, delta: d, rho }));
            }
            self.candidates.borrow_mut().push(out);
        }
        Ok(self.candidates.borrow()[level as usize].clone())
    }

    /// The first removals along every branch of the source at `(p, ε)`.
    fn cover(&self, engine: &Engine) -> Result<Vec<(Word, Ordinal, Vec<Region>)>> {
        let mut out = Vec::new();
        let mut stack: Vec<(Word, Arc<Node>)> = vec![(Vec::new(), self.fs.root.clone())];
        let mut visited = 0;
        while let Some((sigma, node)) = stack.pop() {
            visited += 1;
            if visited > COVER_NODES || sigma.len() > COVER_DEPTH {
                return Err(Error::Unsupported(format!("first removals of {} are too deep to tabulate", self.f)));
            }
            if let Some((mu, sides)) = removal(&engine.rho(&node)?) {
                out.push((sigma, mu, sides));
                continue;
            }
            for bit in [true, false] {
                let mut s = sigma.clone();
                s.push(bit);
                stack.push((s, restrict(&node, &[bit])?));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    pub fn plan(&self, p: &Rational, eps: &Rational) -> Result<Rc<Plan>> {
        let key = (p.clone(), eps.clone());
        if let Some(pl) = self.plans.borrow().get(&key) {
            return Ok(pl.clone());
        }
        let engine = self.f_engine(p, eps)?;
        let f_alpha = engine.rho(&self.fs.root)?.alpha();
        let pl = match self.kind {
            Kind::M => self.single_plan(&engine, f_alpha, false)?,
            Kind::Tt1 => self.single_plan(&engine, f_alpha, true)?,
            Kind::Tt => self.block_plan(&engine, f_alpha)?,
        };
        let pl = Rc::new(pl);
        self.plans.borrow_mut().insert(key, pl.clone());
        Ok(pl)
    }

    fn single_plan(&self, engine: &Engine, f_alpha: Ordinal, allow_inverted: bool) -> Result<Plan> {
        let cover = self.cover(engine)?;
        let depth = cover.iter().map(|c| c.0.len()).max().unwrap_or(0);
        let mut best: Option<(usize, Rc<Candidate>, Vec<CoverEntry>)> = None;
        for level in 0..=MAX_LEVEL {
            for c in self.candidates(level)? {
                let entries: Option<Vec<CoverEntry>> = cover
                    .iter()
                    .map(|(s, mu, sides)| {
                        choose_mode(sides, mu, &c.rho, allow_inverted).map(|(side, inverted)| CoverEntry {
                            sigma: word_to_string(s),
                            mu: mu.clone(),
                            side,
                            inverted,
                        })
                    })
                    .collect();
                if let Some(entries) = entries {
                    let inv = entries.iter().filter(|e| e.inverted).count();
                    if best.as_ref().is_none_or(|b| inv < b.0) {
                        best = Some((inv, c.clone(), entries));
                    }
                }
            }
            if best.is_some() {
                break;
            }
        }
        let (_, c, cover) = best.ok_or_else(|| {
            Error::Invariant(format!("no oracle pair serves {} against {}", self.f, self.g))
        })?;
        Ok(Plan {
            q: c.q.clone(),
            delta: c.delta.clone(),
            f_alpha,
            g_rho: c.rho.clone(),
            layout: Layout::Single { allow_inverted, cover, depth },
        })
    }

    fn block_plan(&self, engine: &Engine, f_alpha: Ordinal) -> Result<Plan> {
        if self.g_facts.rank == Ordinal::one() {
            let single = self.single_plan(engine, f_alpha, false)?;
            let Layout::Single { cover, .. } = single.layout else { unreachable!() };
            let (_, ge) = &*self.g_engine(&single.q, &single.delta)?;
            let r = Region::ALL.into_iter().find(|&r| r != Region::Mid && *single.g_rho.get(r) >= Ordinal::one());
            let r = r.ok_or_else(|| Error::Invariant("oracle pair has no outer region".into()))?;
            let default = ge
                .witness(&self.gs.root, r, &Ordinal::zero())?
                .ok_or_else(|| Error::Invariant("summary promised a witness".into()))?;
            return Ok(Plan { layout: Layout::Padded { default, cover }, ..single });
        }
        let mut best: Option<(u64, Rc<Candidate>, Region)> = None;
        for level in 0..=MAX_LEVEL {
            for c in self.candidates(level)? {
                let nu = c.rho.alpha();
                if nu < Ordinal::nat(2) {
                    continue;
                }
                let Some(natural) = [Region::Low, Region::High].into_iter().find(|&r| *c.rho.get(r) == nu) else {
                    continue;
                };
                let Some(n) = (1..=MAX_BLOCKS).find(|&n| f_alpha < nu.mul_nat(n)) else { continue };
                if best.as_ref().is_none_or(|b| n < b.0) {
                    best = Some((n, c.clone(), natural));
                }
            }
            if best.is_some() {
                break;
            }
        }
        let (n, c, natural) =
            best.ok_or_else(|| Error::Invariant(format!("no oracle pair bounds {} by {}", self.f, self.g)))?;
        let nu = c.rho.alpha();
        let (_, ge) = &*self.g_engine(&c.q, &c.delta)?;
        let below = nu.pred()?;
        let default = ge
            .witness(&self.gs.root, natural, &below)?
            .ok_or_else(|| Error::Invariant("summary promised a witness".into()))?;
        Ok(Plan {
            q: c.q.clone(),
            delta: c.delta.clone(),
            f_alpha,
            g_rho: c.rho.clone(),
            layout: Layout::Blocks { nu, n, natural, default },
        })
    }
}

/// Picks the side to follow at a first removal and whether the oracle bit must be inverted.
///
/// Normal mode needs an oracle point of the side's own region with rank above `μ`;
/// inverted mode uses the opposite region and flips the answer.
fn choose_mode(sides: &[Region], mu: &Ordinal, g: &Rho, allow_inverted: bool) -> Option<(Region, bool)> {
    if let Some(&s) = sides.iter().find(|&&s| g.get(s) > mu) {
        return Some((s, false));
    }
    if allow_inverted {
        if let Some(&s) = sides.iter().find(|&&s| g.get(opposite(s)) > mu) {
            return Some((s, true));
        }
    }
    None
}

#[cfg(test)]
mod tests;
