//! Command implementations behind the `bourgain` binary.
//!
//! Every command returns its stdout text and exit code so it can be tested without a process.

pub mod parse;

use std::fmt::Write as _;
use std::fs;

use bourgain::checks::{self, Check};
use bourgain::degrees::{decide_m, degree_diagram, is_lsc, is_usc, m_clause, t_holds, tt1_holds, tt_holds, Facts};
use bourgain::derivation::{brute_derive, classify, derive_profile, maximal_pairs, Coloring};
use bourgain::derivation::brute::default_depth;
use bourgain::funcalc::critical_pairs;
use bourgain::reduction::{run_reducer, synth, Kind, RunResult, DEFAULT_FUEL};
use bourgain::{Error, FuncExpr, Point, Rational};

pub use parse::{parse_expr, parse_pair, parse_point};

/// Errors that end a command with exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Text for stdout and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub out: String,
    pub code: i32,
}

impl Outcome {
    fn ok(out: String) -> Outcome {
        Outcome { out, code: 0 }
    }

    fn verdict(out: String, holds: bool) -> Outcome {
        Outcome { out, code: if holds { 0 } else { 1 } }
    }
}

/// The relations `compare` decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    M,
    Tt1,
    Tt,
    T,
}

impl Rel {
    pub fn parse(s: &str) -> CliResult<Rel> {
        match s {
            "m" => Ok(Rel::M),
            "tt1" => Ok(Rel::Tt1),
            "tt" => Ok(Rel::Tt),
            "T" | "t" => Ok(Rel::T),
            _ => Err(CliError::Usage(format!("unknown relation '{s}' (expected m, tt1, tt or T)"))),
        }
    }

    fn kind(self) -> CliResult<Kind> {
        match self {
            Rel::M => Ok(Kind::M),
            Rel::Tt1 => Ok(Kind::Tt1),
            Rel::Tt => Ok(Kind::Tt),
            Rel::T => Err(CliError::Usage("reductions are synthesized for m, tt1 and tt only".into())),
        }
    }
}

/// `rank EXPR`: the rank, then one row per representative pair.
pub fn rank(expr: &str, trace: Option<&str>) -> CliResult<Outcome> {
    let f = parse_expr(expr)?;
    let facts = Facts::of(&f)?;
    let mut out = format!("{}\n", facts.rank);
    let _ = writeln!(out, "p\teps\talpha\tmu_low\tmu_high\tlast");
    for (p, e) in critical_pairs(&f) {
        let pr = derive_profile(&f, &p, &e)?;
        let last: Vec<String> = pr.last_sides.iter().map(|r| format!("{r:?}").to_lowercase()).collect();
        let _ = writeln!(out, "{p}\t{e}\t{}\t{}\t{}\t{}", pr.alpha, pr.mu_low, pr.mu_high, last.join(","));
    }
    if let Some(path) = trace {
        if !f.is_stack_free() {
            return Err(Error::Unsupported("residue traces need a stack-free expression".into()).into());
        }
        let lines = match maximal_pairs(&f)?.first() {
            Some((p, e)) => brute_derive(&f, &Coloring::new(p, e)?, default_depth(&f)).to_json_lines(),
            None => String::new(),
        };
        fs::write(path, lines + "\n")?;
    }
    Ok(Outcome::ok(out))
}

/// `classify EXPR`: the sidedness class, then rank and semicontinuity.
pub fn classify_cmd(expr: &str) -> CliResult<Outcome> {
    let f = parse_expr(expr)?;
    let side = classify(&f)?;
    let facts = Facts::of(&f)?;
    let mut out = format!("{side}\nrank: {}\nconstant: {}\n", facts.rank, facts.constant);
    for (name, v) in [("lsc", is_lsc(&f)), ("usc", is_usc(&f))] {
        let shown = v.map_or_else(|e| format!("unknown ({e})"), |b| b.to_string());
        let _ = writeln!(out, "{name}: {shown}");
    }
    Ok(Outcome::ok(out))
}

fn describe(f: &FuncExpr, x: &Facts) -> String {
    format!("{f}: rank {}, side {}{}", x.rank, x.side, if x.constant { ", constant" } else { "" })
}

/// `compare --rel REL F G`: the verdict and the facts it rests on.
pub fn compare(rel: Rel, f: &str, g: &str) -> CliResult<Outcome> {
    let (f, g) = (parse_expr(f)?, parse_expr(g)?);
    let (a, b) = (Facts::of(&f)?, Facts::of(&g)?);
    let (holds, reason) = match rel {
        Rel::M => {
            let c = m_clause(&a, &b);
            debug_assert_eq!(decide_m(&f, &g).ok().map(|x| x.1), Some(c));
            (c.holds(), c.describe().to_string())
        }
        Rel::Tt1 => (tt1_holds(&a, &b), format!("rank {} {} rank {}", a.rank, if a.rank <= b.rank { "≤" } else { ">" }, b.rank)),
        Rel::Tt => {
            let reason = if a.continuous() || b.continuous() {
                "continuity rule".to_string()
            } else {
                format!("xi levels {} and {}", a.rank.xi_level()?, b.rank.xi_level()?)
            };
            (tt_holds(&a, &b), reason)
        }
        Rel::T => (t_holds(&a, &b), "continuity of f and g".to_string()),
    };
    let out = format!(
        "{}\nreason: {reason}\nf = {}\ng = {}\n",
        if holds { "reducible" } else { "not reducible" },
        describe(&f, &a),
        describe(&g, &b)
    );
    Ok(Outcome::verdict(out, holds))
}

/// Options for `reduce`.
pub struct ReduceArgs<'a> {
    pub rel: Rel,
    pub f: &'a str,
    pub g: &'a str,
    pub input: &'a str,
    pub pair: Option<&'a str>,
    pub trace: Option<&'a str>,
    pub fuel: usize,
}

/// `reduce`: synthesizes the reduction and runs it on one input at one or all pairs.
pub fn reduce(args: &ReduceArgs) -> CliResult<Outcome> {
    let kind = args.rel.kind()?;
    let (f, g) = (parse_expr(args.f)?, parse_expr(args.g)?);
    let a: Point = parse_point(args.input)?;
    let red = match synth(kind, &f, &g) {
        Ok(r) => r,
        Err(Error::NotReducible(why)) => return Ok(Outcome::verdict(format!("not reducible: {why}\n"), false)),
        Err(e) => return Err(e.into()),
    };
    let pairs: Vec<(Rational, Rational)> = match args.pair {
        Some(text) => vec![parse_pair(text)?],
        None => critical_pairs(&f),
    };
    let mut out = String::new();
    let mut runs = Vec::new();
    let mut all_stable = true;
    for (p, e) in pairs {
        let res = run_reducer(&red, &p, &e, &a, args.fuel)?;
        all_stable &= res.stabilized;
        let answer = res.answer.map_or("none".to_string(), |b| b.to_string());
        let _ = writeln!(
            out,
            "({p}, {e}): answer {answer}, {} queries, {} mind changes, {}",
            res.components.len(),
            res.mind_changes.len(),
            if res.stabilized { "stabilized" } else { "not stabilized" }
        );
        for c in &res.components {
            let point = c.point.as_ref().map_or("-".to_string(), Point::to_string);
            let bit = c.bit.map_or("-".to_string(), |b| b.to_string());
            let role = format!("{:?}", c.role).to_lowercase();
            let _ = writeln!(out, "  {role} {}: ({}, {}) at {point} -> {bit}", c.block, c.q, c.delta);
        }
        runs.push(res);
    }
    if let Some(path) = args.trace {
        fs::write(path, trace_lines(&runs)?)?;
    }
    if !all_stable {
        return Err(CliError::Usage(format!("{out}some runs did not stabilize within {} input bits", args.fuel)));
    }
    Ok(Outcome::ok(out))
}

/// One JSON object per run.
pub fn trace_lines(runs: &[RunResult]) -> CliResult<String> {
    let mut s = String::new();
    for r in runs {
        s.push_str(&serde_json::to_string(r).map_err(|e| CliError::Usage(e.to_string()))?);
        s.push('\n');
    }
    Ok(s)
}

pub fn read_trace(text: &str) -> CliResult<Vec<RunResult>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| CliError::Usage(format!("bad trace line: {e}"))))
        .collect()
}

/// `diagram EXPR...`: DOT text of the many-one degrees.
pub fn diagram(exprs: &[String]) -> CliResult<Outcome> {
    let fs: Vec<FuncExpr> = exprs.iter().map(|e| parse_expr(e)).collect::<Result<_, _>>()?;
    Ok(Outcome::ok(degree_diagram(&fs)?.to_dot()))
}

/// Suites run by `verify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Ordinals,
    Derivation,
    Degrees,
    Reductions,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> CliResult<Suite> {
        match s {
            "ordinals" => Ok(Suite::Ordinals),
            "derivation" => Ok(Suite::Derivation),
            "degrees" => Ok(Suite::Degrees),
            "reductions" => Ok(Suite::Reductions),
            "all" => Ok(Suite::All),
            _ => Err(CliError::Usage(format!("unknown suite '{s}'"))),
        }
    }
}

fn suite_checks(suite: Suite, seed: u64) -> Vec<Check> {
    match suite {
        Suite::Ordinals => vec![checks::ordinal_algebra(seed, 2000)],
        Suite::Derivation => vec![
            checks::oracle_agreement(seed, 100, 6),
            checks::l1_inclusion(seed, 50, 8),
            checks::sum_prod(seed, 25),
        ],
        Suite::Degrees => vec![
            checks::fig2_diagram(),
            checks::diamonds(),
            checks::tt_consistency(seed),
            checks::dichotomy(seed, 2000),
            checks::p9_coherence(seed),
        ],
        Suite::Reductions => [Kind::M, Kind::Tt1, Kind::Tt].map(|k| checks::executor(k, seed, 30, 10)).to_vec(),
        Suite::All => [Suite::Ordinals, Suite::Derivation, Suite::Degrees, Suite::Reductions]
            .into_iter()
            .flat_map(|s| suite_checks(s, seed))
            .collect(),
    }
}

/// `verify`: runs seeded suites, one line per check.
pub fn verify(suite: Suite, seed: u64) -> Outcome {
    let mut out = String::new();
    let mut ok = true;
    for c in suite_checks(suite, seed) {
        ok &= c.ok();
        let status = if c.ok() { "ok".to_string() } else { format!("FAILED ({} failures)", c.failures.len()) };
        let _ = writeln!(out, "{}: {} cases, {status}", c.name, c.cases);
        for f in c.failures.iter().take(5) {
            let _ = writeln!(out, "  {f}");
        }
    }
    Outcome::verdict(out, ok)
}

pub const FUEL: usize = DEFAULT_FUEL;
