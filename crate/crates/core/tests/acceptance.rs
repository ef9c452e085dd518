//! The ten acceptance criteria, each with its time budget. Prints one pass/fail line per criterion.

use std::time::{Duration, Instant};

use bourgain::checks::{self, Check};
use bourgain::reduction::Kind;

const SEED: u64 = 1;

struct Outcome {
    id: usize,
    title: &'static str,
    pass: bool,
    line: String,
}

fn criterion(id: usize, title: &'static str, budget: Duration, run: impl FnOnce() -> Vec<Check>) -> Outcome {
    let start = Instant::now();
    let checks = run();
    let took = start.elapsed();
    let cases: usize = checks.iter().map(|c| c.cases).sum();
    let failures: Vec<&String> = checks.iter().flat_map(|c| &c.failures).collect();
    let pass = failures.is_empty() && took <= budget;
    let mut line = format!(
        "criterion {id:>2} {}: {title}: {cases} cases, {} failures, {:.2}s (budget {}s)",
        if pass { "PASS" } else { "FAIL" },
        failures.len(),
        took.as_secs_f64(),
        budget.as_secs()
    );
    for f in failures.iter().take(5) {
        line.push_str(&format!("\n      {f}"));
    }
    Outcome { id, title, pass, line }
}

fn main() {
    let s = Duration::from_secs;
    let outcomes = vec![
        criterion(1, "rank-2 many-one diagram", s(1), || vec![checks::fig2_diagram()]),
        criterion(2, "sidedness diamonds", s(5), || vec![checks::diamonds()]),
        criterion(3, "symbolic vs brute derivation", s(30), || vec![checks::oracle_agreement(SEED, 200, 6)]),
        criterion(4, "truth-table decisions vs ranks", s(10), || vec![checks::tt_consistency(SEED)]),
        criterion(5, "reducer soundness", s(120), || {
            [Kind::M, Kind::Tt1, Kind::Tt].map(|k| checks::executor(k, SEED, 100, 20)).to_vec()
        }),
        criterion(6, "many-one dichotomy", s(60), || vec![checks::dichotomy(SEED, 5000)]),
        criterion(7, "joint derivation inclusion", s(60), || vec![checks::l1_inclusion(SEED, 100, 8)]),
        criterion(8, "sum and product ranks", s(60), || vec![checks::sum_prod(SEED, 50)]),
        criterion(9, "ordinal algebra", s(30), || vec![checks::ordinal_algebra(SEED, 10_000)]),
        criterion(10, "lower semicontinuity coherence", s(10), || vec![checks::p9_coherence(SEED)]),
    ];
    for o in &outcomes {
        println!("{}", o.line);
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.pass).map(|o| format!("{} ({})", o.id, o.title)).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {}", failed.join(", "));
        std::process::exit(1);
    }
    println!("acceptance: all {} criteria passed", outcomes.len());
}
