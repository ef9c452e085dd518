//! `bourgain`: ranks, classifications, reducibility verdicts and reductions from the command line.

use std::process::ExitCode;

use bourgain_cli::{classify_cmd, compare, diagram, rank, reduce, verify, CliResult, Outcome, ReduceArgs, Rel, Suite, FUEL};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bourgain", version, about = "Bourgain ranks and topological reducibilities of Baire class one functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the rank of EXPR and its per-pair profile table.
    Rank {
        expr: String,
        /// Write the brute-force residue stages at a maximal pair as JSON lines.
        #[arg(long)]
        trace: Option<String>,
    },
    /// Print the sidedness class of EXPR.
    Classify { expr: String },
    /// Decide a reducibility between two expressions.
    Compare {
        /// One of m, tt1, tt, T.
        #[arg(long)]
        rel: String,
        f: String,
        g: String,
    },
    /// Synthesize a reduction and run it on an input point.
    Reduce {
        /// One of m, tt1, tt.
        #[arg(long)]
        rel: String,
        f: String,
        g: String,
        /// Input point, e.g. `01~1` for 01 followed by ones.
        #[arg(long)]
        input: String,
        /// A single pair `p,eps`; defaults to every representative pair of F.
        #[arg(long)]
        pair: Option<String>,
        /// Write one JSON run result per line.
        #[arg(long)]
        trace: Option<String>,
        /// Input bits to read before giving up.
        #[arg(long, default_value_t = FUEL)]
        fuel: usize,
    },
    /// Print the many-one degree diagram of the expressions as DOT.
    Diagram {
        #[arg(required = true)]
        exprs: Vec<String>,
    },
    /// Run seeded verification suites.
    Verify {
        /// One of ordinals, derivation, degrees, reductions, all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn dispatch(cmd: Command) -> CliResult<Outcome> {
    match cmd {
        Command::Rank { expr, trace } => rank(&expr, trace.as_deref()),
        Command::Classify { expr } => classify_cmd(&expr),
        Command::Compare { rel, f, g } => compare(Rel::parse(&rel)?, &f, &g),
        Command::Reduce { rel, f, g, input, pair, trace, fuel } => reduce(&ReduceArgs {
            rel: Rel::parse(&rel)?,
            f: &f,
            g: &g,
            input: &input,
            pair: pair.as_deref(),
            trace: trace.as_deref(),
            fuel,
        }),
        Command::Diagram { exprs } => diagram(&exprs),
        Command::Verify { suite, seed } => Ok(verify(Suite::parse(&suite)?, seed)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(o) => {
            print!("{}", o.out);
            ExitCode::from(o.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
