//! `gms`: verify, classify, solve and search finite generalized metric spaces.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "gms", version, about = "Finite generalized metric spaces: axiom checks and certified fixed points")]
struct Cli {
    /// Relative tolerance for axiom comparisons
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Maximum number of violation witnesses per report
    #[arg(long, global = true, default_value_t = 10)]
    report_cap: usize,
    /// One key=value record per line
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a space file against its declared (or an overriding) profile
    Verify(VerifyArgs),
    /// Class memberships, minimal coefficients and minimal orders
    Classify(ClassifyArgs),
    /// Check a theorem's hypotheses, iterate and certify the fixed point
    Solve(SolveArgs),
    /// Seeded search for separating instances
    Search(SearchArgs),
    /// Built-in worked examples
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
}

#[derive(Args)]
struct VerifyArgs {
    space: PathBuf,
    /// Override the declared kind
    #[arg(long)]
    kind: Option<String>,
    /// Override the declared order
    #[arg(long)]
    v: Option<usize>,
    /// Override the declared coefficient with a constant
    #[arg(long)]
    s: Option<f64>,
    /// Override the chain regime
    #[arg(long)]
    distinct: Option<bool>,
}

#[derive(Args)]
struct ClassifyArgs {
    space: PathBuf,
    #[arg(long, default_value_t = 6)]
    max_v: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,4")]
    s_grid: Vec<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoMap {
    Affine,
}

#[derive(Clone, Copy, ValueEnum)]
enum LemmaMode {
    Printed,
    Corrected,
}

#[derive(Args)]
struct SolveArgs {
    /// Space file followed by a map file (omit both with --demo)
    files: Vec<PathBuf>,
    #[arg(long)]
    demo: Option<DemoMap>,
    #[arg(long, default_value_t = 0.5)]
    a: f64,
    #[arg(long, default_value_t = 0.0)]
    b: f64,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, default_values_t = [0.0, 1.0])]
    interval: Vec<f64>,
    #[arg(long)]
    theorem: String,
    /// Start point: an index for finite spaces, a real for demo maps
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<String>,
    /// Residual tolerance
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    #[arg(long)]
    psi: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Contraction constant (estimated when omitted)
    #[arg(long)]
    lambda: Option<f64>,
    /// Correction-term exponents of the orbit distance bound
    #[arg(long, value_enum, default_value = "printed")]
    lemma_a2_mode: LemmaMode,
    /// Run even when the hypotheses are rejected
    #[arg(long = "override")]
    allow_override: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    v: usize,
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the witness space file here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Demo {
    /// The twelve-point b_v(θ) example with θ(u,w) = 3+u+w
    PaperExample {
        #[arg(long = "N", default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        v: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { commands::EXIT_USAGE } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::EXIT_USAGE)
        }
    }
}
