use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use schoolchoice::DEFAULT_SUPPORT_BOUND;
use schoolchoice_cli::{self as cli, GenArgs, SolveArgs, TieBreak, EXIT_INVALID};

#[derive(Parser)]
#[command(
    name = "schoolchoice",
    version,
    about = "Stable, fair school-choice lotteries with exact audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a constrained efficient matching and its equal-treatment lottery.
    Solve {
        instance: PathBuf,
        /// input-order, seed=N, or order=s1,s2,...
        #[arg(long, default_value = "input-order")]
        tie_break: TieBreak,
        /// Write the lottery in support form.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the marginal matrix.
        #[arg(long)]
        marginals_out: Option<PathBuf>,
        /// Largest number of within-group permutations to expand.
        #[arg(long, default_value_t = DEFAULT_SUPPORT_BOUND)]
        support_bound: u64,
    },
    /// Check a lottery for ex ante and ex post stability, equal treatment,
    /// and improvement cycles. Exits 3 when any check fails.
    Audit {
        instance: PathBuf,
        lottery: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Draw matchings from the equal-treatment reassignment of a lottery.
    Sample {
        instance: PathBuf,
        lottery: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Compare two lotteries student by student.
    Compare {
        instance: PathBuf,
        a: PathBuf,
        b: PathBuf,
    },
    /// Print a random instance.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        students: usize,
        #[arg(long, default_value_t = 3)]
        schools: usize,
        #[arg(long, default_value_t = 0.5)]
        tie_density: f64,
        /// Draw preferences from this many shared orders.
        #[arg(long)]
        pref_pool: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Solve {
            instance,
            tie_break,
            out: lottery_out,
            marginals_out,
            support_bound,
        } => cli::cmd_solve(
            &SolveArgs {
                instance,
                tie_break,
                out: lottery_out,
                marginals_out,
                support_bound,
            },
            &mut out,
        ),
        Command::Audit {
            instance,
            lottery,
            json,
        } => cli::cmd_audit(&instance, &lottery, json, &mut out),
        Command::Sample {
            instance,
            lottery,
            seed,
            count,
        } => cli::cmd_sample(&instance, &lottery, seed, count, &mut out),
        Command::Compare { instance, a, b } => cli::cmd_compare(&instance, &a, &b, &mut out),
        Command::Gen {
            seed,
            students,
            schools,
            tie_density,
            pref_pool,
        } => cli::cmd_gen(
            &GenArgs {
                seed,
                students,
                schools,
                tie_density,
                preference_pool: pref_pool,
            },
            &mut out,
        ),
    };
    let _ = out.flush();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
