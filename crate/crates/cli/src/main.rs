//! `invlim`: build the constructions from JSON input, run their property
//! suites and print a report.
//!
//! Exit codes: 0 when every check passes, 1 when one fails, 2 on bad usage
//! or bad input.

mod input;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use invlim_core::arith::parse_integer;
use invlim_core::Integer;

#[derive(Parser, Debug)]
#[command(name = "invlim", version, about = "Exact inverse-limit constructions and their checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Root of every random choice.
    #[arg(long, global = true, env = "INVLIM_SEED", default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = 100)]
    pub samples: usize,

    #[arg(long, global = true, default_value_t = 4)]
    pub stages: usize,

    /// Largest index in the subsets `D` tried exhaustively.
    #[arg(long = "max-d", global = true, default_value_t = 4)]
    pub max_d: u64,

    #[arg(long, global = true, default_value_t = 3)]
    pub k: usize,

    #[arg(long, global = true, value_delimiter = ',', value_parser = prime_arg, default_value = "2,3,5")]
    pub primes: Vec<Integer>,

    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    pub output: Output,

    /// Input document: a path, or `-` for stdin.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Text,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Smith normal form of an integer matrix.
    Snf,
    /// Divisible hull presentation `0 → A → M → N` of a presented group.
    Hull,
    /// Submodules `P_D` whose intersection is `A`.
    Thm1,
    /// Fiber-sum systems over chains of set surjections (random chains
    /// unless `--input` gives one).
    Zerolim,
    /// Stages with surjective connecting maps and limit `A`.
    Thm2,
    /// Factor `1 ↦ x` through an inverse chain of divisible groups.
    Ladder,
    /// Divisibility certificates through the chain `(p_1…p_i)^-i ℤ`.
    Bigdiv,
    /// Division of eventually constant sequences by `--k`.
    Ex6,
    /// Every suite at acceptance size.
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Snf => "snf",
            Command::Hull => "hull",
            Command::Thm1 => "thm1",
            Command::Zerolim => "zerolim",
            Command::Thm2 => "thm2",
            Command::Ladder => "ladder",
            Command::Bigdiv => "bigdiv",
            Command::Ex6 => "ex6",
            Command::Selftest => "selftest",
        }
    }
}

fn prime_arg(s: &str) -> Result<Integer, String> {
    let p = parse_integer(s.trim()).map_err(|e| e.to_string())?;
    if !invlim_core::arith::is_prime(&p) {
        return Err(format!("{p} is not prime"));
    }
    Ok(p)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut report = match run::run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("invlim {}: {e}", cli.command.name());
            return ExitCode::from(2);
        }
    };
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    let text = match cli.output {
        Output::Json => report.to_json_line() + "\n",
        Output::Text => report.to_text(),
    };
    // A closed pipe is not an error of ours.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    ExitCode::from(report.exit_code() as u8)
}
