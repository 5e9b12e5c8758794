use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ncrelax::bench::BenchMode;
use ncrelax::cli::{self, Settings};

#[derive(Parser)]
#[command(
    name = "ncrelax",
    version,
    about = "SDP relaxations of noncommutative polynomial optimization problems"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the relaxation of a problem file in sparse SDPA format.
    Generate {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve a problem file (or a .dat-s file) and print (primal, dual).
    Solve { input: PathBuf },
    /// Print relaxation statistics.
    Info { input: PathBuf },
    /// Generate the commuting +-1 benchmark and print CSV counts.
    Bench {
        #[arg(short)]
        n: usize,
        #[arg(long, default_value = "subs")]
        mode: BenchMode,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long)]
        all_subs: bool,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut stderr = io::stderr();
    let settings = match Settings::from_env() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(cli::EXIT_INPUT as u8);
        }
    };
    let mut stdout = io::stdout().lock();
    let code = match args.command {
        Command::Generate { input, output } => {
            cli::cmd_generate(&input, &output, &settings, &mut stdout, &mut stderr)
        }
        Command::Solve { input } => cli::cmd_solve(&input, &settings, &mut stdout, &mut stderr),
        Command::Info { input } => cli::cmd_info(&input, &settings, &mut stdout, &mut stderr),
        Command::Bench {
            n,
            mode,
            order,
            all_subs,
        } => cli::cmd_bench(
            n,
            mode,
            order,
            all_subs,
            &settings,
            &mut stdout,
            &mut stderr,
        ),
    };
    ExitCode::from(code as u8)
}
