//! Quantum bound of the CHSH Bell expression.
//!
//! Alice measures A1, A2 and Bob B1, B2; all are +-1 observables and
//! Alice's commute with Bob's. The first level already gives -2 sqrt 2.

use std::error::Error;

use ncrelax::solver::solve_relaxation;
use ncrelax::{parse_problem, SolverOptions};

const PROBLEM: &str = "\
vars A1 A2 B1 B2 hermitian
objective -A1*B1 - A1*B2 - A2*B1 + A2*B2
sub A1^2 -> 1
sub A2^2 -> 1
sub B1^2 -> 1
sub B2^2 -> 1
sub B1*A1 -> A1*B1
sub B1*A2 -> A2*B1
sub B2*A1 -> A1*B2
sub B2*A2 -> A2*B2
order 1
";

pub fn run() -> Result<f64, Box<dyn Error>> {
    let rel = parse_problem(PROBLEM)?.relax()?;
    println!(
        "{} moment variables, blocks {:?}",
        rel.nvars,
        rel.block_sizes()
    );
    let sol = solve_relaxation(&rel, &SolverOptions::default())?;
    println!(
        "CHSH minimum {:.8} (classical -2, Tsirelson {:.8})",
        sol.primal,
        -2.0 * 2f64.sqrt()
    );
    Ok(sol.primal)
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
