//! Relax and solve a small projector problem end to end.
//!
//! ```text
//! cargo run --example toy
//! ```

use std::error::Error;

use ncrelax::solver::solve_relaxation;
use ncrelax::{parse_problem, SolverOptions};

const PROBLEM: &str = "\
# x1 is a projector, x2 has spectrum in [(1 - sqrt 3)/2, (1 + sqrt 3)/2]
vars x1 x2 hermitian
objective x1*x2 + x2*x1
ineq -x2^2 + x2 + 0.5
sub x1^2 -> x1
order 2
";

pub fn run() -> Result<(f64, f64), Box<dyn Error>> {
    let problem = parse_problem(PROBLEM)?;
    let rel = problem.relax()?;
    println!("{rel}");

    let sol = solve_relaxation(&rel, &SolverOptions::default())?;
    println!(
        "status {} after {} iterations: primal {:.6}, dual {:.6}",
        sol.sdp.status, sol.sdp.iterations, sol.primal, sol.dual
    );
    Ok((sol.primal, sol.dual))
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
