//! Commuting +-1 benchmark: substitution rules versus explicit equalities.
//!
//! ```text
//! cargo run --release --example scaling -- 30
//! ```

use std::error::Error;

use ncrelax::bench::{brute_force_minimum, run_bench, BenchMode, BenchRow};
use ncrelax::solver::solve_relaxation;
use ncrelax::SolverOptions;

pub fn run(max_n: usize) -> Result<Vec<(BenchRow, BenchRow)>, Box<dyn Error>> {
    println!("mode,{}", BenchRow::CSV_HEADER);
    let mut rows = Vec::new();
    for n in (2..=max_n).step_by(if max_n > 10 { 5 } else { 1 }) {
        let (subs, rel) = run_bench(n, BenchMode::Subs, 1, false, None)?;
        let (eqs, _) = run_bench(n, BenchMode::Eqs, 1, false, None)?;
        println!("subs,{}", subs.csv());
        println!("eqs,{}", eqs.csv());
        if n <= 6 {
            let sol = solve_relaxation(&rel, &SolverOptions::default())?;
            println!(
                "  n={n}: relaxation {:.6}, exact {}",
                sol.primal,
                brute_force_minimum(n)
            );
        }
        rows.push((subs, eqs));
    }
    Ok(rows)
}

fn main() {
    let max_n = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(20);
    if let Err(e) = run(max_n) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
