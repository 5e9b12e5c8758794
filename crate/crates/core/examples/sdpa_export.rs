//! Export a relaxation as sparse SDPA, read it back and solve the file.

use std::error::Error;
use std::fs::File;
use std::io::{BufReader, BufWriter};

use ncrelax::sdpa::to_sdpa_string;
use ncrelax::{parse_problem, read_sdpa, solve, to_sdp, write_sdpa, SolverOptions};

const PROBLEM: &str = "\
vars x y hermitian
objective x*y + y*x - x
ineq 1 - x^2
ineq 1 - y^2
order 1
";

pub fn run() -> Result<f64, Box<dyn Error>> {
    let rel = parse_problem(PROBLEM)?.relax()?;
    let sdp = to_sdp(&rel);
    print!("{}", to_sdpa_string(&sdp));

    let path = std::env::temp_dir().join(format!("ncrelax-example-{}.dat-s", std::process::id()));
    write_sdpa(&sdp, BufWriter::new(File::create(&path)?))?;
    let back = read_sdpa(BufReader::new(File::open(&path)?))?;
    std::fs::remove_file(&path)?;
    assert_eq!(back, sdp);

    let sol = solve(&back, &SolverOptions::default())?;
    let bound = sol.primal_obj + rel.objective_shift();
    println!("{} -> lower bound {bound:.6}", sol.status);
    Ok(bound)
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
