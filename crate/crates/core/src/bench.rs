//! Scaling benchmark: `min sum_{i,j} X_i X_j` over Hermitian `X_i` with
//! `X_i^2 = 1` and pairwise commuting variables.
//!
//! The commutation relations are either rewrite rules (`subs`) or
//! equalities (`eqs`). In `subs` mode the `X_i^2 = 1` relations stay
//! equalities, unless `all_subs` turns them into rules as well.
//!
//! The reported block count is the number of localizing blocks; every
//! equality contributes two.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::algebra::{generate_variables, Polynomial, Word};
use crate::problem::ProblemDef;
use crate::relaxation::{Relaxation, RelaxationError};
use crate::rewrite::RewriteRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMode {
    Subs,
    Eqs,
}

impl FromStr for BenchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "subs" => Ok(Self::Subs),
            "eqs" => Ok(Self::Eqs),
            other => Err(format!(
                "unknown benchmark mode `{other}` (expected subs or eqs)"
            )),
        }
    }
}

impl fmt::Display for BenchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Subs => "subs",
            Self::Eqs => "eqs",
        })
    }
}

pub fn benchmark_problem(n: usize, mode: BenchMode, order: usize, all_subs: bool) -> ProblemDef {
    let variables = generate_variables(n, true);
    let x: Vec<Word> = variables.iter().map(|v| v.word()).collect();

    let mut objective = Polynomial::zero();
    for a in &x {
        for b in &x {
            objective.add_term(a.concat(b), 1.0);
        }
    }

    let mut equalities = Vec::new();
    let mut substitutions = Vec::new();
    for (i, xi) in x.iter().enumerate() {
        let square = xi.concat(xi);
        if mode == BenchMode::Subs && all_subs {
            substitutions.push(RewriteRule::new(square, 1, Word::one()).expect("nonempty lhs"));
        } else {
            equalities.push(Polynomial::from(square) - Polynomial::constant(1.0));
        }
        for xj in &x[i + 1..] {
            let (ji, ij) = (xj.concat(xi), xi.concat(xj));
            match mode {
                BenchMode::Subs => {
                    substitutions.push(RewriteRule::new(ji, 1, ij).expect("nonempty lhs"))
                }
                BenchMode::Eqs => equalities.push(Polynomial::from(ji) - Polynomial::from(ij)),
            }
        }
    }

    ProblemDef {
        variables,
        objective,
        inequalities: Vec::new(),
        equalities,
        substitutions,
        order,
    }
}

/// `(sum X_i)^2` minimized over `X_i` in {-1, +1}: 0 for even `n`, 1 for odd.
pub fn brute_force_minimum(n: usize) -> f64 {
    (0u64..1 << n)
        .map(|mask| {
            let s: i64 = (0..n)
                .map(|i| if mask >> i & 1 == 1 { 1 } else { -1 })
                .sum();
            (s * s) as f64
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub localizing_blocks: usize,
    pub variables: usize,
    pub elapsed: Duration,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str = "n,blocks,variables,milliseconds";

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{:.3}",
            self.n,
            self.localizing_blocks,
            self.variables,
            self.elapsed.as_secs_f64() * 1e3
        )
    }
}

pub fn run_bench(
    n: usize,
    mode: BenchMode,
    order: usize,
    all_subs: bool,
    max_passes: Option<usize>,
) -> Result<(BenchRow, Relaxation), RelaxationError> {
    let def = benchmark_problem(n, mode, order, all_subs);
    let start = Instant::now();
    let rel = def.relax_with(max_passes)?;
    let elapsed = start.elapsed();
    Ok((
        BenchRow {
            n,
            localizing_blocks: rel.localizing_blocks(),
            variables: rel.nvars,
            elapsed,
        },
        rel,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_counts_follow_closed_forms() {
        for n in 2..=6 {
            let (subs, _) = run_bench(n, BenchMode::Subs, 1, false, None).unwrap();
            assert_eq!(subs.localizing_blocks, 2 * n);
            let (eqs, _) = run_bench(n, BenchMode::Eqs, 1, false, None).unwrap();
            assert_eq!(eqs.localizing_blocks, n * n + n);
            let (all, _) = run_bench(n, BenchMode::Subs, 1, true, None).unwrap();
            assert_eq!(all.localizing_blocks, 0);
        }
    }

    #[test]
    fn brute_force_parity() {
        assert_eq!(brute_force_minimum(2), 0.0);
        assert_eq!(brute_force_minimum(3), 1.0);
        assert_eq!(brute_force_minimum(4), 0.0);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("subs".parse::<BenchMode>().unwrap(), BenchMode::Subs);
        assert!("both".parse::<BenchMode>().is_err());
    }

    #[test]
    fn benchmark_file_round_trips() {
        let def = benchmark_problem(3, BenchMode::Subs, 1, false);
        let again = crate::problem::parse_problem(&def.to_string()).unwrap();
        assert_eq!(again, def);
    }
}
