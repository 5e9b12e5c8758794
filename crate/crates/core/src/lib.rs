//! Sparse semidefinite relaxations of polynomial optimization problems in
//! noncommuting variables.
//!
//! A problem is an objective, inequality constraints `g >= 0`, equality
//! constraints `g = 0` and binomial substitution rules over a set of
//! noncommuting variables. [`relaxation::get_relaxation`] builds the
//! order-`d` moment relaxation, [`sdpa`] exports it in the sparse SDPA
//! format and [`solver`] solves small instances in-process.
//!
//! ```
//! use ncrelax::problem::parse_problem;
//!
//! let def = parse_problem(
//!     "vars x1 x2 hermitian\n\
//!      objective x1*x2 + x2*x1\n\
//!      ineq -x2^2 + x2 + 0.5\n\
//!      sub x1^2 -> x1\n\
//!      order 2\n",
//! )
//! .unwrap();
//! let rel = def.relax().unwrap();
//! assert_eq!(rel.block_sizes(), vec![6, 3]);
//! ```

pub mod algebra;
pub mod bench;
pub mod cli;
pub mod problem;
pub mod relaxation;
pub mod rewrite;
pub mod sdpa;
pub mod solver;

pub use algebra::{
    generate_basis, generate_variables, Letter, Monomial, Polynomial, VariableSpec, Word,
};
pub use problem::{parse_problem, ProblemDef};
pub use relaxation::{get_relaxation, AffineExpr, Block, MonomialDictionary, Relaxation};
pub use rewrite::{validate_rules, RewriteError, RewriteRule, RuleSet};
pub use sdpa::{read_sdpa, to_sdp, write_sdpa, SdpProblem, SparseEntry};
pub use solver::{check_feasibility, solve, SdpSolution, SolverOptions, Status};

/// Shortest decimal that parses back to the same `f64`.
pub fn format_real(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::format_real;
    use proptest::prelude::*;

    #[test]
    fn formats_common_values() {
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(-0.5), "-0.5");
        assert_eq!(format_real(1e-20), "1e-20");
        assert_eq!(format_real(0.1 + 0.2), "0.30000000000000004");
    }

    proptest! {
        #[test]
        fn format_round_trips(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = format_real(v);
            prop_assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }
}
