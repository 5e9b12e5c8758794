#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use ncrelax::algebra::{generate_variables, Polynomial, VariableSpec, Word};
use ncrelax::relaxation::Relaxation;
use ncrelax::rewrite::{RewriteRule, RuleSet};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const TOY: &str = "# projector toy problem\n\
vars x1 x2 hermitian\n\
objective x1*x2 + x2*x1\n\
ineq -x2^2 + x2 + 0.5\n\
sub x1^2 -> x1\n\
order 2\n";

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// `w(X)` with `x_i* -> X_i^T`.
pub fn eval_word(word: &Word, ops: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = ops[0].nrows();
    word.letters()
        .iter()
        .fold(DMatrix::identity(n, n), |acc, l| {
            let op = &ops[l.var() as usize];
            if l.is_starred() {
                acc * op.transpose()
            } else {
                acc * op
            }
        })
}

/// `y_w = <phi, w(X) phi>` for every dictionary word, in index order.
pub fn oracle_moments(rel: &Relaxation, ops: &[DMatrix<f64>], phi: &DVector<f64>) -> Vec<f64> {
    rel.dictionary
        .iter()
        .map(|(_, w)| phi.dot(&(eval_word(w, ops) * phi)))
        .collect()
}

pub fn min_eigenvalue(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    SymmetricEigen::new(m).eigenvalues.min()
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

pub fn random_general(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn random_sign_diagonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| {
        if rng.gen_bool(0.5) {
            1.0
        } else {
            -1.0
        }
    }))
}

pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let norm = v.norm();
        if norm > 1e-3 {
            return v / norm;
        }
    }
}

pub fn random_word(rng: &mut ChaCha8Rng, vars: &[VariableSpec], max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            let v = &vars[rng.gen_range(0..vars.len())];
            if rng.gen_bool(0.5) {
                v.starred()
            } else {
                v.letter()
            }
        })
        .collect()
}

/// Small polynomial with half-integer coefficients.
pub fn random_poly(
    rng: &mut ChaCha8Rng,
    vars: &[VariableSpec],
    max_deg: usize,
    terms: usize,
) -> Polynomial {
    Polynomial::from_terms((0..terms).map(|_| {
        let c = f64::from(rng.gen_range(-6i32..=6)) / 2.0;
        (random_word(rng, vars, max_deg), c)
    }))
}

pub struct RandomProblem {
    pub vars: Vec<VariableSpec>,
    pub objective: Polynomial,
    pub inequalities: Vec<Polynomial>,
    pub equalities: Vec<Polynomial>,
    pub rules: Vec<RewriteRule>,
    pub order: usize,
}

impl RandomProblem {
    pub fn relax(&self) -> Relaxation {
        ncrelax::get_relaxation(
            &self.vars,
            &self.objective,
            &self.inequalities,
            &self.equalities,
            &RuleSet::new(self.rules.clone()).unwrap(),
            self.order,
        )
        .unwrap()
    }
}

/// Random problem whose rules (`x^2 -> x` or `x^2 -> 1`, Hermitian variables
/// only) never make a localizing moment fall outside the moment matrix.
/// Without the adjoint rule, `x^2 -> x` on a non-Hermitian `x` breaks that.
pub fn random_problem(rng: &mut ChaCha8Rng) -> RandomProblem {
    let n = rng.gen_range(1..=3);
    let vars = generate_variables(n, rng.gen_bool(0.5));
    let order = rng.gen_range(1..=2);
    let objective = random_poly(rng, &vars, 2 * order, 4);
    let inequalities = (0..rng.gen_range(0..=2))
        .map(|_| random_poly(rng, &vars, 2, 3))
        .collect();
    let equalities = (0..rng.gen_range(0..=1))
        .map(|_| random_poly(rng, &vars, 2, 2))
        .collect();
    let mut rules = Vec::new();
    for v in vars.iter().filter(|v| v.hermitian) {
        if rng.gen_bool(0.4) {
            let rhs = if rng.gen_bool(0.5) {
                v.word()
            } else {
                Word::one()
            };
            rules.push(RewriteRule::new(v.word().concat(&v.word()), 1, rhs).unwrap());
        }
    }
    RandomProblem {
        vars,
        objective,
        inequalities,
        equalities,
        rules,
        order,
    }
}
