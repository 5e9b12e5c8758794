//! Dense primal-dual interior-point method for
//!
//! ```text
//! min c'x  s.t.  S = sum_l F_l x_l - F_0 >= 0
//! max <F_0, Y>  s.t.  <F_l, Y> = c_l,  Y >= 0
//! ```
//!
//! Infeasible-start path following with the HKM search direction and a
//! Mehrotra predictor-corrector step. Meant for problems with a total block
//! dimension of a few hundred at most.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

use crate::relaxation::Relaxation;
use crate::sdpa::{to_sdp, SdpProblem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver options: {0}")]
    BadOptions(&'static str),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub tol_gap: f64,
    pub max_iter: usize,
    /// Multiplies the default starting point `S0 = eta I`, `Y0 = zeta I`.
    pub initial_scale: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol_gap: 1e-8,
            max_iter: 200,
            initial_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    /// Iteration limit reached, or the iterates stopped making progress.
    MaxIter,
    /// The iterates diverge along an (approximate) infeasibility certificate.
    InfeasibleSuspected,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::MaxIter => "max_iter",
            Status::InfeasibleSuspected => "infeasible_suspected",
        })
    }
}

/// Per-iteration diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationInfo {
    pub primal_obj: f64,
    pub dual_obj: f64,
    /// `||Rp||_F / (1 + ||F_0||_F)`.
    pub primal_infeas: f64,
    /// `||c - A*(Y)|| / (1 + ||c||)`.
    pub dual_infeas: f64,
    pub mu: f64,
    /// `|x . r_d| + |<R_p, Y>|`; `primal_obj - dual_obj >= -slack` holds
    /// for every iterate because `<S, Y> >= 0`.
    pub duality_slack: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub x: Vec<f64>,
    /// Dual matrix per block; zero matrices for blocks without entries.
    pub dual: Vec<DMatrix<f64>>,
    pub status: Status,
    pub iterations: usize,
    pub history: Vec<IterationInfo>,
}

impl SdpSolution {
    pub fn gap(&self) -> f64 {
        (self.primal_obj - self.dual_obj).abs()
    }
}

/// Minimum eigenvalue of each block of `sum F_l x_l - F_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub min_eigenvalues: Vec<f64>,
    pub tol: f64,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.min_eigenvalues.iter().all(|&e| e >= -self.tol)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

// (row, col, value), 0-based, row <= col
type Triplets = Vec<(usize, usize, f64)>;

struct Data {
    dims: Vec<usize>,
    /// Original block number of each active block.
    active: Vec<usize>,
    f0: Vec<DMatrix<f64>>,
    /// `fl[l][k]`: entries of `F_{l+1}` in active block `k`.
    fl: Vec<Vec<Triplets>>,
    /// Variables with entries in each active block.
    vars_in_block: Vec<Vec<usize>>,
    c: DVector<f64>,
}

impl Data {
    fn new(p: &SdpProblem) -> Self {
        let nblocks = p.block_sizes.len();
        let mut used = vec![false; nblocks];
        for e in &p.entries {
            used[e.b - 1] = true;
        }
        let active: Vec<usize> = (0..nblocks).filter(|&b| used[b]).collect();
        let mut slot = vec![usize::MAX; nblocks];
        for (k, &b) in active.iter().enumerate() {
            slot[b] = k;
        }
        let dims: Vec<usize> = active.iter().map(|&b| p.block_dim(b + 1)).collect();
        let mut f0: Vec<DMatrix<f64>> = dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        let mut fl = vec![vec![Triplets::new(); active.len()]; p.nvars];
        for e in &p.entries {
            let k = slot[e.b - 1];
            let (i, j) = (e.i - 1, e.j - 1);
            if e.l == 0 {
                f0[k][(i, j)] = e.v;
                f0[k][(j, i)] = e.v;
            } else {
                fl[e.l - 1][k].push((i, j, e.v));
            }
        }
        let vars_in_block = (0..active.len())
            .map(|k| (0..p.nvars).filter(|&l| !fl[l][k].is_empty()).collect())
            .collect();
        Self {
            dims,
            active,
            f0,
            fl,
            vars_in_block,
            c: DVector::from_column_slice(&p.c),
        }
    }

    fn m(&self) -> usize {
        self.c.len()
    }

    fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// `sum_l F_l x_l` per block.
    fn apply(&self, x: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (l, blocks) in self.fl.iter().enumerate() {
            let xl = x[l];
            if xl == 0.0 {
                continue;
            }
            for (k, trip) in blocks.iter().enumerate() {
                for &(i, j, v) in trip {
                    out[k][(i, j)] += v * xl;
                    if i != j {
                        out[k][(j, i)] += v * xl;
                    }
                }
            }
        }
        out
    }

    /// `<F_l, Z>` for every `l`; `Z` need not be symmetric.
    fn adjoint(&self, z: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(
            self.m(),
            self.fl.iter().map(|blocks| {
                blocks
                    .iter()
                    .zip(z)
                    .map(|(trip, zk)| trip_inner(trip, zk))
                    .sum::<f64>()
            }),
        )
    }

    fn norm_f(&self, l: usize) -> f64 {
        self.fl[l]
            .iter()
            .flatten()
            .map(|&(i, j, v)| if i == j { v * v } else { 2.0 * v * v })
            .sum::<f64>()
            .sqrt()
    }

    /// Schur complement `M[l][k] = <F_l, S^-1 F_k Y>`.
    fn schur(&self, s_inv: &[DMatrix<f64>], y: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.m();
        let mut out = DMatrix::zeros(m, m);
        for (b, vars) in self.vars_in_block.iter().enumerate() {
            let n = self.dims[b];
            let (si, yb) = (&s_inv[b], &y[b]);
            let mut g = DMatrix::zeros(n, n);
            for &k in vars {
                g.fill(0.0);
                for &(a, c, v) in &self.fl[k][b] {
                    g.ger(v, &si.column(a), &yb.row(c).transpose(), 1.0);
                    if a != c {
                        g.ger(v, &si.column(c), &yb.row(a).transpose(), 1.0);
                    }
                }
                for &l in vars {
                    out[(l, k)] += trip_inner(&self.fl[l][b], &g);
                }
            }
        }
        out
    }
}

fn trip_inner(trip: &Triplets, z: &DMatrix<f64>) -> f64 {
    trip.iter()
        .map(|&(i, j, v)| {
            if i == j {
                v * z[(i, i)]
            } else {
                v * (z[(i, j)] + z[(j, i)])
            }
        })
        .sum()
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn frob(a: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

fn symmetrize(a: &mut DMatrix<f64>) {
    let t = a.transpose();
    *a += t;
    *a *= 0.5;
}

fn inverse_pd(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    Cholesky::new(a.clone()).map(|c| {
        let mut inv = c.inverse();
        symmetrize(&mut inv);
        inv
    })
}

/// Largest `alpha` with `x + alpha * dx` PSD (infinite if never violated).
fn max_step(x: &[DMatrix<f64>], dx: &[DMatrix<f64>]) -> Result<f64, SolverError> {
    let mut alpha = f64::INFINITY;
    for (xb, db) in x.iter().zip(dx) {
        let chol = Cholesky::new(xb.clone()).ok_or_else(|| {
            SolverError::NumericalFailure("iterate lost positive definiteness".into())
        })?;
        let l = chol.l();
        let half = l
            .solve_lower_triangular(db)
            .ok_or_else(|| SolverError::NumericalFailure("singular Cholesky factor".into()))?;
        let mut t = l
            .solve_lower_triangular(&half.transpose())
            .ok_or_else(|| SolverError::NumericalFailure("singular Cholesky factor".into()))?;
        symmetrize(&mut t);
        let lmin = SymmetricEigen::new(t).eigenvalues.min();
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    Ok(alpha)
}

fn solve_schur(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>, SolverError> {
    let mut sym = m.clone();
    symmetrize(&mut sym);
    let scale = sym.diagonal().amax().max(1e-300);
    let mut shift = 0.0;
    for _ in 0..8 {
        let mut a = sym.clone();
        for i in 0..a.nrows() {
            a[(i, i)] += shift;
        }
        if let Some(ch) = Cholesky::new(a) {
            return Ok(ch.solve(rhs));
        }
        shift = if shift == 0.0 {
            1e-14 * scale
        } else {
            shift * 100.0
        };
    }
    sym.lu()
        .solve(rhs)
        .ok_or_else(|| SolverError::NumericalFailure("Schur complement is singular".into()))
}

struct Direction {
    dx: DVector<f64>,
    ds: Vec<DMatrix<f64>>,
    dy: Vec<DMatrix<f64>>,
}

struct Iterate<'a> {
    data: &'a Data,
    x: DVector<f64>,
    s: Vec<DMatrix<f64>>,
    y: Vec<DMatrix<f64>>,
}

impl Iterate<'_> {
    fn primal_residual(&self) -> Vec<DMatrix<f64>> {
        let mut r = self.data.apply(&self.x);
        for ((rb, f0), sb) in r.iter_mut().zip(&self.data.f0).zip(&self.s) {
            *rb -= f0;
            *rb -= sb;
        }
        r
    }

    fn dual_residual(&self) -> DVector<f64> {
        &self.data.c - self.data.adjoint(&self.y)
    }

    /// Newton direction towards `S Y = target * I`, optionally with the
    /// second-order correction `S^-1 dS_aff dY_aff`.
    fn direction(
        &self,
        s_inv: &[DMatrix<f64>],
        schur: &DMatrix<f64>,
        rp: &[DMatrix<f64>],
        rd: &DVector<f64>,
        target: f64,
        correction: Option<&Direction>,
    ) -> Result<Direction, SolverError> {
        // R = target S^-1 - Y - S^-1 Rp Y - S^-1 dS_aff dY_aff
        let mut r: Vec<DMatrix<f64>> = Vec::with_capacity(s_inv.len());
        for (b, si) in s_inv.iter().enumerate() {
            let mut rb = si * target - &self.y[b] - si * &rp[b] * &self.y[b];
            if let Some(aff) = correction {
                rb -= si * &aff.ds[b] * &aff.dy[b];
            }
            r.push(rb);
        }
        let rhs = self.data.adjoint(&r) - rd;
        let dx = solve_schur(schur, &rhs)?;
        let mut ds = self.data.apply(&dx);
        for (d, rpb) in ds.iter_mut().zip(rp) {
            *d += rpb;
        }
        let mut dy = Vec::with_capacity(r.len());
        for (b, si) in s_inv.iter().enumerate() {
            let without_rp = si * (&ds[b] - &rp[b]) * &self.y[b];
            let mut d = &r[b] - without_rp;
            symmetrize(&mut d);
            dy.push(d);
        }
        Ok(Direction { dx, ds, dy })
    }
}

/// Solves the standard-form problem.
pub fn solve(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution, SolverError> {
    if opts.tol_gap.is_nan() || opts.tol_gap <= 0.0 {
        return Err(SolverError::BadOptions("tol_gap must be positive"));
    }
    if opts.max_iter == 0 {
        return Err(SolverError::BadOptions("max_iter must be at least 1"));
    }
    if opts.initial_scale.is_nan() || opts.initial_scale <= 0.0 {
        return Err(SolverError::BadOptions("initial_scale must be positive"));
    }
    let data = Data::new(p);
    let m = data.m();
    let n = data.total_dim();

    let expand = |y: &[DMatrix<f64>]| -> Vec<DMatrix<f64>> {
        let mut full: Vec<DMatrix<f64>> = (1..=p.block_sizes.len())
            .map(|b| DMatrix::zeros(p.block_dim(b), p.block_dim(b)))
            .collect();
        for (k, &b) in data.active.iter().enumerate() {
            full[b] = y[k].clone();
        }
        full
    };

    if n == 0 {
        // no constraints at all: bounded only if c = 0
        let status = if data.c.iter().all(|&c| c == 0.0) {
            Status::Optimal
        } else {
            Status::InfeasibleSuspected
        };
        return Ok(SdpSolution {
            primal_obj: 0.0,
            dual_obj: 0.0,
            x: vec![0.0; m],
            dual: expand(&[]),
            status,
            iterations: 0,
            history: Vec::new(),
        });
    }

    let f0_norm = frob(&data.f0);
    let c_norm = data.c.norm();
    let nf = n as f64;
    let max_fl = (0..m).map(|l| data.norm_f(l)).fold(0.0, f64::max);
    let zeta = (0..m)
        .map(|l| nf * (1.0 + data.c[l].abs()) / (1.0 + data.norm_f(l)))
        .fold(10.0f64.max(nf.sqrt()), f64::max);
    let eta = 10.0f64.max(nf.sqrt()).max(max_fl).max(f0_norm);
    let mut it = Iterate {
        data: &data,
        x: DVector::zeros(m),
        s: data
            .dims
            .iter()
            .map(|&d| DMatrix::identity(d, d) * (eta * opts.initial_scale))
            .collect(),
        y: data
            .dims
            .iter()
            .map(|&d| DMatrix::identity(d, d) * (zeta * opts.initial_scale))
            .collect(),
    };

    let mut history = Vec::new();
    let mut status = Status::MaxIter;
    let mut iterations = 0;
    let mut stalled = 0;
    loop {
        let rp = it.primal_residual();
        let rd = it.dual_residual();
        let pobj = data.c.dot(&it.x);
        let dobj = inner(&data.f0, &it.y);
        let mu = inner(&it.s, &it.y) / nf;
        let info = IterationInfo {
            primal_obj: pobj,
            dual_obj: dobj,
            primal_infeas: frob(&rp) / (1.0 + f0_norm),
            dual_infeas: rd.norm() / (1.0 + c_norm),
            mu,
            duality_slack: it.x.dot(&rd).abs() + inner(&rp, &it.y).abs(),
        };
        let converged = (pobj - dobj).abs() <= opts.tol_gap * (1.0 + pobj.abs())
            && info.primal_infeas <= opts.tol_gap
            && info.dual_infeas <= opts.tol_gap;
        history.push(info);
        if converged {
            status = Status::Optimal;
            break;
        }
        if infeasibility_suspected(&it, &data, dobj, pobj) {
            status = Status::InfeasibleSuspected;
            break;
        }
        if iterations >= opts.max_iter || stalled >= 5 {
            break;
        }
        iterations += 1;

        let s_inv: Vec<DMatrix<f64>> = it
            .s
            .iter()
            .map(|s| {
                inverse_pd(s)
                    .ok_or_else(|| SolverError::NumericalFailure("slack matrix is singular".into()))
            })
            .collect::<Result<_, _>>()?;
        let schur = data.schur(&s_inv, &it.y);

        let aff = it.direction(&s_inv, &schur, &rp, &rd, 0.0, None)?;
        let ap = max_step(&it.s, &aff.ds)?.min(1.0);
        let ad = max_step(&it.y, &aff.dy)?.min(1.0);
        let mut mu_aff = 0.0;
        for b in 0..it.s.len() {
            let sb = &it.s[b] + &aff.ds[b] * ap;
            let yb = &it.y[b] + &aff.dy[b] * ad;
            mu_aff += sb.dot(&yb);
        }
        mu_aff /= nf;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let dir = it.direction(&s_inv, &schur, &rp, &rd, sigma * mu, Some(&aff))?;
        let gamma = 0.9 + 0.09 * (1.0 - sigma).max(0.0);
        let ap = (gamma * max_step(&it.s, &dir.ds)?).min(1.0);
        let ad = (gamma * max_step(&it.y, &dir.dy)?).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            stalled += 1;
        } else {
            stalled = 0;
        }
        it.x.axpy(ap, &dir.dx, 1.0);
        for b in 0..it.s.len() {
            it.s[b] += &dir.ds[b] * ap;
            symmetrize(&mut it.s[b]);
            it.y[b] += &dir.dy[b] * ad;
            symmetrize(&mut it.y[b]);
        }
    }

    let last = history.last().expect("at least one iterate");
    Ok(SdpSolution {
        primal_obj: last.primal_obj,
        dual_obj: last.dual_obj,
        x: it.x.iter().copied().collect(),
        dual: expand(&it.y),
        status,
        iterations,
        history,
    })
}

const DIVERGENCE: f64 = 1e16;
const CERTIFICATE_TOL: f64 = 1e-8;

fn infeasibility_suspected(it: &Iterate<'_>, data: &Data, dobj: f64, pobj: f64) -> bool {
    // Y approaches a ray with <F_l, Y> = 0 and <F_0, Y> > 0: primal infeasible.
    if dobj > 0.0 && data.adjoint(&it.y).norm() <= CERTIFICATE_TOL * dobj {
        return true;
    }
    // x approaches a ray with sum F_l x_l >= 0 and c'x < 0: dual infeasible.
    if -pobj > DIVERGENCE * CERTIFICATE_TOL * (1.0 + frob(&data.f0)) {
        let lmin = data
            .apply(&it.x)
            .into_iter()
            .map(|b| SymmetricEigen::new(b).eigenvalues.min())
            .fold(f64::INFINITY, f64::min);
        if lmin >= -CERTIFICATE_TOL * -pobj {
            return true;
        }
    }
    it.x.amax() > DIVERGENCE || it.y.iter().any(|y| y.amax() > DIVERGENCE)
}

/// Minimum eigenvalue of every block of `sum F_l x_l - F_0` at `x`.
pub fn check_feasibility(p: &SdpProblem, x: &[f64], tol: f64) -> FeasibilityReport {
    assert_eq!(x.len(), p.nvars, "x has the wrong length");
    let mut blocks: Vec<DMatrix<f64>> = (1..=p.block_sizes.len())
        .map(|b| DMatrix::zeros(p.block_dim(b), p.block_dim(b)))
        .collect();
    for e in &p.entries {
        let v = if e.l == 0 { -e.v } else { e.v * x[e.l - 1] };
        let (i, j) = (e.i - 1, e.j - 1);
        blocks[e.b - 1][(i, j)] += v;
        if i != j {
            blocks[e.b - 1][(j, i)] += v;
        }
    }
    FeasibilityReport {
        min_eigenvalues: blocks
            .into_iter()
            .map(|b| SymmetricEigen::new(b).eigenvalues.min())
            .collect(),
        tol,
    }
}

/// Optimum of a relaxation with the objective shift added back.
#[derive(Debug, Clone)]
pub struct RelaxationSolution {
    pub primal: f64,
    pub dual: f64,
    pub sdp: SdpSolution,
}

pub fn solve_relaxation(
    rel: &Relaxation,
    opts: &SolverOptions,
) -> Result<RelaxationSolution, SolverError> {
    let sdp = solve(&to_sdp(rel), opts)?;
    let shift = rel.objective_shift();
    Ok(RelaxationSolution {
        primal: sdp.primal_obj + shift,
        dual: sdp.dual_obj + shift,
        sdp,
    })
}
