//! Linear solvers for the reduced and saddle-point systems.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use super::SparseMatrix;
use crate::error::{Error, Result};

/// Relative asymmetry above which a matrix is refused by the SPD solvers.
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final `|M x - rhs| / |rhs|`.
    pub residual: f64,
    pub history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned conjugate gradients. Stops when the relative
/// residual drops below `tol`.
pub fn cg_solve(m: &SparseMatrix, rhs: &[f64], tol: f64, max_iter: usize) -> Result<CgSolution> {
    let n = m.nrows();
    if m.ncols() != n || rhs.len() != n {
        return Err(Error::Shape(format!("{}x{} matrix with rhs of length {}", n, m.ncols(), rhs.len())));
    }
    let inv_diag: Vec<f64> = m
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let b_norm = norm(rhs);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(CgSolution { x, iterations: 0, residual: 0.0, history: vec![0.0] });
    }
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, b)| a * b).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut history = vec![1.0];
    for it in 1..=max_iter {
        m.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap.is_nan() || pap <= 0.0 {
            return Err(Error::NotSpd { context: format!("CG breakdown at iteration {it} (p^T A p = {pap:e})") });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let mut rel = norm(&r) / b_norm;
        let mut restart = false;
        if rel <= tol {
            // the recursive residual drifts; confirm with the true one
            m.mul_vec_into(&x, &mut ap);
            for i in 0..n {
                r[i] = rhs[i] - ap[i];
            }
            rel = norm(&r) / b_norm;
            if rel <= tol {
                history.push(rel);
                return Ok(CgSolution { x, iterations: it, residual: rel, history });
            }
            restart = true;
        }
        history.push(rel);
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = if restart { 0.0 } else { rz_new / rz };
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: *history.last().unwrap_or(&f64::NAN),
        history,
    })
}

fn check_symmetric(m: &SparseMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    let asym = m.max_asymmetry();
    if asym > SYMMETRY_TOL * m.max_abs() {
        return Err(Error::NotSpd { context: format!("matrix is not symmetric (max |A - A^T| = {asym:e})") });
    }
    Ok(())
}

fn to_column(rhs: &[f64]) -> Mat<f64> {
    Mat::from_fn(rhs.len(), 1, |i, _| rhs[i])
}

/// Sparse Cholesky factorization with a fill-reducing ordering.
pub struct CholeskyFactor {
    llt: faer::sparse::linalg::solvers::Llt<usize, f64>,
    n: usize,
}

impl CholeskyFactor {
    pub fn new(m: &SparseMatrix) -> Result<Self> {
        check_symmetric(m)?;
        let llt = m
            .to_faer()
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::NotSpd { context: format!("Cholesky factorization failed: {e:?}") })?;
        Ok(CholeskyFactor { llt, n: m.nrows() })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.n);
        let x = self.llt.solve(to_column(rhs));
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }
}

pub fn cholesky_solve(m: &SparseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != m.nrows() {
        return Err(Error::Shape(format!("rhs of length {} for {} rows", rhs.len(), m.nrows())));
    }
    Ok(CholeskyFactor::new(m)?.solve(rhs))
}

/// Sparse LU with partial pivoting, for the indefinite saddle-point system.
pub fn lu_solve(m: &SparseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() || rhs.len() != m.nrows() {
        return Err(Error::Shape(format!("{}x{} matrix with rhs of length {}", m.nrows(), m.ncols(), rhs.len())));
    }
    let lu = m
        .to_faer()
        .sp_lu()
        .map_err(|e| Error::Singular(format!("LU factorization failed: {e:?}")))?;
    let x = lu.solve(to_column(rhs));
    let x: Vec<f64> = (0..m.nrows()).map(|i| x[(i, 0)]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("LU solve produced non-finite values".into()));
    }
    let r = m.mul_vec(&x);
    let res = norm(&r.iter().zip(rhs).map(|(a, b)| a - b).collect::<Vec<_>>());
    if res > 1e-8 * norm(rhs).max(f64::MIN_POSITIVE) {
        return Err(Error::Singular(format!("LU residual {res:e} too large")));
    }
    Ok(x)
}
