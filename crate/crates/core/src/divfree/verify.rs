use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use super::DivFreeBasis;
use crate::solve::{CholeskyFactor, SparseMatrix};
use crate::wg::FormMatrices;

/// Bound on the scaled entries of `B C`.
pub const KERNEL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Dense rank and eigenvalue checks run only when `C` has at most this many columns.
    pub dense_limit: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { dense_limit: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisReport {
    pub n_columns: usize,
    pub max_kernel_residual: f64,
    pub worst_column: Option<usize>,
    /// `None` when the dense check was skipped.
    pub rank: Option<usize>,
    pub rank_ok: bool,
    /// `C^T A C` admitted a Cholesky factorization.
    pub gram_spd: bool,
    pub gram_min_eig: Option<f64>,
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("column {column} is not divergence free (scaled residual {residual:.3e})")]
    Kernel { column: usize, residual: f64, report: Box<BasisReport> },
    #[error("basis is rank deficient: rank {rank} < {columns} columns (column {column} is dependent)")]
    Rank { rank: usize, columns: usize, column: usize, report: Box<BasisReport> },
    #[error("C^T A C is not positive definite (column {column})")]
    Gram { column: usize, report: Box<BasisReport> },
}

/// Numerical rank from the singular values, relative threshold `1e-10`.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-10 * smax).count()
}

/// First column of `m` that lies in the span of the previous ones, by
/// modified Gram–Schmidt with reorthogonalization.
fn first_dependent_column(m: &DMatrix<f64>) -> usize {
    let mut q: Vec<nalgebra::DVector<f64>> = Vec::new();
    for j in 0..m.ncols() {
        let col = m.column(j).clone_owned();
        let norm = col.norm();
        let mut r = col;
        for _ in 0..2 {
            for qk in &q {
                let proj = qk.dot(&r);
                r -= qk * proj;
            }
        }
        let rn = r.norm();
        if rn <= 1e-10 * norm.max(f64::MIN_POSITIVE) {
            return j;
        }
        q.push(r / rn);
    }
    m.ncols()
}

fn kernel_residuals(b: &SparseMatrix, c: &SparseMatrix) -> Vec<f64> {
    let bc = b.matmul(c);
    let row_norms = b.row_norms();
    let col_norms = c.transpose().row_norms();
    let mut worst = vec![0.0f64; c.ncols()];
    for (i, j, v) in bc.triplets() {
        let scale = row_norms[i] * col_norms[j];
        if scale > 0.0 {
            worst[j] = worst[j].max(v.abs() / scale);
        }
    }
    worst
}

/// Checks `B C = 0`, full column rank and positivity of `C^T A C`.
pub fn verify_basis(basis: &DivFreeBasis, forms: &FormMatrices, options: VerifyOptions) -> Result<BasisReport, VerifyError> {
    let c = basis.matrix();
    let residuals = kernel_residuals(&forms.b, &c);
    let (worst_column, max_kernel_residual) = residuals
        .iter()
        .copied()
        .enumerate()
        .fold((None, 0.0), |acc, (j, r)| if r > acc.1 { (Some(j), r) } else { acc });

    let n = c.ncols();
    let gram = c.transpose().matmul(&forms.a).matmul(&c);
    let gram_spd = CholeskyFactor::new(&gram).is_ok();
    let dense = n <= options.dense_limit;
    let (rank, gram_min_eig) = if dense {
        let cd = c.to_dense();
        let rank = numerical_rank(&cd);
        let eig = SymmetricEigen::new(gram.to_dense()).eigenvalues;
        (Some(rank), Some(eig.iter().copied().fold(f64::INFINITY, f64::min)))
    } else {
        (None, None)
    };
    let report = BasisReport {
        n_columns: n,
        max_kernel_residual,
        worst_column,
        rank,
        rank_ok: rank.map_or(gram_spd, |r| r == n),
        gram_spd,
        gram_min_eig,
    };

    if max_kernel_residual > KERNEL_TOL {
        return Err(VerifyError::Kernel {
            column: worst_column.unwrap_or(0),
            residual: max_kernel_residual,
            report: Box::new(report),
        });
    }
    if let Some(r) = rank {
        if r < n {
            let column = first_dependent_column(&c.to_dense());
            return Err(VerifyError::Rank { rank: r, columns: n, column, report: Box::new(report) });
        }
    }
    let gram_bad = !gram_spd || gram_min_eig.is_some_and(|e| e <= 0.0);
    if gram_bad {
        let column = if dense { first_dependent_column(&gram.to_dense()) } else { n };
        return Err(VerifyError::Gram { column, report: Box::new(report) });
    }
    Ok(report)
}
