//! Sparse linear algebra and the Stokes solves.

mod linear;
mod sparse;
mod stokes;

pub use linear::{cg_solve, cholesky_solve, lu_solve, CgSolution, CholeskyFactor};
pub use sparse::SparseMatrix;
pub use stokes::{
    flux_lift, recover_pressure, solve_reduced, solve_saddle, DualTree, LinearSolver, PressureRecovery, SolverConfig,
    SolverStats, StokesSolution,
};
