//! Manufactured solutions and convergence studies.

mod cases;
mod convergence;

pub use cases::{case1, case2, case3d, case_by_number, ManufacturedCase};
pub use convergence::{
    least_squares_slope, measure_errors, rate, run_convergence, solve_level, ConvergenceReport, ConvergenceRow, LevelDiagnostics,
    LevelErrors, MeshFamily, SolutionErrors,
};
