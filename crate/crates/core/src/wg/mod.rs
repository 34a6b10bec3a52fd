//! Lowest-order weak Galerkin spaces for the Stokes problem: velocity
//! `{v_0, v_b}` with linear `v_0` in cells and constant `v_b` on facets,
//! piecewise constant pressure.

mod dofs;
mod forms;
mod norms;
mod operators;
mod projection;

pub use dofs::{Diffusion, DofLayout, LocalBasis, PressureField, Slot, WgField};
pub use forms::{assemble_forms, stabilization_length, FormMatrices, LOAD_DEGREE};
pub use norms::{h1_discrete_norm, l2_interior_norm, l2_pressure_norm, triple_bar_norm};
pub use operators::{weak_divergence, weak_gradient, CellWeakGradient};
pub use projection::{apply_dirichlet, project_qh, project_qq, PROJECTION_DEGREE};
