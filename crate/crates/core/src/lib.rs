//! Lowest-order weak Galerkin discretization of the Stokes equations on
//! polygonal and polyhedral meshes, solved either as a saddle-point system or
//! in an explicitly constructed basis of the discrete divergence-free
//! subspace.
//!
//! ```no_run
//! use wg_divfree::prelude::*;
//!
//! let mesh = generate_rectangular(8);
//! let layout = DofLayout::new(&mesh);
//! let case = case1();
//! let forms = assemble_forms(&mesh, &layout, &Diffusion::Identity, |x| case.source(x)).unwrap();
//! let basis = build_divfree_basis(&mesh, &layout).unwrap();
//! let g = apply_dirichlet(&mesh, &layout, |x| case.velocity(x));
//! let sol = solve_reduced(&mesh, &layout, &forms, &basis, &g, &SolverConfig::default()).unwrap();
//! let p = recover_pressure(&mesh, &layout, &forms, &sol.velocity).unwrap();
//! println!("{}", sol.stats);
//! # let _ = p;
//! ```

pub mod bench;
pub mod cli;
pub mod divfree;
pub mod error;
pub mod mesh;
pub mod quadrature;
pub mod solve;
pub mod wg;

pub use error::{Error, Result};

/// Common imports for examples and tests.
pub mod prelude {
    pub use crate::bench::{case1, case2, case3d, ManufacturedCase};
    pub use crate::divfree::{build_divfree_basis, verify_basis, DivFreeBasis, VerifyOptions};
    pub use crate::mesh::{
        generate_hanging_node, generate_hex, generate_mixed_polygonal, generate_rectangular, generate_triangular, Mesh,
        Vec3,
    };
    pub use crate::solve::{recover_pressure, solve_reduced, solve_saddle, SolverConfig};
    pub use crate::wg::{apply_dirichlet, assemble_forms, project_qh, Diffusion, DofLayout, WgField};
    pub use crate::{Error, Result};
}
