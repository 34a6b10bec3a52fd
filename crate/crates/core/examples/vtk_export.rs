//! Writes cell-averaged velocity and pressure of a mixed-mesh solve to a
//! legacy VTK file. Usage: `vtk_export [out.vtk]`.

use wg_divfree::bench::case1;
use wg_divfree::divfree::build_divfree_basis;
use wg_divfree::mesh::{export_vtk, generate_mixed_polygonal, CellData};
use wg_divfree::solve::{recover_pressure, solve_reduced, SolverConfig};
use wg_divfree::wg::{apply_dirichlet, assemble_forms, Diffusion, DofLayout};

fn main() -> wg_divfree::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "stokes_mixed.vtk".into());
    let mesh = generate_mixed_polygonal(2);
    let layout = DofLayout::new(&mesh);
    let case = case1();
    let forms = assemble_forms(&mesh, &layout, &Diffusion::Identity, |x| case.source(x))?;
    let basis = build_divfree_basis(&mesh, &layout)?;
    let g = apply_dirichlet(&mesh, &layout, |x| case.velocity(x));
    let sol = solve_reduced(&mesh, &layout, &forms, &basis, &g, &SolverConfig::default())?;
    let p = recover_pressure(&mesh, &layout, &forms, &sol.velocity)?.pressure;
    let velocity = sol.velocity.cell_averages(&layout);
    export_vtk(&mesh, &[CellData::Vectors("velocity", &velocity), CellData::Scalars("pressure", &p.values)], &path)?;
    println!("wrote {path} ({} cells)", mesh.n_cells());
    Ok(())
}
