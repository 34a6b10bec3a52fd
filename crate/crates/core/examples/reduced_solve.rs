//! Solves the homogeneous test case in the divergence-free basis and compares
//! with the saddle-point solve. Usage: `reduced_solve [n]`.

use wg_divfree::bench::{case1, measure_errors};
use wg_divfree::divfree::build_divfree_basis;
use wg_divfree::mesh::generate_rectangular;
use wg_divfree::solve::{recover_pressure, solve_reduced, solve_saddle, SolverConfig};
use wg_divfree::wg::{apply_dirichlet, assemble_forms, Diffusion, DofLayout};

fn main() -> wg_divfree::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(16);
    let mesh = generate_rectangular(n);
    let layout = DofLayout::new(&mesh);
    let case = case1();
    let forms = assemble_forms(&mesh, &layout, &Diffusion::Identity, |x| case.source(x))?;
    let basis = build_divfree_basis(&mesh, &layout)?;
    let g = apply_dirichlet(&mesh, &layout, |x| case.velocity(x));

    let reduced = solve_reduced(&mesh, &layout, &forms, &basis, &g, &SolverConfig::default())?;
    let pressure = recover_pressure(&mesh, &layout, &forms, &reduced.velocity)?.pressure;
    println!("reduced solve\n{}\n", reduced.stats);

    let saddle = solve_saddle(&mesh, &layout, &forms, &g)?;
    println!("saddle solve\n{}\n", saddle.stats);

    let diff = reduced.velocity.sub(&saddle.velocity);
    let rel = diff.free.iter().map(|x| x * x).sum::<f64>().sqrt()
        / saddle.velocity.free.iter().map(|x| x * x).sum::<f64>().sqrt();
    println!("relative velocity difference = {rel:.3e}");
    println!("energy a(u,u) = {:.12e}, (f, u_0) = {:.12e}", forms.energy(&reduced.velocity.free), {
        forms.load.iter().zip(&reduced.velocity.free).map(|(a, b)| a * b).sum::<f64>()
    });

    let e = measure_errors(&case, &mesh, &layout, &Diffusion::Identity, &reduced.velocity, &pressure);
    println!("h = 1/{n}: |||u_h - Q_h u||| = {:.4e}, ||u_0 - Q_0 u|| = {:.4e}, ||p_h - p|| = {:.4e}", e.h1_err, e.l2_err, e.p_err);
    Ok(())
}
