//! Builds the divergence-free basis on each 2D mesh family and verifies the
//! kernel property, the dimension count and linear independence.

use wg_divfree::divfree::{build_divfree_basis, expected_dimension, verify_basis, VerifyOptions};
use wg_divfree::mesh::{generate_hanging_node, generate_mixed_polygonal, generate_rectangular, generate_triangular, Vec3};
use wg_divfree::wg::{assemble_forms, Diffusion, DofLayout};

fn main() -> wg_divfree::Result<()> {
    let meshes = [
        ("rectangular 4x4", generate_rectangular(4)),
        ("triangular 4x4", generate_triangular(4)),
        ("mixed level 1", generate_mixed_polygonal(1)),
        ("hanging node 4", generate_hanging_node(4)),
    ];
    for (name, mesh) in &meshes {
        let layout = DofLayout::new(mesh);
        let forms = assemble_forms(mesh, &layout, &Diffusion::Identity, |_| Vec3::zeros())?;
        let basis = build_divfree_basis(mesh, &layout)?;
        let k = basis.counts();
        let report = verify_basis(&basis, &forms, VerifyOptions::default()).expect("basis verifies");
        println!(
            "{name:<16} bubbles={:<4} tangential={:<3} loops={:<3} dim={} (expected {}) kernel={:.1e} rank={:?} min eig={:.3e}",
            k.bubbles,
            k.tangential,
            k.loops,
            basis.len(),
            expected_dimension(mesh),
            report.max_kernel_residual,
            report.rank,
            report.gram_min_eig.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
