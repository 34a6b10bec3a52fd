//! Generates each mesh family, prints its interior entity counts and checks
//! the Euler identity. Pass a directory to also write the meshes as JSON.

use std::path::PathBuf;

use wg_divfree::mesh::{
    euler_check, generate_hanging_node, generate_hex, generate_mixed_polygonal, generate_rectangular,
    generate_triangular, load_mesh, save_mesh,
};

fn main() -> wg_divfree::Result<()> {
    let out_dir = std::env::args().nth(1).map(PathBuf::from);
    let meshes = [
        ("rectangular-8", generate_rectangular(8)),
        ("triangular-8", generate_triangular(8)),
        ("mixed-1", generate_mixed_polygonal(1)),
        ("hanging-8", generate_hanging_node(8)),
        ("hex-3x3x3", generate_hex(3, 3, 3)),
    ];
    println!("{:<14} {:>6} {:>8} {:>8} {:>8} {:>8}  euler", "mesh", "cells", "int.fac", "int.vert", "int.edge", "h_max");
    for (name, mesh) in &meshes {
        let c = mesh.counts();
        println!(
            "{name:<14} {:>6} {:>8} {:>8} {:>8} {:>8.4}  {}",
            c.n_cells,
            c.n_interior_facets,
            c.n_interior_vertices,
            c.n_interior_edges,
            mesh.h_max(),
            if euler_check(mesh) { "ok" } else { "FAILED" }
        );
        if let Some(dir) = &out_dir {
            let path = dir.join(format!("{name}.json"));
            save_mesh(mesh, &path)?;
            let back = load_mesh(&path)?;
            assert_eq!(back.counts(), c);
        }
    }
    Ok(())
}
