//! Weak gradient and divergence on a single pentagon. For a linear field the
//! weak gradient of its projection reproduces the exact gradient.

use wg_divfree::mesh::{Mesh, Vec3};
use wg_divfree::wg::{project_qh, weak_divergence, weak_gradient, DofLayout};

fn main() -> wg_divfree::Result<()> {
    let pts = [[0.0, 0.0], [1.0, 0.0], [1.3, 0.7], [0.5, 1.2], [-0.2, 0.6]];
    let mesh = Mesh::from_polygons(&pts, &[vec![0, 1, 2, 3, 4]])?;
    let layout = DofLayout::new(&mesh);

    // u = (1 + 2x - y, 3x + 4y)
    let u = project_qh(&mesh, &layout, |x| Vec3::new(1.0 + 2.0 * x[0] - x[1], 3.0 * x[0] + 4.0 * x[1], 0.0));
    let g = weak_gradient(&mesh, &layout, &u, 0);
    let div = weak_divergence(&mesh, &layout, &u, 0);
    println!("area = {:.6}", mesh.cells()[0].measure);
    println!("weak gradient:\n  [{:9.6} {:9.6}]\n  [{:9.6} {:9.6}]", g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    println!("exact:\n  [ 2.000000 -1.000000]\n  [ 3.000000  4.000000]");
    println!("weak divergence = {div:.6} (trace {:.6})", g[(0, 0)] + g[(1, 1)]);
    Ok(())
}
