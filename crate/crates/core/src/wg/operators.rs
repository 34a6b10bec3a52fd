//! Weak gradient and weak divergence of lowest-order weak functions.
//!
//! With piecewise constant test functions the volume terms of the defining
//! identities vanish, so both operators depend on `v_b` only:
//! `grad_w v = (1/|T|) sum_F |F| v_b ⊗ n_F` and `div_w v = tr(grad_w v)`.

use nalgebra::Matrix3;

use super::dofs::{DofLayout, WgField};
use crate::mesh::Mesh;

/// Constant `d x d` weak gradient on one cell (zero-padded to 3x3).
/// Entry `(i, j)` approximates `d v_i / d x_j`.
pub type CellWeakGradient = Matrix3<f64>;

pub fn weak_gradient(mesh: &Mesh, layout: &DofLayout, field: &WgField, cell: usize) -> CellWeakGradient {
    let c = &mesh.cells()[cell];
    let mut g = Matrix3::zeros();
    for (k, &fi) in c.facets.iter().enumerate() {
        let f = &mesh.facets()[fi];
        let vb = field.facet_value(layout, fi);
        g += vb * c.outward_normal(mesh, k).transpose() * f.measure;
    }
    g / c.measure
}

pub fn weak_divergence(mesh: &Mesh, layout: &DofLayout, field: &WgField, cell: usize) -> f64 {
    let c = &mesh.cells()[cell];
    let flux: f64 = c
        .facets
        .iter()
        .enumerate()
        .map(|(k, &fi)| {
            let f = &mesh.facets()[fi];
            f.measure * field.facet_value(layout, fi).dot(&c.outward_normal(mesh, k))
        })
        .sum();
    flux / c.measure
}
