//! Discrete norms, computed cell by cell from the weak operators.

use rayon::prelude::*;

use super::dofs::{Diffusion, DofLayout, PressureField, WgField};
use super::forms::stabilization_length;
use super::operators::weak_gradient;
use crate::mesh::{Mesh, Vec3};
use crate::quadrature::{cell_rule, facet_rule};

const NORM_DEGREE: usize = 6;

fn sum_cells<F: Fn(usize) -> f64 + Sync + Send>(mesh: &Mesh, f: F) -> f64 {
    let parts: Vec<f64> = (0..mesh.n_cells()).into_par_iter().map(f).collect();
    parts.iter().sum()
}

/// Energy norm `sqrt(a(v, v))`: `(A grad_w v, grad_w v)` plus the stabilizer
/// `h_T^{-1} |Q_b v_0 - v_b|^2` on every cell boundary.
pub fn triple_bar_norm(mesh: &Mesh, layout: &DofLayout, coeff: &Diffusion, field: &WgField) -> f64 {
    let d = mesh.dim();
    sum_cells(mesh, |cell| {
        let c = &mesh.cells()[cell];
        let g = weak_gradient(mesh, layout, field, cell);
        let a = coeff.at(cell);
        let mut grad = 0.0;
        for i in 0..d {
            for p in 0..d {
                for q in 0..d {
                    grad += g[(i, p)] * a[(p, q)] * g[(i, q)];
                }
            }
        }
        let mut stab = 0.0;
        for &fi in &c.facets {
            let f = &mesh.facets()[fi];
            let jump = field.interior_value(mesh, layout, cell, &f.centroid) - field.facet_value(layout, fi);
            stab += f.measure * jump.norm_squared();
        }
        c.measure * grad + stab / stabilization_length(mesh, cell)
    })
    .sqrt()
}

/// Discrete `H^1` norm with the unprojected jump:
/// `sum_T |grad_w v|^2_T + h_T^{-1} ||v_0 - v_b||^2_{dT}`.
pub fn h1_discrete_norm(mesh: &Mesh, layout: &DofLayout, field: &WgField) -> f64 {
    sum_cells(mesh, |cell| {
        let c = &mesh.cells()[cell];
        let g = weak_gradient(mesh, layout, field, cell);
        let mut stab = 0.0;
        for &fi in &c.facets {
            let vb = field.facet_value(layout, fi);
            stab += facet_rule(mesh, fi, 2)
                .integrate(|x| (field.interior_value(mesh, layout, cell, x) - vb).norm_squared());
        }
        c.measure * g.norm_squared() + stab / stabilization_length(mesh, cell)
    })
    .sqrt()
}

/// `sqrt(sum_T ||v_0||^2_T)`.
pub fn l2_interior_norm(mesh: &Mesh, layout: &DofLayout, field: &WgField) -> f64 {
    sum_cells(mesh, |cell| {
        cell_rule(mesh, cell, 2).integrate(|x| field.interior_value(mesh, layout, cell, x).norm_squared())
    })
    .sqrt()
}

/// `||p_h - p||` with the exact pressure integrated by quadrature on each cell.
pub fn l2_pressure_norm<P>(mesh: &Mesh, p: &PressureField, p_exact: P) -> f64
where
    P: Fn(&Vec3) -> f64 + Sync,
{
    sum_cells(mesh, |cell| {
        let ph = p.values[cell];
        cell_rule(mesh, cell, NORM_DEGREE).integrate(|x| (ph - p_exact(x)).powi(2))
    })
    .sqrt()
}
