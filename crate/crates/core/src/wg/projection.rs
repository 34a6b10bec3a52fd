//! `L^2` projections of exact fields onto the discrete spaces.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::dofs::{DofLayout, LocalBasis, PressureField, WgField};
use crate::mesh::{Mesh, Vec3};
use crate::quadrature::{cell_rule, facet_rule};

/// Exactness degree of the projection quadratures.
pub const PROJECTION_DEGREE: usize = 6;

/// Facet averages `Q_b g` on every facet, in facet order.
fn facet_averages<G>(mesh: &Mesh, g: &G) -> Vec<Vec3>
where
    G: Fn(&Vec3) -> Vec3 + Sync,
{
    (0..mesh.facets().len())
        .into_par_iter()
        .map(|fi| {
            let rule = facet_rule(mesh, fi, PROJECTION_DEGREE);
            let mut s = Vec3::zeros();
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                s += g(p) * *w;
            }
            s / mesh.facets()[fi].measure
        })
        .collect()
}

/// Local `Q_0` coefficients of one cell, component-major.
fn cell_projection<U>(mesh: &Mesh, cell: usize, u: &U) -> Vec<f64>
where
    U: Fn(&Vec3) -> Vec3,
{
    let d = mesh.dim();
    let basis = LocalBasis::of_cell(mesh, cell);
    let m = basis.len();
    let rule = cell_rule(mesh, cell, PROJECTION_DEGREE);
    let mut mass = DMatrix::zeros(m, m);
    let mut rhs = DMatrix::zeros(m, d);
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let phi = basis.eval(p);
        let val = u(p);
        for a in 0..m {
            for b in 0..m {
                mass[(a, b)] += w * phi[a] * phi[b];
            }
            for i in 0..d {
                rhs[(a, i)] += w * phi[a] * val[i];
            }
        }
    }
    let chol = mass.cholesky().expect("local mass matrix is SPD");
    let sol = chol.solve(&rhs);
    let mut out = Vec::with_capacity(d * m);
    for i in 0..d {
        for a in 0..m {
            out.push(sol[(a, i)]);
        }
    }
    out
}

/// `Q_h u = {Q_0 u, Q_b u}`, boundary slots included.
pub fn project_qh<U>(mesh: &Mesh, layout: &DofLayout, u: U) -> WgField
where
    U: Fn(&Vec3) -> Vec3 + Sync,
{
    let mut field = WgField::zeros(layout);
    let blocks: Vec<Vec<f64>> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| cell_projection(mesh, c, &u))
        .collect();
    let nb = layout.cell_block();
    for (c, block) in blocks.iter().enumerate() {
        field.free[c * nb..(c + 1) * nb].copy_from_slice(block);
    }
    for (fi, avg) in facet_averages(mesh, &u).iter().enumerate() {
        field.set_facet_value(layout, fi, avg);
    }
    field
}

/// Cell averages of a scalar field.
pub fn project_qq<P>(mesh: &Mesh, p: P) -> PressureField
where
    P: Fn(&Vec3) -> f64 + Sync,
{
    let values = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| cell_rule(mesh, c, PROJECTION_DEGREE).integrate(&p) / mesh.cells()[c].measure)
        .collect();
    PressureField::new(values)
}

/// Values of the fixed boundary slots, `Q_b g` on every boundary facet.
pub fn apply_dirichlet<G>(mesh: &Mesh, layout: &DofLayout, g: G) -> Vec<f64>
where
    G: Fn(&Vec3) -> Vec3 + Sync,
{
    let d = mesh.dim();
    let mut fixed = vec![0.0; layout.n_fixed()];
    for (b, &fi) in mesh.boundary_facets().iter().enumerate() {
        let rule = facet_rule(mesh, fi, PROJECTION_DEGREE);
        let mut s = Vec3::zeros();
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            s += g(p) * *w;
        }
        s /= mesh.facets()[fi].measure;
        fixed[d * b..d * b + d].copy_from_slice(&s.as_slice()[..d]);
    }
    fixed
}
