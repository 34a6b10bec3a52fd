//! Assembly of the bilinear forms `a`, `s`, `b` and the load vector.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::dofs::{Diffusion, DofLayout, LocalBasis, Slot};
use crate::error::Result;
use crate::mesh::{Mesh, Vec3};
use crate::quadrature::cell_rule;
use crate::solve::SparseMatrix;

/// Polynomial degree integrated exactly by the load quadrature.
pub const LOAD_DEGREE: usize = 6;

/// Assembled operators over the free unknowns of a [`DofLayout`].
#[derive(Clone, Debug)]
pub struct FormMatrices {
    /// `a(., .)` on free x free unknowns, stabilizer included.
    pub a: SparseMatrix,
    /// Stabilizer part `s(., .)` of `a`.
    pub s: SparseMatrix,
    /// `a(., .)` coupling free rows to fixed boundary slots.
    pub a_fixed: SparseMatrix,
    /// `b(v, q_T)` with one row per cell indicator `q_T`.
    pub b: SparseMatrix,
    pub b_fixed: SparseMatrix,
    /// `(f, v_0)` for each free unknown.
    pub load: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
enum Target {
    Free(usize),
    Fixed(usize),
}

/// `h_T` in the stabilizer: `|T|^{1/d}`, the side length on square and cubic cells.
pub fn stabilization_length(mesh: &Mesh, cell: usize) -> f64 {
    mesh.cells()[cell].measure.powf(1.0 / mesh.dim() as f64)
}

/// Element matrices of one cell in local numbering: the `d (d + 1)` interior
/// coefficients, then `d` slots per facet in cell-facet order.
struct LocalSystem {
    targets: Vec<Target>,
    a: DMatrix<f64>,
    s: DMatrix<f64>,
    b: Vec<f64>,
    load: Vec<f64>,
}

fn local_system<F>(mesh: &Mesh, layout: &DofLayout, coeff: &Diffusion, cell: usize, source: &F) -> LocalSystem
where
    F: Fn(&Vec3) -> Vec3,
{
    let d = mesh.dim();
    let nb = layout.cell_block();
    let c = &mesh.cells()[cell];
    let nf = c.facets.len();
    let n = nb + d * nf;
    let basis = LocalBasis::of_cell(mesh, cell);
    let coef = coeff.at(cell);

    let mut targets: Vec<Target> = (0..nb).map(|j| Target::Free(cell * nb + j)).collect();
    for &fi in &c.facets {
        for i in 0..d {
            targets.push(match layout.facet_slot(fi, i) {
                Slot::Free(k) => Target::Free(k),
                Slot::Fixed(k) => Target::Fixed(k),
            });
        }
    }

    // weak gradient row contribution of each facet: |F| n_out / |T|
    let grads: Vec<Vec3> = (0..nf)
        .map(|k| c.outward_normal(mesh, k) * (mesh.facets()[c.facets[k]].measure / c.measure))
        .collect();
    let mut a = DMatrix::zeros(n, n);
    for k in 0..nf {
        for l in 0..nf {
            let mut v = 0.0;
            for p in 0..d {
                for q in 0..d {
                    v += grads[k][p] * coef[(p, q)] * grads[l][q];
                }
            }
            v *= c.measure;
            for i in 0..d {
                a[(nb + k * d + i, nb + l * d + i)] += v;
            }
        }
    }

    // h_T^{-1} <Q_b v_0 - v_b, Q_b w_0 - w_b>; Q_b of a linear function is its facet-centroid value
    let mut s = DMatrix::zeros(n, n);
    let mut r = vec![0.0; n];
    for (k, &fi) in c.facets.iter().enumerate() {
        let f = &mesh.facets()[fi];
        let phi = basis.eval(&f.centroid);
        let w = f.measure / stabilization_length(mesh, cell);
        for i in 0..d {
            r.iter_mut().for_each(|x| *x = 0.0);
            for m in 0..=d {
                r[i * (d + 1) + m] = phi[m];
            }
            r[nb + k * d + i] = -1.0;
            for p in 0..n {
                if r[p] == 0.0 {
                    continue;
                }
                for q in 0..n {
                    s[(p, q)] += w * r[p] * r[q];
                }
            }
        }
    }
    a += &s;

    let mut b = vec![0.0; n];
    for (k, &fi) in c.facets.iter().enumerate() {
        let flux = c.outward_normal(mesh, k) * mesh.facets()[fi].measure;
        for i in 0..d {
            b[nb + k * d + i] = flux[i];
        }
    }

    let mut load = vec![0.0; n];
    let rule = cell_rule(mesh, cell, LOAD_DEGREE);
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let fv = source(p);
        let phi = basis.eval(p);
        for i in 0..d {
            for m in 0..=d {
                load[i * (d + 1) + m] += w * fv[i] * phi[m];
            }
        }
    }

    LocalSystem { targets, a, s, b, load }
}

/// Assembles `a`, `s`, `b` and `(f, v_0)`. Cells are processed in parallel
/// and merged in cell order, so the result does not depend on the thread count.
pub fn assemble_forms<F>(mesh: &Mesh, layout: &DofLayout, coeff: &Diffusion, source: F) -> Result<FormMatrices>
where
    F: Fn(&Vec3) -> Vec3 + Sync,
{
    coeff.validate(mesh)?;
    let locals: Vec<LocalSystem> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| local_system(mesh, layout, coeff, c, &source))
        .collect();

    let (nfree, nfixed, ncells) = (layout.n_free(), layout.n_fixed(), mesh.n_cells());
    let mut a_t = Vec::new();
    let mut s_t = Vec::new();
    let mut af_t = Vec::new();
    let mut b_t = Vec::new();
    let mut bf_t = Vec::new();
    let mut load = vec![0.0; nfree];
    for (cell, loc) in locals.iter().enumerate() {
        for (p, tp) in loc.targets.iter().enumerate() {
            match *tp {
                Target::Free(i) => {
                    load[i] += loc.load[p];
                    if loc.b[p] != 0.0 {
                        b_t.push((cell, i, loc.b[p]));
                    }
                    for (q, tq) in loc.targets.iter().enumerate() {
                        let (av, sv) = (loc.a[(p, q)], loc.s[(p, q)]);
                        match *tq {
                            Target::Free(j) => {
                                if av != 0.0 {
                                    a_t.push((i, j, av));
                                }
                                if sv != 0.0 {
                                    s_t.push((i, j, sv));
                                }
                            }
                            Target::Fixed(j) => {
                                if av != 0.0 {
                                    af_t.push((i, j, av));
                                }
                            }
                        }
                    }
                }
                Target::Fixed(i) => {
                    if loc.b[p] != 0.0 {
                        bf_t.push((cell, i, loc.b[p]));
                    }
                }
            }
        }
    }
    Ok(FormMatrices {
        a: SparseMatrix::from_triplets(nfree, nfree, &a_t),
        s: SparseMatrix::from_triplets(nfree, nfree, &s_t),
        a_fixed: SparseMatrix::from_triplets(nfree, nfixed, &af_t),
        b: SparseMatrix::from_triplets(ncells, nfree, &b_t),
        b_fixed: SparseMatrix::from_triplets(ncells, nfixed, &bf_t),
        load,
    })
}

impl FormMatrices {
    /// `a(v, v)` for free coefficients `v` with zero boundary slots.
    pub fn energy(&self, v: &[f64]) -> f64 {
        self.a.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// `A_free u_free + A_fixed u_fixed`, the action of `a(u, .)` on the free test functions.
    pub fn apply(&self, free: &[f64], fixed: &[f64]) -> Vec<f64> {
        let mut y = self.a.mul_vec(free);
        for (yi, zi) in y.iter_mut().zip(self.a_fixed.mul_vec(fixed)) {
            *yi += zi;
        }
        y
    }

    /// `B_free u_free + B_fixed u_fixed`, one entry per cell.
    pub fn divergence(&self, free: &[f64], fixed: &[f64]) -> Vec<f64> {
        let mut y = self.b.mul_vec(free);
        for (yi, zi) in y.iter_mut().zip(self.b_fixed.mul_vec(fixed)) {
            *yi += zi;
        }
        y
    }
}
