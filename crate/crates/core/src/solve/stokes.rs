//! Reduced (divergence-free) and saddle-point Stokes solves, and pressure
//! recovery from a divergence-free velocity.

use std::collections::VecDeque;
use std::fmt;
use std::time::Instant;

use super::linear::{cg_solve, CholeskyFactor};
use super::{lu_solve, SparseMatrix};
use crate::divfree::DivFreeBasis;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::wg::{DofLayout, FormMatrices, PressureField, WgField};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LinearSolver {
    /// Cholesky up to [`SolverConfig::direct_limit`] unknowns, CG beyond.
    #[default]
    Auto,
    Cholesky,
    Cg,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    pub solver: LinearSolver,
    pub direct_limit: usize,
    pub cg_tol: f64,
    /// CG stops after `max_iter_factor * n` iterations.
    pub max_iter_factor: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { solver: LinearSolver::Auto, direct_limit: 500_000, cg_tol: 1e-12, max_iter_factor: 10 }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolverStats {
    pub method: &'static str,
    pub unknowns: usize,
    pub iterations: usize,
    /// Relative residual of the solved linear system.
    pub residual: f64,
    pub seconds: f64,
    /// Norm of the boundary-lift correction, zero for homogeneous data.
    pub lift_norm: f64,
}

impl fmt::Display for SolverStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "method={}", self.method)?;
        writeln!(f, "unknowns={}", self.unknowns)?;
        writeln!(f, "iterations={}", self.iterations)?;
        writeln!(f, "residual={:.3e}", self.residual)?;
        writeln!(f, "wall_time_s={:.3}", self.seconds)?;
        write!(f, "lift_norm={:.3e}", self.lift_norm)
    }
}

#[derive(Clone, Debug)]
pub struct StokesSolution {
    pub velocity: WgField,
    /// Mean-zero pressure; `None` until recovered after a reduced solve.
    pub pressure: Option<PressureField>,
    pub stats: SolverStats,
}

/// Breadth-first spanning tree of the dual graph (cells joined by interior
/// facets), rooted at cell 0.
#[derive(Clone, Debug)]
pub struct DualTree {
    /// Cells in visiting order, starting with 0.
    pub order: Vec<usize>,
    /// `(parent cell, shared facet)` for every cell except the root.
    pub parent: Vec<Option<(usize, usize)>>,
    pub is_tree_facet: Vec<bool>,
}

impl DualTree {
    pub fn new(mesh: &Mesh) -> Result<DualTree> {
        let n = mesh.n_cells();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut is_tree_facet = vec![false; mesh.facets().len()];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(c) = queue.pop_front() {
            order.push(c);
            for &fi in &mesh.cells()[c].facets {
                let f = &mesh.facets()[fi];
                let Some(c2) = f.cells.1 else { continue };
                let other = if f.cells.0 == c { c2 } else { f.cells.0 };
                if !seen[other] {
                    seen[other] = true;
                    parent[other] = Some((c, fi));
                    is_tree_facet[fi] = true;
                    queue.push_back(other);
                }
            }
        }
        if let Some(cell) = seen.iter().position(|s| !s) {
            return Err(Error::DisconnectedDualGraph { cell });
        }
        Ok(DualTree { order, parent, is_tree_facet })
    }
}

/// Free coefficients `w`, supported on the normal components of tree facets,
/// with `B w = target`. Requires `sum(target) = 0` up to rounding; the
/// leftover at the root is returned alongside.
pub fn flux_lift(mesh: &Mesh, layout: &DofLayout, tree: &DualTree, target: &[f64]) -> (Vec<f64>, f64) {
    let mut rem = target.to_vec();
    let mut w = vec![0.0; layout.n_free()];
    for &t in tree.order.iter().rev() {
        let Some((p, fi)) = tree.parent[t] else { continue };
        let f = &mesh.facets()[fi];
        // the facet normal points out of the lower-index cell
        let flow = if f.cells.0 == t {
            let flow = rem[t];
            rem[p] += flow;
            flow
        } else {
            let flow = -rem[t];
            rem[p] -= flow;
            flow
        };
        rem[t] = 0.0;
        let base = layout.facet_free_base(fi).expect("tree facets are interior");
        for i in 0..layout.dim() {
            w[base + i] += flow / f.measure * f.normal[i];
        }
    }
    (w, rem[0])
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn relative_residual(m: &SparseMatrix, x: &[f64], rhs: &[f64]) -> f64 {
    let r: Vec<f64> = m.mul_vec(x).iter().zip(rhs).map(|(a, b)| a - b).collect();
    norm(&r) / norm(rhs).max(f64::MIN_POSITIVE)
}

fn spd_solve(m: &SparseMatrix, rhs: &[f64], config: &SolverConfig) -> Result<(Vec<f64>, &'static str, usize)> {
    let use_cg = match config.solver {
        LinearSolver::Auto => m.nrows() > config.direct_limit,
        LinearSolver::Cholesky => false,
        LinearSolver::Cg => true,
    };
    if use_cg {
        let sol = cg_solve(m, rhs, config.cg_tol, config.max_iter_factor * m.nrows().max(1))?;
        Ok((sol.x, "cg", sol.iterations))
    } else {
        let factor = CholeskyFactor::new(m).map_err(|e| match e {
            Error::NotSpd { context } => Error::NotSpd { context: format!("reduced system: {context}") },
            other => other,
        })?;
        Ok((factor.solve(rhs), "cholesky", 0))
    }
}

/// Solves `(C^T A C) y = C^T (F - A (lift + g))` and returns
/// `u = lift + C y` with boundary slots set to `fixed`.
pub fn solve_reduced(
    mesh: &Mesh,
    layout: &DofLayout,
    forms: &FormMatrices,
    basis: &DivFreeBasis,
    fixed: &[f64],
    config: &SolverConfig,
) -> Result<StokesSolution> {
    let start = Instant::now();
    if fixed.len() != layout.n_fixed() || basis.n_free() != layout.n_free() {
        return Err(Error::Shape("boundary data or basis does not match the layout".into()));
    }
    let target: Vec<f64> = forms.b_fixed.mul_vec(fixed).iter().map(|v| -v).collect();
    let lift = if norm(&target) > 0.0 {
        let tree = DualTree::new(mesh)?;
        flux_lift(mesh, layout, &tree, &target).0
    } else {
        vec![0.0; layout.n_free()]
    };

    let c = basis.matrix();
    let ct = c.transpose();
    let k = ct.matmul(&forms.a).matmul(&c);
    let applied = forms.apply(&lift, fixed);
    let r: Vec<f64> = forms.load.iter().zip(&applied).map(|(f, a)| f - a).collect();
    let rhs = ct.mul_vec(&r);

    let (y, method, iterations) = spd_solve(&k, &rhs, config)?;
    let residual = relative_residual(&k, &y, &rhs);
    let mut free = c.mul_vec(&y);
    for (u, l) in free.iter_mut().zip(&lift) {
        *u += l;
    }
    Ok(StokesSolution {
        velocity: WgField::from_parts(free, fixed.to_vec()),
        pressure: None,
        stats: SolverStats {
            method,
            unknowns: k.nrows(),
            iterations,
            residual,
            seconds: start.elapsed().as_secs_f64(),
            lift_norm: norm(&lift),
        },
    })
}

/// Solves the saddle-point system with a Lagrange multiplier fixing the
/// pressure mean:
///
/// ```text
/// [  A    -B^T  0 ] [u]   [F - A_g g]
/// [ -B     0    m ] [p] = [  B_g g  ]
/// [  0    m^T   0 ] [l]   [    0    ]
/// ```
///
/// with `m_T = |T|`.
pub fn solve_saddle(mesh: &Mesh, layout: &DofLayout, forms: &FormMatrices, fixed: &[f64]) -> Result<StokesSolution> {
    let start = Instant::now();
    if fixed.len() != layout.n_fixed() {
        return Err(Error::Shape("boundary data does not match the layout".into()));
    }
    let n = layout.n_free();
    let nc = mesh.n_cells();
    let size = n + nc + 1;
    let mut t: Vec<(usize, usize, f64)> = forms.a.triplets().collect();
    for (i, j, v) in forms.b.triplets() {
        t.push((j, n + i, -v));
        t.push((n + i, j, -v));
    }
    for (cell, c) in mesh.cells().iter().enumerate() {
        t.push((n + cell, n + nc, c.measure));
        t.push((n + nc, n + cell, c.measure));
    }
    let m = SparseMatrix::from_triplets(size, size, &t);

    let mut rhs = vec![0.0; size];
    let ag = forms.a_fixed.mul_vec(fixed);
    for i in 0..n {
        rhs[i] = forms.load[i] - ag[i];
    }
    rhs[n..n + nc].copy_from_slice(&forms.b_fixed.mul_vec(fixed));

    let x = lu_solve(&m, &rhs)?;
    let residual = relative_residual(&m, &x, &rhs);
    let mut pressure = PressureField::new(x[n..n + nc].to_vec());
    pressure.normalize_mean_zero(mesh);
    Ok(StokesSolution {
        velocity: WgField::from_parts(x[..n].to_vec(), fixed.to_vec()),
        pressure: Some(pressure),
        stats: SolverStats {
            method: "lu",
            unknowns: size,
            iterations: 0,
            residual,
            seconds: start.elapsed().as_secs_f64(),
            lift_norm: 0.0,
        },
    })
}

#[derive(Clone, Debug)]
pub struct PressureRecovery {
    pub pressure: PressureField,
    /// Largest jump mismatch on interior facets outside the dual tree.
    pub max_nontree_residual: f64,
}

/// Recovers `p_h` from `b(Xi_e, p_h) = a(u_h, Xi_e)`, where `Xi_e` is the normal
/// facet function of `e` (`v_b = n_e` on `e`, zero elsewhere, `v_0 = 0`):
/// `p_{T1} - p_{T2} = a(u_h, Xi_e) / |e|` with `n_e` pointing from `T1` to `T2`.
pub fn recover_pressure(mesh: &Mesh, layout: &DofLayout, forms: &FormMatrices, velocity: &WgField) -> Result<PressureRecovery> {
    let tree = DualTree::new(mesh)?;
    let au = forms.apply(&velocity.free, &velocity.fixed);
    let jump = |fi: usize| {
        let f = &mesh.facets()[fi];
        let base = layout.facet_free_base(fi).expect("interior facet");
        (0..layout.dim()).map(|i| au[base + i] * f.normal[i]).sum::<f64>() / f.measure
    };
    let mut p = vec![0.0; mesh.n_cells()];
    for &t in &tree.order {
        let Some((parent, fi)) = tree.parent[t] else { continue };
        let j = jump(fi);
        p[t] = if mesh.facets()[fi].cells.0 == parent { p[parent] - j } else { p[parent] + j };
    }
    let mut max_nontree_residual = 0.0f64;
    for &fi in mesh.interior_facets() {
        if tree.is_tree_facet[fi] {
            continue;
        }
        let f = &mesh.facets()[fi];
        let (t1, t2) = (f.cells.0, f.cells.1.expect("interior facet"));
        max_nontree_residual = max_nontree_residual.max((p[t1] - p[t2] - jump(fi)).abs());
    }
    let mut pressure = PressureField::new(p);
    pressure.normalize_mean_zero(mesh);
    Ok(PressureRecovery { pressure, max_nontree_residual })
}
