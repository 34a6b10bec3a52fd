use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Vec3};

/// Location of a facet velocity component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    /// Unknown on an interior facet.
    Free(usize),
    /// Prescribed value on a boundary facet.
    Fixed(usize),
}

/// Numbering of the lowest-order velocity unknowns.
///
/// Each cell owns `d (d + 1)` interior coefficients: component `i` of `v_0`
/// is `sum_k c[i (d + 1) + k] phi_k` with `phi_0 = 1` and
/// `phi_k = (x_k - xc_k) / diam(T)`. Interior facets own `d` free slots for the
/// constant `v_b`; boundary facets own `d` fixed slots. Free cell unknowns
/// come first, then free facet unknowns in interior-facet order.
#[derive(Clone, Debug)]
pub struct DofLayout {
    dim: usize,
    n_cells: usize,
    facet_slot: Vec<Slot>,
    n_free: usize,
    n_fixed: usize,
}

impl DofLayout {
    pub fn new(mesh: &Mesh) -> Self {
        let d = mesh.dim();
        let cell_dofs = d * (d + 1) * mesh.n_cells();
        let facet_slot = (0..mesh.facets().len())
            .map(|f| match (mesh.interior_index(f), mesh.boundary_index(f)) {
                (Some(i), _) => Slot::Free(cell_dofs + d * i),
                (None, Some(b)) => Slot::Fixed(d * b),
                (None, None) => unreachable!("every facet is interior or boundary"),
            })
            .collect();
        DofLayout {
            dim: d,
            n_cells: mesh.n_cells(),
            facet_slot,
            n_free: cell_dofs + d * mesh.interior_facets().len(),
            n_fixed: d * mesh.boundary_facets().len(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Interior coefficients per cell, `d (d + 1)`.
    pub fn cell_block(&self) -> usize {
        self.dim * (self.dim + 1)
    }

    pub fn n_cell_dofs(&self) -> usize {
        self.cell_block() * self.n_cells
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }

    pub fn n_fixed(&self) -> usize {
        self.n_fixed
    }

    pub fn cell_dof(&self, cell: usize, component: usize, k: usize) -> usize {
        cell * self.cell_block() + component * (self.dim + 1) + k
    }

    /// Slot of `component` of `v_b` on `facet`.
    pub fn facet_slot(&self, facet: usize, component: usize) -> Slot {
        match self.facet_slot[facet] {
            Slot::Free(i) => Slot::Free(i + component),
            Slot::Fixed(i) => Slot::Fixed(i + component),
        }
    }

    /// First free index of an interior facet.
    pub fn facet_free_base(&self, facet: usize) -> Option<usize> {
        match self.facet_slot[facet] {
            Slot::Free(i) => Some(i),
            Slot::Fixed(_) => None,
        }
    }
}

/// Scalar local basis `{1, (x - xc)/h, (y - yc)/h (, (z - zc)/h)}` of a cell.
#[derive(Clone, Copy, Debug)]
pub struct LocalBasis {
    pub center: Vec3,
    pub scale: f64,
    pub dim: usize,
}

impl LocalBasis {
    pub fn of_cell(mesh: &Mesh, cell: usize) -> Self {
        let c = &mesh.cells()[cell];
        LocalBasis { center: c.centroid, scale: c.diameter, dim: mesh.dim() }
    }

    /// Values of the `d + 1` basis functions; unused trailing entries are zero.
    pub fn eval(&self, x: &Vec3) -> [f64; 4] {
        let r = (x - self.center) / self.scale;
        let mut out = [1.0, r.x, r.y, 0.0];
        if self.dim == 3 {
            out[3] = r.z;
        }
        out
    }

    pub fn len(&self) -> usize {
        self.dim + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A weak velocity `{v_0, v_b}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WgField {
    /// Coefficients over the free unknowns of a [`DofLayout`].
    pub free: Vec<f64>,
    /// Boundary facet values.
    pub fixed: Vec<f64>,
}

impl WgField {
    pub fn zeros(layout: &DofLayout) -> Self {
        WgField { free: vec![0.0; layout.n_free()], fixed: vec![0.0; layout.n_fixed()] }
    }

    pub fn from_parts(free: Vec<f64>, fixed: Vec<f64>) -> Self {
        WgField { free, fixed }
    }

    pub fn sub(&self, other: &WgField) -> WgField {
        WgField {
            free: self.free.iter().zip(&other.free).map(|(a, b)| a - b).collect(),
            fixed: self.fixed.iter().zip(&other.fixed).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.free.iter().chain(&self.fixed).all(|v| v.is_finite())
    }

    /// Constant vector `v_b` on a facet.
    pub fn facet_value(&self, layout: &DofLayout, facet: usize) -> Vec3 {
        let mut v = Vec3::zeros();
        for i in 0..layout.dim() {
            v[i] = match layout.facet_slot(facet, i) {
                Slot::Free(k) => self.free[k],
                Slot::Fixed(k) => self.fixed[k],
            };
        }
        v
    }

    pub fn set_facet_value(&mut self, layout: &DofLayout, facet: usize, value: &Vec3) {
        for i in 0..layout.dim() {
            match layout.facet_slot(facet, i) {
                Slot::Free(k) => self.free[k] = value[i],
                Slot::Fixed(k) => self.fixed[k] = value[i],
            }
        }
    }

    /// Interior polynomial `v_0` evaluated at `x` on `cell`.
    pub fn interior_value(&self, mesh: &Mesh, layout: &DofLayout, cell: usize, x: &Vec3) -> Vec3 {
        let phi = LocalBasis::of_cell(mesh, cell).eval(x);
        let d = layout.dim();
        let mut v = Vec3::zeros();
        for i in 0..d {
            for (k, p) in phi.iter().take(d + 1).enumerate() {
                v[i] += self.free[layout.cell_dof(cell, i, k)] * p;
            }
        }
        v
    }

    /// Cell averages of `v_0`; the centroid-centred basis makes these the
    /// constant coefficients.
    pub fn cell_averages(&self, layout: &DofLayout) -> Vec<[f64; 3]> {
        (0..layout.n_cells())
            .map(|c| {
                let mut a = [0.0; 3];
                for (i, ai) in a.iter_mut().enumerate().take(layout.dim()) {
                    *ai = self.free[layout.cell_dof(c, i, 0)];
                }
                a
            })
            .collect()
    }
}

/// Piecewise constant pressure, one value per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct PressureField {
    pub values: Vec<f64>,
}

impl PressureField {
    pub fn new(values: Vec<f64>) -> Self {
        PressureField { values }
    }

    /// `sum_T |T| p_T / |Omega|`.
    pub fn mean(&self, mesh: &Mesh) -> f64 {
        let total: f64 = mesh.cells().iter().zip(&self.values).map(|(c, p)| c.measure * p).sum();
        total / mesh.total_measure()
    }

    pub fn normalize_mean_zero(&mut self, mesh: &Mesh) {
        let m = self.mean(mesh);
        self.values.iter_mut().for_each(|p| *p -= m);
    }
}

/// Piecewise constant symmetric positive definite coefficient `A`.
#[derive(Clone, Debug, Default)]
pub enum Diffusion {
    #[default]
    Identity,
    /// One matrix per cell; only the leading `d x d` block is used.
    PerCell(Vec<Matrix3<f64>>),
}

impl Diffusion {
    pub fn at(&self, cell: usize) -> Matrix3<f64> {
        match self {
            Diffusion::Identity => Matrix3::identity(),
            Diffusion::PerCell(m) => m[cell],
        }
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        let Diffusion::PerCell(m) = self else { return Ok(()) };
        if m.len() != mesh.n_cells() {
            return Err(Error::Shape(format!("{} coefficient matrices for {} cells", m.len(), mesh.n_cells())));
        }
        let d = mesh.dim();
        for (cell, a) in m.iter().enumerate() {
            let block = a.view((0, 0), (d, d)).clone_owned();
            let sym = (&block - block.transpose()).abs().max();
            if sym > 1e-12 * block.abs().max() || block.cholesky().is_none() {
                return Err(Error::CoefficientNotSpd { cell });
            }
        }
        Ok(())
    }
}
