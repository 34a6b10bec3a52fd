//! Explicit bases of the discrete divergence-free subspace
//! `D_h = { v in V_h : b(v, q) = 0 for all piecewise constant q }`.
//!
//! In 2D the basis consists of `6 N_K` interior bubbles, one tangential
//! function per interior edge, and one normal-flux loop per interior vertex.
//! In 3D it consists of `12 N_K` bubbles, two tangential functions per
//! interior face, and one loop per interior edge, minus one loop per interior
//! vertex to remove the vertex dependencies.

mod basis;
mod elimination;
mod verify;

use std::io::{self, Write};

use crate::error::Result;
use crate::mesh::Mesh;
use crate::solve::SparseMatrix;
use crate::wg::DofLayout;

pub use basis::{build_edge_loops_3d, build_interior_bubbles, build_tangential, build_vertex_loops_2d, face_tangents};
pub use elimination::{eliminate_dependent_loops, signed_vertex_sum, Elimination};
pub use verify::{numerical_rank, verify_basis, BasisReport, VerifyError, VerifyOptions, KERNEL_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// Supported on one cell's interior coefficients.
    InteriorBubble,
    /// Tangential `v_b` on one interior facet.
    Tangential,
    /// Normal fluxes around an interior vertex (2D) or interior edge (3D).
    Loop,
}

impl BasisKind {
    pub fn label(self) -> &'static str {
        match self {
            BasisKind::InteriorBubble => "bubble",
            BasisKind::Tangential => "tangential",
            BasisKind::Loop => "loop",
        }
    }
}

/// A basis function as a sparse coefficient vector over the free unknowns.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisFunction {
    pub kind: BasisKind,
    /// Cell, facet, vertex (2D loops) or edge (3D loops) the function is attached to.
    pub anchor: usize,
    /// `(free index, coefficient)`, sorted by index.
    pub entries: Vec<(usize, f64)>,
}

impl BasisFunction {
    /// Sorts the entries, merges repeated indices and drops zeros.
    pub fn new(kind: BasisKind, anchor: usize, mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += v,
                _ => merged.push((i, v)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        BasisFunction { kind, anchor, entries: merged }
    }
}

/// Counts of each kind of basis function.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KindCounts {
    pub bubbles: usize,
    pub tangential: usize,
    pub loops: usize,
}

impl KindCounts {
    pub fn total(&self) -> usize {
        self.bubbles + self.tangential + self.loops
    }
}

#[derive(Clone, Debug)]
pub struct DivFreeBasis {
    functions: Vec<BasisFunction>,
    n_free: usize,
    /// `(interior vertex, eliminated edge)` pairs; empty in 2D.
    pub eliminated: Vec<(usize, usize)>,
}

impl DivFreeBasis {
    pub fn from_functions(functions: Vec<BasisFunction>, n_free: usize) -> Self {
        DivFreeBasis { functions, n_free, eliminated: Vec::new() }
    }

    pub fn functions(&self) -> &[BasisFunction] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }

    pub fn counts(&self) -> KindCounts {
        let mut c = KindCounts::default();
        for f in &self.functions {
            match f.kind {
                BasisKind::InteriorBubble => c.bubbles += 1,
                BasisKind::Tangential => c.tangential += 1,
                BasisKind::Loop => c.loops += 1,
            }
        }
        c
    }

    /// Basis matrix `C` (free unknowns x functions).
    pub fn matrix(&self) -> SparseMatrix {
        let t: Vec<_> = self
            .functions
            .iter()
            .enumerate()
            .flat_map(|(j, f)| f.entries.iter().map(move |&(i, v)| (i, j, v)))
            .collect();
        SparseMatrix::from_triplets(self.n_free, self.functions.len(), &t)
    }

    /// Reorders the functions; `order[k]` is the old index of new column `k`.
    pub fn permuted(&self, order: &[usize]) -> DivFreeBasis {
        DivFreeBasis {
            functions: order.iter().map(|&k| self.functions[k].clone()).collect(),
            n_free: self.n_free,
            eliminated: self.eliminated.clone(),
        }
    }

    /// Writes `C` in triplet form preceded by one `# column kind anchor` line per function.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (j, f) in self.functions.iter().enumerate() {
            writeln!(w, "# {j} {} {}", f.kind.label(), f.anchor)?;
        }
        self.matrix().write_triplets(w)
    }
}

/// Expected `dim D_h` from the interior entity counts.
pub fn expected_dimension(mesh: &Mesh) -> usize {
    let c = mesh.counts();
    match mesh.dim() {
        2 => 6 * c.n_cells + c.n_interior_facets + c.n_interior_vertices,
        _ => 12 * c.n_cells + 2 * c.n_interior_facets + c.n_interior_edges - c.n_interior_vertices,
    }
}

/// Bubbles, tangential functions and loops (after elimination in 3D), in that order.
pub fn build_divfree_basis(mesh: &Mesh, layout: &DofLayout) -> Result<DivFreeBasis> {
    let mut functions = build_interior_bubbles(mesh, layout);
    functions.extend(build_tangential(mesh, layout));
    let mut eliminated = Vec::new();
    if mesh.dim() == 2 {
        functions.extend(build_vertex_loops_2d(mesh, layout)?);
    } else {
        let loops = build_edge_loops_3d(mesh, layout)?;
        let elim = eliminate_dependent_loops(mesh, loops)?;
        eliminated = elim.removed;
        functions.extend(elim.kept);
    }
    Ok(DivFreeBasis { functions, n_free: layout.n_free(), eliminated })
}
