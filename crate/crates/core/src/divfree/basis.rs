use rayon::prelude::*;

use super::{BasisFunction, BasisKind};
use crate::error::Result;
use crate::mesh::{Mesh, Vec3};
use crate::wg::DofLayout;

/// `d (d + 1)` unit functions per cell, zero on every facet.
pub fn build_interior_bubbles(mesh: &Mesh, layout: &DofLayout) -> Vec<BasisFunction> {
    let nb = layout.cell_block();
    (0..mesh.n_cells())
        .flat_map(|c| (0..nb).map(move |k| BasisFunction::new(BasisKind::InteriorBubble, c, vec![(c * nb + k, 1.0)])))
        .collect()
}

fn facet_function(layout: &DofLayout, kind: BasisKind, anchor: usize, facet: usize, value: &Vec3) -> Vec<(usize, f64)> {
    let base = layout.facet_free_base(facet).expect("interior facet");
    let _ = (kind, anchor);
    (0..layout.dim()).map(|i| (base + i, value[i])).collect()
}

/// Orthonormal in-plane pair of a 3D face: the first boundary direction, and
/// the first later boundary direction that is not parallel to it after
/// Gram–Schmidt.
pub fn face_tangents(mesh: &Mesh, facet: usize) -> (Vec3, Vec3) {
    let f = &mesh.facets()[facet];
    let v = mesh.vertices();
    let n = f.vertices.len();
    let dir = |k: usize| v[f.vertices[(k + 1) % n]] - v[f.vertices[k]];
    let t1 = dir(0).normalize();
    for k in 1..n {
        let d = dir(k);
        let r = d - t1 * d.dot(&t1);
        if r.norm() > 1e-8 * d.norm() {
            return (t1, r.normalize());
        }
    }
    unreachable!("a face with positive area has two independent directions")
}

/// One function per interior edge (2D, `v_b = t_e`) or two per interior face
/// (3D, `v_b = t_1, t_2`).
pub fn build_tangential(mesh: &Mesh, layout: &DofLayout) -> Vec<BasisFunction> {
    let mut out = Vec::new();
    for &fi in mesh.interior_facets() {
        if mesh.dim() == 2 {
            let t = mesh.facets()[fi].tangent.expect("2D facets carry a tangent");
            out.push(BasisFunction::new(BasisKind::Tangential, fi, facet_function(layout, BasisKind::Tangential, fi, fi, &t)));
        } else {
            let (t1, t2) = face_tangents(mesh, fi);
            for t in [t1, t2] {
                out.push(BasisFunction::new(BasisKind::Tangential, fi, facet_function(layout, BasisKind::Tangential, fi, fi, &t)));
            }
        }
    }
    out
}

/// One loop per interior vertex: `v_b = n_j / |e_j|` on each hull edge, with
/// the normals running counterclockwise about the vertex.
pub fn build_vertex_loops_2d(mesh: &Mesh, layout: &DofLayout) -> Result<Vec<BasisFunction>> {
    let vertices: Vec<usize> = mesh.interior_vertices().collect();
    vertices
        .par_iter()
        .map(|&v| {
            let hull = mesh.vertex_hull(v)?;
            let entries = hull
                .edges
                .iter()
                .flat_map(|e| {
                    let value = e.normal / mesh.facets()[e.facet].measure;
                    facet_function(layout, BasisKind::Loop, v, e.facet, &value)
                })
                .collect();
            Ok(BasisFunction::new(BasisKind::Loop, v, entries))
        })
        .collect()
}

/// One loop per interior edge: `v_b = n_j / |f_j|` on each face around the
/// edge, with the normals following the right-hand rule about the edge direction.
pub fn build_edge_loops_3d(mesh: &Mesh, layout: &DofLayout) -> Result<Vec<BasisFunction>> {
    let edges: Vec<usize> = mesh.interior_edges().collect();
    edges
        .par_iter()
        .map(|&e| {
            let solid = mesh.edge_solid(e)?;
            let entries = solid
                .faces
                .iter()
                .flat_map(|f| {
                    let value = f.normal / mesh.facets()[f.facet].measure;
                    facet_function(layout, BasisKind::Loop, e, f.facet, &value)
                })
                .collect();
            Ok(BasisFunction::new(BasisKind::Loop, e, entries))
        })
        .collect()
}
