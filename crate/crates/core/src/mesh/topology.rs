//! Patches around interior vertices (2D) and interior edges (3D).

use super::{Mesh, Vec3};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct HullEdge {
    pub facet: usize,
    /// Edge direction away from the hull centre rotated by +90 degrees.
    pub normal: Vec3,
}

/// The cells around an interior vertex of a 2D mesh, with the incident edges
/// sorted counterclockwise.
#[derive(Clone, Debug)]
pub struct VertexHull {
    pub center: usize,
    pub edges: Vec<HullEdge>,
    pub cells: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct LoopFace {
    pub facet: usize,
    /// `direction x w`, with `w` the in-face unit vector normal to the edge.
    pub normal: Vec3,
}

/// The faces around an interior edge of a 3D mesh, ordered by the right-hand
/// rule about `direction`.
#[derive(Clone, Debug)]
pub struct EdgeSolid {
    pub center: usize,
    pub direction: Vec3,
    pub faces: Vec<LoopFace>,
    pub cells: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct VertexStar3D {
    pub center: usize,
    pub edges: Vec<usize>,
    pub cells: Vec<usize>,
}

impl Mesh {
    pub fn vertex_hull(&self, vertex: usize) -> Result<VertexHull> {
        if self.dim() != 2 {
            return Err(Error::Dimension { expected: 2, actual: self.dim() });
        }
        if vertex >= self.vertices().len() || self.is_boundary_vertex(vertex) {
            return Err(Error::NotInteriorVertex(vertex));
        }
        let p = self.vertices()[vertex];
        let mut edges: Vec<(f64, HullEdge)> = self
            .vertex_facets(vertex)
            .iter()
            .map(|&fi| {
                let f = &self.facets()[fi];
                let other = if f.vertices[0] == vertex { f.vertices[1] } else { f.vertices[0] };
                let dir = (self.vertices()[other] - p).normalize();
                let mid = f.centroid - p;
                let angle = mid.y.atan2(mid.x);
                (angle, HullEdge { facet: fi, normal: Vec3::new(-dir.y, dir.x, 0.0) })
            })
            .collect();
        edges.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(VertexHull {
            center: vertex,
            edges: edges.into_iter().map(|(_, e)| e).collect(),
            cells: self.vertex_cells(vertex).to_vec(),
        })
    }

    pub fn edge_solid(&self, edge: usize) -> Result<EdgeSolid> {
        self.edge_solid_oriented(edge, false)
    }

    /// Edge solid about the stored edge direction, or its reverse.
    pub fn edge_solid_oriented(&self, edge: usize, reversed: bool) -> Result<EdgeSolid> {
        if self.dim() != 3 {
            return Err(Error::Dimension { expected: 3, actual: self.dim() });
        }
        if edge >= self.edges().len() || self.edges()[edge].boundary {
            return Err(Error::NotInteriorEdge(edge));
        }
        let e = &self.edges()[edge];
        let a = self.vertices()[e.vertices[0]];
        let b = self.vertices()[e.vertices[1]];
        let mut direction = (b - a).normalize();
        if reversed {
            direction = -direction;
        }
        let in_face = |fi: usize| {
            let r = self.facets()[fi].centroid - a;
            (r - r.dot(&direction) * direction).normalize()
        };
        let reference = in_face(e.facets[0]);
        let side = direction.cross(&reference);
        let mut faces: Vec<(f64, LoopFace)> = e
            .facets
            .iter()
            .map(|&fi| {
                let w = in_face(fi);
                let angle = w.dot(&side).atan2(w.dot(&reference));
                let angle = if angle < 0.0 { angle + std::f64::consts::TAU } else { angle };
                (angle, LoopFace { facet: fi, normal: direction.cross(&w) })
            })
            .collect();
        faces.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(EdgeSolid {
            center: edge,
            direction,
            faces: faces.into_iter().map(|(_, f)| f).collect(),
            cells: e.cells.clone(),
        })
    }

    pub fn vertex_star(&self, vertex: usize) -> Result<VertexStar3D> {
        if self.dim() != 3 {
            return Err(Error::Dimension { expected: 3, actual: self.dim() });
        }
        if vertex >= self.vertices().len() || self.is_boundary_vertex(vertex) {
            return Err(Error::NotInteriorVertex(vertex));
        }
        Ok(VertexStar3D {
            center: vertex,
            edges: self.vertex_edges(vertex).to_vec(),
            cells: self.vertex_cells(vertex).to_vec(),
        })
    }
}

/// Per incident cell, the signs `n_j . n_out` of the two patch facets that
/// bound it. A well-formed patch yields exactly one `+1` and one `-1` per cell.
fn patch_signs(mesh: &Mesh, cells: &[usize], facets: &[(usize, Vec3)]) -> Vec<(usize, Vec<f64>)> {
    cells
        .iter()
        .map(|&ci| {
            let c = &mesh.cells()[ci];
            let signs = facets
                .iter()
                .filter_map(|&(fi, n)| {
                    c.facets.iter().position(|&g| g == fi).map(|k| n.dot(&c.outward_normal(mesh, k)))
                })
                .collect();
            (ci, signs)
        })
        .collect()
}

fn one_in_one_out(signs: &[f64]) -> bool {
    signs.len() == 2
        && signs.iter().filter(|s| (**s - 1.0).abs() < 1e-12).count() == 1
        && signs.iter().filter(|s| (**s + 1.0).abs() < 1e-12).count() == 1
}

impl VertexHull {
    /// Checks the hull invariants: consecutive edges share a cell, every cell
    /// sits between exactly two consecutive edges, and each cell sees one
    /// outward and one inward hull normal.
    pub fn is_consistent(&self, mesh: &Mesh) -> bool {
        let r = self.edges.len();
        if r != self.cells.len() || r < 2 {
            return false;
        }
        let mut between = vec![0usize; self.cells.len()];
        for j in 0..r {
            let f0 = &mesh.facets()[self.edges[j].facet];
            let f1 = &mesh.facets()[self.edges[(j + 1) % r].facet];
            let shared: Vec<usize> = f0.incident_cells().filter(|c| f1.incident_cells().any(|d| d == *c)).collect();
            if shared.len() != 1 {
                return false;
            }
            match self.cells.iter().position(|&c| c == shared[0]) {
                Some(k) => between[k] += 1,
                None => return false,
            }
        }
        if between.iter().any(|&b| b != 1) {
            return false;
        }
        let facets: Vec<_> = self.edges.iter().map(|e| (e.facet, e.normal)).collect();
        patch_signs(mesh, &self.cells, &facets).iter().all(|(_, s)| one_in_one_out(s))
    }
}

impl EdgeSolid {
    /// One outward and one inward loop normal per incident cell, and every
    /// loop normal is a unit normal of its face.
    pub fn is_consistent(&self, mesh: &Mesh) -> bool {
        let unit_normals = self.faces.iter().all(|f| {
            let n = mesh.facets()[f.facet].normal;
            (f.normal.dot(&n).abs() - 1.0).abs() < 1e-12
        });
        let facets: Vec<_> = self.faces.iter().map(|f| (f.facet, f.normal)).collect();
        unit_normals
            && self.faces.len() == self.cells.len()
            && patch_signs(mesh, &self.cells, &facets).iter().all(|(_, s)| one_in_one_out(s))
    }
}
