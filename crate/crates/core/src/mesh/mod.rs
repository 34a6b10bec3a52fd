//! Polytopal meshes in two and three dimensions.
//!
//! A [`Mesh`] stores cells, facets (edges in 2D, faces in 3D), the edges of a
//! 3D mesh, and the adjacency needed by the weak Galerkin assembly and by the
//! divergence-free basis construction. Meshes are immutable once built; every
//! constructor validates convexity, closedness and manifoldness.

mod generate;
mod io;
mod topology;
mod vtk;

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub use generate::{
    generate_hanging_node, generate_hex, generate_mixed_polygonal, generate_rectangular,
    generate_triangular,
};
pub use io::{load_mesh, save_mesh, MeshFile};
pub use topology::{EdgeSolid, HullEdge, LoopFace, VertexHull, VertexStar3D};
pub use vtk::{export_vtk, vtk_string, CellData};

pub type Vec3 = Vector3<f64>;

/// Relative tolerance used by the geometric validity checks.
const GEOM_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Cell {
    /// 2D: counterclockwise vertex loop. 3D: sorted unique vertex list.
    pub vertices: Vec<usize>,
    /// Facets of the cell. In 2D facet `k` joins `vertices[k]` and `vertices[k + 1]`.
    pub facets: Vec<usize>,
    /// `+1.0` where the stored facet normal points out of this cell, `-1.0` otherwise.
    pub orientation: Vec<f64>,
    pub measure: f64,
    pub centroid: Vec3,
    /// Maximum pairwise vertex distance.
    pub diameter: f64,
}

impl Cell {
    pub fn outward_normal(&self, mesh: &Mesh, local: usize) -> Vec3 {
        mesh.facets[self.facets[local]].normal * self.orientation[local]
    }
}

#[derive(Clone, Debug)]
pub struct Facet {
    /// 2D: the two end points. 3D: planar vertex loop.
    pub vertices: Vec<usize>,
    /// Lower-indexed incident cell first.
    pub cells: (usize, Option<usize>),
    pub measure: f64,
    /// Unit normal, pointing from `cells.0` towards `cells.1` (outward on the boundary).
    pub normal: Vec3,
    pub centroid: Vec3,
    /// 2D only: the normal rotated by +90 degrees.
    pub tangent: Option<Vec3>,
}

impl Facet {
    pub fn is_boundary(&self) -> bool {
        self.cells.1.is_none()
    }

    pub fn incident_cells(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.cells.0).chain(self.cells.1)
    }
}

/// An edge of a 3D mesh.
#[derive(Clone, Debug)]
pub struct Edge {
    /// End points with `vertices[0] < vertices[1]`; the edge direction runs from the first to the second.
    pub vertices: [usize; 2],
    pub facets: Vec<usize>,
    pub cells: Vec<usize>,
    pub boundary: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct TopologyCounts {
    pub n_cells: usize,
    pub n_interior_facets: usize,
    pub n_interior_vertices: usize,
    /// Zero in 2D.
    pub n_interior_edges: usize,
}

impl TopologyCounts {
    /// Euler identity for the interior entities of a partition of a simply
    /// connected domain.
    pub fn euler_holds(&self, dim: usize) -> bool {
        match dim {
            2 => self.n_interior_facets + 1 == self.n_interior_vertices + self.n_cells,
            3 => {
                self.n_interior_vertices + self.n_interior_facets + 1
                    == self.n_interior_edges + self.n_cells
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<Vec3>,
    cells: Vec<Cell>,
    facets: Vec<Facet>,
    edges: Vec<Edge>,
    vertex_boundary: Vec<bool>,
    vertex_cells: Vec<Vec<usize>>,
    vertex_facets: Vec<Vec<usize>>,
    vertex_edges: Vec<Vec<usize>>,
    facet_interior_index: Vec<Option<usize>>,
    facet_boundary_index: Vec<Option<usize>>,
    interior_facets: Vec<usize>,
    boundary_facets: Vec<usize>,
}

impl Mesh {
    /// Builds a 2D mesh from polygon vertex loops. Loops given clockwise are
    /// reversed. Hanging nodes must appear in the loop of the coarse cell.
    pub fn from_polygons(points: &[[f64; 2]], polygons: &[Vec<usize>]) -> Result<Mesh> {
        if polygons.is_empty() {
            return Err(Error::InvalidMesh("mesh has no cells".into()));
        }
        let vertices: Vec<Vec3> = points.iter().map(|p| Vec3::new(p[0], p[1], 0.0)).collect();
        check_finite(&vertices)?;

        let mut cells = Vec::with_capacity(polygons.len());
        let mut facets: Vec<Facet> = Vec::new();
        let mut facet_of_pair: HashMap<(usize, usize), usize> = HashMap::new();

        for (ci, poly) in polygons.iter().enumerate() {
            let mut lp = poly.clone();
            check_loop(ci, &lp, vertices.len())?;
            let (area, centroid) = polygon_area_centroid(&vertices, &lp);
            let diameter = diameter_of(&vertices, &lp);
            if area.abs() <= GEOM_TOL * diameter * diameter {
                return Err(Error::InvalidMesh(format!("cell {ci} has zero area")));
            }
            if area < 0.0 {
                lp.reverse();
            }
            check_convex_polygon(ci, &vertices, &lp, diameter)?;

            let n = lp.len();
            let mut cell_facets = Vec::with_capacity(n);
            let mut orientation = Vec::with_capacity(n);
            for k in 0..n {
                let (a, b) = (lp[k], lp[(k + 1) % n]);
                let key = (a.min(b), a.max(b));
                match facet_of_pair.get(&key) {
                    Some(&fi) => {
                        let f = &mut facets[fi];
                        if f.cells.1.is_some() {
                            return Err(Error::InvalidMesh(format!(
                                "edge ({a}, {b}) is shared by more than two cells"
                            )));
                        }
                        if f.vertices[0] != b {
                            return Err(Error::InvalidMesh(format!(
                                "cells {} and {ci} traverse edge ({a}, {b}) in the same direction",
                                f.cells.0
                            )));
                        }
                        f.cells.1 = Some(ci);
                        cell_facets.push(fi);
                        orientation.push(-1.0);
                    }
                    None => {
                        let d = vertices[b] - vertices[a];
                        let len = d.norm();
                        let tangent = d / len;
                        let normal = Vec3::new(tangent.y, -tangent.x, 0.0);
                        let fi = facets.len();
                        facets.push(Facet {
                            vertices: vec![a, b],
                            cells: (ci, None),
                            measure: len,
                            normal,
                            centroid: (vertices[a] + vertices[b]) * 0.5,
                            tangent: Some(tangent),
                        });
                        facet_of_pair.insert(key, fi);
                        cell_facets.push(fi);
                        orientation.push(1.0);
                    }
                }
            }
            cells.push(Cell {
                vertices: lp,
                facets: cell_facets,
                orientation,
                measure: area.abs(),
                centroid,
                diameter,
            });
        }
        Mesh::finish(2, vertices, cells, facets, Vec::new())
    }

    /// Builds a 3D mesh from polyhedra given as lists of planar face loops.
    /// Face loops may have either orientation.
    pub fn from_polyhedra(points: &[[f64; 3]], polyhedra: &[Vec<Vec<usize>>]) -> Result<Mesh> {
        if polyhedra.is_empty() {
            return Err(Error::InvalidMesh("mesh has no cells".into()));
        }
        let vertices: Vec<Vec3> = points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect();
        check_finite(&vertices)?;

        let mut cells = Vec::with_capacity(polyhedra.len());
        let mut facets: Vec<Facet> = Vec::new();
        let mut facet_of_key: HashMap<Vec<usize>, usize> = HashMap::new();

        for (ci, faces) in polyhedra.iter().enumerate() {
            if faces.len() < 4 {
                return Err(Error::InvalidMesh(format!("cell {ci} has fewer than 4 faces")));
            }
            let mut cell_vertices: Vec<usize> = faces.iter().flatten().copied().collect();
            cell_vertices.sort_unstable();
            cell_vertices.dedup();
            for face in faces {
                check_loop(ci, face, vertices.len())?;
            }
            let diameter = diameter_of(&vertices, &cell_vertices);
            let center = cell_vertices.iter().map(|&v| vertices[v]).sum::<Vec3>()
                / cell_vertices.len() as f64;

            let mut cell_facets = Vec::with_capacity(faces.len());
            let mut orientation = Vec::with_capacity(faces.len());
            let mut volume = 0.0;
            let mut moment = Vec3::zeros();
            for face in faces {
                let (area, normal, centroid) = polygon3d_geometry(&vertices, face);
                if area <= GEOM_TOL * diameter * diameter {
                    return Err(Error::InvalidMesh(format!("cell {ci} has a face of zero area")));
                }
                for &v in face {
                    if (vertices[v] - centroid).dot(&normal).abs() > GEOM_TOL * diameter {
                        return Err(Error::InvalidMesh(format!(
                            "cell {ci} has a non-planar face {face:?}"
                        )));
                    }
                }
                let outward = if (centroid - center).dot(&normal) >= 0.0 { normal } else { -normal };
                let mut key = face.clone();
                key.sort_unstable();
                let (fi, sign) = match facet_of_key.get(&key) {
                    Some(&fi) => {
                        let f = &mut facets[fi];
                        if f.cells.1.is_some() {
                            return Err(Error::InvalidMesh(format!(
                                "face {face:?} is shared by more than two cells"
                            )));
                        }
                        if f.normal.dot(&outward) > 0.0 {
                            return Err(Error::InvalidMesh(format!(
                                "cells {} and {ci} overlap across face {face:?}",
                                f.cells.0
                            )));
                        }
                        f.cells.1 = Some(ci);
                        (fi, -1.0)
                    }
                    None => {
                        let fi = facets.len();
                        facets.push(Facet {
                            vertices: face.clone(),
                            cells: (ci, None),
                            measure: area,
                            normal: outward,
                            centroid,
                            tangent: None,
                        });
                        facet_of_key.insert(key, fi);
                        (fi, 1.0)
                    }
                };
                cell_facets.push(fi);
                orientation.push(sign);

                // pyramid over the face fan with apex at `center`
                let n = face.len();
                for k in 0..n {
                    let a = vertices[face[k]];
                    let b = vertices[face[(k + 1) % n]];
                    let vol = ((a - center).cross(&(b - center))).dot(&(centroid - center)) / 6.0;
                    let vol = vol.abs();
                    volume += vol;
                    moment += vol * (center + a + b + centroid) / 4.0;
                }
                for &v in &cell_vertices {
                    if (vertices[v] - centroid).dot(&outward) > GEOM_TOL * diameter {
                        return Err(Error::NonConvex {
                            cell: ci,
                            detail: format!("vertex {v} lies outside the plane of face {face:?}"),
                        });
                    }
                }
            }
            cells.push(Cell {
                vertices: cell_vertices,
                facets: cell_facets,
                orientation,
                measure: volume,
                centroid: moment / volume,
                diameter,
            });
        }

        // edges from face loops
        let mut edges: Vec<Edge> = Vec::new();
        let mut edge_of_pair: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in facets.iter().enumerate() {
            let n = f.vertices.len();
            for k in 0..n {
                let (a, b) = (f.vertices[k], f.vertices[(k + 1) % n]);
                let key = (a.min(b), a.max(b));
                let ei = *edge_of_pair.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: [key.0, key.1],
                        facets: Vec::new(),
                        cells: Vec::new(),
                        boundary: false,
                    });
                    edges.len() - 1
                });
                let e = &mut edges[ei];
                e.facets.push(fi);
                e.boundary |= f.is_boundary();
                e.cells.extend(f.incident_cells());
            }
        }
        for e in &mut edges {
            e.cells.sort_unstable();
            e.cells.dedup();
        }
        Mesh::finish(3, vertices, cells, facets, edges)
    }

    fn finish(
        dim: usize,
        vertices: Vec<Vec3>,
        cells: Vec<Cell>,
        facets: Vec<Facet>,
        edges: Vec<Edge>,
    ) -> Result<Mesh> {
        let nv = vertices.len();
        let mut vertex_boundary = vec![false; nv];
        let mut vertex_cells = vec![Vec::new(); nv];
        let mut vertex_facets = vec![Vec::new(); nv];
        let mut vertex_edges = vec![Vec::new(); nv];
        for (ci, c) in cells.iter().enumerate() {
            for &v in &c.vertices {
                vertex_cells[v].push(ci);
            }
        }
        let mut facet_interior_index = vec![None; facets.len()];
        let mut facet_boundary_index = vec![None; facets.len()];
        let mut interior_facets = Vec::new();
        let mut boundary_facets = Vec::new();
        for (fi, f) in facets.iter().enumerate() {
            for &v in &f.vertices {
                vertex_facets[v].push(fi);
                if f.is_boundary() {
                    vertex_boundary[v] = true;
                }
            }
            if f.is_boundary() {
                facet_boundary_index[fi] = Some(boundary_facets.len());
                boundary_facets.push(fi);
            } else {
                facet_interior_index[fi] = Some(interior_facets.len());
                interior_facets.push(fi);
            }
        }
        for (ei, e) in edges.iter().enumerate() {
            for &v in &e.vertices {
                vertex_edges[v].push(ei);
            }
        }
        if let Some(v) = vertex_cells.iter().position(|c| c.is_empty()) {
            return Err(Error::InvalidMesh(format!("vertex {v} is not used by any cell")));
        }

        let mesh = Mesh {
            dim,
            vertices,
            cells,
            facets,
            edges,
            vertex_boundary,
            vertex_cells,
            vertex_facets,
            vertex_edges,
            facet_interior_index,
            facet_boundary_index,
            interior_facets,
            boundary_facets,
        };
        for ci in 0..mesh.cells.len() {
            let (residual, scale) = mesh.closure_residual(ci);
            if residual > GEOM_TOL * scale {
                return Err(Error::InvalidMesh(format!(
                    "cell {ci} is not closed (|sum of |F| n| = {residual:.3e})"
                )));
            }
        }
        Ok(mesh)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// 3D edges; empty for 2D meshes.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.vertex_boundary[v]
    }

    pub fn vertex_cells(&self, v: usize) -> &[usize] {
        &self.vertex_cells[v]
    }

    pub fn vertex_facets(&self, v: usize) -> &[usize] {
        &self.vertex_facets[v]
    }

    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    pub fn interior_facets(&self) -> &[usize] {
        &self.interior_facets
    }

    pub fn boundary_facets(&self) -> &[usize] {
        &self.boundary_facets
    }

    /// Position of a facet in [`Mesh::interior_facets`].
    pub fn interior_index(&self, facet: usize) -> Option<usize> {
        self.facet_interior_index[facet]
    }

    /// Position of a facet in [`Mesh::boundary_facets`].
    pub fn boundary_index(&self, facet: usize) -> Option<usize> {
        self.facet_boundary_index[facet]
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(move |&v| !self.vertex_boundary[v])
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(move |&e| !self.edges[e].boundary)
    }

    /// Largest cell diameter.
    pub fn h_max(&self) -> f64 {
        self.cells.iter().map(|c| c.diameter).fold(0.0, f64::max)
    }

    pub fn total_measure(&self) -> f64 {
        self.cells.iter().map(|c| c.measure).sum()
    }

    pub fn counts(&self) -> TopologyCounts {
        TopologyCounts {
            n_cells: self.cells.len(),
            n_interior_facets: self.interior_facets.len(),
            n_interior_vertices: self.interior_vertices().count(),
            n_interior_edges: self.interior_edges().count(),
        }
    }

    /// Returns `|sum_F |F| n_F|` over the facets of a cell together with the
    /// total facet measure of the cell.
    pub fn closure_residual(&self, cell: usize) -> (f64, f64) {
        let c = &self.cells[cell];
        let mut sum = Vec3::zeros();
        let mut scale = 0.0;
        for k in 0..c.facets.len() {
            let f = &self.facets[c.facets[k]];
            sum += f.measure * c.outward_normal(self, k);
            scale += f.measure;
        }
        (sum.norm(), scale)
    }
}

/// Checks the dimension-appropriate Euler identity on the interior entity counts.
pub fn euler_check(mesh: &Mesh) -> bool {
    mesh.counts().euler_holds(mesh.dim())
}

fn check_finite(vertices: &[Vec3]) -> Result<()> {
    match vertices.iter().position(|v| !v.iter().all(|x| x.is_finite())) {
        Some(i) => Err(Error::InvalidMesh(format!("vertex {i} has a non-finite coordinate"))),
        None => Ok(()),
    }
}

fn check_loop(cell: usize, lp: &[usize], n_vertices: usize) -> Result<()> {
    if lp.len() < 3 {
        return Err(Error::InvalidMesh(format!("cell {cell} has a loop with fewer than 3 vertices")));
    }
    if let Some(&v) = lp.iter().find(|&&v| v >= n_vertices) {
        return Err(Error::InvalidMesh(format!("cell {cell} references missing vertex {v}")));
    }
    let mut sorted = lp.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidMesh(format!("cell {cell} repeats a vertex in a loop")));
    }
    Ok(())
}

fn check_convex_polygon(cell: usize, vertices: &[Vec3], lp: &[usize], diameter: f64) -> Result<()> {
    let n = lp.len();
    let tol = GEOM_TOL * diameter * diameter;
    for k in 0..n {
        let p0 = vertices[lp[(k + n - 1) % n]];
        let p1 = vertices[lp[k]];
        let p2 = vertices[lp[(k + 1) % n]];
        let (a, b) = (p1 - p0, p2 - p1);
        let cross = a.x * b.y - a.y * b.x;
        if cross < -tol || (cross.abs() <= tol && a.dot(&b) <= 0.0) {
            return Err(Error::NonConvex {
                cell,
                detail: format!("reflex or degenerate corner at vertex {}", lp[k]),
            });
        }
    }
    Ok(())
}

/// Signed area and centroid of a planar polygon in the xy-plane.
fn polygon_area_centroid(vertices: &[Vec3], lp: &[usize]) -> (f64, Vec3) {
    let n = lp.len();
    let origin = vertices[lp[0]];
    let mut area = 0.0;
    let mut c = Vec3::zeros();
    for k in 0..n {
        let p = vertices[lp[k]] - origin;
        let q = vertices[lp[(k + 1) % n]] - origin;
        let cross = p.x * q.y - p.y * q.x;
        area += cross;
        c += (p + q) * cross;
    }
    area *= 0.5;
    (area, origin + c / (6.0 * area))
}

/// Area, unit normal (Newell, right-handed w.r.t. the loop) and centroid of a planar 3D polygon.
fn polygon3d_geometry(vertices: &[Vec3], lp: &[usize]) -> (f64, Vec3, Vec3) {
    let n = lp.len();
    let center = lp.iter().map(|&v| vertices[v]).sum::<Vec3>() / n as f64;
    let mut area_vec = Vec3::zeros();
    let mut moment = Vec3::zeros();
    let mut total = 0.0;
    for k in 0..n {
        let a = vertices[lp[k]];
        let b = vertices[lp[(k + 1) % n]];
        let tri = (a - center).cross(&(b - center)) * 0.5;
        area_vec += tri;
        let w = tri.norm();
        total += w;
        moment += w * (center + a + b) / 3.0;
    }
    let area = area_vec.norm();
    let normal = if area > 0.0 { area_vec / area } else { Vec3::zeros() };
    let centroid = if total > 0.0 { moment / total } else { center };
    (area, normal, centroid)
}

fn diameter_of(vertices: &[Vec3], ids: &[usize]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            d = d.max((vertices[a] - vertices[b]).norm());
        }
    }
    d
}
