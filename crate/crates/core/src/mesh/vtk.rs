//! Legacy ASCII VTK output (`DATASET UNSTRUCTURED_GRID`).

use std::fmt::Write as _;
use std::path::Path;

use super::Mesh;
use crate::error::{Error, Result};

const VTK_POLYGON: u8 = 7;
const VTK_POLYHEDRON: u8 = 42;

/// A named per-cell array.
#[derive(Clone, Debug)]
pub enum CellData<'a> {
    Scalars(&'a str, &'a [f64]),
    /// Vectors are written with three components; 2D data leaves `z = 0`.
    Vectors(&'a str, &'a [[f64; 3]]),
}

impl CellData<'_> {
    fn len(&self) -> usize {
        match self {
            CellData::Scalars(_, v) => v.len(),
            CellData::Vectors(_, v) => v.len(),
        }
    }
}

/// Renders the mesh and cell data as a legacy VTK 3.0 document. 2D cells are
/// polygons; 3D cells are polyhedra given by their face streams.
pub fn vtk_string(mesh: &Mesh, fields: &[CellData<'_>]) -> Result<String> {
    let nc = mesh.n_cells();
    if let Some(f) = fields.iter().find(|f| f.len() != nc) {
        return Err(Error::Shape(format!("cell array has {} entries for {nc} cells", f.len())));
    }
    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0");
    let _ = writeln!(out, "wg-divfree output");
    let _ = writeln!(out, "ASCII");
    let _ = writeln!(out, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(out, "POINTS {} double", mesh.vertices().len());
    for p in mesh.vertices() {
        let _ = writeln!(out, "{:e} {:e} {:e}", p.x, p.y, p.z);
    }

    let records: Vec<Vec<usize>> = mesh
        .cells()
        .iter()
        .map(|c| {
            if mesh.dim() == 2 {
                let mut r = vec![c.vertices.len()];
                r.extend(&c.vertices);
                r
            } else {
                let mut stream = vec![c.facets.len()];
                for &f in &c.facets {
                    let vs = &mesh.facets()[f].vertices;
                    stream.push(vs.len());
                    stream.extend(vs);
                }
                let mut r = vec![stream.len()];
                r.extend(stream);
                r
            }
        })
        .collect();
    let size: usize = records.iter().map(Vec::len).sum();
    let _ = writeln!(out, "CELLS {nc} {size}");
    for r in &records {
        let line: Vec<String> = r.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    let _ = writeln!(out, "CELL_TYPES {nc}");
    let kind = if mesh.dim() == 2 { VTK_POLYGON } else { VTK_POLYHEDRON };
    for _ in 0..nc {
        let _ = writeln!(out, "{kind}");
    }

    if !fields.is_empty() {
        let _ = writeln!(out, "CELL_DATA {nc}");
    }
    for f in fields {
        match f {
            CellData::Scalars(name, v) => {
                let _ = writeln!(out, "SCALARS {name} double 1");
                let _ = writeln!(out, "LOOKUP_TABLE default");
                for x in *v {
                    let _ = writeln!(out, "{x:e}");
                }
            }
            CellData::Vectors(name, v) => {
                let _ = writeln!(out, "VECTORS {name} double");
                for x in *v {
                    let _ = writeln!(out, "{:e} {:e} {:e}", x[0], x[1], x[2]);
                }
            }
        }
    }
    Ok(out)
}

pub fn export_vtk(mesh: &Mesh, fields: &[CellData<'_>], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = vtk_string(mesh, fields)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
