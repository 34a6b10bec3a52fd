//! JSON mesh files.
//!
//! ```text
//! {"dim": 2, "vertices": [[x, y], ...], "cells": [[v0, v1, v2, ...], ...]}
//! {"dim": 3, "vertices": [[x, y, z], ...], "cells": [[[face loop], [face loop], ...], ...]}
//! ```

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Mesh;
use crate::error::{Error, Result};

/// In-memory form of a mesh file.
#[derive(Clone, Debug, PartialEq)]
pub enum MeshFile {
    Polygons {
        dim: usize,
        vertices: Vec<Vec<f64>>,
        cells: Vec<Vec<usize>>,
    },
    Polyhedra {
        dim: usize,
        vertices: Vec<Vec<f64>>,
        cells: Vec<Vec<Vec<usize>>>,
    },
}

#[derive(Deserialize)]
struct Header {
    dim: usize,
}

#[derive(Deserialize)]
struct Raw<C> {
    #[allow(dead_code)]
    dim: usize,
    vertices: Vec<Vec<f64>>,
    cells: Vec<C>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn coords<const D: usize>(vertices: &[Vec<f64>]) -> Result<Vec<[f64; D]>> {
    vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            <[f64; D]>::try_from(v.as_slice()).map_err(|_| {
                Error::InvalidMesh(format!("vertex {i} has {} coordinates, expected {D}", v.len()))
            })
        })
        .collect()
}

impl MeshFile {
    pub fn parse(text: &str) -> Result<MeshFile> {
        let header: Header = serde_json::from_str(text).map_err(parse_error)?;
        match header.dim {
            2 => {
                let raw: Raw<Vec<usize>> = serde_json::from_str(text).map_err(parse_error)?;
                Ok(MeshFile::Polygons { dim: 2, vertices: raw.vertices, cells: raw.cells })
            }
            3 => {
                let raw: Raw<Vec<Vec<usize>>> = serde_json::from_str(text).map_err(parse_error)?;
                Ok(MeshFile::Polyhedra { dim: 3, vertices: raw.vertices, cells: raw.cells })
            }
            d => Err(Error::InvalidMesh(format!("unsupported dimension {d}"))),
        }
    }

    pub fn to_mesh(&self) -> Result<Mesh> {
        match self {
            MeshFile::Polygons { vertices, cells, .. } => Mesh::from_polygons(&coords::<2>(vertices)?, cells),
            MeshFile::Polyhedra { vertices, cells, .. } => Mesh::from_polyhedra(&coords::<3>(vertices)?, cells),
        }
    }

    pub fn from_mesh(mesh: &Mesh) -> MeshFile {
        let d = mesh.dim();
        let vertices = mesh.vertices().iter().map(|p| p.as_slice()[..d].to_vec()).collect();
        if d == 2 {
            MeshFile::Polygons {
                dim: 2,
                vertices,
                cells: mesh.cells().iter().map(|c| c.vertices.clone()).collect(),
            }
        } else {
            MeshFile::Polyhedra {
                dim: 3,
                vertices,
                cells: mesh
                    .cells()
                    .iter()
                    .map(|c| c.facets.iter().map(|&f| mesh.facets()[f].vertices.clone()).collect())
                    .collect(),
            }
        }
    }

    /// One vertex or cell per line.
    pub fn to_json(&self) -> String {
        let (dim, vertices, cells): (usize, &Vec<Vec<f64>>, Vec<String>) = match self {
            MeshFile::Polygons { dim, vertices, cells } => (*dim, vertices, cells.iter().map(j).collect()),
            MeshFile::Polyhedra { dim, vertices, cells } => (*dim, vertices, cells.iter().map(j).collect()),
        };
        let mut out = String::new();
        let _ = writeln!(out, "{{\n  \"dim\": {dim},\n  \"vertices\": [");
        for (i, v) in vertices.iter().enumerate() {
            let sep = if i + 1 < vertices.len() { "," } else { "" };
            let _ = writeln!(out, "    {}{sep}", j(v));
        }
        out.push_str("  ],\n  \"cells\": [\n");
        for (i, c) in cells.iter().enumerate() {
            let sep = if i + 1 < cells.len() { "," } else { "" };
            let _ = writeln!(out, "    {c}{sep}");
        }
        out.push_str("  ]\n}\n");
        out
    }
}

fn j<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    MeshFile::parse(&text)?.to_mesh()
}

pub fn save_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, MeshFile::from_mesh(mesh).to_json()).map_err(|e| Error::io(path, e))
}
