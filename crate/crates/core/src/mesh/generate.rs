//! Deterministic mesh families on the unit square and unit cube.

use std::collections::{BTreeSet, HashMap};

use super::Mesh;

/// Vertex registry on an integer lattice of spacing `1 / scale`.
struct Lattice {
    scale: f64,
    index: HashMap<(i64, i64), usize>,
    points: Vec<[f64; 2]>,
}

impl Lattice {
    fn new(scale: i64) -> Self {
        Lattice {
            scale: scale as f64,
            index: HashMap::new(),
            points: Vec::new(),
        }
    }

    fn id(&mut self, p: (i64, i64)) -> usize {
        let scale = self.scale;
        let points = &mut self.points;
        *self.index.entry(p).or_insert_with(|| {
            points.push([p.0 as f64 / scale, p.1 as f64 / scale]);
            points.len() - 1
        })
    }

    /// Registers every cell corner, then inserts any registered lattice point
    /// lying strictly inside a cell side into that cell's loop. This turns
    /// neighbouring refined cells into hanging nodes of the coarse cell.
    fn build(mut self, cells: &[Vec<(i64, i64)>]) -> Mesh {
        let corners: BTreeSet<(i64, i64)> = cells.iter().flatten().copied().collect();
        let mut loops = Vec::with_capacity(cells.len());
        for c in cells {
            let n = c.len();
            let mut lp = Vec::new();
            for k in 0..n {
                let (a, b) = (c[k], c[(k + 1) % n]);
                lp.push(self.id(a));
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                let steps = gcd(dx.abs(), dy.abs());
                for s in 1..steps {
                    let p = (a.0 + dx / steps * s, a.1 + dy / steps * s);
                    if corners.contains(&p) {
                        lp.push(self.id(p));
                    }
                }
            }
            loops.push(lp);
        }
        Mesh::from_polygons(&self.points, &loops).expect("generated 2D mesh is valid")
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

fn square(i: i64, j: i64, s: i64) -> Vec<(i64, i64)> {
    vec![(i, j), (i + s, j), (i + s, j + s), (i, j + s)]
}

/// `n x n` axis-aligned squares on the unit square, row by row.
pub fn generate_rectangular(n: usize) -> Mesh {
    assert!(n >= 1, "n must be positive");
    let n = n as i64;
    let cells: Vec<_> = (0..n)
        .flat_map(|j| (0..n).map(move |i| square(i, j, 1)))
        .collect();
    Lattice::new(n).build(&cells)
}

/// `n x n` squares, each cut into two triangles by the diagonal of negative slope.
pub fn generate_triangular(n: usize) -> Mesh {
    assert!(n >= 1, "n must be positive");
    let n = n as i64;
    let mut cells = Vec::with_capacity((2 * n * n) as usize);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![(i, j), (i + 1, j), (i, j + 1)]);
            cells.push(vec![(i + 1, j), (i + 1, j + 1), (i, j + 1)]);
        }
    }
    Lattice::new(n).build(&cells)
}

/// Mixed triangle/quadrilateral meshes.
///
/// Level 0 is a 3x3 grid of squares whose four corner squares are cut into
/// two triangles along the diagonal pointing at the domain centre; the other
/// five squares stay quadrilaterals. Each further level splits triangles into
/// four triangles and squares into four squares through the edge midpoints.
pub fn generate_mixed_polygonal(level: u32) -> Mesh {
    let s = 1i64 << level; // lattice units per level-0 square side / 1
    let mut cells: Vec<Vec<(i64, i64)>> = Vec::new();
    for j in 0..3i64 {
        for i in 0..3i64 {
            let (x, y) = (i * s, j * s);
            let corner = (i != 1) && (j != 1);
            if !corner {
                cells.push(square(x, y, s));
            } else if i == j {
                // positive-slope diagonal
                cells.push(vec![(x, y), (x + s, y), (x + s, y + s)]);
                cells.push(vec![(x, y), (x + s, y + s), (x, y + s)]);
            } else {
                // negative-slope diagonal
                cells.push(vec![(x, y), (x + s, y), (x, y + s)]);
                cells.push(vec![(x + s, y), (x + s, y + s), (x, y + s)]);
            }
        }
    }
    for _ in 0..level {
        cells = cells.iter().flat_map(|c| refine_midpoint(c)).collect();
    }
    Lattice::new(3 * s).build(&cells)
}

fn refine_midpoint(c: &[(i64, i64)]) -> Vec<Vec<(i64, i64)>> {
    let mid = |a: (i64, i64), b: (i64, i64)| ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
    match c.len() {
        3 => {
            let (a, b, d) = (c[0], c[1], c[2]);
            let (ab, bd, da) = (mid(a, b), mid(b, d), mid(d, a));
            vec![vec![a, ab, da], vec![ab, b, bd], vec![da, bd, d], vec![ab, bd, da]]
        }
        4 => {
            let m: Vec<_> = (0..4).map(|k| mid(c[k], c[(k + 1) % 4])).collect();
            let center = mid(c[0], c[2]);
            (0..4)
                .map(|k| vec![c[k], m[k], center, m[(k + 3) % 4]])
                .collect()
        }
        _ => unreachable!("mixed meshes contain triangles and quadrilaterals only"),
    }
}

/// `n x n` squares with the lower-left quadrant refined once. Coarse cells
/// bordering the refined quadrant carry the side midpoints as hanging nodes.
pub fn generate_hanging_node(n: usize) -> Mesh {
    assert!(n >= 2 && n.is_multiple_of(2), "n must be even and at least 2");
    let n = n as i64;
    let half = n / 2;
    let mut cells = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if i < half && j < half {
                let (x, y) = (2 * i, 2 * j);
                cells.push(square(x, y, 1));
                cells.push(square(x + 1, y, 1));
                cells.push(square(x, y + 1, 1));
                cells.push(square(x + 1, y + 1, 1));
            } else {
                cells.push(square(2 * i, 2 * j, 2));
            }
        }
    }
    Lattice::new(2 * n).build(&cells)
}

/// `nx x ny x nz` axis-aligned hexahedra on the unit cube.
pub fn generate_hex(nx: usize, ny: usize, nz: usize) -> Mesh {
    assert!(nx >= 1 && ny >= 1 && nz >= 1, "dimensions must be positive");
    let id = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    let mut points = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                points.push([i as f64 / nx as f64, j as f64 / ny as f64, k as f64 / nz as f64]);
            }
        }
    }
    let mut cells = Vec::with_capacity(nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let v = |a: usize, b: usize, c: usize| id(i + a, j + b, k + c);
                cells.push(vec![
                    vec![v(0, 0, 0), v(0, 1, 0), v(1, 1, 0), v(1, 0, 0)],
                    vec![v(0, 0, 1), v(1, 0, 1), v(1, 1, 1), v(0, 1, 1)],
                    vec![v(0, 0, 0), v(1, 0, 0), v(1, 0, 1), v(0, 0, 1)],
                    vec![v(0, 1, 0), v(0, 1, 1), v(1, 1, 1), v(1, 1, 0)],
                    vec![v(0, 0, 0), v(0, 0, 1), v(0, 1, 1), v(0, 1, 0)],
                    vec![v(1, 0, 0), v(1, 1, 0), v(1, 1, 1), v(1, 0, 1)],
                ]);
            }
        }
    }
    Mesh::from_polyhedra(&points, &cells).expect("generated hex mesh is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::euler_check;

    #[test]
    fn quad_refinement_shares_centroid() {
        let kids = refine_midpoint(&square(0, 0, 2));
        assert_eq!(kids.len(), 4);
        assert!(kids.iter().all(|k| k.len() == 4 && k.contains(&(1, 1))));
    }

    #[test]
    fn mixed_level0_composition() {
        let m = generate_mixed_polygonal(0);
        let tris = m.cells().iter().filter(|c| c.vertices.len() == 3).count();
        let quads = m.cells().iter().filter(|c| c.vertices.len() == 4).count();
        assert_eq!((tris, quads), (8, 5));
        assert!(euler_check(&m));
    }

    #[test]
    fn hanging_node_coarse_cells_are_pentagons() {
        let m = generate_hanging_node(4);
        let pentagons = m.cells().iter().filter(|c| c.vertices.len() == 5).count();
        // four coarse cells border the refined quadrant, none is a corner neighbour
        assert_eq!(pentagons, 4);
    }
}
