use std::collections::HashMap;

use super::BasisFunction;
use crate::error::{Error, Result};
use crate::mesh::Mesh;

#[derive(Clone, Debug)]
pub struct Elimination {
    pub kept: Vec<BasisFunction>,
    /// `(interior vertex, removed edge)` pairs in vertex order.
    pub removed: Vec<(usize, usize)>,
}

fn other_end(mesh: &Mesh, edge: usize, v: usize) -> usize {
    let [a, b] = mesh.edges()[edge].vertices;
    if a == v {
        b
    } else {
        a
    }
}

/// Layered search from the boundary: in each round every unassigned interior
/// vertex, in ascending order, takes its lowest-index edge to a boundary vertex
/// or to a vertex assigned in an earlier round. The removed edges then form a
/// forest rooted on the boundary.
fn layered_assignment(mesh: &Mesh, interior: &[usize]) -> HashMap<usize, usize> {
    let mut assigned: HashMap<usize, usize> = HashMap::new();
    loop {
        let mut round = Vec::new();
        for &v in interior {
            if assigned.contains_key(&v) {
                continue;
            }
            let pick = mesh.vertex_edges(v).iter().copied().filter(|&e| {
                let w = other_end(mesh, e, v);
                mesh.is_boundary_vertex(w) || assigned.contains_key(&w)
            }).min();
            if let Some(e) = pick {
                round.push((v, e));
            }
        }
        if round.is_empty() {
            return assigned;
        }
        assigned.extend(round);
    }
}

fn augment(
    mesh: &Mesh,
    v: usize,
    edge_owner: &mut HashMap<usize, usize>,
    vertex_edge: &mut HashMap<usize, usize>,
    seen: &mut Vec<usize>,
) -> bool {
    let mut edges: Vec<usize> = mesh.vertex_edges(v).iter().copied().filter(|&e| !mesh.edges()[e].boundary).collect();
    edges.sort_unstable();
    for e in edges {
        if seen.contains(&e) {
            continue;
        }
        seen.push(e);
        let free = match edge_owner.get(&e).copied() {
            None => true,
            Some(u) => augment(mesh, u, edge_owner, vertex_edge, seen),
        };
        if free {
            edge_owner.insert(e, v);
            vertex_edge.insert(v, e);
            return true;
        }
    }
    false
}

/// Removes one incident loop per interior vertex so that the remaining loops
/// are linearly independent. `loops` must be anchored on interior edges.
pub fn eliminate_dependent_loops(mesh: &Mesh, loops: Vec<BasisFunction>) -> Result<Elimination> {
    let interior: Vec<usize> = mesh.interior_vertices().collect();
    let mut vertex_edge = layered_assignment(mesh, &interior);
    if vertex_edge.len() < interior.len() {
        let mut edge_owner: HashMap<usize, usize> = vertex_edge.iter().map(|(&v, &e)| (e, v)).collect();
        for &v in &interior {
            if vertex_edge.contains_key(&v) {
                continue;
            }
            let mut seen = Vec::new();
            if !augment(mesh, v, &mut edge_owner, &mut vertex_edge, &mut seen) {
                return Err(Error::Structural { vertex: v });
            }
        }
    }
    let removed: Vec<(usize, usize)> = interior.iter().map(|&v| (v, vertex_edge[&v])).collect();
    let removed_edges: std::collections::HashSet<usize> = removed.iter().map(|r| r.1).collect();
    let kept = loops.into_iter().filter(|f| !removed_edges.contains(&f.anchor)).collect();
    Ok(Elimination { kept, removed })
}

/// `sum_j sigma_j Lambda_j` over the loops of the edges incident to `vertex`,
/// with `sigma_j = +1` when the edge points away from the vertex. Returns the
/// dense sum over `n_free` unknowns.
pub fn signed_vertex_sum(mesh: &Mesh, loops: &[BasisFunction], vertex: usize, n_free: usize) -> Vec<f64> {
    let mut sum = vec![0.0; n_free];
    for f in loops {
        let [a, b] = mesh.edges()[f.anchor].vertices;
        let sigma = if a == vertex {
            1.0
        } else if b == vertex {
            -1.0
        } else {
            continue;
        };
        for &(i, v) in &f.entries {
            sum[i] += sigma * v;
        }
    }
    sum
}
