//! Quadrature on segments, simplices, and polytopes.
//!
//! Polytopes are integrated by a fan of simplices around the centroid. The
//! simplex rules are collapsed Gauss–Legendre tensor rules, exact for every
//! polynomial of the requested total degree.

use std::f64::consts::PI;

use crate::mesh::{Mesh, Vec3};

/// Nodes on `[-1, 1]` and weights of the `n`-point Gauss–Legendre rule.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Points and weights; the weights sum to the measure of the region.
#[derive(Clone, Debug, Default)]
pub struct Rule {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate<F: FnMut(&Vec3) -> f64>(&self, mut f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    fn extend(&mut self, other: Rule) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }
}

fn points_for_degree(degree: usize) -> usize {
    degree / 2 + 1
}

/// Rule on the segment `[a, b]` exact for polynomials of degree `degree`.
pub fn segment_rule(a: Vec3, b: Vec3, degree: usize) -> Rule {
    let (x, w) = gauss_legendre(points_for_degree(degree));
    let len = (b - a).norm();
    Rule {
        points: x.iter().map(|t| a + (b - a) * (0.5 * (t + 1.0))).collect(),
        weights: w.iter().map(|wi| wi * 0.5 * len).collect(),
    }
}

/// Collapsed rule on a triangle, exact for total degree `degree`.
pub fn triangle_rule(a: Vec3, b: Vec3, c: Vec3, degree: usize) -> Rule {
    // Duffy map (u, v) -> a + u (b - a) + v (1 - u) (c - a), Jacobian 2|T| (1 - u)
    let (x, w) = gauss_legendre(points_for_degree(degree + 1));
    let area = 0.5 * (b - a).cross(&(c - a)).norm();
    let mut rule = Rule::default();
    for (xi, wi) in x.iter().zip(&w) {
        let u = 0.5 * (xi + 1.0);
        for (xj, wj) in x.iter().zip(&w) {
            let v = 0.5 * (xj + 1.0);
            rule.points.push(a + (b - a) * u + (c - a) * (v * (1.0 - u)));
            rule.weights.push(wi * wj * 0.25 * 2.0 * area * (1.0 - u));
        }
    }
    rule
}

/// Collapsed rule on a tetrahedron, exact for total degree `degree`.
pub fn tetrahedron_rule(a: Vec3, b: Vec3, c: Vec3, d: Vec3, degree: usize) -> Rule {
    let (x, w) = gauss_legendre(points_for_degree(degree + 2));
    let volume = (b - a).cross(&(c - a)).dot(&(d - a)).abs() / 6.0;
    let mut rule = Rule::default();
    for (xi, wi) in x.iter().zip(&w) {
        let u = 0.5 * (xi + 1.0);
        for (xj, wj) in x.iter().zip(&w) {
            let v = 0.5 * (xj + 1.0);
            for (xk, wk) in x.iter().zip(&w) {
                let s = 0.5 * (xk + 1.0);
                let p = a
                    + (b - a) * u
                    + (c - a) * (v * (1.0 - u))
                    + (d - a) * (s * (1.0 - u) * (1.0 - v));
                rule.points.push(p);
                let jac = 6.0 * volume * (1.0 - u) * (1.0 - u) * (1.0 - v);
                rule.weights.push(wi * wj * wk * 0.125 * jac);
            }
        }
    }
    rule
}

/// Rule on a facet: Gauss on an edge in 2D, centroid fan of triangles in 3D.
pub fn facet_rule(mesh: &Mesh, facet: usize, degree: usize) -> Rule {
    let f = &mesh.facets()[facet];
    let v = mesh.vertices();
    if mesh.dim() == 2 {
        return segment_rule(v[f.vertices[0]], v[f.vertices[1]], degree);
    }
    let n = f.vertices.len();
    let mut rule = Rule::default();
    for k in 0..n {
        rule.extend(triangle_rule(f.centroid, v[f.vertices[k]], v[f.vertices[(k + 1) % n]], degree));
    }
    rule
}

/// Rule on a cell from a fan of simplices around its centroid.
pub fn cell_rule(mesh: &Mesh, cell: usize, degree: usize) -> Rule {
    let c = &mesh.cells()[cell];
    let v = mesh.vertices();
    let mut rule = Rule::default();
    if mesh.dim() == 2 {
        let n = c.vertices.len();
        for k in 0..n {
            rule.extend(triangle_rule(c.centroid, v[c.vertices[k]], v[c.vertices[(k + 1) % n]], degree));
        }
    } else {
        for &fi in &c.facets {
            let f = &mesh.facets()[fi];
            let n = f.vertices.len();
            for k in 0..n {
                rule.extend(tetrahedron_rule(
                    c.centroid,
                    f.centroid,
                    v[f.vertices[k]],
                    v[f.vertices[(k + 1) % n]],
                    degree,
                ));
            }
        }
    }
    rule
}
