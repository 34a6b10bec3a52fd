#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Matrix3};
use rand::Rng;
use wg_divfree::mesh::{Mesh, Vec3};
use wg_divfree::wg::{weak_divergence, weak_gradient, DofLayout, WgField};

/// Counterclockwise convex polygon: sorted random angles on a random ellipse.
pub fn random_convex_polygon<R: Rng>(rng: &mut R) -> Vec<[f64; 2]> {
    let n = rng.gen_range(3..=9);
    let (a, b) = (rng.gen_range(0.3..2.0), rng.gen_range(0.3..2.0));
    let (cx, cy) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let rot: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut t: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    t.sort_by(f64::total_cmp);
    t.dedup_by(|x, y| (*x - *y).abs() < 0.05);
    if t.len() < 3 {
        t = vec![0.0, 2.1, 4.2];
    }
    t.iter()
        .map(|&s| {
            let (x, y) = (a * s.cos(), b * s.sin());
            [cx + rot.cos() * x - rot.sin() * y, cy + rot.sin() * x + rot.cos() * y]
        })
        .collect()
}

pub struct OracleCase {
    pub mesh: Mesh,
    pub layout: DofLayout,
    pub field: WgField,
    pub vertices: Vec<[f64; 2]>,
    pub vb: Vec<[f64; 2]>,
    pub v0: [[f64; 3]; 2],
}

/// Single-cell mesh with random interior and facet values.
pub fn random_oracle_case<R: Rng>(rng: &mut R) -> OracleCase {
    let vertices = random_convex_polygon(rng);
    let cell: Vec<usize> = (0..vertices.len()).collect();
    let mesh = Mesh::from_polygons(&vertices, &[cell]).expect("convex polygon");
    let layout = DofLayout::new(&mesh);
    let mut field = WgField::zeros(&layout);
    let v0 = [[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)], [
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    ]];
    for (i, row) in v0.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            field.free[layout.cell_dof(0, i, k)] = v;
        }
    }
    let mut vb = vec![[0.0; 2]; vertices.len()];
    for (k, &fi) in mesh.cells()[0].facets.iter().enumerate() {
        let v = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        field.set_facet_value(&layout, fi, &Vec3::new(v[0], v[1], 0.0));
        vb[k] = v;
    }
    OracleCase { mesh, layout, field, vertices, vb, v0 }
}

/// Solves the defining identities of the weak gradient and weak divergence
/// directly on a polygon given by its raw vertex loop. Test functions span
/// the constant `2 x 2` matrices and constants; the volume term
/// `(v_0, div tau)` is integrated with the vertex-fan midpoint rule.
pub fn brute_force_weak_operators(vertices: &[[f64; 2]], vb: &[[f64; 2]]) -> (Matrix3<f64>, f64) {
    let n = vertices.len();
    let area: f64 = 0.5
        * (0..n)
            .map(|k| {
                let (p, q) = (vertices[k], vertices[(k + 1) % n]);
                p[0] * q[1] - q[0] * p[1]
            })
            .sum::<f64>();
    // edge k joins vertex k and k+1; outward normal of a counterclockwise loop
    let boundary = |k: usize, i: usize, j: usize| {
        let (p, q) = (vertices[k], vertices[(k + 1) % n]);
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        let len = (dx * dx + dy * dy).sqrt();
        let normal = [dy / len, -dx / len];
        len * vb[k][i] * normal[j]
    };
    let mut m = DMatrix::<f64>::zeros(4, 4);
    let mut rhs = DVector::<f64>::zeros(4);
    for a in 0..4 {
        let (i, j) = (a / 2, a % 2);
        // (E_ij, E_kl)_T = |T| delta
        m[(a, a)] = area;
        // div of a constant tau is zero, so only the boundary term remains
        rhs[a] = (0..n).map(|k| boundary(k, i, j)).sum();
    }
    let g = m.lu().solve(&rhs).expect("mass matrix is regular");
    let grad = Matrix3::new(g[0], g[1], 0.0, g[2], g[3], 0.0, 0.0, 0.0, 0.0);
    let div = (0..n).map(|k| boundary(k, 0, 0) + boundary(k, 1, 1)).sum::<f64>() / area;
    (grad, div)
}

pub fn library_weak_operators(case: &OracleCase) -> (Matrix3<f64>, f64) {
    (
        weak_gradient(&case.mesh, &case.layout, &case.field, 0),
        weak_divergence(&case.mesh, &case.layout, &case.field, 0),
    )
}

/// Max relative deviation of the library operators from the oracle.
pub fn oracle_deviation(case: &OracleCase) -> (f64, f64) {
    let (g, d) = library_weak_operators(case);
    let (go, doracle) = brute_force_weak_operators(&case.vertices, &case.vb);
    let scale = go.abs().max().max(1.0);
    ((g - go).abs().max() / scale, (d - doracle).abs() / doracle.abs().max(1.0))
}
