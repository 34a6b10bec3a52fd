use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wg_divfree::bench::{case1, case2, case3d};
use wg_divfree::divfree::build_divfree_basis;
use wg_divfree::mesh::{generate_hanging_node, generate_hex, generate_mixed_polygonal, generate_rectangular, generate_triangular, Mesh, Vec3};
use wg_divfree::solve::{
    cg_solve, cholesky_solve, flux_lift, lu_solve, recover_pressure, solve_reduced, solve_saddle, DualTree,
    LinearSolver, SolverConfig, SparseMatrix,
};
use wg_divfree::wg::{apply_dirichlet, assemble_forms, Diffusion, DofLayout};
use wg_divfree::Error;

/// 5-point Laplacian on an `n x n` interior grid.
fn poisson(n: usize) -> SparseMatrix {
    let idx = |i: usize, j: usize| j * n + i;
    let mut t = Vec::new();
    for j in 0..n {
        for i in 0..n {
            t.push((idx(i, j), idx(i, j), 4.0));
            if i > 0 {
                t.push((idx(i, j), idx(i - 1, j), -1.0));
            }
            if i + 1 < n {
                t.push((idx(i, j), idx(i + 1, j), -1.0));
            }
            if j > 0 {
                t.push((idx(i, j), idx(i, j - 1), -1.0));
            }
            if j + 1 < n {
                t.push((idx(i, j), idx(i, j + 1), -1.0));
            }
        }
    }
    SparseMatrix::from_triplets(n * n, n * n, &t)
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    d / b.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE)
}

#[test]
fn cg_agrees_with_cholesky_on_poisson() {
    let m = poisson(16);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rhs: Vec<f64> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let direct = cholesky_solve(&m, &rhs).unwrap();
    let cg = cg_solve(&m, &rhs, 1e-12, 2560).unwrap();
    assert!(cg.residual <= 1e-12);
    assert!(rel_diff(&cg.x, &direct) < 1e-10);
    assert!(cg.iterations > 0 && cg.iterations <= 256);
    let lu = lu_solve(&m, &rhs).unwrap();
    assert!(rel_diff(&lu, &direct) < 1e-12);
}

#[test]
fn cg_reports_nonconvergence() {
    let m = poisson(16);
    let rhs = vec![1.0; 256];
    match cg_solve(&m, &rhs, 1e-12, 2) {
        Err(Error::NoConvergence { iterations, history, .. }) => {
            assert_eq!(iterations, 2);
            assert!(!history.is_empty());
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn indefinite_matrix_fails_cholesky() {
    let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, -1.0)]);
    assert!(matches!(cholesky_solve(&m, &[1.0, 1.0]), Err(Error::NotSpd { .. })));
    let singular = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]);
    assert!(lu_solve(&singular, &[1.0, 0.0]).is_err());
}

#[test]
fn zero_data_gives_zero_solution() {
    for mesh in [generate_triangular(4), generate_hex(2, 2, 2)] {
        let layout = DofLayout::new(&mesh);
        let forms = assemble_forms(&mesh, &layout, &Diffusion::Identity, |_| Vec3::zeros()).unwrap();
        let basis = build_divfree_basis(&mesh, &layout).unwrap();
        let g = vec![0.0; layout.n_fixed()];
        let r = solve_reduced(&mesh, &layout, &forms, &basis, &g, &SolverConfig::default()).unwrap();
        assert!(r.velocity.free.iter().all(|v| *v == 0.0));
        let s = solve_saddle(&mesh, &layout, &forms, &g).unwrap();
        assert!(s.velocity.free.iter().all(|v| v.abs() < 1e-14));
        assert!(s.pressure.unwrap().values.iter().all(|v| v.abs() < 1e-14));
    }
}

struct Problem {
    mesh: Mesh,
    layout: DofLayout,
    forms: wg_divfree::wg::FormMatrices,
    g: Vec<f64>,
}

fn problem(mesh: Mesh, case: &wg_divfree::bench::ManufacturedCase) -> Problem {
    let layout = DofLayout::new(&mesh);
    let forms = assemble_forms(&mesh, &layout, &Diffusion::Identity, |x| case.source(x)).unwrap();
    let g = apply_dirichlet(&mesh, &layout, |x| case.velocity(x));
    Problem { mesh, layout, forms, g }
}

fn compare_with_saddle(p: &Problem) {
    let basis = build_divfree_basis(&p.mesh, &p.layout).unwrap();
    let r = solve_reduced(&p.mesh, &p.layout, &p.forms, &basis, &p.g, &SolverConfig::default()).unwrap();
    let s = solve_saddle(&p.mesh, &p.layout, &p.forms, &p.g).unwrap();
    assert!(rel_diff(&r.velocity.free, &s.velocity.free) < 1e-8);
    let rec = recover_pressure(&p.mesh, &p.layout, &p.forms, &r.velocity).unwrap();
    let ps = s.pressure.unwrap();
    assert!(rel_diff(&rec.pressure.values, &ps.values) < 1e-8);
    assert!(rec.pressure.mean(&p.mesh).abs() < 1e-13);
    // the discrete velocity is divergence free
    let div = p.forms.divergence(&r.velocity.free, &r.velocity.fixed);
    assert!(div.iter().all(|d| d.abs() < 1e-10));
}

#[test]
fn reduced_matches_saddle_homogeneous() {
    compare_with_saddle(&problem(generate_rectangular(8), &case1()));
    compare_with_saddle(&problem(generate_hanging_node(4), &case1()));
    compare_with_saddle(&problem(generate_hex(2, 2, 2), &case3d()));
}

#[test]
fn reduced_matches_saddle_with_boundary_data() {
    compare_with_saddle(&problem(generate_triangular(8), &case2()));
    compare_with_saddle(&problem(generate_mixed_polygonal(1), &case2()));
}

#[test]
fn cg_and_cholesky_reduced_solves_agree() {
    let p = problem(generate_triangular(6), &case2());
    let basis = build_divfree_basis(&p.mesh, &p.layout).unwrap();
    let chol = SolverConfig { solver: LinearSolver::Cholesky, ..Default::default() };
    let cg = SolverConfig { solver: LinearSolver::Cg, ..Default::default() };
    let a = solve_reduced(&p.mesh, &p.layout, &p.forms, &basis, &p.g, &chol).unwrap();
    let b = solve_reduced(&p.mesh, &p.layout, &p.forms, &basis, &p.g, &cg).unwrap();
    assert_eq!((a.stats.method, b.stats.method), ("cholesky", "cg"));
    assert!(b.stats.residual <= 1e-12);
    assert!(rel_diff(&b.velocity.free, &a.velocity.free) < 1e-9);
}

#[test]
fn solution_is_independent_of_basis_order() {
    let p = problem(generate_mixed_polygonal(1), &case1());
    let basis = build_divfree_basis(&p.mesh, &p.layout).unwrap();
    let mut order: Vec<usize> = (0..basis.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let cfg = SolverConfig::default();
    let a = solve_reduced(&p.mesh, &p.layout, &p.forms, &basis, &p.g, &cfg).unwrap();
    let b = solve_reduced(&p.mesh, &p.layout, &p.forms, &basis.permuted(&order), &p.g, &cfg).unwrap();
    assert!(rel_diff(&b.velocity.free, &a.velocity.free) < 1e-11);
}

#[test]
fn energy_identity_for_homogeneous_data() {
    let p = problem(generate_rectangular(16), &case1());
    let basis = build_divfree_basis(&p.mesh, &p.layout).unwrap();
    let r = solve_reduced(&p.mesh, &p.layout, &p.forms, &basis, &p.g, &SolverConfig::default()).unwrap();
    let energy = p.forms.energy(&r.velocity.free);
    let work: f64 = p.forms.load.iter().zip(&r.velocity.free).map(|(f, u)| f * u).sum();
    assert!((energy - work).abs() <= 1e-10 * work.abs());
    assert_eq!(r.stats.lift_norm, 0.0);
}

#[test]
fn pressure_recovery_is_consistent_off_the_tree() {
    let p = problem(generate_triangular(8), &case2());
    let basis = build_divfree_basis(&p.mesh, &p.layout).unwrap();
    let r = solve_reduced(&p.mesh, &p.layout, &p.forms, &basis, &p.g, &SolverConfig::default()).unwrap();
    let rec = recover_pressure(&p.mesh, &p.layout, &p.forms, &r.velocity).unwrap();
    assert!(rec.max_nontree_residual < 1e-10);
}

#[test]
fn boundary_inflow_is_lifted_and_linear_flow_is_exact() {
    // u = (x, -y), p = 0 solves Stokes with f = 0 and has normal flux through the boundary
    let flow = |x: &Vec3| Vec3::new(x[0], -x[1], 0.0);
    for mesh in [generate_triangular(4), generate_mixed_polygonal(1)] {
        let layout = DofLayout::new(&mesh);
        let forms = assemble_forms(&mesh, &layout, &Diffusion::Identity, |_| Vec3::zeros()).unwrap();
        let g = apply_dirichlet(&mesh, &layout, flow);
        let basis = build_divfree_basis(&mesh, &layout).unwrap();
        let r = solve_reduced(&mesh, &layout, &forms, &basis, &g, &SolverConfig::default()).unwrap();
        assert!(r.stats.lift_norm > 0.0);
        let exact = wg_divfree::wg::project_qh(&mesh, &layout, flow);
        assert!(rel_diff(&r.velocity.free, &exact.free) < 1e-10);
        let rec = recover_pressure(&mesh, &layout, &forms, &r.velocity).unwrap();
        assert!(rec.pressure.values.iter().all(|v| v.abs() < 1e-10));
    }
}

#[test]
fn dual_tree_spans_all_cells() {
    let mesh = generate_hanging_node(6);
    let tree = DualTree::new(&mesh).unwrap();
    assert_eq!(tree.order.len(), mesh.n_cells());
    assert_eq!(tree.order[0], 0);
    assert_eq!(tree.is_tree_facet.iter().filter(|t| **t).count(), mesh.n_cells() - 1);
    assert!(tree.parent[0].is_none() && tree.parent[1..].iter().all(Option::is_some));
}

#[test]
fn disconnected_mesh_is_reported() {
    let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 0.0], [3.0, 0.0], [2.0, 1.0]];
    let mesh = Mesh::from_polygons(&pts, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
    assert!(matches!(DualTree::new(&mesh), Err(Error::DisconnectedDualGraph { cell: 1 })));
}

#[test]
fn shape_mismatch_is_rejected() {
    let p = problem(generate_rectangular(2), &case1());
    let basis = build_divfree_basis(&p.mesh, &p.layout).unwrap();
    let bad = vec![0.0; p.g.len() + 1];
    assert!(matches!(
        solve_reduced(&p.mesh, &p.layout, &p.forms, &basis, &bad, &SolverConfig::default()),
        Err(Error::Shape(_))
    ));
    assert!(matches!(solve_saddle(&p.mesh, &p.layout, &p.forms, &bad), Err(Error::Shape(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn flux_lift_hits_any_balanced_target(values in proptest::collection::vec(-1.0f64..1.0, 32)) {
        let mesh = generate_triangular(4);
        let layout = DofLayout::new(&mesh);
        let forms = assemble_forms(&mesh, &layout, &Diffusion::Identity, |_| Vec3::zeros()).unwrap();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let target: Vec<f64> = values.iter().map(|v| v - mean).collect();
        let tree = DualTree::new(&mesh).unwrap();
        let (w, leftover) = flux_lift(&mesh, &layout, &tree, &target);
        prop_assert!(leftover.abs() < 1e-12);
        let bw = forms.b.mul_vec(&w);
        for (a, b) in bw.iter().zip(&target) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cg_solves_random_spd_systems(seed in any::<u64>(), n in 2usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, n as f64 + rng.gen_range(0.0..1.0)));
            for _ in 0..3 {
                let j = rng.gen_range(0..n);
                if j != i {
                    let v = rng.gen_range(-1.0..1.0);
                    t.push((i, j, v));
                    t.push((j, i, v));
                }
            }
        }
        let m = SparseMatrix::from_triplets(n, n, &t);
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cg = cg_solve(&m, &rhs, 1e-12, 10 * n).unwrap();
        let direct = cholesky_solve(&m, &rhs).unwrap();
        prop_assert!(rel_diff(&cg.x, &direct) < 1e-10);
    }
}
