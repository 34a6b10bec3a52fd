use nalgebra::Matrix3;
use proptest::prelude::*;
use wg_divfree::bench::{
    case1, case2, case3d, case_by_number, least_squares_slope, rate, run_convergence, ConvergenceReport,
    ConvergenceRow, LevelDiagnostics, LevelErrors, ManufacturedCase, MeshFamily,
};
use wg_divfree::mesh::{generate_hex, generate_rectangular, Vec3};
use wg_divfree::quadrature::cell_rule;
use wg_divfree::solve::SolverConfig;

const FD_STEP: f64 = 1e-3;

/// Fourth-order central difference of `g` along axis `k`.
fn d<F: Fn(&Vec3) -> f64>(g: F, k: usize) -> impl Fn(&Vec3) -> f64 {
    move |x: &Vec3| {
        let at = |s: f64| {
            let mut y = *x;
            y[k] += s * FD_STEP;
            g(&y)
        };
        (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * FD_STEP)
    }
}

/// `-div(A grad u) + grad p` from point values of `u` and `p` only.
fn fd_source(case: &ManufacturedCase, x: &Vec3) -> Vec3 {
    let d_count = case.dim;
    let a = case.coefficient;
    let mut f = Vec3::zeros();
    for i in 0..d_count {
        let ui = |y: &Vec3| case.velocity(y)[i];
        let mut s = 0.0;
        for p in 0..d_count {
            for q in 0..d_count {
                if a[(p, q)] != 0.0 {
                    s += a[(p, q)] * d(d(ui, q), p)(x);
                }
            }
        }
        f[i] = -s + d(|y: &Vec3| case.pressure(y), i)(x);
    }
    f
}

fn random_spd(seed: [f64; 3]) -> Matrix3<f64> {
    let l = Matrix3::new(1.0 + seed[0].abs(), 0.0, 0.0, seed[1], 1.0 + seed[2].abs(), 0.0, 0.3 * seed[0], -0.2, 1.0);
    l * l.transpose()
}

fn point(dim: usize, c: [f64; 3]) -> Vec3 {
    Vec3::new(c[0], c[1], if dim == 3 { c[2] } else { 0.0 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn source_matches_finite_differences(c in prop::array::uniform3(0.0f64..1.0), which in 1u32..=3) {
        let case = case_by_number(which).unwrap();
        let x = point(case.dim, c);
        let f = case.source(&x);
        let fd = fd_source(&case, &x);
        prop_assert!((f - fd).norm() <= 1e-8 * (1.0 + f.norm()), "{} at {x:?}: {f:?} vs {fd:?}", case.name);
    }

    #[test]
    fn source_with_general_coefficient_matches_finite_differences(
        c in prop::array::uniform3(0.05f64..0.95),
        s in prop::array::uniform3(-1.0f64..1.0),
        which in 1u32..=3,
    ) {
        let mut a = random_spd(s);
        let case = case_by_number(which).unwrap();
        if case.dim == 2 {
            a[(0, 2)] = 0.0; a[(1, 2)] = 0.0; a[(2, 0)] = 0.0; a[(2, 1)] = 0.0;
        }
        let case = case.with_coefficient(a);
        let x = point(case.dim, c);
        let f = case.source(&x);
        prop_assert!((f - fd_source(&case, &x)).norm() <= 1e-8 * (1.0 + f.norm()));
    }

    #[test]
    fn velocities_are_divergence_free(c in prop::array::uniform3(0.0f64..1.0), which in 1u32..=3) {
        let case = case_by_number(which).unwrap();
        let x = point(case.dim, c);
        prop_assert!(case.divergence(&x).abs() < 1e-12);
        let fd: f64 = (0..case.dim).map(|i| d(|y: &Vec3| case.velocity(y)[i], i)(&x)).sum();
        prop_assert!(fd.abs() < 1e-8);
    }

    #[test]
    fn gradient_matches_finite_differences(c in prop::array::uniform3(0.0f64..1.0), which in 1u32..=3) {
        let case = case_by_number(which).unwrap();
        let x = point(case.dim, c);
        let g = case.velocity_gradient(&x);
        for i in 0..case.dim {
            for j in 0..case.dim {
                let fd = d(|y: &Vec3| case.velocity(y)[i], j)(&x);
                prop_assert!((g[(i, j)] - fd).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn homogeneous_cases_vanish_on_the_boundary(t in 0.0f64..1.0, side in 0usize..6) {
        for case in [case1(), case3d()] {
            let mut c = [t, 1.0 - t, 0.5 * t];
            let axis = side % case.dim;
            c[axis] = if side < 3 { 0.0 } else { 1.0 };
            prop_assert!(case.velocity(&point(case.dim, c)).norm() < 1e-14);
        }
    }

    #[test]
    fn csv_round_trip(rows in proptest::collection::vec((1e-4f64..1.0, 1e-9f64..10.0, 1e-9f64..10.0, 1e-9f64..10.0), 1..8)) {
        let levels: Vec<LevelErrors> = rows
            .iter()
            .map(|&(h, a, b, c)| LevelErrors { h, h1_err: a, l2_err: b, p_err: c, diagnostics: LevelDiagnostics::default() })
            .collect();
        let report = ConvergenceReport::from_levels("case1", "rectangular", levels);
        let csv = report.to_csv();
        prop_assert!(csv.starts_with("h,h1_err,h1_rate,l2_err,l2_rate,p_err,p_rate\n"));
        let back = ConvergenceReport::rows_from_csv(&csv).unwrap();
        prop_assert_eq!(back, report.rows);
    }

    #[test]
    fn rates_recover_power_laws(p in 0.5f64..3.0, c in 0.1f64..10.0, h0 in 0.1f64..1.0) {
        let h: Vec<f64> = (0..5).map(|k| h0 / 2f64.powi(k)).collect();
        let e: Vec<f64> = h.iter().map(|x| c * x.powf(p)).collect();
        prop_assert!((rate(h[0], e[0], h[1], e[1]) - p).abs() < 1e-12);
        prop_assert!((least_squares_slope(&h, &e) - p).abs() < 1e-12);
    }
}

#[test]
fn pressures_have_zero_mean() {
    for case in [case1(), case2()] {
        let mesh = generate_rectangular(4);
        let mean: f64 = (0..mesh.n_cells()).map(|c| cell_rule(&mesh, c, 4).integrate(|x| case.pressure(x))).sum();
        assert!(mean.abs() < 1e-14, "{}", case.name);
    }
    let mesh = generate_hex(2, 2, 2);
    let mean: f64 = (0..mesh.n_cells()).map(|c| cell_rule(&mesh, c, 8).integrate(|x| case3d().pressure(x))).sum();
    assert!(mean.abs() < 1e-14);
}

#[test]
fn case2_closed_forms() {
    let c = case2();
    assert_eq!(c.pressure(&Vec3::new(0.25, 0.75, 0.0)), 1.0);
    let x = Vec3::new(0.2, 0.9, 0.0);
    let u = c.velocity(&x);
    assert!((u[0] - 0.2 * 0.8 * (1.0 - 1.8)).abs() < 1e-15);
    assert!((u[1] + 0.9 * 0.1 * (1.0 - 0.4)).abs() < 1e-15);
}

#[test]
fn csv_with_wrong_header_is_rejected() {
    let err = ConvergenceReport::rows_from_csv("h,err\n0.5,1.0\n").unwrap_err();
    assert!(matches!(err, wg_divfree::Error::Parse { .. }));
    let err = ConvergenceReport::rows_from_csv("h,h1_err,h1_rate,l2_err,l2_rate,p_err,p_rate\n0.5,x,,1,,1,\n").unwrap_err();
    assert!(matches!(err, wg_divfree::Error::Parse { .. }));
}

#[test]
fn first_row_has_no_rates() {
    let row = ConvergenceRow { h: 0.25, h1_err: 1.0, h1_rate: None, l2_err: 0.5, l2_rate: None, p_err: 0.1, p_rate: None };
    let levels = vec![
        LevelErrors { h: 0.25, h1_err: 1.0, l2_err: 0.5, p_err: 0.1, diagnostics: LevelDiagnostics::default() },
        LevelErrors { h: 0.125, h1_err: 0.5, l2_err: 0.125, p_err: 0.05, diagnostics: LevelDiagnostics::default() },
    ];
    let r = ConvergenceReport::from_levels("c", "f", levels);
    assert_eq!(r.rows[0], row);
    assert_eq!(r.last_rates(), Some((1.0, 2.0, 1.0)));
    let md = r.to_markdown();
    assert!(md.contains("Conv.Rate") && md.contains("Last interval"));
    assert!(md.contains("| 2.5000e-1 | 1.0000e0 | - |"));
}

#[test]
fn convergence_needs_two_levels() {
    assert!(run_convergence(&case1(), MeshFamily::Rectangular, 1, &SolverConfig::default()).is_err());
}

#[test]
fn short_convergence_runs_show_the_expected_orders() {
    for family in [MeshFamily::Rectangular, MeshFamily::Triangular, MeshFamily::HangingNode] {
        let r = run_convergence(&case1(), family, 3, &SolverConfig::default()).unwrap();
        assert_eq!(r.rows.len(), 3);
        let (h1, l2, _) = r.last_rates().unwrap();
        assert!(h1 > 0.8 && l2 > 1.6, "{}: {h1} {l2}", family.name());
        assert!(r.diagnostics.iter().all(|d| d.pressure_nontree_residual < 1e-9));
    }
}

#[test]
fn families_parse_from_names() {
    for f in [MeshFamily::Rectangular, MeshFamily::Triangular, MeshFamily::Mixed, MeshFamily::HangingNode] {
        assert_eq!(f.name().parse::<MeshFamily>().unwrap(), f);
    }
    assert!("hexagonal".parse::<MeshFamily>().is_err());
    assert!(case_by_number(4).is_none());
}
