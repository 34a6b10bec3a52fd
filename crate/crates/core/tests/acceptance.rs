//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Runs without the test harness. By default the process exits 0 and the
//! verdicts are reported on stdout; set `WGDF_ACCEPTANCE_STRICT=1` to exit 1
//! when any criterion fails.

mod common;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wg_divfree::bench::{case1, case2, run_convergence, ConvergenceReport, MeshFamily};
use wg_divfree::divfree::{
    build_divfree_basis, build_edge_loops_3d, expected_dimension, numerical_rank, signed_vertex_sum, verify_basis,
    VerifyOptions, KERNEL_TOL,
};
use wg_divfree::mesh::{
    euler_check, generate_hanging_node, generate_hex, generate_mixed_polygonal, generate_rectangular,
    generate_triangular, Mesh, Vec3,
};
use wg_divfree::solve::{recover_pressure, solve_reduced, solve_saddle, SolverConfig};
use wg_divfree::wg::{apply_dirichlet, assemble_forms, Diffusion, DofLayout};

const REL_5_PERCENT: f64 = 0.05;
const RUNTIME_LIMIT_S: f64 = 120.0;
const KERNEL_LIMIT: f64 = 1e-12;
const VERTEX_SUM_LIMIT: f64 = 1e-12;
const EQUIVALENCE_LIMIT: f64 = 1e-8;
const ORACLE_LIMIT: f64 = 1e-12;
const ENERGY_LIMIT: f64 = 1e-10;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: String) -> Self {
        Verdict { pass, detail }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn within(label: &str, got: f64, expected: f64, notes: &mut Vec<String>) -> bool {
    let r = rel(got, expected);
    let ok = r <= REL_5_PERCENT;
    notes.push(format!("{label} {got:.4e} vs {expected:.4e} ({:.1}%{})", 100.0 * r, if ok { "" } else { " FAIL" }));
    ok
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool").install(f)
}

fn row_at(report: &ConvergenceReport, h: f64) -> &wg_divfree::bench::ConvergenceRow {
    report.rows.iter().find(|r| (r.h - h).abs() < 1e-12).expect("level present")
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let report = single_threaded(|| run_convergence(&case1(), MeshFamily::Rectangular, 5, &SolverConfig::default()));
    let seconds = start.elapsed().as_secs_f64();
    let report = match report {
        Ok(r) => r,
        Err(e) => return Verdict::new(false, e.to_string()),
    };
    let (h1_rate, l2_rate, _) = report.last_rates().expect("five levels");
    let mut notes = vec![format!("rates {h1_rate:.4}/{l2_rate:.4}"), format!("{seconds:.1}s single-threaded")];
    let mut pass = h1_rate >= 0.90 && l2_rate >= 1.90 && seconds <= RUNTIME_LIMIT_S;
    let (r16, r32) = (row_at(&report, 1.0 / 16.0), row_at(&report, 1.0 / 32.0));
    pass &= within("|||e|||(1/16)", r16.h1_err, 4.4578e-01, &mut notes);
    pass &= within("|||e|||(1/32)", r32.h1_err, 2.4452e-01, &mut notes);
    pass &= within("L2(1/16)", r16.l2_err, 3.1031e-02, &mut notes);
    pass &= within("L2(1/32)", r32.l2_err, 8.5507e-03, &mut notes);
    Verdict::new(pass, notes.join(", "))
}

fn criterion_2() -> Verdict {
    let report = match run_convergence(&case2(), MeshFamily::Triangular, 6, &SolverConfig::default()) {
        Ok(r) => r,
        Err(e) => return Verdict::new(false, e.to_string()),
    };
    let (h1, l2, p) = report.slopes();
    let mut notes = vec![format!("slopes {h1:.4}/{l2:.4}/{p:.4}")];
    let mut pass = (h1 - 1.0).abs() <= 0.1 && (l2 - 2.0).abs() <= 0.1 && p >= 0.90;
    pass &= within("p(1/8)", row_at(&report, 0.125).p_err, 1.2246e-01, &mut notes);
    pass &= within("p(1/16)", row_at(&report, 0.0625).p_err, 6.4525e-02, &mut notes);
    Verdict::new(pass, notes.join(", "))
}

fn criterion_3() -> Verdict {
    match run_convergence(&case1(), MeshFamily::Mixed, 5, &SolverConfig::default()) {
        Ok(report) => {
            let (h1, l2, _) = report.last_rates().expect("five levels");
            Verdict::new(h1 >= 0.90 && l2 >= 1.90, format!("finest-interval rates {h1:.4}/{l2:.4}"))
        }
        Err(e) => Verdict::new(false, e.to_string()),
    }
}

fn meshes_2d() -> Vec<(String, Mesh)> {
    let mut v = Vec::new();
    for n in [1, 2, 4] {
        v.push((format!("rect{n}"), generate_rectangular(n)));
        v.push((format!("tri{n}"), generate_triangular(n)));
    }
    for l in [0, 1] {
        v.push((format!("mixed{l}"), generate_mixed_polygonal(l)));
    }
    for n in [2, 4] {
        v.push((format!("hang{n}"), generate_hanging_node(n)));
    }
    v
}

fn meshes_3d() -> Vec<(String, Mesh)> {
    [(1, 1, 1), (2, 1, 1), (2, 2, 2), (3, 3, 3)].iter().map(|&(x, y, z)| (format!("hex{x}{y}{z}"), generate_hex(x, y, z))).collect()
}

struct DimCheck {
    columns: usize,
    formula: usize,
    nullity: usize,
    rank_b_ok: bool,
    rank_c: usize,
    kernel: f64,
}

fn dimension_check(mesh: &Mesh) -> wg_divfree::Result<DimCheck> {
    let layout = DofLayout::new(mesh);
    let forms = assemble_forms(mesh, &layout, &Diffusion::Identity, |_| Vec3::zeros())?;
    let basis = build_divfree_basis(mesh, &layout)?;
    let rank_b = numerical_rank(&forms.b.to_dense());
    let report = verify_basis(&basis, &forms, VerifyOptions { dense_limit: usize::MAX });
    let (kernel, rank_c) = match &report {
        Ok(r) => (r.max_kernel_residual, r.rank.unwrap_or(0)),
        Err(_) => (f64::INFINITY, 0),
    };
    Ok(DimCheck {
        columns: basis.len(),
        formula: expected_dimension(mesh),
        nullity: layout.n_free() - rank_b,
        rank_b_ok: rank_b + 1 == mesh.n_cells(),
        rank_c,
        kernel,
    })
}

fn dimension_criterion(meshes: &[(String, Mesh)], need_rank_c: bool) -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, mesh) in meshes {
        match dimension_check(mesh) {
            Ok(c) => {
                let ok = c.columns == c.formula && c.columns == c.nullity && c.rank_b_ok && (!need_rank_c || c.rank_c == c.columns);
                pass &= ok;
                notes.push(format!("{name}={}{}", c.columns, if ok { "" } else { "!" }));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{name}: {e}"));
            }
        }
    }
    Verdict::new(pass, notes.join(" "))
}

fn criterion_6() -> Verdict {
    let mut worst = 0.0f64;
    let mut worst_mesh = String::new();
    for (name, mesh) in meshes_2d().into_iter().chain(meshes_3d()) {
        let k = dimension_check(&mesh).map_or(f64::INFINITY, |c| c.kernel);
        if k >= worst {
            worst = k;
            worst_mesh = name;
        }
    }
    Verdict::new(worst <= KERNEL_LIMIT && worst <= KERNEL_TOL, format!("max scaled |BC| = {worst:.2e} ({worst_mesh})"))
}

fn criterion_7() -> Verdict {
    let mut worst = 0.0f64;
    let mut vertices = 0;
    for n in [2, 3] {
        let mesh = generate_hex(n, n, n);
        let layout = DofLayout::new(&mesh);
        let Ok(loops) = build_edge_loops_3d(&mesh, &layout) else {
            return Verdict::new(false, "edge loops failed".into());
        };
        for v in mesh.interior_vertices() {
            let s = signed_vertex_sum(&mesh, &loops, v, layout.n_free());
            worst = worst.max(s.iter().map(|x| x * x).sum::<f64>().sqrt());
            vertices += 1;
        }
    }
    Verdict::new(worst <= VERTEX_SUM_LIMIT, format!("{vertices} vertices, max norm {worst:.2e}"))
}

fn relative(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    d / b.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn equivalence(mesh: &Mesh, case: &wg_divfree::bench::ManufacturedCase) -> wg_divfree::Result<(f64, f64)> {
    let layout = DofLayout::new(mesh);
    let forms = assemble_forms(mesh, &layout, &Diffusion::Identity, |x| case.source(x))?;
    let g = apply_dirichlet(mesh, &layout, |x| case.velocity(x));
    let basis = build_divfree_basis(mesh, &layout)?;
    let r = solve_reduced(mesh, &layout, &forms, &basis, &g, &SolverConfig::default())?;
    let s = solve_saddle(mesh, &layout, &forms, &g)?;
    let p = recover_pressure(mesh, &layout, &forms, &r.velocity)?.pressure;
    let ps = s.pressure.expect("saddle pressure");
    Ok((relative(&r.velocity.free, &s.velocity.free), relative(&p.values, &ps.values)))
}

fn criterion_8() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, mesh, case) in [("case1 rect 1/8", generate_rectangular(8), case1()), ("case2 tri 1/8", generate_triangular(8), case2())] {
        match equivalence(&mesh, &case) {
            Ok((du, dp)) => {
                pass &= du <= EQUIVALENCE_LIMIT && dp <= EQUIVALENCE_LIMIT;
                notes.push(format!("{name}: u {du:.1e}, p {dp:.1e}"));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{name}: {e}"));
            }
        }
    }
    Verdict::new(pass, notes.join("; "))
}

fn criterion_9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_g, mut worst_d, mut worst_trace) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let case = common::random_oracle_case(&mut rng);
        let (dg, dd) = common::oracle_deviation(&case);
        let (g, d) = common::library_weak_operators(&case);
        worst_g = worst_g.max(dg);
        worst_d = worst_d.max(dd);
        worst_trace = worst_trace.max((g.trace() - d).abs() / d.abs().max(1.0));
    }
    Verdict::new(
        worst_g <= ORACLE_LIMIT && worst_d <= ORACLE_LIMIT && worst_trace <= ORACLE_LIMIT,
        format!("100 polygons: grad {worst_g:.1e}, div {worst_d:.1e}, trace {worst_trace:.1e}"),
    )
}

fn criterion_10() -> Verdict {
    let mut meshes = meshes_2d();
    meshes.extend(meshes_3d());
    for n in [8, 16] {
        meshes.push((format!("rect{n}"), generate_rectangular(n)));
        meshes.push((format!("tri{n}"), generate_triangular(n)));
        meshes.push((format!("hang{n}"), generate_hanging_node(n)));
    }
    meshes.push(("mixed3".into(), generate_mixed_polygonal(3)));
    meshes.push(("hex423".into(), generate_hex(4, 2, 3)));
    let failed: Vec<&str> = meshes.iter().filter(|(_, m)| !euler_check(m)).map(|(n, _)| n.as_str()).collect();
    Verdict::new(failed.is_empty(), format!("{} meshes{}", meshes.len(), if failed.is_empty() { String::new() } else { format!(", failing {failed:?}") }))
}

fn criterion_11() -> Verdict {
    let run = || -> wg_divfree::Result<(f64, f64)> {
        let mesh = generate_rectangular(16);
        let case = case1();
        let layout = DofLayout::new(&mesh);
        let forms = assemble_forms(&mesh, &layout, &Diffusion::Identity, |x| case.source(x))?;
        let basis = build_divfree_basis(&mesh, &layout)?;
        let g = apply_dirichlet(&mesh, &layout, |x| case.velocity(x));
        let r = solve_reduced(&mesh, &layout, &forms, &basis, &g, &SolverConfig::default())?;
        let work: f64 = forms.load.iter().zip(&r.velocity.free).map(|(f, u)| f * u).sum();
        Ok((forms.energy(&r.velocity.free), work))
    };
    match run() {
        Ok((a, f)) => {
            let r = rel(a, f);
            Verdict::new(r <= ENERGY_LIMIT, format!("a(u,u) = {a:.12e}, (f,u_0) = {f:.12e}, rel {r:.1e}"))
        }
        Err(e) => Verdict::new(false, e.to_string()),
    }
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("case 1 rectangular table", criterion_1),
        ("case 2 triangular table", criterion_2),
        ("mixed polygonal rates", criterion_3),
        ("2D dimension oracle", || dimension_criterion(&meshes_2d(), false)),
        ("3D dimension oracle", || dimension_criterion(&meshes_3d(), true)),
        ("kernel property", criterion_6),
        ("3D vertex dependency", criterion_7),
        ("reduced and saddle solves agree", criterion_8),
        ("weak operator oracle", criterion_9),
        ("Euler identities", criterion_10),
        ("energy identity", criterion_11),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failures += 1;
        }
        println!("{} criterion {}: {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    let strict = std::env::var("WGDF_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && failures > 0 {
        std::process::exit(1);
    }
}
