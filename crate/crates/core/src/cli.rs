//! The `wgdf` command line. Exit codes: 0 on success, 1 when a verification
//! or solve fails, 2 on usage or input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench::{case3d, case_by_number, measure_errors, run_convergence, MeshFamily};
use crate::divfree::{build_divfree_basis, expected_dimension, verify_basis, VerifyError, VerifyOptions, KERNEL_TOL};
use crate::error::Error;
use crate::mesh::{
    euler_check, export_vtk, generate_hanging_node, generate_hex, generate_mixed_polygonal, generate_rectangular,
    generate_triangular, load_mesh, save_mesh, CellData, Mesh,
};
use crate::solve::{recover_pressure, solve_reduced, solve_saddle, SolverConfig};
use crate::wg::{apply_dirichlet, assemble_forms, Diffusion, DofLayout};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "WGDF_THREADS";

#[derive(Parser, Debug)]
#[command(name = "wgdf", version, about = "Weak Galerkin Stokes solver with divergence-free bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mesh utilities.
    Mesh {
        #[command(subcommand)]
        action: MeshCommand,
    },
    /// Build the divergence-free basis and check kernel, dimension and rank.
    VerifyBasis {
        #[arg(short, long)]
        mesh: Option<PathBuf>,
        /// Require a 3D mesh; without `--mesh` the 2x2x2 hex mesh is used.
        #[arg(long = "3d")]
        three_d: bool,
        /// Write the basis matrix in triplet form.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Solve a manufactured case on a mesh.
    Solve(SolveArgs),
    /// Convergence study on a mesh family.
    Convergence {
        #[arg(long)]
        case: u32,
        #[arg(long)]
        family: MeshFamily,
        #[arg(long, default_value_t = 5)]
        levels: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        markdown: bool,
    },
    /// Check the Euler identity of the interior entity counts.
    EulerCheck {
        #[arg(short, long)]
        mesh: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum MeshCommand {
    /// Generate a mesh: `rectangular N`, `triangular N`, `mixed LEVEL`,
    /// `hanging N` or `hex NX [NY NZ]`.
    Gen {
        family: String,
        #[arg(required = true, num_args = 1..=3)]
        params: Vec<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(short, long)]
    mesh: PathBuf,
    /// 1 or 2 on 2D meshes; 3D meshes always use the trigonometric field.
    #[arg(long, default_value_t = 1)]
    case: u32,
    #[arg(long)]
    saddle: bool,
    #[arg(long)]
    vtk: Option<PathBuf>,
}

enum Failure {
    Verify(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } | Error::Parse { .. } | Error::InvalidMesh(_) | Error::NonConvex { .. } | Error::Dimension { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Verify(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    configure_threads();
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Verify(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
    }
}

fn generate(family: &str, params: &[usize]) -> Result<Mesh, Failure> {
    let p = |k: usize| params.get(k).copied();
    let bad = || Failure::Usage(format!("bad parameters {params:?} for family '{family}'"));
    if family == "mixed" {
        return match params {
            [level] => Ok(generate_mixed_polygonal(*level as u32)),
            _ => Err(bad()),
        };
    }
    let n = p(0).filter(|&n| n > 0).ok_or_else(bad)?;
    match family {
        "hex" => {
            let (ny, nz) = match params.len() {
                1 => (n, n),
                3 => (p(1).unwrap(), p(2).unwrap()),
                _ => return Err(bad()),
            };
            if ny == 0 || nz == 0 {
                return Err(bad());
            }
            Ok(generate_hex(n, ny, nz))
        }
        _ if params.len() != 1 => Err(bad()),
        "rectangular" => Ok(generate_rectangular(n)),
        "triangular" => Ok(generate_triangular(n)),
        "hanging" if n % 2 == 0 => Ok(generate_hanging_node(n)),
        "hanging" => Err(Failure::Usage("hanging-node meshes need an even N".into())),
        _ => Err(Failure::Usage(format!("unknown mesh family '{family}'"))),
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Mesh { action: MeshCommand::Gen { family, params, output } } => {
            let mesh = generate(&family, &params)?;
            save_mesh(&mesh, &output)?;
            let c = mesh.counts();
            writeln!(
                out,
                "wrote {}: cells={} interior_facets={} interior_vertices={} interior_edges={}",
                output.display(),
                c.n_cells,
                c.n_interior_facets,
                c.n_interior_vertices,
                c.n_interior_edges
            )?;
        }
        Command::VerifyBasis { mesh, three_d, dump } => {
            let mesh = match mesh {
                Some(path) => load_mesh(&path)?,
                None if three_d => generate_hex(2, 2, 2),
                None => return Err(Failure::Usage("--mesh is required without --3d".into())),
            };
            if three_d && mesh.dim() != 3 {
                return Err(Failure::Usage(format!("--3d given but the mesh is {}D", mesh.dim())));
            }
            verify(&mesh, dump, out)?;
        }
        Command::Solve(args) => solve(args, out)?,
        Command::Convergence { case, family, levels, csv, markdown } => {
            let case = match case_by_number(case) {
                Some(c) if c.dim == 2 => c,
                _ => return Err(Failure::Usage(format!("no 2D case {case}"))),
            };
            let report = run_convergence(&case, family, levels, &SolverConfig::default())?;
            if let Some(path) = csv {
                std::fs::write(&path, report.to_csv()).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            }
            if markdown {
                write!(out, "{}", report.to_markdown())?;
            } else {
                write!(out, "{}", report.to_csv())?;
            }
        }
        Command::EulerCheck { mesh } => {
            let mesh = load_mesh(&mesh)?;
            let c = mesh.counts();
            if !euler_check(&mesh) {
                return Err(Failure::Verify(format!("Euler identity fails: {c:?}")));
            }
            writeln!(out, "OK (hanging nodes counted as vertices)")?;
        }
    }
    Ok(())
}

fn verify(mesh: &Mesh, dump: Option<PathBuf>, out: &mut dyn Write) -> Result<(), Failure> {
    let layout = DofLayout::new(mesh);
    let forms = assemble_forms(mesh, &layout, &Diffusion::Identity, |_| Default::default())?;
    let basis = build_divfree_basis(mesh, &layout)?;
    if let Some(path) = dump {
        let f = std::fs::File::create(&path)?;
        basis.write_triplets(std::io::BufWriter::new(f))?;
    }
    let expected = expected_dimension(mesh);
    let report = verify_basis(&basis, &forms, VerifyOptions::default()).map_err(|e| match e {
        VerifyError::Kernel { column, .. } | VerifyError::Rank { column, .. } | VerifyError::Gram { column, .. } => {
            let f = basis.functions().get(column);
            Failure::Verify(format!("{e} [{} anchored at {}]", f.map_or("?", |f| f.kind.label()), f.map_or(0, |f| f.anchor)))
        }
    })?;
    let k = basis.counts();
    writeln!(out, "bubbles={} tangential={} loops={}", k.bubbles, k.tangential, k.loops)?;
    if basis.len() != expected {
        return Err(Failure::Verify(format!("dim = {}, expected {expected}", basis.len())));
    }
    let rank = match report.rank {
        Some(_) => "rank OK",
        None => "rank OK (Cholesky)",
    };
    writeln!(out, "dim = {}, kernel residual ≤ {KERNEL_TOL:.0e} ({:.2e}), {rank}", basis.len(), report.max_kernel_residual)?;
    if let Some(e) = report.gram_min_eig {
        writeln!(out, "gram_min_eig={e:.6e}")?;
    }
    Ok(())
}

fn solve(args: SolveArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mesh = load_mesh(&args.mesh)?;
    let case = if mesh.dim() == 3 {
        case3d()
    } else {
        match case_by_number(args.case) {
            Some(c) if c.dim == 2 => c,
            _ => return Err(Failure::Usage(format!("no 2D case {}", args.case))),
        }
    };
    let layout = DofLayout::new(&mesh);
    let forms = assemble_forms(&mesh, &layout, &Diffusion::Identity, |x| case.source(x))?;
    let g = apply_dirichlet(&mesh, &layout, |x| case.velocity(x));
    let (velocity, pressure, stats) = if args.saddle {
        let sol = solve_saddle(&mesh, &layout, &forms, &g)?;
        (sol.velocity, sol.pressure.expect("saddle solve returns a pressure"), sol.stats)
    } else {
        let basis = build_divfree_basis(&mesh, &layout)?;
        let sol = solve_reduced(&mesh, &layout, &forms, &basis, &g, &SolverConfig::default())?;
        let rec = recover_pressure(&mesh, &layout, &forms, &sol.velocity)?;
        writeln!(out, "pressure_nontree_residual={:.3e}", rec.max_nontree_residual)?;
        (sol.velocity, rec.pressure, sol.stats)
    };
    writeln!(out, "case={}", case.name)?;
    writeln!(out, "{stats}")?;
    let errors = measure_errors(&case, &mesh, &layout, &Diffusion::Identity, &velocity, &pressure);
    writeln!(out, "h1_err={:.6e}", errors.h1_err)?;
    writeln!(out, "l2_err={:.6e}", errors.l2_err)?;
    writeln!(out, "p_err={:.6e}", errors.p_err)?;
    if let Some(path) = args.vtk {
        let vel: Vec<[f64; 3]> = velocity.cell_averages(&layout);
        export_vtk(&mesh, &[CellData::Vectors("velocity", &vel), CellData::Scalars("pressure", &pressure.values)], &path)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}
