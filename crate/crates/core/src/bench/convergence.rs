use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::ManufacturedCase;
use crate::divfree::build_divfree_basis;
use crate::error::{Error, Result};
use crate::mesh::{generate_hanging_node, generate_mixed_polygonal, generate_rectangular, generate_triangular, Mesh};
use crate::solve::{recover_pressure, solve_reduced, SolverConfig};
use crate::wg::{
    apply_dirichlet, assemble_forms, h1_discrete_norm, l2_interior_norm, l2_pressure_norm, project_qh, triple_bar_norm,
    Diffusion, DofLayout, PressureField, WgField,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFamily {
    Rectangular,
    Triangular,
    Mixed,
    HangingNode,
}

impl MeshFamily {
    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::Rectangular => "rectangular",
            MeshFamily::Triangular => "triangular",
            MeshFamily::Mixed => "mixed",
            MeshFamily::HangingNode => "hanging",
        }
    }

    /// Mesh of refinement `level`; grid families use `n = 4 * 2^level`.
    pub fn mesh(self, level: u32) -> Mesh {
        let n = 4usize << level;
        match self {
            MeshFamily::Rectangular => generate_rectangular(n),
            MeshFamily::Triangular => generate_triangular(n),
            MeshFamily::Mixed => generate_mixed_polygonal(level),
            MeshFamily::HangingNode => generate_hanging_node(n),
        }
    }

    /// Grid spacing `1/n` for grid families, largest cell diameter for the mixed family.
    pub fn mesh_size(self, level: u32, mesh: &Mesh) -> f64 {
        match self {
            MeshFamily::Mixed => mesh.h_max(),
            _ => 1.0 / (4usize << level) as f64,
        }
    }
}

impl FromStr for MeshFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rectangular" | "rect" => Ok(MeshFamily::Rectangular),
            "triangular" | "tri" => Ok(MeshFamily::Triangular),
            "mixed" | "polygonal" => Ok(MeshFamily::Mixed),
            "hanging" | "hanging-node" => Ok(MeshFamily::HangingNode),
            _ => Err(format!("unknown mesh family '{s}'")),
        }
    }
}

const CSV_HEADER: [&str; 7] = ["h", "h1_err", "h1_rate", "l2_err", "l2_rate", "p_err", "p_rate"];

fn csv_error(e: csv::Error) -> Error {
    let (line, column) = e.position().map_or((0, 0), |p| (p.line() as usize, 1));
    Error::Parse { line, column, message: e.to_string() }
}

/// One table row. Rates are absent on the first row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub h1_err: f64,
    pub h1_rate: Option<f64>,
    pub l2_err: f64,
    pub l2_rate: Option<f64>,
    pub p_err: f64,
    pub p_rate: Option<f64>,
}

/// Per-level quantities not shown in the error table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LevelDiagnostics {
    /// Discrete `H^1` error with the unprojected jump `v_0 - v_b`.
    pub h1_discrete_err: f64,
    pub free_unknowns: usize,
    pub reduced_unknowns: usize,
    pub solver_residual: f64,
    pub pressure_nontree_residual: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub case: String,
    pub family: String,
    pub rows: Vec<ConvergenceRow>,
    pub diagnostics: Vec<LevelDiagnostics>,
}

/// `log(e0 / e1) / log(h0 / h1)`.
pub fn rate(h0: f64, e0: f64, h1: f64, e1: f64) -> f64 {
    (e0 / e1).ln() / (h0 / h1).ln()
}

/// Least-squares slope of `log e` against `log h`.
pub fn least_squares_slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Errors of one solve, before rates are filled in.
#[derive(Clone, Debug)]
pub struct LevelErrors {
    pub h: f64,
    pub h1_err: f64,
    pub l2_err: f64,
    pub p_err: f64,
    pub diagnostics: LevelDiagnostics,
}

/// Errors of a discrete solution against the exact fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolutionErrors {
    /// `|||u_h - Q_h u|||`
    pub h1_err: f64,
    /// `||u_0 - Q_0 u||`
    pub l2_err: f64,
    /// `||p_h - p||`
    pub p_err: f64,
    pub h1_discrete_err: f64,
}

pub fn measure_errors(
    case: &ManufacturedCase,
    mesh: &Mesh,
    layout: &DofLayout,
    coeff: &Diffusion,
    velocity: &WgField,
    pressure: &PressureField,
) -> SolutionErrors {
    let qh = project_qh(mesh, layout, |x| case.velocity(x));
    let err = velocity.sub(&qh);
    SolutionErrors {
        h1_err: triple_bar_norm(mesh, layout, coeff, &err),
        l2_err: l2_interior_norm(mesh, layout, &err),
        p_err: l2_pressure_norm(mesh, pressure, |x| case.pressure(x)),
        h1_discrete_err: h1_discrete_norm(mesh, layout, &err),
    }
}

/// Solves `case` on `mesh` in the divergence-free basis, recovers the pressure
/// and measures `|||u_h - Q_h u|||`, `||u_0 - Q_0 u||` and `||p_h - p||`.
pub fn solve_level(case: &ManufacturedCase, mesh: &Mesh, h: f64, config: &SolverConfig) -> Result<LevelErrors> {
    let start = Instant::now();
    let layout = DofLayout::new(mesh);
    let coeff = Diffusion::PerCell(vec![case.coefficient; mesh.n_cells()]);
    let forms = assemble_forms(mesh, &layout, &coeff, |x| case.source(x))?;
    let basis = build_divfree_basis(mesh, &layout)?;
    let g = apply_dirichlet(mesh, &layout, |x| case.velocity(x));
    let sol = solve_reduced(mesh, &layout, &forms, &basis, &g, config)?;
    let rec = recover_pressure(mesh, &layout, &forms, &sol.velocity)?;

    let e = measure_errors(case, mesh, &layout, &coeff, &sol.velocity, &rec.pressure);
    Ok(LevelErrors {
        h,
        h1_err: e.h1_err,
        l2_err: e.l2_err,
        p_err: e.p_err,
        diagnostics: LevelDiagnostics {
            h1_discrete_err: e.h1_discrete_err,
            free_unknowns: layout.n_free(),
            reduced_unknowns: basis.len(),
            solver_residual: sol.stats.residual,
            pressure_nontree_residual: rec.max_nontree_residual,
            seconds: start.elapsed().as_secs_f64(),
        },
    })
}

impl ConvergenceReport {
    pub fn from_levels(case: &str, family: &str, levels: Vec<LevelErrors>) -> Self {
        let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels.len());
        for (i, l) in levels.iter().enumerate() {
            let prev = i.checked_sub(1).map(|j| &levels[j]);
            rows.push(ConvergenceRow {
                h: l.h,
                h1_err: l.h1_err,
                h1_rate: prev.map(|p| rate(p.h, p.h1_err, l.h, l.h1_err)),
                l2_err: l.l2_err,
                l2_rate: prev.map(|p| rate(p.h, p.l2_err, l.h, l.l2_err)),
                p_err: l.p_err,
                p_rate: prev.map(|p| rate(p.h, p.p_err, l.h, l.p_err)),
            });
        }
        ConvergenceReport {
            case: case.to_string(),
            family: family.to_string(),
            rows,
            diagnostics: levels.into_iter().map(|l| l.diagnostics).collect(),
        }
    }

    fn column(&self, f: impl Fn(&ConvergenceRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    /// Least-squares rates `(triple-bar, velocity L2, pressure L2)`.
    pub fn slopes(&self) -> (f64, f64, f64) {
        let h = self.column(|r| r.h);
        (
            least_squares_slope(&h, &self.column(|r| r.h1_err)),
            least_squares_slope(&h, &self.column(|r| r.l2_err)),
            least_squares_slope(&h, &self.column(|r| r.p_err)),
        )
    }

    /// Rates over the finest interval.
    pub fn last_rates(&self) -> Option<(f64, f64, f64)> {
        let r = self.rows.last()?;
        Some((r.h1_rate?, r.l2_rate?, r.p_rate?))
    }

    /// CSV with columns `h,h1_err,h1_rate,l2_err,l2_rate,p_err,p_rate`;
    /// missing rates are empty fields.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).expect("rows serialize to memory");
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("CSV is UTF-8")
    }

    /// Parses the rows written by [`to_csv`](Self::to_csv).
    pub fn rows_from_csv(text: &str) -> Result<Vec<ConvergenceRow>> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let header = reader.headers().map_err(csv_error)?;
        if header != CSV_HEADER.as_slice() {
            return Err(Error::Parse { line: 1, column: 1, message: format!("unexpected CSV header {header:?}") });
        }
        reader.deserialize().map(|r| r.map_err(csv_error)).collect()
    }

    pub fn to_markdown(&self) -> String {
        let rate = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        let mut s = format!("{} on {} meshes\n\n", self.case, self.family);
        s.push_str("| h | \\|\\|\\|u_h - Q_h u\\|\\|\\| | rate | \\|\\|u_0 - Q_0 u\\|\\| | rate | \\|\\|p_h - p\\|\\| | rate |\n");
        s.push_str("|---|---|---|---|---|---|---|\n");
        for r in &self.rows {
            writeln!(
                s,
                "| {:.4e} | {:.4e} | {} | {:.4e} | {} | {:.4e} | {} |",
                r.h,
                r.h1_err,
                rate(r.h1_rate),
                r.l2_err,
                rate(r.l2_rate),
                r.p_err,
                rate(r.p_rate)
            )
            .unwrap();
        }
        if self.rows.len() >= 2 {
            let (a, b, c) = self.slopes();
            writeln!(s, "| Conv.Rate | | {a:.4} | | {b:.4} | | {c:.4} |").unwrap();
            if let Some((a, b, c)) = self.last_rates() {
                writeln!(s, "| Last interval | | {a:.4} | | {b:.4} | | {c:.4} |").unwrap();
            }
        }
        s
    }
}

/// Runs `levels` refinements of `family`, coarsest first.
pub fn run_convergence(case: &ManufacturedCase, family: MeshFamily, levels: u32, config: &SolverConfig) -> Result<ConvergenceReport> {
    if levels < 2 {
        return Err(Error::Shape("a convergence study needs at least two levels".into()));
    }
    let mut out = Vec::with_capacity(levels as usize);
    for level in 0..levels {
        let mesh = family.mesh(level);
        out.push(solve_level(case, &mesh, family.mesh_size(level, &mesh), config)?);
    }
    Ok(ConvergenceReport::from_levels(case.name, family.name(), out))
}
