//! Convergence tables for the two 2D test cases.
//! Usage: `convergence_tables [case] [family] [levels]`, e.g. `convergence_tables 2 triangular 6`.

use wg_divfree::bench::{case_by_number, run_convergence, MeshFamily};
use wg_divfree::solve::SolverConfig;

fn main() -> wg_divfree::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let runs: Vec<(u32, MeshFamily, u32)> = if args.is_empty() {
        vec![(1, MeshFamily::Rectangular, 5), (1, MeshFamily::Mixed, 5), (2, MeshFamily::Triangular, 5)]
    } else {
        let case = args[0].parse().expect("case number");
        let family = args.get(1).map_or(Ok(MeshFamily::Rectangular), |f| f.parse()).expect("mesh family");
        let levels = args.get(2).map_or(5, |l| l.parse().expect("level count"));
        vec![(case, family, levels)]
    };
    for (case, family, levels) in runs {
        let case = case_by_number(case).expect("case 1 or 2");
        let report = run_convergence(&case, family, levels, &SolverConfig::default())?;
        println!("{}", report.to_markdown());
        print!("{}", report.to_csv());
        let total: f64 = report.diagnostics.iter().map(|d| d.seconds).sum();
        println!("({total:.2} s)\n");
    }
    Ok(())
}
