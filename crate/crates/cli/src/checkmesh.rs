use std::path::PathBuf;

use clap::Args;

use polybound_core::bounder::{brute_force_extrema_with, Strategy};
use polybound_core::meshcheck::{check_mesh, detj_coeffs, detj_tables, load_mesh, CheckOptions, ElementReport, Status};

use crate::{positive_f64, positive_usize, read_context, CmdResult, Failure};

#[derive(Args, Debug)]
pub struct CheckmeshArgs {
    /// Mesh file (`polybound-mesh v1`).
    pub mesh: PathBuf,
    /// Gap tolerance on min det J.
    #[arg(long, default_value_t = 1e-4, value_parser = positive_f64)]
    pub tol: f64,
    /// Refinement levels before an element is declared indeterminate.
    #[arg(long, default_value_t = 6)]
    pub max_levels: usize,
    /// Compare every element against brute-force sampling of det J.
    #[arg(long)]
    pub oracle: bool,
    /// Oracle sampling points per dimension.
    #[arg(long, default_value_t = 100, value_parser = positive_usize)]
    pub samples: usize,
    /// Print every element, not only the rejected ones.
    #[arg(long, short)]
    pub verbose: bool,
}

fn describe(e: &ElementReport) -> String {
    let mut s = format!(
        "element {:>5}: {:<13} min det J in [{:.6e}, {:.6e}], levels {}",
        e.index, e.status, e.min_detj_interval.0, e.min_detj_interval.1, e.levels_used
    );
    if let Some(w) = e.witness {
        s.push_str(&format!(", negative at ({:+.4}, {:+.4})", w[0], w[1]));
    }
    s
}

pub fn run(args: &CheckmeshArgs) -> CmdResult {
    let mesh = load_mesh(&args.mesh).map_err(read_context(&args.mesh))?;
    let tables = detj_tables(mesh.order())?;
    let opts = CheckOptions { tol: args.tol, max_levels: args.max_levels, strategy: Strategy::Subdivide };
    let report = check_mesh(&mesh, &tables, &opts)?;
    for e in &report.elements {
        if args.verbose || e.counts_as_invalid() {
            println!("{}", describe(e));
        }
    }
    println!(
        "{} elements of order {}: {} valid, {} invalid, {} indeterminate",
        mesh.len(),
        mesh.order(),
        report.count(Status::Valid),
        report.count(Status::Invalid),
        report.count(Status::Indeterminate)
    );

    let mut problems = Vec::new();
    if args.oracle {
        let (mut misclassified, mut unsound) = (0, 0);
        for (e, nodes) in report.elements.iter().zip(mesh.elements()) {
            let (truth, _) = brute_force_extrema_with(&detj_coeffs(nodes, mesh.order())?, args.samples, true)?;
            let (lo, hi) = e.min_detj_interval;
            if lo > truth + 1e-12 || hi < truth - 1e-12 {
                unsound += 1;
                println!("element {:>5}: oracle min {truth:.6e} outside certified interval", e.index);
            }
            if (e.status == Status::Valid && truth < 0.0) || (e.status == Status::Invalid && truth > 0.0) {
                misclassified += 1;
                println!("element {:>5}: oracle min {truth:.6e} contradicts {}", e.index, e.status);
            }
        }
        println!("oracle: {misclassified} misclassified, {unsound} interval violations");
        if misclassified + unsound > 0 {
            problems.push(format!("{misclassified} misclassified and {unsound} unsound elements"));
        }
    }
    let rejected = report.rejected();
    if !rejected.is_empty() {
        let list: Vec<String> = rejected.iter().map(|i| i.to_string()).collect();
        problems.push(format!("invalid elements: {}", list.join(", ")));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(problems.join("; ")))
    }
}
