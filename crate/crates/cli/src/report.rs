use clap::Args;

use polybound_core::boxopt::verify_table;
use polybound_core::{optimize_values, tables, BoundingTable};

use crate::{positive_usize, CmdResult, Failure};

#[derive(Args, Debug)]
pub struct TablesArgs {
    /// Only this polynomial order.
    #[arg(long, value_parser = positive_usize)]
    pub p: Option<usize>,
    /// Constraint sampling points per basis function.
    #[arg(long, default_value_t = 1000, value_parser = positive_usize)]
    pub samples: usize,
}

/// Shortest decimal form with at most 7 digits after the point.
pub fn short(x: f64) -> String {
    let s = format!("{x:.7}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn block(p: usize, m: usize, ours: &BoundingTable, shipped: &BoundingTable) -> (f64, bool) {
    let nodes: Vec<String> = ours.nodes().positions().iter().map(|&x| short(x)).collect();
    println!("P{p}, M={m}");
    println!("Control nodes η = [{}]", nodes.join(", "));
    let mut worst = 0.0f64;
    for (name, get_ours, get_shipped) in [
        ("L", BoundingTable::lower_row as fn(&BoundingTable, usize) -> &[f64], BoundingTable::lower_row as fn(&BoundingTable, usize) -> &[f64]),
        ("U", BoundingTable::upper_row, BoundingTable::upper_row),
    ] {
        for i in 0..ours.n() {
            let (a, b) = (get_ours(ours, i), get_shipped(shipped, i));
            let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            worst = worst.max(diff);
            let cells: Vec<String> = a.iter().map(|v| format!("{v:>11.7}")).collect();
            println!("{name} {:<3}{}   |diff| {diff:.1e}", i + 1, cells.join(""));
        }
    }
    let defect = ours.symmetry_defect();
    let symmetric = defect <= 1e-12;
    println!("max |diff| = {worst:.2e}, symmetry {} ({defect:.1e})\n", if symmetric { "PASS" } else { "FAIL" });
    (worst, symmetric)
}

pub fn run(args: &TablesArgs) -> CmdResult {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (p, m, shipped) in tables::reference_tables()? {
        if args.p.is_some_and(|q| q != p) {
            continue;
        }
        let ours = optimize_values(shipped.basis(), shipped.nodes(), args.samples)?;
        let (diff, symmetric) = block(p, m, &ours, &shipped);
        worst = worst.max(diff);
        if !symmetric {
            failures.push(format!("P{p}/M={m} not symmetric"));
        }
        if verify_table(&ours).max_violation < 0.0 {
            failures.push(format!("P{p}/M={m} violates its bounds"));
        }
    }
    println!("overall max |diff| = {worst:.2e}");
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failures.join("; ")))
    }
}
