use std::path::PathBuf;

use clap::Args;

use polybound_core::bounder::{bound, bound_adaptive, brute_force_extrema_with, Strategy};
use polybound_core::limiter::{present_table, step_coeffs, step_row};
use polybound_core::{load_table, tables, BoundingTable, NodeKind, PolyCoeffs};

use crate::{positive_f64, positive_usize, read_context, CmdResult, Failure};

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// Coefficient file (`polybound-coeffs v1`).
    pub input: Option<PathBuf>,
    /// Bounding table file; overrides --m and --nodes.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Control nodes per dimension (default N = p + 1).
    #[arg(long, value_parser = positive_usize)]
    pub m: Option<usize>,
    #[arg(long, default_value = "optimized", value_parser = crate::parse_kind)]
    pub nodes: NodeKind,
    /// Bound the Gauss-Lobatto interpolant of a step of this order instead of a file.
    #[arg(long, value_parser = positive_usize, conflicts_with = "input")]
    pub order: Option<usize>,
    /// Compare against brute-force sampling with Newton polishing.
    #[arg(long)]
    pub oracle: bool,
    /// Sampling points per dimension for --oracle.
    #[arg(long, value_parser = positive_usize)]
    pub samples: Option<usize>,
    /// Refine adaptively for up to this many levels.
    #[arg(long)]
    pub subdivide: Option<usize>,
    /// Gap tolerance for adaptive refinement.
    #[arg(long, default_value_t = 1e-4, value_parser = positive_f64)]
    pub tol: f64,
    /// Refinement strategy: subdivide, increase-m or hybrid.
    #[arg(long, default_value = "subdivide", value_parser = parse_strategy)]
    pub strategy: Strategy,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: polybound_core::Error| e.to_string())
}

fn select_table(args: &BoundArgs, c: &PolyCoeffs) -> Result<BoundingTable, Failure> {
    if let Some(path) = &args.table {
        return load_table(path).map_err(read_context(path));
    }
    let p = c.basis().order();
    if args.order.is_some() && args.m.is_none() && args.nodes == NodeKind::Optimized {
        return Ok(present_table(p)?);
    }
    Ok(tables::get_table(c.basis().family(), p, args.nodes, args.m.unwrap_or(p + 1))?)
}

pub fn run(args: &BoundArgs) -> CmdResult {
    let c = match (&args.input, args.order) {
        (Some(path), _) => PolyCoeffs::load(path).map_err(read_context(path))?,
        (None, Some(p)) => step_coeffs(p)?,
        (None, None) => return Err(Failure::Usage("need a coefficient file or --order".into())),
    };
    let table = select_table(args, &c)?;
    let nb = bound(&c, &table)?;
    println!(
        "{} p={} dim={} | table M={} nodes={} epsilon={:e}",
        c.basis().family(),
        c.basis().order(),
        c.dim(),
        table.m(),
        table.nodes().kind(),
        table.epsilon()
    );
    let eta = table.nodes().positions();
    let m = table.m();
    let truth = if args.oracle { Some(oracle(args, &c)?) } else { None };
    let mut unsound = 0;
    let header = if c.dim() == 1 { "node        eta" } else { "node                   point" };
    print!("{header} {:>16} {:>16}", "lower", "upper");
    println!("{}", if args.oracle { format!(" {:>16}", "value") } else { String::new() });
    for k in 0..nb.len() {
        let idx: Vec<usize> = (0..c.dim()).map(|d| k / m.pow(d as u32) % m).collect();
        let x: Vec<f64> = idx.iter().map(|&i| eta[i]).collect();
        let label = idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        let point = x.iter().map(|v| format!("{v:+.6}")).collect::<Vec<_>>().join(" ");
        print!("{label:<6} {point:>10} {:>16.8e} {:>16.8e}", nb.lower[k], nb.upper[k]);
        if args.oracle {
            let v = c.eval(&x)?;
            let ok = nb.lower[k] <= v + 1e-12 && v <= nb.upper[k] + 1e-12;
            unsound += usize::from(!ok);
            print!(" {v:>16.8e}{}", if ok { "" } else { "  VIOLATION" });
        }
        println!();
    }
    println!("global bounds: [{:.8e}, {:.8e}]", nb.min_lower(), nb.max_upper());

    if let Some(levels) = args.subdivide {
        let mut tabs = vec![table.clone()];
        if args.strategy != Strategy::Subdivide {
            for extra in 1..=2 {
                tabs.push(tables::get_table(c.basis().family(), c.basis().order(), table.nodes().kind(), m + extra)?);
            }
        }
        let s = bound_adaptive(&c, &tabs, args.tol, levels, args.strategy)?;
        println!(
            "adaptive ({}, tol {:e}): min in [{:.8e}, {:.8e}], max in [{:.8e}, {:.8e}], levels {}, converged {}",
            args.strategy_name(),
            args.tol,
            s.global_min,
            s.min_upper,
            s.max_lower,
            s.global_max,
            s.levels_used,
            if s.converged { "yes" } else { "no" }
        );
        if let Some((lo, hi)) = truth {
            println!("adaptive overestimate below {:.3e}, above {:.3e}", lo - s.global_min, s.global_max - hi);
            if s.global_min > lo + 1e-12 || s.global_max < hi - 1e-12 {
                unsound += 1;
            }
        }
    }

    if let Some(p) = args.order {
        let row = step_row(p, &table)?;
        println!("step P{p}: exact ±{:.4}, bernstein ±{:.4}, present ±{:.4}", row.exact.1, row.bernstein.1, row.present.1);
    }

    if let Some((lo, hi)) = truth {
        println!(
            "oracle extrema: [{lo:.8e}, {hi:.8e}]; overestimate below {:.3e}, above {:.3e}",
            lo - nb.min_lower(),
            nb.max_upper() - hi
        );
        if nb.min_lower() > lo + 1e-12 || nb.max_upper() < hi - 1e-12 {
            unsound += 1;
        }
        if unsound > 0 {
            return Err(Failure::Check(format!("{unsound} bound violations against the oracle")));
        }
    }
    Ok(())
}

fn oracle(args: &BoundArgs, c: &PolyCoeffs) -> Result<(f64, f64), Failure> {
    let samples = args.samples.unwrap_or(if c.dim() == 1 { 10_000 } else { 200 });
    Ok(brute_force_extrema_with(c, samples, true)?)
}

impl BoundArgs {
    fn strategy_name(&self) -> &'static str {
        match self.strategy {
            Strategy::Subdivide => "subdivide",
            Strategy::IncreaseM => "increase-m",
            Strategy::Hybrid => "hybrid",
        }
    }
}
