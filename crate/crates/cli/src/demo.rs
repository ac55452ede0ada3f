use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;

use polybound_core::limiter::{run as run_rotation, RunOptions, RunReport};
use polybound_core::{tables, BasisFamily, Limiter, NodeKind};

use crate::{positive_f64, positive_usize, write_file, CmdResult, Failure};

#[derive(Args, Debug)]
pub struct DemoArgs {
    /// Elements per side of the unit square.
    #[arg(long, default_value_t = 16, value_parser = positive_usize)]
    pub elements: usize,
    /// Polynomial order of the solution.
    #[arg(long, default_value_t = 3, value_parser = positive_usize)]
    pub order: usize,
    /// Final time; 1 is one full revolution.
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    pub tfinal: f64,
    /// Run the unlimited scheme.
    #[arg(long)]
    pub no_limiter: bool,
    /// Also write the report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Number of evenly spaced output times.
    #[arg(long, default_value_t = 4, value_parser = positive_usize)]
    pub snapshots: usize,
    /// Random sampling points per element for the extrema.
    #[arg(long, default_value_t = 1000, value_parser = positive_usize)]
    pub samples: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

fn format_report(r: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "solid-body rotation, {0}x{0} elements, P{1}, {2} steps of dt = {3:.4e}, limiter {4}",
        r.ne,
        r.order,
        r.steps,
        r.dt,
        if r.limited { "on" } else { "off" }
    );
    let _ = writeln!(s, "{:>10} {:>16} {:>16}", "t", "sampled min", "sampled max");
    for snap in &r.snapshots {
        let _ = writeln!(s, "{:>10.4} {:>16.6e} {:>16.6e}", snap.t, snap.min, snap.max);
    }
    let _ = writeln!(
        s,
        "mass {:.12e} -> {:.12e}, relative drift {:.3e}, max step drift {:.3e}",
        r.initial_mass,
        r.final_mass,
        r.relative_drift(),
        r.max_step_drift
    );
    if r.limited {
        let _ = writeln!(s, "smallest alpha {:.6}", r.min_alpha);
    }
    s
}

pub fn run(args: &DemoArgs) -> CmdResult {
    let limiter = if args.no_limiter {
        None
    } else {
        let table = tables::get_table(BasisFamily::LobattoNodal, args.order, NodeKind::Optimized, args.order + 1)?;
        Some(Limiter::new(table, 0.0, 1.0)?)
    };
    let opts = RunOptions {
        ne: args.elements,
        order: args.order,
        t_final: args.tfinal,
        snapshots: args.snapshots,
        samples_per_element: args.samples,
        seed: args.seed,
    };
    let report = run_rotation(&opts, limiter.as_ref())?;
    let text = format_report(&report);
    print!("{text}");
    if let Some(path) = &args.report {
        write_file(path, &text)?;
    }
    let (lo, hi) = report.extrema();
    if report.limited && (lo < -1e-12 || hi > 1.0 + 1e-12) {
        return Err(Failure::Check(format!("solution left [0, 1]: sampled range [{lo:e}, {hi:e}]")));
    }
    Ok(())
}
