use std::path::PathBuf;

use clap::Args;

use polybound_core::boxopt::{
    format_table, optimize_nodes_with, optimize_values_with, verify_table, BoxOptions, NodeSearchOptions,
};
use polybound_core::{make_node_set, BasisSpec, NodeKind};

use crate::{positive_f64, positive_usize, write_file, CmdResult, Failure, TableChoice};

#[derive(Args, Debug)]
pub struct BoxgenArgs {
    #[command(flatten)]
    pub choice: TableChoice,
    /// Polynomial order.
    #[arg(long, value_parser = positive_usize)]
    pub p: usize,
    /// Number of control nodes.
    #[arg(long, value_parser = positive_usize)]
    pub m: usize,
    /// Output file; the table goes to stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Seed for the node search restarts.
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Constraint sampling points per basis function.
    #[arg(long, default_value_t = 1000, value_parser = positive_usize)]
    pub samples: usize,
    /// Safety margin added to every bounding value.
    #[arg(long, default_value_t = 1e-6, value_parser = positive_f64)]
    pub epsilon: f64,
    /// Perturbed restarts of the node search.
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
}

pub fn run(args: &BoxgenArgs) -> CmdResult {
    let basis = BasisSpec::new(args.choice.family, args.p)?;
    let box_options = BoxOptions { n_samples: args.samples, epsilon: args.epsilon, ..Default::default() };
    let table = match args.choice.nodes {
        NodeKind::Optimized => {
            let opts = NodeSearchOptions { restarts: args.restarts, seed: args.seed, box_options, ..Default::default() };
            optimize_nodes_with(&basis, args.m, &opts)?.1
        }
        kind => optimize_values_with(&basis, &make_node_set(kind, args.m)?, &box_options)?,
    };
    let q = verify_table(&table);
    let summary = format!(
        "{} p={} M={} nodes={}\neps2 = {:.6e}\nmax_violation = {:.3e}",
        basis.family(),
        args.p,
        args.m,
        args.choice.nodes,
        q.eps2,
        q.max_violation
    );
    match &args.output {
        Some(path) => {
            write_file(path, &format_table(&table))?;
            println!("{summary}\nwrote {}", path.display());
        }
        None => {
            print!("{}", format_table(&table));
            eprintln!("{summary}");
        }
    }
    if q.max_violation < 0.0 {
        return Err(Failure::Check(format!("table violates its bounds by {:.3e}", -q.max_violation)));
    }
    Ok(())
}
