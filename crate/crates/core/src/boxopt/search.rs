//! Control-node optimization over symmetric auxiliary variables.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{verify_table, BoundingTable, BoxContext, BoxOptions};
use crate::basis::{make_node_set, BasisSpec, NodeKind, NodeSet};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct NodeSearchOptions {
    /// Perturbed restarts after the standard-node starts.
    pub restarts: usize,
    /// Standard deviation of the restart perturbation in `z`.
    pub perturbation: f64,
    pub seed: u64,
    /// Objective evaluations per local search, per free variable.
    pub evaluations_per_variable: usize,
    pub box_options: BoxOptions,
}

impl Default for NodeSearchOptions {
    fn default() -> Self {
        NodeSearchOptions {
            restarts: 20,
            perturbation: 0.5,
            seed: 0x5eed,
            evaluations_per_variable: 150,
            box_options: BoxOptions::default(),
        }
    }
}

/// Nodes minimizing eps2 for `m` control nodes, with their table.
pub fn optimize_nodes(basis: &BasisSpec, m: usize) -> Result<(NodeSet, BoundingTable)> {
    optimize_nodes_with(basis, m, &NodeSearchOptions::default())
}

pub fn optimize_nodes_with(
    basis: &BasisSpec,
    m: usize,
    options: &NodeSearchOptions,
) -> Result<(NodeSet, BoundingTable)> {
    if m < 2 {
        return Err(Error::TooFewNodes(m));
    }
    let ctx = BoxContext::new(basis, options.box_options.clone())?;
    let widths = m - 1;
    let half = widths.div_ceil(2);
    let free = half - 1;

    let expand = |y: &[f64]| -> Vec<f64> {
        let mut h = Vec::with_capacity(half);
        h.push(0.0);
        h.extend_from_slice(y);
        (0..widths).map(|j| h[j.min(widths - 1 - j)]).collect()
    };
    let nodes_of = |y: &[f64]| NodeSet::from_auxiliary(&expand(y));
    let objective = |y: &[f64]| -> f64 {
        if y.iter().any(|v| !v.is_finite() || v.abs() > 30.0) {
            return f64::INFINITY;
        }
        match nodes_of(y) {
            Ok(n) => ctx.objective(n.positions()),
            Err(_) => f64::INFINITY,
        }
    };

    let mut best_y: Vec<f64> = vec![0.0; free];
    let mut best_f = f64::INFINITY;
    if free > 0 {
        let budget = options.evaluations_per_variable * free + 50;
        let run = |start: Vec<f64>, best_y: &mut Vec<f64>, best_f: &mut f64| {
            let (y, f) = nelder_mead(&objective, start, 0.3, budget);
            if f < *best_f {
                *best_f = f;
                *best_y = y;
            }
        };
        for kind in NodeKind::STANDARD {
            let z = make_node_set(kind, m)?.to_auxiliary();
            run(z[1..half].to_vec(), &mut best_y, &mut best_f);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let normal = Normal::new(0.0, options.perturbation)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        for _ in 0..options.restarts {
            let start: Vec<f64> = best_y.iter().map(|v| v + normal.sample(&mut rng)).collect();
            run(start, &mut best_y, &mut best_f);
        }
    }

    // final selection on the verified metric, standard sets included
    let mut candidates = vec![nodes_of(&best_y)?];
    for kind in NodeKind::STANDARD {
        candidates.push(make_node_set(kind, m)?);
    }
    let mut best: Option<(f64, BoundingTable)> = None;
    for nodes in candidates {
        let nodes = nodes.with_kind(NodeKind::Optimized);
        let table = match ctx.build_table(&nodes) {
            Ok(t) => t,
            Err(Error::NonConvergence { best: Some(t), .. }) => *t,
            Err(e) => return Err(e),
        };
        let eps2 = verify_table(&table).eps2;
        if best.as_ref().is_none_or(|(e, _)| eps2 < *e) {
            best = Some((eps2, table));
        }
    }
    let (_, table) = best.expect("at least one candidate");
    Ok((table.nodes().clone(), table))
}

/// Plain Nelder-Mead with a coordinate-aligned initial simplex.
pub(crate) fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, x0: Vec<f64>, step: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = f(&x0);
    simplex.push((x0.clone(), f0));
    for i in 0..n {
        let mut x = x0.clone();
        x[i] += step;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let mut evals = n + 1;
    let centroid_of = |s: &[(Vec<f64>, f64)]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        for (x, _) in &s[..n] {
            for k in 0..n {
                c[k] += x[k] / n as f64;
            }
        }
        c
    };
    let along = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> { c.iter().zip(w).map(|(a, b)| a + t * (b - a)).collect() };

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let extent = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if spread.abs() <= 1e-12 * simplex[0].1.abs().max(1e-12) && extent < 1e-6 {
            break;
        }
        let c = centroid_of(&simplex);
        let worst = simplex[n].0.clone();
        let xr = along(&c, &worst, -1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(&c, &worst, -2.0);
            let fe = f(&xe);
            evals += 1;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let x = along(&c, &xr, 0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = along(&c, &worst, 0.5);
                let v = f(&x);
                (x, v)
            };
            evals += 1;
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x = along(&best, &entry.0, 0.5);
                    let v = f(&x);
                    *entry = (x, v);
                }
                evals += n;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}
