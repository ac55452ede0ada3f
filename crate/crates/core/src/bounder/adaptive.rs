//! Subdivision and adaptive refinement of node bounds.

use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{bernstein_bounds, bound, BoundSummary, NodeBounds};
use crate::basis::{BasisFamily, BasisSpec};
use crate::boxopt::BoundingTable;
use crate::error::{Error, Result};
use crate::poly::PolyCoeffs;
use crate::quadrature::gauss_lobatto;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Re-bound the whole element with the next table of the ladder.
    IncreaseM,
    /// Split offending spans between control nodes.
    Subdivide,
    /// Climb the ladder first, then subdivide with the largest table.
    Hybrid,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "increase-m" | "increase-M" => Ok(Strategy::IncreaseM),
            "subdivide" => Ok(Strategy::Subdivide),
            "hybrid" => Ok(Strategy::Hybrid),
            _ => Err(Error::UnknownName { what: "refinement strategy", value: s.to_string() }),
        }
    }
}

/// Which extremum refinement should resolve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Focus {
    Both,
    Min,
    Max,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveOptions {
    /// Absolute node gap below which a node counts as resolved.
    pub tol: f64,
    pub max_levels: usize,
    pub strategy: Strategy,
    pub focus: Focus,
}

impl AdaptiveOptions {
    pub fn new(tol: f64, max_levels: usize, strategy: Strategy) -> Self {
        AdaptiveOptions { tol, max_levels, strategy, focus: Focus::Both }
    }
}

/// Re-expresses the polynomial restricted to `subcell` on the reference element.
pub fn subdivide(coeffs: &PolyCoeffs, subcell: &[(f64, f64)]) -> Result<PolyCoeffs> {
    if subcell.len() != coeffs.dim() {
        return Err(Error::UnsupportedDimension(subcell.len()));
    }
    for &(a, b) in subcell {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::EmptySubcell);
        }
        if a < -1.0 - 1e-14 || b > 1.0 + 1e-14 {
            return Err(Error::InvalidParameter(format!("subcell [{a}, {b}] leaves the reference interval")));
        }
    }
    let basis = coeffs.basis();
    let n = basis.len();
    let gll = gauss_lobatto(n).points;
    let to_target = if basis.family() == BasisFamily::LobattoNodal {
        None
    } else {
        Some(BasisSpec::lobatto(basis.order())?.transform_to(basis)?)
    };
    let mut row = vec![0.0; n];
    let mats: Vec<DMatrix<f64>> = subcell
        .iter()
        .map(|&(a, b)| {
            let mut e = DMatrix::zeros(n, n);
            for (r, &xi) in gll.iter().enumerate() {
                let x = (a + 0.5 * (b - a) * (xi + 1.0)).clamp(-1.0, 1.0);
                basis.eval_all_unchecked(x, &mut row);
                for i in 0..n {
                    e[(r, i)] = row[i];
                }
            }
            match &to_target {
                Some(t) => t * e,
                None => e,
            }
        })
        .collect();
    PolyCoeffs::new(coeffs.dim(), basis.clone(), coeffs.transform_axes(&mats))
}

struct Leaf {
    /// Absolute box in the root reference element.
    cell: Vec<(f64, f64)>,
    table: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Full node grids can be refined; corner-only leaves are final.
    full: bool,
}

fn sub_box(cell: &[(f64, f64)], eta: &[f64], span: &[usize]) -> Vec<(f64, f64)> {
    cell.iter()
        .zip(span)
        .map(|(&(a, b), &s)| {
            let map = |t: f64| a + 0.5 * (b - a) * (t + 1.0);
            (map(eta[s]), if s + 2 == eta.len() { b } else { map(eta[s + 1]) })
        })
        .collect()
}

fn bound_cell(root: &PolyCoeffs, cell: &[(f64, f64)], table: &BoundingTable) -> Result<NodeBounds> {
    let whole = cell.iter().all(|&(a, b)| a == -1.0 && b == 1.0);
    if whole {
        bound(root, table)
    } else {
        bound(&subdivide(root, cell)?, table)
    }
}

impl Leaf {
    /// Root reference coordinates of node `k`.
    fn location(&self, k: usize, tables: &[BoundingTable]) -> Vec<f64> {
        let eta = tables[self.table].nodes().positions();
        let per_axis = if self.full { eta.len() } else { 2 };
        let mut r = k;
        self.cell
            .iter()
            .map(|&(a, b)| {
                let idx = r % per_axis;
                r /= per_axis;
                if self.full {
                    a + 0.5 * (b - a) * (eta[idx] + 1.0)
                } else if idx == 0 {
                    a
                } else {
                    b
                }
            })
            .collect()
    }
}

struct Envelope {
    min: f64,
    max: f64,
    min_upper: f64,
    max_lower: f64,
    /// Leaf and node holding `min_upper`.
    argmin: (usize, usize),
}

fn summarize(leaves: &[Leaf]) -> Envelope {
    let mut s = Envelope {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        min_upper: f64::INFINITY,
        max_lower: f64::NEG_INFINITY,
        argmin: (0, 0),
    };
    for (li, leaf) in leaves.iter().enumerate() {
        for (k, (&l, &u)) in leaf.lower.iter().zip(&leaf.upper).enumerate() {
            s.min = s.min.min(l);
            s.max = s.max.max(u);
            s.max_lower = s.max_lower.max(l);
            if u < s.min_upper {
                s.min_upper = u;
                s.argmin = (li, k);
            }
        }
    }
    s
}

/// Refines until every node that could still carry an extremum has gap `<= tol`.
pub fn bound_adaptive(
    coeffs: &PolyCoeffs,
    tables: &[BoundingTable],
    tol: f64,
    max_levels: usize,
    strategy: Strategy,
) -> Result<BoundSummary> {
    bound_adaptive_with(coeffs, tables, &AdaptiveOptions::new(tol, max_levels, strategy), |_| false)
}

/// [`bound_adaptive`] with an extra stopping rule checked after every level.
pub fn bound_adaptive_with<F: Fn(&BoundSummary) -> bool>(
    coeffs: &PolyCoeffs,
    tables: &[BoundingTable],
    options: &AdaptiveOptions,
    stop: F,
) -> Result<BoundSummary> {
    if !(options.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", options.tol)));
    }
    if tables.is_empty() {
        return Err(Error::InvalidParameter("at least one bounding table is required".into()));
    }
    let d = coeffs.dim();
    let root_cell = vec![(-1.0, 1.0); d];
    let root = bound(coeffs, &tables[0])?;
    let mut leaves = vec![Leaf {
        cell: root_cell,
        table: 0,
        lower: root.lower.clone(),
        upper: root.upper.clone(),
        full: true,
    }];
    let mut level = 0;
    loop {
        let env = summarize(&leaves);
        let (gmu, gml) = (env.min_upper, env.max_lower);
        let mut summary = BoundSummary {
            global_min: env.min,
            global_max: env.max,
            min_upper: gmu,
            max_lower: gml,
            min_upper_at: Some(leaves[env.argmin.0].location(env.argmin.1, tables)),
            levels_used: level,
            converged: false,
            nodes: Some(root.clone()),
        };
        let want_min = options.focus != Focus::Max;
        let want_max = options.focus != Focus::Min;
        let offending = |l: f64, u: f64| {
            u - l > options.tol && ((want_min && l < gmu) || (want_max && u > gml))
        };
        let pending: Vec<usize> = (0..leaves.len())
            .filter(|&k| {
                let leaf = &leaves[k];
                leaf.full && leaf.lower.iter().zip(&leaf.upper).any(|(&l, &u)| offending(l, u))
            })
            .collect();
        if pending.is_empty() {
            summary.converged = true;
            return Ok(summary);
        }
        if stop(&summary) || level >= options.max_levels {
            return Ok(summary);
        }

        // cells to re-bound, with their table index
        let mut tasks: Vec<(Vec<(f64, f64)>, usize)> = Vec::new();
        let mut kept: Vec<Leaf> = Vec::new();
        let mut progressed = false;
        let pending_set: std::collections::HashSet<usize> = pending.iter().copied().collect();
        for (k, leaf) in leaves.into_iter().enumerate() {
            if !pending_set.contains(&k) {
                kept.push(leaf);
                continue;
            }
            let climb = match options.strategy {
                Strategy::IncreaseM | Strategy::Hybrid => leaf.table + 1 < tables.len(),
                Strategy::Subdivide => false,
            };
            if climb {
                tasks.push((leaf.cell.clone(), leaf.table + 1));
                progressed = true;
                continue;
            }
            if options.strategy == Strategy::IncreaseM {
                kept.push(leaf);
                continue;
            }
            progressed = true;
            let eta = tables[leaf.table].nodes().positions();
            let m = eta.len();
            let spans = (m - 1).pow(d as u32);
            for s in 0..spans {
                let mut span = vec![0; d];
                let mut r = s;
                for sa in span.iter_mut() {
                    *sa = r % (m - 1);
                    r /= m - 1;
                }
                // corner nodes of the span in the leaf's node grid
                let mut corners = Vec::with_capacity(1 << d);
                for c in 0..(1usize << d) {
                    let mut flat = 0;
                    let mut stride = 1;
                    for (a, &sa) in span.iter().enumerate() {
                        flat += (sa + ((c >> a) & 1)) * stride;
                        stride *= m;
                    }
                    corners.push(flat);
                }
                let cell = sub_box(&leaf.cell, eta, &span);
                if corners.iter().any(|&c| offending(leaf.lower[c], leaf.upper[c])) {
                    tasks.push((cell, leaf.table));
                } else {
                    kept.push(Leaf {
                        cell,
                        table: leaf.table,
                        lower: corners.iter().map(|&c| leaf.lower[c]).collect(),
                        upper: corners.iter().map(|&c| leaf.upper[c]).collect(),
                        full: false,
                    });
                }
            }
        }
        if !progressed {
            return Ok(summary);
        }
        let refined: Vec<Leaf> = tasks
            .into_par_iter()
            .map(|(cell, t)| {
                let nb = bound_cell(coeffs, &cell, &tables[t])?;
                Ok(Leaf { cell, table: t, lower: nb.lower, upper: nb.upper, full: true })
            })
            .collect::<Result<Vec<_>>>()?;
        kept.extend(refined);
        leaves = kept;
        level += 1;
    }
}

/// Bounds after uniform splitting into `2^level` cells per axis.
pub fn bound_uniform(coeffs: &PolyCoeffs, table: &BoundingTable, level: u32) -> Result<BoundSummary> {
    let cells = uniform_cells(coeffs.dim(), level);
    let parts: Vec<NodeBounds> = cells
        .par_iter()
        .map(|cell| bound_cell(coeffs, cell, table))
        .collect::<Result<Vec<_>>>()?;
    let mut s = BoundSummary {
        global_min: f64::INFINITY,
        global_max: f64::NEG_INFINITY,
        min_upper: f64::INFINITY,
        max_lower: f64::NEG_INFINITY,
        min_upper_at: None,
        levels_used: level as usize,
        converged: true,
        nodes: None,
    };
    for nb in &parts {
        s.global_min = s.global_min.min(nb.min_lower());
        s.global_max = s.global_max.max(nb.max_upper());
        s.min_upper = s.min_upper.min(nb.min_upper());
        s.max_lower = s.max_lower.max(nb.max_lower());
    }
    Ok(s)
}

/// Bernstein hull bounds after uniform splitting into `2^level` cells per axis.
pub fn bernstein_uniform(coeffs: &PolyCoeffs, level: u32) -> Result<(f64, f64)> {
    let cells = uniform_cells(coeffs.dim(), level);
    let parts: Vec<(f64, f64)> = cells
        .par_iter()
        .map(|cell| {
            let whole = cell.iter().all(|&(a, b)| a == -1.0 && b == 1.0);
            if whole {
                bernstein_bounds(coeffs)
            } else {
                bernstein_bounds(&subdivide(coeffs, cell)?)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, p| (acc.0.min(p.0), acc.1.max(p.1))))
}

fn uniform_cells(d: usize, level: u32) -> Vec<Vec<(f64, f64)>> {
    let k = 1usize << level;
    let h = 2.0 / k as f64;
    let edge = |s: usize| if s == k { 1.0 } else { -1.0 + h * s as f64 };
    (0..k.pow(d as u32))
        .map(|flat| {
            let mut r = flat;
            (0..d)
                .map(|_| {
                    let s = r % k;
                    r /= k;
                    (edge(s), edge(s + 1))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{make_node_set, NodeKind};
    use crate::bounder::brute_force_extrema;
    use crate::boxopt::optimize_values;

    fn ladder(p: usize) -> Vec<BoundingTable> {
        let b = BasisSpec::lobatto(p).unwrap();
        (p + 1..=p + 3)
            .map(|m| optimize_values(&b, &make_node_set(NodeKind::GaussLobatto, m).unwrap(), 1000).unwrap())
            .collect()
    }

    #[test]
    fn full_subcell_is_identity() {
        let b = BasisSpec::lobatto(4).unwrap();
        let c = PolyCoeffs::new_1d(b, vec![0.1, -0.4, 0.9, 0.3, -0.2]).unwrap();
        let s = subdivide(&c, &[(-1.0, 1.0)]).unwrap();
        for (a, b) in s.values().iter().zip(c.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn linear_restricted_to_right_half() {
        for family in [BasisFamily::LobattoNodal, BasisFamily::Bernstein] {
            let b = BasisSpec::new(family, 3).unwrap();
            let c = PolyCoeffs::interpolate(1, &b, |x| x[0]).unwrap();
            let s = subdivide(&c, &[(0.0, 1.0)]).unwrap();
            for &xi in &[-1.0, -0.3, 0.5, 1.0] {
                assert!((s.eval(&[xi]).unwrap() - 0.5 * (1.0 + xi)).abs() < 1e-14);
            }
        }
        let b = BasisSpec::lobatto(2).unwrap();
        let c = PolyCoeffs::new_1d(b, vec![0.0; 3]).unwrap();
        assert!(matches!(subdivide(&c, &[(0.2, 0.2)]), Err(Error::EmptySubcell)));
    }

    #[test]
    fn linear_converges_immediately() {
        let tables = ladder(3);
        let c = PolyCoeffs::interpolate(1, tables[0].basis(), |x| 1.0 - 2.0 * x[0]).unwrap();
        let s = bound_adaptive(&c, &tables, 2.0 * 4.0 * 1e-6, 5, Strategy::Subdivide).unwrap();
        assert!(s.converged);
        assert_eq!(s.levels_used, 0);
    }

    #[test]
    fn refinement_approaches_oracle() {
        let tables = ladder(3);
        let c = PolyCoeffs::new_1d(tables[0].basis().clone(), vec![0.4, -1.1, 0.8, 0.2]).unwrap();
        let (lo, hi) = brute_force_extrema(&c, 10_000).unwrap();
        for strategy in [Strategy::Subdivide, Strategy::Hybrid] {
            let s = bound_adaptive(&c, &tables, 1e-4, 20, strategy).unwrap();
            assert!(s.converged, "{strategy:?}");
            assert!(s.global_min <= lo + 1e-12 && lo - s.global_min <= 1e-4);
            assert!(s.global_max >= hi - 1e-12 && s.global_max - hi <= 1e-4);
        }
        let s = bound_adaptive(&c, &tables, 1e-4, 20, Strategy::IncreaseM).unwrap();
        assert!(!s.converged);
        assert!(s.global_min <= lo + 1e-12);
    }
}
