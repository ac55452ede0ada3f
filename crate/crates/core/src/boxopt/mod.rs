//! Optimal piecewise-linear bounding boxes for basis functions.
//!
//! For a control-node set `eta` each basis function `phi_i` receives an upper
//! row `U` and a lower row `L` of control values such that the piecewise-linear
//! interpolants enclose `phi_i` on `[-1, 1]`. Rows minimize the L2 gap under
//! sampled constraints and are then shifted so that the continuous bound holds.

mod io;
mod qp;
pub(crate) mod roots;
mod search;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

pub use io::{format_table, load_table, load_table_with, parse_table, parse_table_with, save_table};
pub use search::{optimize_nodes, optimize_nodes_with, NodeSearchOptions};

use crate::basis::{legendre_monomials, BasisSpec, NodeSet};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, Quadrature};
use roots::{roots_in_unit_interval, shift_scale};

/// Safety margin added to every optimized row.
pub const DEFAULT_EPSILON: f64 = 1e-6;
/// Equispaced constraint samples on `[-1, 1]`.
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    OptimizedHere,
    /// Optimized, but the continuous offset fell back to dense sampling.
    OptimizedSampled,
    LoadedFromFile,
    Published,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::OptimizedHere => "optimized-here",
            Provenance::OptimizedSampled => "optimized-sampled",
            Provenance::LoadedFromFile => "loaded-from-file",
            Provenance::Published => "published",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimized-here" => Ok(Provenance::OptimizedHere),
            "optimized-sampled" => Ok(Provenance::OptimizedSampled),
            "loaded-from-file" => Ok(Provenance::LoadedFromFile),
            "published" => Ok(Provenance::Published),
            _ => Err(Error::UnknownName { what: "provenance", value: s.to_string() }),
        }
    }
}

/// Lower and upper control values of every basis function on a node set.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundingTable {
    basis: BasisSpec,
    nodes: NodeSet,
    /// Row-major `N x M`.
    lower: Vec<f64>,
    upper: Vec<f64>,
    epsilon: f64,
    provenance: Provenance,
}

impl BoundingTable {
    pub fn new(
        basis: BasisSpec,
        nodes: NodeSet,
        lower: Vec<Vec<f64>>,
        upper: Vec<Vec<f64>>,
        epsilon: f64,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = basis.len();
        let m = nodes.len();
        for rows in [&lower, &upper] {
            if rows.len() != n || rows.iter().any(|r| r.len() != m) {
                return Err(Error::CoefficientCount {
                    expected: n * m,
                    found: rows.iter().map(Vec::len).sum(),
                });
            }
        }
        let lower: Vec<f64> = lower.into_iter().flatten().collect();
        let upper: Vec<f64> = upper.into_iter().flatten().collect();
        if let Some(k) = lower.iter().chain(&upper).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(BoundingTable { basis, nodes, lower, upper, epsilon, provenance })
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    /// Number of basis functions.
    pub fn n(&self) -> usize {
        self.basis.len()
    }

    /// Number of control nodes.
    pub fn m(&self) -> usize {
        self.nodes.len()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn with_nodes(mut self, nodes: NodeSet) -> Result<Self> {
        if nodes.positions() != self.nodes.positions() {
            return Err(Error::InvalidNodeSet("positions differ from the table's nodes".into()));
        }
        self.nodes = nodes;
        Ok(self)
    }

    pub fn lower_row(&self, i: usize) -> &[f64] {
        let m = self.m();
        &self.lower[i * m..(i + 1) * m]
    }

    pub fn upper_row(&self, i: usize) -> &[f64] {
        let m = self.m();
        &self.upper[i * m..(i + 1) * m]
    }

    /// Lower values, row-major `N x M`.
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn lower_row_mut(&mut self, i: usize) -> &mut [f64] {
        let m = self.m();
        &mut self.lower[i * m..(i + 1) * m]
    }

    pub fn upper_row_mut(&mut self, i: usize) -> &mut [f64] {
        let m = self.m();
        &mut self.upper[i * m..(i + 1) * m]
    }

    /// Piecewise-linear lower bound of basis function `i` at `x`.
    pub fn lower_at(&self, i: usize, x: f64) -> f64 {
        self.nodes.interpolate(self.lower_row(i), x)
    }

    pub fn upper_at(&self, i: usize, x: f64) -> f64 {
        self.nodes.interpolate(self.upper_row(i), x)
    }

    /// Largest deviation from `q_ij = q_(N-1-i)(M-1-j)`.
    pub fn symmetry_defect(&self) -> f64 {
        let (n, m) = (self.n(), self.m());
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..m {
                let k = (n - 1 - i) * m + (m - 1 - j);
                worst = worst
                    .max((self.lower[i * m + j] - self.lower[k]).abs())
                    .max((self.upper[i * m + j] - self.upper[k]).abs());
            }
        }
        worst
    }

    pub fn is_ordered(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(l, u)| l <= u)
    }
}

/// Quality metrics of a table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxQuality {
    /// Sum over basis functions of `||U - phi||_2 + ||phi - L||_2`.
    pub eps2: f64,
    /// Smallest value of `min(U - phi, phi - L)` over `[-1, 1]`; negative means a violation.
    pub max_violation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoxOptions {
    pub n_samples: usize,
    pub epsilon: f64,
    /// Active-set iteration budget per QP.
    pub max_iterations: usize,
}

impl Default for BoxOptions {
    fn default() -> Self {
        BoxOptions { n_samples: DEFAULT_SAMPLES, epsilon: DEFAULT_EPSILON, max_iterations: 2000 }
    }
}

/// A basis function prepared for evaluation and extremum search.
#[derive(Clone, Debug)]
pub(crate) struct BasisFunction {
    legendre: Vec<f64>,
    /// Monomial coefficients of the derivative.
    deriv: Vec<f64>,
    /// Upper bound of `|phi'|` on `[-1, 1]`.
    deriv_bound: f64,
}

impl BasisFunction {
    pub(crate) fn all(basis: &BasisSpec) -> Vec<BasisFunction> {
        let n = basis.len();
        let mono = legendre_monomials(n);
        (0..n)
            .map(|i| {
                let legendre: Vec<f64> = basis.to_legendre().column(i).iter().copied().collect();
                let mut m = vec![0.0; n];
                for (k, poly) in mono.iter().enumerate() {
                    for (e, &c) in poly.iter().enumerate() {
                        m[e] += legendre[k] * c;
                    }
                }
                let deriv: Vec<f64> = (1..n).map(|e| e as f64 * m[e]).collect();
                // |P_k'| <= k(k+1)/2 on [-1, 1]
                let deriv_bound = legendre
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a.abs() * (k * (k + 1)) as f64 / 2.0)
                    .sum();
                BasisFunction { legendre, deriv, deriv_bound }
            })
            .collect()
    }

    pub(crate) fn value(&self, x: f64) -> f64 {
        // Clenshaw for sum a_k P_k(x)
        let n = self.legendre.len();
        let (mut b1, mut b2) = (0.0, 0.0);
        for k in (0..n).rev() {
            let kf = k as f64;
            let alpha = (2.0 * kf + 1.0) / (kf + 1.0) * x;
            let beta = -(kf + 1.0) / (kf + 2.0);
            let b0 = self.legendre[k] + alpha * b1 + beta * b2;
            b2 = b1;
            b1 = b0;
        }
        b1
    }

    /// Minimum over `[-1, 1]` of `sign * (PL(q) - phi)`, and whether the
    /// dense-sampling fallback was needed.
    pub(crate) fn min_gap(&self, eta: &[f64], q: &[f64], sign: f64, fallback_samples: usize) -> (f64, bool) {
        let mut best = f64::INFINITY;
        let mut sampled = false;
        let mut d = self.deriv.clone();
        if d.is_empty() {
            d.push(0.0);
        }
        let base = d[0];
        for j in 0..eta.len() - 1 {
            let (a, b) = (eta[j], eta[j + 1]);
            let slope = (q[j + 1] - q[j]) / (b - a);
            let gap = |x: f64| sign * (q[j] + slope * (x - a) - self.value(x));
            best = best.min(gap(a)).min(gap(b));
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            d[0] = base - slope;
            match roots_in_unit_interval(&shift_scale(&d, mid, half)) {
                Some(ts) => {
                    for t in ts {
                        best = best.min(gap((mid + half * t).clamp(a, b)));
                    }
                }
                None => {
                    sampled = true;
                    best = best.min(self.sampled_min(a, b, &gap, slope, fallback_samples));
                }
            }
        }
        (best, sampled)
    }

    /// Dense-sampling minimum on `[a, b]` padded by a Lipschitz bound.
    fn sampled_min(&self, a: f64, b: f64, gap: &dyn Fn(f64) -> f64, slope: f64, samples: usize) -> f64 {
        let count = ((samples as f64 * (b - a) / 2.0).ceil() as usize).max(2);
        let h = (b - a) / (count - 1) as f64;
        let min = (0..count)
            .map(|k| gap((a + h * k as f64).min(b)))
            .fold(f64::INFINITY, f64::min);
        min - (slope.abs() + self.deriv_bound) * 0.5 * h
    }

    /// `||PL(q) - phi||_2` by subinterval Gauss quadrature.
    pub(crate) fn gap_norm(&self, eta: &[f64], q: &[f64], quad: &Quadrature) -> f64 {
        let mut s = 0.0;
        for j in 0..eta.len() - 1 {
            let (a, b) = (eta[j], eta[j + 1]);
            let slope = (q[j + 1] - q[j]) / (b - a);
            s += quad.integrate(a, b, |x| {
                let g = q[j] + slope * (x - a) - self.value(x);
                g * g
            });
        }
        s.sqrt()
    }
}

/// Per-basis data shared by every node set: samples, sampled values, `||phi||^2`.
pub(crate) struct BoxContext {
    basis: BasisSpec,
    funcs: Vec<BasisFunction>,
    samples: Vec<f64>,
    /// `values[i][k] = phi_i(x_k)` and its negation.
    values: Vec<Vec<f64>>,
    neg_values: Vec<Vec<f64>>,
    phi_sq: Vec<f64>,
    options: BoxOptions,
}

/// Node-dependent QP data.
pub(crate) struct BoxProblem {
    eta: Vec<f64>,
    ginv: DMatrix<f64>,
    /// `b[i][j] = int hat_j phi_i`.
    b: Vec<Vec<f64>>,
    index: Vec<usize>,
    t: Vec<f64>,
}

pub(crate) struct SideSolution {
    q: Vec<f64>,
    /// `||PL(q) - phi||_2^2` from the quadratic form.
    objective: f64,
    converged: bool,
    iterations: usize,
    min_slack: f64,
}

impl BoxContext {
    pub(crate) fn new(basis: &BasisSpec, options: BoxOptions) -> Result<Self> {
        if options.n_samples < 2 {
            return Err(Error::InvalidParameter(format!(
                "n_samples must be at least 2, got {}",
                options.n_samples
            )));
        }
        if !(options.epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be >= 0, got {}", options.epsilon)));
        }
        let n = options.n_samples;
        let mut samples = vec![0.0; n];
        let h = 2.0 / (n - 1) as f64;
        for k in 0..n.div_ceil(2) {
            let x = -1.0 + h * k as f64;
            samples[k] = x;
            samples[n - 1 - k] = -x;
        }
        if n % 2 == 1 {
            samples[n / 2] = 0.0;
        }
        let nb = basis.len();
        let mut values = vec![vec![0.0; n]; nb];
        let mut row = vec![0.0; nb];
        for (k, &x) in samples.iter().enumerate() {
            basis.eval_all_unchecked(x, &mut row);
            for i in 0..nb {
                values[i][k] = row[i];
            }
        }
        let neg_values = values.iter().map(|v| v.iter().map(|a| -a).collect()).collect();
        let quad = gauss_legendre(nb + 1);
        let mut phi_sq = vec![0.0; nb];
        for (&x, &w) in quad.points.iter().zip(&quad.weights) {
            basis.eval_all_unchecked(x, &mut row);
            for i in 0..nb {
                phi_sq[i] += w * row[i] * row[i];
            }
        }
        Ok(BoxContext {
            basis: basis.clone(),
            funcs: BasisFunction::all(basis),
            samples,
            values,
            neg_values,
            phi_sq,
            options,
        })
    }

    /// Basis functions that need their own optimization, with multiplicities.
    pub(crate) fn unique(&self) -> Vec<(usize, f64)> {
        let n = self.basis.len();
        if self.basis.is_mirror_symmetric() {
            (0..n.div_ceil(2))
                .map(|i| (i, if n - 1 - i == i { 1.0 } else { 2.0 }))
                .collect()
        } else {
            (0..n).map(|i| (i, 1.0)).collect()
        }
    }

    pub(crate) fn problem(&self, eta: &[f64]) -> Result<BoxProblem> {
        let m = eta.len();
        let nb = self.basis.len();
        let mut g = DMatrix::zeros(m, m);
        for j in 0..m - 1 {
            let h = eta[j + 1] - eta[j];
            g[(j, j)] += h / 3.0;
            g[(j + 1, j + 1)] += h / 3.0;
            g[(j, j + 1)] += h / 6.0;
            g[(j + 1, j)] += h / 6.0;
        }
        let ginv = g.cholesky().ok_or(Error::InvalidNodeSet("degenerate node spacing".into()))?.inverse();

        let quad = gauss_legendre(self.basis.order() / 2 + 2);
        let mut b = vec![vec![0.0; m]; nb];
        let mut row = vec![0.0; nb];
        for j in 0..m - 1 {
            let (a, c) = (eta[j], eta[j + 1]);
            let half = 0.5 * (c - a);
            for (&s, &w) in quad.points.iter().zip(&quad.weights) {
                let x = a + half * (s + 1.0);
                let t = 0.5 * (s + 1.0);
                self.basis.eval_all_unchecked(x, &mut row);
                for i in 0..nb {
                    b[i][j] += half * w * (1.0 - t) * row[i];
                    b[i][j + 1] += half * w * t * row[i];
                }
            }
        }

        let mut index = Vec::with_capacity(self.samples.len());
        let mut t = Vec::with_capacity(self.samples.len());
        let mut j = 0;
        for &x in &self.samples {
            while j + 1 < m - 1 && x >= eta[j + 1] {
                j += 1;
            }
            if x >= eta[m - 1] {
                index.push(m - 1);
                t.push(0.0);
            } else if x == eta[j] {
                index.push(j);
                t.push(0.0);
            } else {
                index.push(j);
                t.push((x - eta[j]) / (eta[j + 1] - eta[j]));
            }
        }
        Ok(BoxProblem { eta: eta.to_vec(), ginv, b, index, t })
    }

    pub(crate) fn solve_side(&self, prob: &BoxProblem, i: usize, upper: bool) -> SideSolution {
        let (rhs, b): (&[f64], Vec<f64>) = if upper {
            (&self.values[i], prob.b[i].clone())
        } else {
            (&self.neg_values[i], prob.b[i].iter().map(|v| -v).collect())
        };
        let cons = qp::PlConstraints { index: &prob.index, t: &prob.t, rhs };
        let out = qp::solve(&prob.ginv, &b, &cons, self.options.max_iterations);
        // int (PL - phi)^2 = q'Gq - 2 b'q + int phi^2
        let q = &out.x;
        let eta = &prob.eta;
        let mut qgq = 0.0;
        for j in 0..eta.len() - 1 {
            let h = eta[j + 1] - eta[j];
            qgq += h / 3.0 * (q[j] * q[j] + q[j] * q[j + 1] + q[j + 1] * q[j + 1]);
        }
        let bq: f64 = b.iter().zip(q).map(|(a, c)| a * c).sum();
        let objective = (qgq - 2.0 * bq + self.phi_sq[i]).max(0.0);
        let sign = if upper { 1.0 } else { -1.0 };
        SideSolution {
            q: out.x.iter().map(|v| sign * v).collect(),
            objective,
            converged: out.converged,
            iterations: out.iterations,
            min_slack: out.min_slack,
        }
    }

    /// Sum of gap norms before the continuous offset; the node-search objective.
    pub(crate) fn objective(&self, eta: &[f64]) -> f64 {
        let prob = match self.problem(eta) {
            Ok(p) => p,
            Err(_) => return f64::INFINITY,
        };
        self.unique()
            .iter()
            .map(|&(i, mult)| {
                let up = self.solve_side(&prob, i, true);
                let lo = self.solve_side(&prob, i, false);
                mult * (up.objective.sqrt() + lo.objective.sqrt())
            })
            .sum()
    }

    pub(crate) fn build_table(&self, nodes: &NodeSet) -> Result<BoundingTable> {
        let eta = nodes.positions();
        let m = eta.len();
        let n = self.basis.len();
        let prob = self.problem(eta)?;
        let mirror = self.basis.is_mirror_symmetric();
        let fallback = 10 * self.options.n_samples;
        let eps = self.options.epsilon;

        let solved: Vec<(usize, Vec<f64>, Vec<f64>, bool, usize, f64, bool)> = self
            .unique()
            .par_iter()
            .map(|&(i, _)| {
                let up = self.solve_side(&prob, i, true);
                let lo = self.solve_side(&prob, i, false);
                let (mut qu, mut ql) = (up.q, lo.q);
                if mirror && n - 1 - i == i {
                    symmetrize(&mut qu);
                    symmetrize(&mut ql);
                }
                let f = &self.funcs[i];
                let (gu, su) = f.min_gap(eta, &qu, 1.0, fallback);
                let (gl, sl) = f.min_gap(eta, &ql, -1.0, fallback);
                let du = -gu.min(0.0);
                let dl = -gl.min(0.0);
                qu.iter_mut().for_each(|v| *v += du + eps);
                ql.iter_mut().for_each(|v| *v -= dl + eps);
                let converged = up.converged && lo.converged;
                let iterations = up.iterations.max(lo.iterations);
                let slack = up.min_slack.min(lo.min_slack);
                (i, ql, qu, su || sl, iterations, slack, converged)
            })
            .collect();

        let mut lower = vec![vec![0.0; m]; n];
        let mut upper = vec![vec![0.0; m]; n];
        let mut sampled = false;
        let mut failure: Option<(usize, f64)> = None;
        for (i, ql, qu, s, iters, slack, converged) in solved {
            if mirror {
                let k = n - 1 - i;
                lower[k] = ql.iter().rev().copied().collect();
                upper[k] = qu.iter().rev().copied().collect();
            }
            lower[i] = ql;
            upper[i] = qu;
            sampled |= s;
            if !converged {
                let prev = failure.unwrap_or((0, f64::INFINITY));
                failure = Some((prev.0.max(iters), prev.1.min(slack)));
            }
        }
        let provenance = if sampled { Provenance::OptimizedSampled } else { Provenance::OptimizedHere };
        let table = BoundingTable::new(self.basis.clone(), nodes.clone(), lower, upper, eps, provenance)?;
        match failure {
            None => Ok(table),
            Some((iterations, _)) => {
                let max_violation = verify_table(&table).max_violation;
                Err(Error::NonConvergence { iterations, max_violation, best: Some(Box::new(table)) })
            }
        }
    }
}

fn symmetrize(q: &mut [f64]) {
    let m = q.len();
    for j in 0..m / 2 {
        let avg = 0.5 * (q[j] + q[m - 1 - j]);
        q[j] = avg;
        q[m - 1 - j] = avg;
    }
}

/// Optimal rows for fixed control nodes with default margin and iteration budget.
pub fn optimize_values(basis: &BasisSpec, nodes: &NodeSet, n_samples: usize) -> Result<BoundingTable> {
    optimize_values_with(basis, nodes, &BoxOptions { n_samples, ..BoxOptions::default() })
}

pub fn optimize_values_with(basis: &BasisSpec, nodes: &NodeSet, options: &BoxOptions) -> Result<BoundingTable> {
    BoxContext::new(basis, options.clone())?.build_table(nodes)
}

/// Result of [`offset_correction`] for one basis function.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectedRows {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Shift applied to the upper row before the margin (`>= 0`).
    pub delta_upper: f64,
    pub delta_lower: f64,
    /// True if the extremum search fell back to dense sampling.
    pub sampled: bool,
}

/// Shifts candidate rows so that they bound basis function `index` on all of `[-1, 1]`,
/// then widens both by `epsilon`.
pub fn offset_correction(
    basis: &BasisSpec,
    index: usize,
    nodes: &NodeSet,
    lower: &[f64],
    upper: &[f64],
    epsilon: f64,
    n_samples: usize,
) -> Result<CorrectedRows> {
    let n = basis.len();
    if index >= n {
        return Err(Error::IndexOutOfRange { index, count: n });
    }
    let m = nodes.len();
    if lower.len() != m || upper.len() != m {
        return Err(Error::CoefficientCount { expected: m, found: lower.len().min(upper.len()) });
    }
    let f = &BasisFunction::all(basis)[index];
    let eta = nodes.positions();
    let (gu, su) = f.min_gap(eta, upper, 1.0, 10 * n_samples);
    let (gl, sl) = f.min_gap(eta, lower, -1.0, 10 * n_samples);
    let delta_upper = -gu.min(0.0);
    let delta_lower = -gl.min(0.0);
    Ok(CorrectedRows {
        lower: lower.iter().map(|v| v - delta_lower - epsilon).collect(),
        upper: upper.iter().map(|v| v + delta_upper + epsilon).collect(),
        delta_upper,
        delta_lower,
        sampled: su || sl,
    })
}

/// L2 gap sum and worst continuous violation of a table.
pub fn verify_table(table: &BoundingTable) -> BoxQuality {
    let funcs = BasisFunction::all(table.basis());
    let eta = table.nodes().positions();
    let quad = gauss_legendre(table.basis().order() + 2);
    let fallback = 10 * DEFAULT_SAMPLES;
    let mut eps2 = 0.0;
    let mut worst = f64::INFINITY;
    for (i, f) in funcs.iter().enumerate() {
        let (u, l) = (table.upper_row(i), table.lower_row(i));
        worst = worst.min(f.min_gap(eta, u, 1.0, fallback).0);
        worst = worst.min(f.min_gap(eta, l, -1.0, fallback).0);
        eps2 += f.gap_norm(eta, u, &quad) + f.gap_norm(eta, l, &quad);
    }
    BoxQuality { eps2, max_violation: worst }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{make_node_set, BasisFamily, NodeKind};

    #[test]
    fn clenshaw_matches_basis_evaluation() {
        let b = BasisSpec::new(BasisFamily::LegendreNodal, 5).unwrap();
        let funcs = BasisFunction::all(&b);
        for &x in &[-1.0, -0.2, 0.6, 1.0] {
            let v = b.eval_all(x).unwrap();
            for i in 0..b.len() {
                assert!((funcs[i].value(x) - v[i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn linear_basis_is_its_own_box() {
        let b = BasisSpec::lobatto(1).unwrap();
        let nodes = make_node_set(NodeKind::Equispaced, 2).unwrap();
        let t = optimize_values(&b, &nodes, 1000).unwrap();
        for (got, want) in t.lower_row(0).iter().zip([1.0 - 1e-6, -1e-6]) {
            assert!((got - want).abs() < 1e-12);
        }
        for (got, want) in t.upper_row(0).iter().zip([1.0 + 1e-6, 1e-6]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn p2_box_matches_reference_values() {
        let b = BasisSpec::lobatto(2).unwrap();
        let nodes = NodeSet::explicit(vec![-1.0, 0.0, 1.0]).unwrap();
        let t = optimize_values(&b, &nodes, 1000).unwrap();
        let l = [0.8752491, -0.1252514, -0.1247509];
        let u = [1.0005016, 0.0000010, 0.0005016];
        for j in 0..3 {
            assert!((t.lower_row(0)[j] - l[j]).abs() < 2e-3);
            assert!((t.upper_row(0)[j] - u[j]).abs() < 2e-3);
        }
        assert_eq!(t.symmetry_defect(), 0.0);
        assert!(verify_table(&t).max_violation >= 0.0);
    }

    #[test]
    fn offset_of_interpolant_is_the_chord_gap() {
        // phi_0 = x(x - 1)/2 is convex; the chord on [-1, 0] overshoots by h^2 phi''/8 = 1/8
        let b = BasisSpec::lobatto(2).unwrap();
        let nodes = make_node_set(NodeKind::Equispaced, 3).unwrap();
        let interp = [1.0, 0.0, 0.0];
        let c = offset_correction(&b, 0, &nodes, &interp, &interp, 1e-6, 1000).unwrap();
        assert!(c.delta_upper.abs() < 1e-15);
        assert!((c.delta_lower - 0.125).abs() < 1e-14);
        assert!(!c.sampled);
        assert_eq!(c.upper[0], 1.0 + 1e-6);
    }

    #[test]
    fn sampled_fallback_is_conservative() {
        let b = BasisSpec::lobatto(4).unwrap();
        let f = &BasisFunction::all(&b)[1];
        let eta = [-1.0, 0.0, 1.0];
        let q = [0.0, 0.0, 0.0];
        let (exact, _) = f.min_gap(&eta, &q, 1.0, 10_000);
        let gap = |x: f64| -f.value(x);
        let sampled = f.sampled_min(-1.0, 0.0, &gap, 0.0, 10_000).min(f.sampled_min(0.0, 1.0, &gap, 0.0, 10_000));
        assert!(sampled <= exact);
        assert!(exact - sampled < 1e-2);
    }

    #[test]
    fn lowered_upper_entry_is_detected() {
        let b = BasisSpec::lobatto(2).unwrap();
        let nodes = make_node_set(NodeKind::Equispaced, 3).unwrap();
        let mut t = optimize_values(&b, &nodes, 1000).unwrap();
        t.upper_row_mut(1)[1] -= 0.5;
        assert!(verify_table(&t).max_violation < 0.0);
    }
}
