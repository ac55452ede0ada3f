//! Guaranteed lower/upper bounds of polynomials from bounding tables.
//!
//! A polynomial is split into its L2 projection onto P1 and a fluctuation;
//! the fluctuation is bounded term by term with the table rows. In several
//! dimensions the same one-dimensional step is applied axis by axis, with the
//! coefficients of later sweeps known only as intervals.

mod adaptive;
mod bernstein;
mod oracle;

use std::cell::Cell;

pub use adaptive::{
    bernstein_uniform, bound_adaptive, bound_adaptive_with, bound_uniform, subdivide, AdaptiveOptions, Focus, Strategy,
};
pub use bernstein::{bernstein_bounds, bernstein_coeffs};
pub use oracle::{brute_force_extrema, brute_force_extrema_with};

use crate::boxopt::BoundingTable;
use crate::error::{Error, Result};
use crate::poly::PolyCoeffs;

/// Interval rows with at most this many non-degenerate coefficients are bounded vertex by vertex.
pub const MAX_VERTEX_SPREAD: usize = 3;

/// The projection `u_LO(x) = a0 + a1 x` of a 1D polynomial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearPart {
    pub a0: f64,
    pub a1: f64,
}

impl LinearPart {
    pub fn eval(&self, x: f64) -> f64 {
        self.a0 + self.a1 * x
    }
}

/// Lower/upper values at the tensor grid of control nodes, x index fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeBounds {
    pub dim: usize,
    pub nodes: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl NodeBounds {
    pub fn min_lower(&self) -> f64 {
        self.lower.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_upper(&self) -> f64 {
        self.upper.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest upper value: some point of the element has `u` at most this.
    pub fn min_upper(&self) -> f64 {
        self.upper.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_lower(&self) -> f64 {
        self.lower.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_gap(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }
}

/// Global bounds of a polynomial on its element.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundSummary {
    pub global_min: f64,
    pub global_max: f64,
    /// Smallest certified upper value; the true minimum lies in `[global_min, min_upper]`.
    pub min_upper: f64,
    /// Largest certified lower value; the true maximum lies in `[max_lower, global_max]`.
    pub max_lower: f64,
    /// Reference point where `u <= min_upper` is certified.
    pub min_upper_at: Option<Vec<f64>>,
    pub levels_used: usize,
    pub converged: bool,
    /// Bounds of the unrefined element.
    pub nodes: Option<NodeBounds>,
}

/// Counts scalar products in the bounding kernels.
#[derive(Debug, Default)]
pub struct OpCounter {
    products: Cell<u64>,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn products(&self) -> u64 {
        self.products.get()
    }

    fn add(&self, n: u64) {
        self.products.set(self.products.get() + n);
    }
}

/// L2 projection of a 1D polynomial onto P1 and the fluctuation `u - u_LO`.
pub fn project_p1(coeffs: &PolyCoeffs) -> Result<(LinearPart, PolyCoeffs)> {
    if coeffs.dim() != 1 {
        return Err(Error::UnsupportedDimension(coeffs.dim()));
    }
    let basis = coeffs.basis();
    let (w0, w1) = basis.projection_weights();
    let u = coeffs.values();
    let a0: f64 = u.iter().zip(w0).map(|(a, b)| a * b).sum();
    let a1: f64 = u.iter().zip(w1).map(|(a, b)| a * b).sum();
    let fluct: Vec<f64> = u
        .iter()
        .zip(basis.unit_coeffs().iter().zip(basis.identity_coeffs()))
        .map(|(&ui, (&c1, &cx))| ui - a0 * c1 - a1 * cx)
        .collect();
    Ok((LinearPart { a0, a1 }, PolyCoeffs::new_1d(basis.clone(), fluct)?))
}

/// Precomputed per-table data for the sweep kernel.
struct Kernel<'a> {
    table: &'a BoundingTable,
    w0: &'a [f64],
    w1: &'a [f64],
    unit: &'a [f64],
    ident: &'a [f64],
    eta: &'a [f64],
}

impl<'a> Kernel<'a> {
    fn new(table: &'a BoundingTable) -> Self {
        let basis = table.basis();
        let (w0, w1) = basis.projection_weights();
        Kernel {
            table,
            w0,
            w1,
            unit: basis.unit_coeffs(),
            ident: basis.identity_coeffs(),
            eta: table.nodes().positions(),
        }
    }

    /// Bounds at every control node of a 1D polynomial whose coefficients lie in
    /// `[lo_i, hi_i]`; results go to `out_lo[j * stride]`, `out_hi[j * stride]`.
    ///
    /// With at most [`MAX_VERTEX_SPREAD`] non-degenerate coefficients the box
    /// vertices are bounded one by one; the node bounds are concave/convex in
    /// the coefficients, so this is the exact extremum over the box.
    #[allow(clippy::too_many_arguments)]
    fn interval_row(
        &self,
        lo: &[f64],
        hi: &[f64],
        out_lo: &mut [f64],
        out_hi: &mut [f64],
        stride: usize,
        fluct: &mut [(f64, f64)],
        counter: Option<&OpCounter>,
    ) {
        let n = lo.len();
        let m = self.eta.len();
        let spread: Vec<usize> = (0..n).filter(|&i| lo[i] != hi[i]).collect();
        if spread.is_empty() || spread.len() > MAX_VERTEX_SPREAD {
            self.row_kernel(lo, hi, out_lo, out_hi, stride, fluct, counter);
            return;
        }
        let mut vertex = lo.to_vec();
        let (mut vl, mut vh) = (vec![0.0; m], vec![0.0; m]);
        for j in 0..m {
            out_lo[j * stride] = f64::INFINITY;
            out_hi[j * stride] = f64::NEG_INFINITY;
        }
        for mask in 0..1usize << spread.len() {
            for (bit, &i) in spread.iter().enumerate() {
                vertex[i] = if mask >> bit & 1 == 1 { hi[i] } else { lo[i] };
            }
            self.row_kernel(&vertex, &vertex, &mut vl, &mut vh, 1, fluct, counter);
            for j in 0..m {
                out_lo[j * stride] = out_lo[j * stride].min(vl[j]);
                out_hi[j * stride] = out_hi[j * stride].max(vh[j]);
            }
        }
    }

    /// Projection plus four-product rule on the fluctuation intervals.
    #[allow(clippy::too_many_arguments)]
    fn row_kernel(
        &self,
        lo: &[f64],
        hi: &[f64],
        out_lo: &mut [f64],
        out_hi: &mut [f64],
        stride: usize,
        fluct: &mut [(f64, f64)],
        counter: Option<&OpCounter>,
    ) {
        let n = lo.len();
        let (mut a0, mut a1) = (0.0, 0.0);
        for i in 0..n {
            let c = 0.5 * (lo[i] + hi[i]);
            a0 += c * self.w0[i];
            a1 += c * self.w1[i];
        }
        for i in 0..n {
            let l = a0 * self.unit[i] + a1 * self.ident[i];
            fluct[i] = (lo[i] - l, hi[i] - l);
        }
        let m = self.eta.len();
        for j in 0..m {
            let base = a0 + a1 * self.eta[j];
            let (mut sl, mut su) = (base, base);
            for (i, &(fl, fh)) in fluct.iter().enumerate().take(n) {
                let ql = self.table.lower()[i * m + j];
                let qu = self.table.upper()[i * m + j];
                if fl == fh {
                    let (x, y) = (fl * ql, fl * qu);
                    sl += x.min(y);
                    su += x.max(y);
                } else {
                    let p = [fl * ql, fl * qu, fh * ql, fh * qu];
                    sl += p.iter().copied().fold(f64::INFINITY, f64::min);
                    su += p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                }
            }
            out_lo[j * stride] = sl;
            out_hi[j * stride] = su;
        }
        if let Some(c) = counter {
            c.add((2 * n + 4 * n * m) as u64);
        }
    }

    /// Replaces axis `axis` (length `n`) of the interval data by the `m` control nodes.
    fn sweep(&self, lo: &[f64], hi: &[f64], shape: &[usize], axis: usize, counter: Option<&OpCounter>) -> (Vec<f64>, Vec<f64>) {
        let inner: usize = shape[..axis].iter().product();
        let len = shape[axis];
        let outer: usize = shape[axis + 1..].iter().product();
        let m = self.eta.len();
        let mut out_lo = vec![0.0; inner * m * outer];
        let mut out_hi = vec![0.0; inner * m * outer];
        let mut row_lo = vec![0.0; len];
        let mut row_hi = vec![0.0; len];
        let mut fluct = vec![(0.0, 0.0); len];
        for o in 0..outer {
            for i in 0..inner {
                for k in 0..len {
                    let src = (o * len + k) * inner + i;
                    row_lo[k] = lo[src];
                    row_hi[k] = hi[src];
                }
                let dst = o * m * inner + i;
                self.interval_row(
                    &row_lo,
                    &row_hi,
                    &mut out_lo[dst..],
                    &mut out_hi[dst..],
                    inner,
                    &mut fluct,
                    counter,
                );
            }
        }
        (out_lo, out_hi)
    }
}

fn check_basis(coeffs: &PolyCoeffs, table: &BoundingTable) -> Result<()> {
    if coeffs.basis() != table.basis() {
        return Err(Error::BasisMismatch {
            expected: table.basis().to_string(),
            found: coeffs.basis().to_string(),
        });
    }
    Ok(())
}

fn bound_impl(coeffs: &PolyCoeffs, table: &BoundingTable, counter: Option<&OpCounter>) -> Result<NodeBounds> {
    check_basis(coeffs, table)?;
    let kernel = Kernel::new(table);
    let d = coeffs.dim();
    let mut shape = vec![coeffs.n(); d];
    let mut lo = coeffs.values().to_vec();
    let mut hi = lo.clone();
    for axis in 0..d {
        let (l, h) = kernel.sweep(&lo, &hi, &shape, axis, counter);
        lo = l;
        hi = h;
        shape[axis] = table.m();
    }
    Ok(NodeBounds { dim: d, nodes: table.nodes().positions().to_vec(), lower: lo, upper: hi })
}

/// Node bounds of a 1D polynomial.
pub fn bound_1d(coeffs: &PolyCoeffs, table: &BoundingTable) -> Result<NodeBounds> {
    if coeffs.dim() != 1 {
        return Err(Error::UnsupportedDimension(coeffs.dim()));
    }
    bound_impl(coeffs, table, None)
}

/// Node bounds of a 2D or 3D tensor-product polynomial by dimension sweeps.
pub fn bound_tensor(coeffs: &PolyCoeffs, table: &BoundingTable) -> Result<NodeBounds> {
    if !(2..=3).contains(&coeffs.dim()) {
        return Err(Error::UnsupportedDimension(coeffs.dim()));
    }
    bound_impl(coeffs, table, None)
}

/// [`bound_tensor`] with operation counting.
pub fn bound_tensor_counted(coeffs: &PolyCoeffs, table: &BoundingTable, counter: &OpCounter) -> Result<NodeBounds> {
    bound_impl(coeffs, table, Some(counter))
}

/// Node bounds in any supported dimension.
pub fn bound(coeffs: &PolyCoeffs, table: &BoundingTable) -> Result<NodeBounds> {
    bound_impl(coeffs, table, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{make_node_set, BasisFamily, BasisSpec, NodeKind};
    use crate::boxopt::optimize_values;
    use crate::quadrature::gauss_legendre;

    fn table(p: usize, m: usize) -> BoundingTable {
        let b = BasisSpec::lobatto(p).unwrap();
        optimize_values(&b, &make_node_set(NodeKind::GaussLobatto, m).unwrap(), 1000).unwrap()
    }

    #[test]
    fn projection_of_simple_functions() {
        for family in [BasisFamily::LobattoNodal, BasisFamily::Bernstein, BasisFamily::LegendreModal] {
            let b = BasisSpec::new(family, 2).unwrap();
            let c = PolyCoeffs::interpolate(1, &b, |_| 3.5).unwrap();
            let (lin, f) = project_p1(&c).unwrap();
            assert!((lin.a0 - 3.5).abs() < 1e-14 && lin.a1.abs() < 1e-14);
            assert!(f.values().iter().all(|v| v.abs() < 1e-14));
            let c = PolyCoeffs::interpolate(1, &b, |x| x[0]).unwrap();
            let (lin, f) = project_p1(&c).unwrap();
            assert!(lin.a0.abs() < 1e-14 && (lin.a1 - 1.0).abs() < 1e-14);
            assert!(f.values().iter().all(|v| v.abs() < 1e-14));
            let c = PolyCoeffs::interpolate(1, &b, |x| x[0] * x[0]).unwrap();
            let (lin, _) = project_p1(&c).unwrap();
            assert!((lin.a0 - 1.0 / 3.0).abs() < 1e-14 && lin.a1.abs() < 1e-14);
        }
    }

    #[test]
    fn fluctuation_is_orthogonal_to_linears() {
        let b = BasisSpec::lobatto(5).unwrap();
        let c = PolyCoeffs::new_1d(b, vec![0.3, -1.2, 2.0, 0.7, -0.1, 1.5]).unwrap();
        let (_, f) = project_p1(&c).unwrap();
        let q = gauss_legendre(6);
        let m0 = q.integrate(-1.0, 1.0, |x| f.eval(&[x]).unwrap());
        let m1 = q.integrate(-1.0, 1.0, |x| x * f.eval(&[x]).unwrap());
        assert!(m0.abs() < 1e-12 && m1.abs() < 1e-12);
    }

    #[test]
    fn linear_input_is_bounded_exactly() {
        let t = table(3, 5);
        let c = PolyCoeffs::interpolate(1, t.basis(), |x| 2.0 + 3.0 * x[0]).unwrap();
        let nb = bound_1d(&c, &t).unwrap();
        for (j, &eta) in t.nodes().positions().iter().enumerate() {
            let exact = 2.0 + 3.0 * eta;
            assert!(exact - nb.lower[j] <= 8.0 * 1e-6 && nb.lower[j] <= exact + 1e-13);
            assert!(nb.upper[j] - exact <= 8.0 * 1e-6 && nb.upper[j] >= exact - 1e-13);
        }
    }

    #[test]
    fn single_mode_reproduces_table_rows() {
        // a Legendre P2 mode has no linear part, so u' = u
        let t = table(2, 4);
        let c = PolyCoeffs::interpolate(1, t.basis(), |x| 1.5 * x[0] * x[0] - 0.5).unwrap();
        let (lin, f) = project_p1(&c).unwrap();
        assert!(lin.a0.abs() < 1e-14);
        let nb = bound_1d(&c, &t).unwrap();
        for j in 0..t.m() {
            let mut lo = 0.0;
            let mut hi = 0.0;
            for i in 0..t.n() {
                let (a, b) = (f.values()[i] * t.lower_row(i)[j], f.values()[i] * t.upper_row(i)[j]);
                lo += a.min(b);
                hi += a.max(b);
            }
            assert!((nb.lower[j] - lo).abs() < 1e-14 && (nb.upper[j] - hi).abs() < 1e-14);
        }
    }

    #[test]
    fn counter_matches_sweep_cost() {
        let t = table(3, 6);
        let c = PolyCoeffs::new(2, t.basis().clone(), vec![0.5; 16]).unwrap();
        let counter = OpCounter::new();
        bound_tensor_counted(&c, &t, &counter).unwrap();
        let (n, m) = (4u64, 6u64);
        assert_eq!(counter.products(), (n + m) * (2 * n + 4 * n * m));
    }

    #[test]
    fn mismatched_basis_is_rejected() {
        let t = table(3, 4);
        let c = PolyCoeffs::new_1d(BasisSpec::lobatto(2).unwrap(), vec![0.0; 3]).unwrap();
        assert!(matches!(bound_1d(&c, &t), Err(Error::BasisMismatch { .. })));
    }
}
