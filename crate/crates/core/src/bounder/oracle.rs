//! Sampling oracle for the true range of a polynomial.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::poly::{apply_along_axis, PolyCoeffs};

const POLISH_ITERS: usize = 20;
const POLISH_STARTS: usize = 8;

/// Extrema over a uniform grid with `samples_per_dim` points per axis,
/// refined by Newton iteration on the gradient from the best grid points.
///
/// The result is an inner approximation: `min >= true min`, `max <= true max`.
pub fn brute_force_extrema(coeffs: &PolyCoeffs, samples_per_dim: usize) -> Result<(f64, f64)> {
    brute_force_extrema_with(coeffs, samples_per_dim, true)
}

pub fn brute_force_extrema_with(coeffs: &PolyCoeffs, samples_per_dim: usize, polish: bool) -> Result<(f64, f64)> {
    if samples_per_dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "samples_per_dim must be at least 2, got {samples_per_dim}"
        )));
    }
    let d = coeffs.dim();
    let n = coeffs.n();
    let s = samples_per_dim;
    let grid: Vec<f64> = (0..s).map(|k| (-1.0 + 2.0 * k as f64 / (s - 1) as f64).clamp(-1.0, 1.0)).collect();
    let mut v = DMatrix::zeros(s, n);
    let mut row = vec![0.0; n];
    for (k, &x) in grid.iter().enumerate() {
        coeffs.basis().eval_all_unchecked(x, &mut row);
        for i in 0..n {
            v[(k, i)] = row[i];
        }
    }
    let mut shape = vec![n; d];
    let mut data = coeffs.values().to_vec();
    for axis in 0..d {
        data = apply_along_axis(&data, &shape, axis, &v);
        shape[axis] = s;
    }

    let point = |flat: usize| -> Vec<f64> {
        let mut r = flat;
        (0..d)
            .map(|_| {
                let x = grid[r % s];
                r /= s;
                x
            })
            .collect()
    };
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| data[a].total_cmp(&data[b]));
    let mut lo = data[order[0]];
    let mut hi = data[order[order.len() - 1]];
    if polish {
        for &k in order.iter().take(POLISH_STARTS) {
            if let Some(v) = newton_polish(coeffs, point(k), 1.0) {
                lo = lo.min(v);
            }
        }
        for &k in order.iter().rev().take(POLISH_STARTS) {
            if let Some(v) = newton_polish(coeffs, point(k), -1.0) {
                hi = hi.max(v);
            }
        }
    }
    Ok((lo, hi))
}

/// Newton on the gradient of `sign * u` inside the box; returns the value
/// reached, or `None` on divergence.
fn newton_polish(coeffs: &PolyCoeffs, mut x: Vec<f64>, sign: f64) -> Option<f64> {
    let d = x.len();
    let (v0, _, _) = coeffs.eval_derivatives(&x);
    let mut best = sign * v0;
    for _ in 0..POLISH_ITERS {
        let (_, g, h) = coeffs.eval_derivatives(&x);
        // coordinates pinned at the boundary with the descent pointing outward
        let free: Vec<usize> = (0..d)
            .filter(|&a| {
                let ga = sign * g[a];
                !((x[a] <= -1.0 && ga > 0.0) || (x[a] >= 1.0 && ga < 0.0))
            })
            .collect();
        if free.is_empty() {
            break;
        }
        let k = free.len();
        let hm = DMatrix::from_fn(k, k, |r, c| sign * h[free[r] * d + free[c]]);
        let gv = DVector::from_fn(k, |r, _| sign * g[free[r]]);
        let step = hm.lu().solve(&gv)?;
        let mut next = x.clone();
        for (r, &a) in free.iter().enumerate() {
            next[a] = (x[a] - step[r]).clamp(-1.0, 1.0);
        }
        if !next.iter().all(|v| v.is_finite()) {
            return None;
        }
        let (v, _, _) = coeffs.eval_derivatives(&next);
        let moved = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        best = best.min(sign * v);
        if moved < 1e-15 {
            break;
        }
    }
    Some(sign * best)
}
