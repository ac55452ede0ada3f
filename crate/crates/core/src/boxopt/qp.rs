//! Dual active-set solver for the box problem
//! `min 1/2 x'Gx - b'x  s.t.  (1 - t_k) x[j_k] + t_k x[j_k + 1] >= d_k`.
//!
//! Each constraint pins a piecewise-linear function at one sample point, so
//! its normal has at most two non-zeros.

use nalgebra::{DMatrix, DVector};

const FEAS_TOL: f64 = 1e-13;
const DEPENDENCE_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug)]
pub(crate) struct PlConstraints<'a> {
    pub index: &'a [usize],
    pub t: &'a [f64],
    pub rhs: &'a [f64],
}

impl PlConstraints<'_> {
    #[inline]
    fn dot(&self, k: usize, x: &[f64]) -> f64 {
        let j = self.index[k];
        let t = self.t[k];
        if t == 0.0 {
            x[j]
        } else {
            (1.0 - t) * x[j] + t * x[j + 1]
        }
    }

    /// `Ginv * n_k`.
    fn apply(&self, k: usize, ginv: &DMatrix<f64>) -> DVector<f64> {
        let j = self.index[k];
        let t = self.t[k];
        let mut out = ginv.column(j) * (1.0 - t);
        if t != 0.0 {
            out += ginv.column(j + 1) * t;
        }
        out
    }

    fn normal_dot(&self, k: usize, v: &DVector<f64>) -> f64 {
        self.dot(k, v.as_slice())
    }
}

#[derive(Clone, Debug)]
pub(crate) struct QpOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Smallest constraint slack at `x`.
    pub min_slack: f64,
}

/// Solves the problem starting from the unconstrained minimizer `Ginv b`.
pub(crate) fn solve(ginv: &DMatrix<f64>, b: &[f64], cons: &PlConstraints<'_>, max_iter: usize) -> QpOutcome {
    let m = b.len();
    let bvec = DVector::from_column_slice(b);
    let mut x: DVector<f64> = ginv * &bvec;
    let mut active: Vec<usize> = Vec::new();
    let mut u: Vec<f64> = Vec::new();
    let mut iterations = 0;

    let most_violated = |x: &DVector<f64>| -> (usize, f64) {
        let xs = x.as_slice();
        let mut best = (usize::MAX, f64::INFINITY);
        for k in 0..cons.rhs.len() {
            let s = cons.dot(k, xs) - cons.rhs[k];
            if s < best.1 {
                best = (k, s);
            }
        }
        best
    };

    loop {
        let (p, s) = most_violated(&x);
        if s >= -FEAS_TOL || p == usize::MAX {
            return QpOutcome { x: x.as_slice().to_vec(), iterations, converged: true, min_slack: s };
        }
        let mut u_p = 0.0;
        // inner loop: move towards satisfying constraint p
        loop {
            iterations += 1;
            if iterations > max_iter {
                let (_, s) = most_violated(&x);
                return QpOutcome { x: x.as_slice().to_vec(), iterations, converged: false, min_slack: s };
            }
            let gp = cons.apply(p, ginv);
            let (z, r) = if active.is_empty() {
                (gp, Vec::new())
            } else {
                let na = active.len();
                let mut ginv_n = DMatrix::zeros(m, na);
                for (c, &k) in active.iter().enumerate() {
                    ginv_n.set_column(c, &cons.apply(k, ginv));
                }
                let mut w = DMatrix::zeros(na, na);
                let mut rhs = DVector::zeros(na);
                let cols = ginv_n.as_slice();
                for (a, &ka) in active.iter().enumerate() {
                    for c in 0..na {
                        w[(a, c)] = cons.dot(ka, &cols[c * m..(c + 1) * m]);
                    }
                    rhs[a] = cons.normal_dot(ka, &gp);
                }
                let r = match w.clone().cholesky() {
                    Some(ch) => ch.solve(&rhs),
                    None => match w.lu().solve(&rhs) {
                        Some(r) => r,
                        None => DVector::zeros(na),
                    },
                };
                let z = &gp - &ginv_n * &r;
                (z, r.as_slice().to_vec())
            };

            // largest feasible step in the dual before a multiplier hits zero
            let mut t1 = f64::INFINITY;
            let mut drop = None;
            for (c, &rc) in r.iter().enumerate() {
                if rc > 0.0 {
                    let ratio = u[c] / rc;
                    if ratio < t1 {
                        t1 = ratio;
                        drop = Some(c);
                    }
                }
            }
            let znp = cons.normal_dot(p, &z);
            let slack = cons.dot(p, x.as_slice()) - cons.rhs[p];
            let t2 = if znp.abs() <= DEPENDENCE_TOL { f64::INFINITY } else { -slack / znp };

            if !t1.is_finite() && !t2.is_finite() {
                // infeasible; cannot happen for box problems
                return QpOutcome { x: x.as_slice().to_vec(), iterations, converged: false, min_slack: slack };
            }
            if t2.is_finite() && t2 <= t1 {
                x += &z * t2;
                for (c, rc) in r.iter().enumerate() {
                    u[c] -= t2 * rc;
                }
                u_p += t2;
                active.push(p);
                u.push(u_p);
                break;
            }
            // partial step, then drop the blocking constraint
            if t2.is_finite() {
                x += &z * t1;
            }
            for (c, rc) in r.iter().enumerate() {
                u[c] -= t1 * rc;
            }
            u_p += t1;
            let l = drop.expect("finite t1 has a blocking index");
            active.remove(l);
            u.remove(l);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bound_active() {
        // min 1/2 |x|^2 - (x0 + x1), x0 >= 2  ->  x = (2, 1)
        let ginv = DMatrix::identity(2, 2);
        let cons = PlConstraints { index: &[0], t: &[0.0], rhs: &[2.0] };
        let out = solve(&ginv, &[1.0, 1.0], &cons, 100);
        assert!(out.converged);
        assert!((out.x[0] - 2.0).abs() < 1e-14);
        assert!((out.x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mixed_constraint_matches_kkt() {
        // min 1/2 |x|^2, 0.5 x0 + 0.5 x1 >= 1  ->  x = (1, 1)
        let ginv = DMatrix::identity(2, 2);
        let cons = PlConstraints { index: &[0, 0], t: &[0.5, 0.25], rhs: &[1.0, -5.0] };
        let out = solve(&ginv, &[0.0, 0.0], &cons, 100);
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-14 && (out.x[1] - 1.0).abs() < 1e-14);
    }
}
