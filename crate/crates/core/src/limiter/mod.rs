//! Squeeze limiting toward the element mean with continuous bounds.

mod dg;
mod step;

pub use dg::{
    cfl_limit, dg_step, rotation_initial_condition, rotation_velocity, run, sample_extrema, DGState, RunOptions,
    RunReport, Snapshot, Velocity, CFL_NUMBER,
};
pub use step::{present_table, step_coeffs, step_interpolation_table, step_row, StepRow, StepTable};

use crate::bounder::bound;
use crate::boxopt::BoundingTable;
use crate::error::{Error, Result};
use crate::poly::PolyCoeffs;

/// Slack allowed on the element mean before it counts as out of bounds.
pub const MEAN_TOL: f64 = 1e-12;
const DIVISION_GUARD: f64 = 1e-14;

/// Tensor weights `prod_k (1/2) int phi_{i_k}`, summing to one.
pub(crate) fn mean_weights(coeffs: &PolyCoeffs) -> Vec<f64> {
    let w = coeffs.basis().projection_weights().0;
    let n = w.len();
    let d = coeffs.dim();
    (0..n.pow(d as u32))
        .map(|mut k| {
            let mut p = 1.0;
            for _ in 0..d {
                p *= w[k % n];
                k /= n;
            }
            p
        })
        .collect()
}

/// Mean of the polynomial over the reference element.
pub fn element_mean(coeffs: &PolyCoeffs) -> f64 {
    mean_weights(coeffs).iter().zip(coeffs.values()).map(|(w, u)| w * u).sum()
}

/// Blending coefficient that squeezes `[u_min, u_max]` into `[a, b]` around `mean`.
pub fn squeeze_alpha(mean: f64, u_min: f64, u_max: f64, a: f64, b: f64) -> Result<f64> {
    if !(mean >= a - MEAN_TOL && mean <= b + MEAN_TOL) {
        return Err(Error::MeanOutOfBounds { mean, lower: a, upper: b });
    }
    let ratio = |target: f64, extreme: f64| {
        let den = extreme - mean;
        if den.abs() <= DIVISION_GUARD {
            1.0
        } else {
            (target - mean) / den
        }
    };
    let mut alpha = 1.0f64;
    if u_min < a {
        alpha = alpha.min(ratio(a, u_min));
    }
    if u_max > b {
        alpha = alpha.min(ratio(b, u_max));
    }
    Ok(alpha.clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimiterDecision {
    pub mean: f64,
    pub alpha: f64,
    pub interval: (f64, f64),
    /// Certified bounds of the unlimited polynomial.
    pub bounds: (f64, f64),
}

/// Bounds target and the table used to certify it.
#[derive(Clone, Debug)]
pub struct Limiter {
    pub table: BoundingTable,
    pub lower: f64,
    pub upper: f64,
}

impl Limiter {
    pub fn new(table: BoundingTable, lower: f64, upper: f64) -> Result<Self> {
        if !(lower < upper) {
            return Err(Error::InvalidParameter(format!("empty interval [{lower}, {upper}]")));
        }
        Ok(Limiter { table, lower, upper })
    }

    /// Limits one element in place.
    pub fn limit(&self, coeffs: &mut PolyCoeffs) -> Result<LimiterDecision> {
        let nb = bound(coeffs, &self.table)?;
        let (u_min, u_max) = (nb.min_lower(), nb.max_upper());
        let mean = element_mean(coeffs);
        let alpha = squeeze_alpha(mean, u_min, u_max, self.lower, self.upper)?;
        if alpha < 1.0 {
            blend(coeffs, alpha, mean);
        }
        Ok(LimiterDecision { mean, alpha, interval: (self.lower, self.upper), bounds: (u_min, u_max) })
    }
}

/// `alpha u + (1 - alpha) mean`, in the polynomial's own basis.
pub fn blend(coeffs: &mut PolyCoeffs, alpha: f64, mean: f64) {
    let unit = coeffs.basis().unit_coeffs().to_vec();
    let n = unit.len();
    let d = coeffs.dim();
    let values = coeffs.values_mut();
    for (k, v) in values.iter_mut().enumerate() {
        let mut one = 1.0;
        let mut r = k;
        for _ in 0..d {
            one *= unit[r % n];
            r /= n;
        }
        *v = alpha * *v + (1.0 - alpha) * mean * one;
    }
}

/// Limits a single polynomial, returning the result and the decision.
pub fn apply_limiter_to(coeffs: &PolyCoeffs, limiter: &Limiter) -> Result<(PolyCoeffs, LimiterDecision)> {
    let mut out = coeffs.clone();
    let d = limiter.limit(&mut out)?;
    Ok((out, d))
}

/// Limits every element of a DG state.
pub fn apply_limiter(state: &DGState, limiter: &Limiter) -> Result<(DGState, Vec<LimiterDecision>)> {
    let mut out = state.clone();
    let decisions = out.limit_in_place(limiter)?;
    Ok((out, decisions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSpec;

    #[test]
    fn mean_of_simple_functions() {
        let b = BasisSpec::lobatto(3).unwrap();
        let c = PolyCoeffs::interpolate(1, &b, |_| 2.5).unwrap();
        assert!((element_mean(&c) - 2.5).abs() < 1e-14);
        let x = PolyCoeffs::interpolate(1, &b, |x| x[0]).unwrap();
        assert!(element_mean(&x).abs() < 1e-15);
        let q = PolyCoeffs::interpolate(2, &b, |x| x[0] * x[0] * x[1] * x[1]).unwrap();
        assert!((element_mean(&q) - 1.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn alpha_formula() {
        assert_eq!(squeeze_alpha(0.5, 0.1, 0.9, 0.0, 1.0).unwrap(), 1.0);
        assert!((squeeze_alpha(0.5, 0.2, 1.5, 0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((squeeze_alpha(0.5, 0.0, 1.5, 0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(squeeze_alpha(1.5, 0.0, 2.0, 0.0, 1.0), Err(Error::MeanOutOfBounds { .. })));
    }

    #[test]
    fn degenerate_spread_keeps_alpha_one() {
        assert_eq!(squeeze_alpha(1.0, 1.0, 1.0 + 1e-15, 0.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn blend_works_for_modal_basis() {
        let b = BasisSpec::new(crate::basis::BasisFamily::LegendreModal, 3).unwrap();
        let mut c = PolyCoeffs::new_1d(b, vec![0.3, 1.0, -0.5, 0.2]).unwrap();
        let mean = element_mean(&c);
        blend(&mut c, 0.0, mean);
        for &x in &[-1.0, 0.2, 1.0] {
            assert!((c.eval(&[x]).unwrap() - mean).abs() < 1e-14);
        }
    }
}
