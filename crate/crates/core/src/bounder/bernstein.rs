//! Convex-hull bounds from Bernstein coefficients.

use crate::basis::{change_basis, BasisFamily, BasisSpec};
use crate::error::Result;
use crate::poly::PolyCoeffs;

/// The polynomial re-expressed in the Bernstein basis of the same order.
pub fn bernstein_coeffs(coeffs: &PolyCoeffs) -> Result<PolyCoeffs> {
    if coeffs.basis().family() == BasisFamily::Bernstein {
        return Ok(coeffs.clone());
    }
    let target = BasisSpec::new(BasisFamily::Bernstein, coeffs.basis().order())?;
    change_basis(coeffs, &target)
}

/// Smallest and largest Bernstein coefficient, which enclose the polynomial.
///
/// The basis change loses accuracy for orders around 10 and above.
pub fn bernstein_bounds(coeffs: &PolyCoeffs) -> Result<(f64, f64)> {
    let b = bernstein_coeffs(coeffs)?;
    let lo = b.values().iter().copied().fold(f64::INFINITY, f64::min);
    let hi = b.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}
