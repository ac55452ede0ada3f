//! Bounds of Gauss-Lobatto interpolants of a step function.

use std::fmt;

use crate::basis::{BasisFamily, BasisSpec, NodeKind};
use crate::bounder::{bernstein_bounds, bound_1d, brute_force_extrema};
use crate::boxopt::BoundingTable;
use crate::error::Result;
use crate::poly::PolyCoeffs;
use crate::tables;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRow {
    pub order: usize,
    pub exact: (f64, f64),
    pub bernstein: (f64, f64),
    pub present: (f64, f64),
}

impl StepRow {
    /// Relative change of the upper overestimate, present versus Bernstein, in percent.
    pub fn error_reduction(&self) -> f64 {
        100.0 * ((self.present.1 - self.exact.1) / (self.bernstein.1 - self.exact.1) - 1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepTable {
    pub rows: Vec<StepRow>,
}

/// Interpolant of `sign(x) / 2` at the order-`p` Gauss-Lobatto points.
pub fn step_coeffs(p: usize) -> Result<PolyCoeffs> {
    let basis = BasisSpec::lobatto(p)?;
    let values = basis
        .nodes()
        .expect("nodal basis")
        .iter()
        .map(|&x| if x < 0.0 { -0.5 } else if x > 0.0 { 0.5 } else { 0.0 })
        .collect();
    PolyCoeffs::new_1d(basis, values)
}

/// Table with `M = N`: the published one where shipped, else the bundled optimized one.
pub fn present_table(p: usize) -> Result<BoundingTable> {
    match tables::reference_table(p, p + 1) {
        Some(t) => t,
        None => tables::get_table(BasisFamily::LobattoNodal, p, NodeKind::Optimized, p + 1),
    }
}

pub fn step_row(p: usize, table: &BoundingTable) -> Result<StepRow> {
    let c = step_coeffs(p)?;
    let exact = brute_force_extrema(&c, 10_000)?;
    let bernstein = bernstein_bounds(&c)?;
    let nb = bound_1d(&c, table)?;
    Ok(StepRow { order: p, exact, bernstein, present: (nb.min_lower(), nb.max_upper()) })
}

pub fn step_interpolation_table(orders: &[usize]) -> Result<StepTable> {
    let rows = orders.iter().map(|&p| step_row(p, &present_table(p)?)).collect::<Result<_>>()?;
    Ok(StepTable { rows })
}

impl fmt::Display for StepTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<24}", "")?;
        for r in &self.rows {
            write!(f, " {:>10}", format!("P{}", r.order))?;
        }
        writeln!(f)?;
        let line = |f: &mut fmt::Formatter<'_>, name: &str, get: &dyn Fn(&StepRow) -> (f64, f64)| {
            write!(f, "{name:<24}")?;
            for r in &self.rows {
                let (lo, hi) = get(r);
                let v = if (lo + hi).abs() < 1e-9 { format!("±{hi:.4}") } else { format!("{lo:.4}/{hi:.4}") };
                write!(f, " {v:>10}")?;
            }
            writeln!(f)
        };
        line(f, "Exact", &|r| r.exact)?;
        line(f, "Bernstein", &|r| r.bernstein)?;
        line(f, "Present (M = N)", &|r| r.present)?;
        write!(f, "{:<24}", "Error reduction")?;
        for r in &self.rows {
            write!(f, " {:>10}", format!("{:.1}%", r.error_reduction()))?;
        }
        writeln!(f)
    }
}
