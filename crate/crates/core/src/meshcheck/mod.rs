//! Validity certification of curved quadrilateral elements.
//!
//! An element is valid when its Jacobian determinant is positive over the
//! whole reference square. The determinant of an order-p map is a tensor
//! polynomial of order 2p-1 per direction, so it can be bounded exactly like
//! any other solution field.

mod generate;
mod io;

use std::fmt;

use rayon::prelude::*;

use crate::basis::BasisSpec;
use crate::bounder::{bound_adaptive_with, AdaptiveOptions, Focus, Strategy};
use crate::boxopt::BoundingTable;
use crate::error::{Error, Result};
use crate::poly::PolyCoeffs;

pub use generate::{dip_element, flip_element, perturbed_mesh, uniform_mesh};
pub use io::{format_mesh, load_mesh, parse_mesh, save_mesh};

/// Largest supported geometric order.
pub const MAX_ORDER: usize = 8;

/// A 2D mesh of curved quadrilaterals of geometric order `p`.
///
/// Element nodes are stored in lexicographic reference order with the
/// first reference direction running fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvedMesh {
    order: usize,
    elements: Vec<Vec<[f64; 2]>>,
}

impl CurvedMesh {
    pub fn new(order: usize, elements: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        check_order(order)?;
        let per = (order + 1) * (order + 1);
        for (e, nodes) in elements.iter().enumerate() {
            if nodes.len() != per {
                return Err(Error::Element {
                    element: e,
                    message: format!("expected {per} nodes, found {}", nodes.len()),
                });
            }
            if nodes.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Element { element: e, message: "non-finite node coordinate".into() });
            }
        }
        Ok(CurvedMesh { order, elements })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn elements(&self) -> &[Vec<[f64; 2]>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub(crate) fn elements_mut(&mut self) -> &mut [Vec<[f64; 2]>] {
        &mut self.elements
    }
}

fn check_order(p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidOrder(p));
    }
    if p > MAX_ORDER {
        return Err(Error::OrderOverflow(p));
    }
    Ok(())
}

fn check_element(element: &[[f64; 2]], p: usize) -> Result<()> {
    check_order(p)?;
    let per = (p + 1) * (p + 1);
    if element.len() != per {
        return Err(Error::CoefficientCount { expected: per, found: element.len() });
    }
    Ok(())
}

/// Value and derivative matrices of the order-p Lobatto basis at `points`.
fn basis_tables(basis: &BasisSpec, points: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = basis.len();
    let mut val = vec![0.0; points.len() * n];
    let mut der = vec![0.0; points.len() * n];
    let mut d2 = vec![0.0; n];
    for (a, &x) in points.iter().enumerate() {
        basis.eval_with_derivatives(x, &mut val[a * n..(a + 1) * n], &mut der[a * n..(a + 1) * n], &mut d2);
    }
    (val, der)
}

fn jacobian(element: &[[f64; 2]], n: usize, vx: &[f64], dx: &[f64], vy: &[f64], dy: &[f64]) -> f64 {
    let (mut xs, mut xe, mut ys, mut ye) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..n {
        for i in 0..n {
            let [x, y] = element[i + n * j];
            let ws = dx[i] * vy[j];
            let we = vx[i] * dy[j];
            xs += x * ws;
            xe += x * we;
            ys += y * ws;
            ye += y * we;
        }
    }
    xs * ye - xe * ys
}

/// Direct evaluation of det J at a reference point.
pub fn jacobian_determinant(element: &[[f64; 2]], p: usize, xi: [f64; 2]) -> Result<f64> {
    check_element(element, p)?;
    let basis = BasisSpec::lobatto(p)?;
    let (vx, dx) = basis_tables(&basis, &xi[..1]);
    let (vy, dy) = basis_tables(&basis, &xi[1..]);
    Ok(jacobian(element, p + 1, &vx, &dx, &vy, &dy))
}

/// det J as a nodal polynomial of order `2p - 1` per direction.
pub fn detj_coeffs(element: &[[f64; 2]], p: usize) -> Result<PolyCoeffs> {
    check_element(element, p)?;
    let geo = BasisSpec::lobatto(p)?;
    let target = BasisSpec::lobatto(2 * p - 1)?;
    let pts = target.nodes().expect("nodal basis").to_vec();
    let n = p + 1;
    let (val, der) = basis_tables(&geo, &pts);
    let k = pts.len();
    let mut values = Vec::with_capacity(k * k);
    for b in 0..k {
        for a in 0..k {
            values.push(jacobian(
                element,
                n,
                &val[a * n..(a + 1) * n],
                &der[a * n..(a + 1) * n],
                &val[b * n..(b + 1) * n],
                &der[b * n..(b + 1) * n],
            ));
        }
    }
    PolyCoeffs::new(2, target, values)
}

/// Tables used to bound det J of order-p elements.
pub fn detj_tables(p: usize) -> Result<Vec<BoundingTable>> {
    check_order(p)?;
    crate::tables::ladder(2 * p - 1, 3)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Valid,
    Invalid,
    /// Undecided at the resolution limit; treated as invalid.
    Indeterminate,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Valid => "valid",
            Status::Invalid => "invalid",
            Status::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElementReport {
    pub index: usize,
    pub status: Status,
    /// Certified enclosure of min det J.
    pub min_detj_interval: (f64, f64),
    pub levels_used: usize,
    /// Reference point with certified negative det J, for invalid elements.
    pub witness: Option<[f64; 2]>,
}

impl ElementReport {
    /// Invalid, either certified or by the indeterminate policy.
    pub fn counts_as_invalid(&self) -> bool {
        self.status != Status::Valid
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidityReport {
    pub elements: Vec<ElementReport>,
}

impl ValidityReport {
    pub fn all_valid(&self) -> bool {
        self.elements.iter().all(|e| e.status == Status::Valid)
    }

    pub fn count(&self, status: Status) -> usize {
        self.elements.iter().filter(|e| e.status == status).count()
    }

    /// Indices of elements that are not certified valid.
    pub fn rejected(&self) -> Vec<usize> {
        self.elements.iter().filter(|e| e.counts_as_invalid()).map(|e| e.index).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOptions {
    pub tol: f64,
    pub max_levels: usize,
    pub strategy: Strategy,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { tol: 1e-4, max_levels: 6, strategy: Strategy::Subdivide }
    }
}

/// Classifies one element by adaptive bounding of its det J.
pub fn classify_element(
    element: &[[f64; 2]],
    p: usize,
    tables: &[BoundingTable],
    options: &CheckOptions,
) -> Result<ElementReport> {
    let coeffs = detj_coeffs(element, p)?;
    let opts = AdaptiveOptions { tol: options.tol, max_levels: options.max_levels, strategy: options.strategy, focus: Focus::Min };
    let s = bound_adaptive_with(&coeffs, tables, &opts, |s| s.global_min > 0.0 || s.min_upper < 0.0)?;
    let (status, witness) = if s.global_min > 0.0 {
        (Status::Valid, None)
    } else if s.min_upper < 0.0 {
        let w = s.min_upper_at.as_ref().map(|v| [v[0], v[1]]);
        (Status::Invalid, w)
    } else {
        (Status::Indeterminate, None)
    };
    Ok(ElementReport {
        index: 0,
        status,
        min_detj_interval: (s.global_min, s.min_upper),
        levels_used: s.levels_used,
        witness,
    })
}

/// Classifies every element independently.
pub fn check_mesh(mesh: &CurvedMesh, tables: &[BoundingTable], options: &CheckOptions) -> Result<ValidityReport> {
    let elements = mesh
        .elements()
        .par_iter()
        .enumerate()
        .map(|(k, nodes)| {
            classify_element(nodes, mesh.order(), tables, options)
                .map(|r| ElementReport { index: k, ..r })
                .map_err(|e| Error::Element { element: k, message: e.to_string() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ValidityReport { elements })
}

/// Proposed and Bernstein lower bounds of a polynomial under uniform splitting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelBounds {
    pub level: u32,
    pub proposed_lower: f64,
    pub bernstein_lower: f64,
}

/// Lower bounds at levels `0..=max_level`, with `2^level` cells per direction.
pub fn refinement_history(coeffs: &PolyCoeffs, table: &BoundingTable, max_level: u32) -> Result<Vec<LevelBounds>> {
    (0..=max_level)
        .map(|level| {
            let proposed = crate::bounder::bound_uniform(coeffs, table, level)?;
            let (bern, _) = crate::bounder::bernstein_uniform(coeffs, level)?;
            Ok(LevelBounds { level, proposed_lower: proposed.global_min, bernstein_lower: bern })
        })
        .collect()
}
