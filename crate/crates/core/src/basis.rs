//! One-dimensional basis families on the reference interval [-1, 1],
//! control-node sets, and basis-change transforms.
//!
//! Every family is described internally by its expansion in Legendre
//! polynomials (`to_legendre`), which gives a uniform route to derivatives,
//! moments and basis changes. Nodal families are evaluated with the
//! barycentric Lagrange form.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::poly::PolyCoeffs;
use crate::quadrature::{gauss_legendre, gauss_lobatto, legendre_values, legendre_with_derivatives};

/// Reference-interval tolerance used by the checked evaluation routines.
const REFERENCE_SLACK: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisFamily {
    /// Lagrange interpolants on the Gauss-Lobatto nodes.
    LobattoNodal,
    /// Lagrange interpolants on the Gauss-Legendre nodes.
    LegendreNodal,
    /// Bernstein polynomials mapped affinely from [0, 1].
    Bernstein,
    /// Legendre polynomials `P_0 .. P_p`.
    LegendreModal,
}

impl BasisFamily {
    pub fn name(self) -> &'static str {
        match self {
            BasisFamily::LobattoNodal => "lobatto-nodal",
            BasisFamily::LegendreNodal => "legendre-nodal",
            BasisFamily::Bernstein => "bernstein",
            BasisFamily::LegendreModal => "legendre-modal",
        }
    }

    pub fn is_nodal(self) -> bool {
        matches!(self, BasisFamily::LobattoNodal | BasisFamily::LegendreNodal)
    }
}

impl fmt::Display for BasisFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lobatto-nodal" | "lobatto" | "gll" => Ok(BasisFamily::LobattoNodal),
            "legendre-nodal" | "legendre" | "gauss" => Ok(BasisFamily::LegendreNodal),
            "bernstein" => Ok(BasisFamily::Bernstein),
            "legendre-modal" | "modal" => Ok(BasisFamily::LegendreModal),
            _ => Err(Error::UnknownName { what: "basis family", value: s.to_string() }),
        }
    }
}

/// A basis of `N = p + 1` polynomials of order `p` on [-1, 1].
#[derive(Clone, Debug)]
pub struct BasisSpec {
    family: BasisFamily,
    order: usize,
    nodes: Vec<f64>,
    bary_weights: Vec<f64>,
    /// Column `i` holds the Legendre coefficients of basis function `i`.
    to_legendre: DMatrix<f64>,
    /// Coefficients representing the constant 1 and the identity `x`.
    unit: Vec<f64>,
    identity: Vec<f64>,
    /// `0.5 * int phi_i` and `1.5 * int x phi_i`, the P1 projection weights.
    moment0: Vec<f64>,
    moment1: Vec<f64>,
}

impl PartialEq for BasisSpec {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.order == other.order
    }
}

impl fmt::Display for BasisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} p={}", self.family, self.order)
    }
}

impl BasisSpec {
    pub fn new(family: BasisFamily, order: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidOrder(order));
        }
        let n = order + 1;
        let nodes = match family {
            BasisFamily::LobattoNodal => gauss_lobatto(n).points,
            BasisFamily::LegendreNodal => gauss_legendre(n).points,
            BasisFamily::Bernstein | BasisFamily::LegendreModal => Vec::new(),
        };
        let bary_weights = barycentric_weights(&nodes);

        let mut spec = BasisSpec {
            family,
            order,
            nodes,
            bary_weights,
            to_legendre: DMatrix::identity(n, n),
            unit: Vec::new(),
            identity: Vec::new(),
            moment0: Vec::new(),
            moment1: Vec::new(),
        };
        if family != BasisFamily::LegendreModal {
            // sample on Gauss-Lobatto points and solve V T = E
            let sample = gauss_lobatto(n).points;
            let mut vander = DMatrix::zeros(n, n);
            let mut evals = DMatrix::zeros(n, n);
            let mut row = vec![0.0; n];
            for (r, &x) in sample.iter().enumerate() {
                legendre_values(n, x, &mut row);
                for k in 0..n {
                    vander[(r, k)] = row[k];
                }
                spec.eval_all_unchecked(x, &mut row);
                for i in 0..n {
                    evals[(r, i)] = row[i];
                }
            }
            spec.to_legendre = vander.lu().solve(&evals).ok_or(Error::SingularTransform)?;
        }

        match family {
            BasisFamily::LobattoNodal | BasisFamily::LegendreNodal => {
                spec.unit = vec![1.0; n];
                spec.identity = spec.nodes.clone();
            }
            BasisFamily::Bernstein => {
                // x = -1 + 2t and t = sum_i (i/p) B_i
                spec.unit = vec![1.0; n];
                spec.identity = (0..n).map(|i| -1.0 + 2.0 * i as f64 / order as f64).collect();
            }
            BasisFamily::LegendreModal => {
                spec.unit = (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
                spec.identity = (0..n).map(|i| if i == 1 { 1.0 } else { 0.0 }).collect();
            }
        }

        let quad = gauss_legendre(n + 1);
        let mut m0 = vec![0.0; n];
        let mut m1 = vec![0.0; n];
        let mut vals = vec![0.0; n];
        for (&x, &w) in quad.points.iter().zip(&quad.weights) {
            spec.eval_all_unchecked(x, &mut vals);
            for i in 0..n {
                m0[i] += 0.5 * w * vals[i];
                m1[i] += 1.5 * w * x * vals[i];
            }
        }
        spec.moment0 = m0;
        spec.moment1 = m1;
        Ok(spec)
    }

    pub fn lobatto(order: usize) -> Result<Self> {
        Self::new(BasisFamily::LobattoNodal, order)
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of basis functions, `p + 1`.
    pub fn len(&self) -> usize {
        self.order + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Interpolation nodes of a nodal family.
    pub fn nodes(&self) -> Option<&[f64]> {
        if self.family.is_nodal() {
            Some(&self.nodes)
        } else {
            None
        }
    }

    /// `phi_i(-x) = phi_{N-1-i}(x)` for every `i`.
    pub fn is_mirror_symmetric(&self) -> bool {
        self.family != BasisFamily::LegendreModal
    }

    pub fn to_legendre(&self) -> &DMatrix<f64> {
        &self.to_legendre
    }

    /// Coefficients of the constant function 1.
    pub fn unit_coeffs(&self) -> &[f64] {
        &self.unit
    }

    /// Coefficients of the identity function `x`.
    pub fn identity_coeffs(&self) -> &[f64] {
        &self.identity
    }

    /// Weights `(0.5 int phi_i, 1.5 int x phi_i)` of the L2 projection onto P1.
    pub fn projection_weights(&self) -> (&[f64], &[f64]) {
        (&self.moment0, &self.moment1)
    }

    /// Evaluates basis function `index` (zero-based) at `x`.
    pub fn eval(&self, index: usize, x: f64) -> Result<f64> {
        let n = self.len();
        if index >= n {
            return Err(Error::IndexOutOfRange { index, count: n });
        }
        check_reference(x)?;
        let mut vals = vec![0.0; n];
        self.eval_all_unchecked(x.clamp(-1.0, 1.0), &mut vals);
        Ok(vals[index])
    }

    /// Evaluates all basis functions at `x`.
    pub fn eval_all(&self, x: f64) -> Result<Vec<f64>> {
        check_reference(x)?;
        let mut vals = vec![0.0; self.len()];
        self.eval_all_unchecked(x.clamp(-1.0, 1.0), &mut vals);
        Ok(vals)
    }

    /// Evaluates all basis functions at `x` without range checks.
    pub fn eval_all_unchecked(&self, x: f64, out: &mut [f64]) {
        let n = self.len();
        match self.family {
            BasisFamily::LobattoNodal | BasisFamily::LegendreNodal => {
                if let Some(j) = self.nodes.iter().position(|&xj| xj == x) {
                    out[..n].fill(0.0);
                    out[j] = 1.0;
                    return;
                }
                let ell: f64 = self.nodes.iter().map(|&xj| x - xj).product();
                for j in 0..n {
                    out[j] = ell * self.bary_weights[j] / (x - self.nodes[j]);
                }
            }
            BasisFamily::Bernstein => {
                let p = self.order;
                let t = 0.5 * (x + 1.0);
                let s = 1.0 - t;
                // de Casteljau-style build-up keeps every value non-negative
                out[..n].fill(0.0);
                out[0] = 1.0;
                for k in 1..=p {
                    let mut prev = 0.0;
                    for i in 0..=k {
                        let cur = if i < k { out[i] } else { 0.0 };
                        out[i] = s * cur + t * prev;
                        prev = cur;
                    }
                }
            }
            BasisFamily::LegendreModal => legendre_values(n, x, out),
        }
    }

    /// Values, first and second derivatives of all basis functions at `x`.
    pub fn eval_with_derivatives(&self, x: f64, val: &mut [f64], d1: &mut [f64], d2: &mut [f64]) {
        let n = self.len();
        let mut p = vec![0.0; n];
        let mut dp = vec![0.0; n];
        let mut ddp = vec![0.0; n];
        legendre_with_derivatives(n, x, &mut p, &mut dp, &mut ddp);
        self.eval_all_unchecked(x, val);
        for i in 0..n {
            let col = self.to_legendre.column(i);
            let mut a = 0.0;
            let mut b = 0.0;
            for k in 0..n {
                a += col[k] * dp[k];
                b += col[k] * ddp[k];
            }
            d1[i] = a;
            d2[i] = b;
        }
    }

    /// Monomial coefficients (ascending powers of `x`) of basis function `index`.
    pub fn monomial_coeffs(&self, index: usize) -> Vec<f64> {
        let n = self.len();
        let leg = legendre_monomials(n);
        let col = self.to_legendre.column(index);
        let mut out = vec![0.0; n];
        for (k, poly) in leg.iter().enumerate() {
            for (m, &c) in poly.iter().enumerate() {
                out[m] += col[k] * c;
            }
        }
        out
    }

    /// Matrix `C` with `target_coeffs = C * self_coeffs` for every polynomial.
    pub fn transform_to(&self, target: &BasisSpec) -> Result<DMatrix<f64>> {
        if self.order != target.order {
            return Err(Error::OrderMismatch {
                source_order: self.order,
                target_order: target.order,
            });
        }
        let lu = target.to_legendre.clone().lu();
        let c = lu.solve(&self.to_legendre).ok_or(Error::SingularTransform)?;
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularTransform);
        }
        Ok(c)
    }
}

fn check_reference(x: f64) -> Result<()> {
    if !x.is_finite() || x < -1.0 - REFERENCE_SLACK || x > 1.0 + REFERENCE_SLACK {
        return Err(Error::OutsideReference(x));
    }
    Ok(())
}

fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            let prod: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &xk)| xj - xk)
                .product();
            1.0 / prod
        })
        .collect()
}

/// Monomial coefficients of `P_0 .. P_{n-1}`.
pub(crate) fn legendre_monomials(n: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut c = vec![0.0; n];
        match k {
            0 => c[0] = 1.0,
            1 => c[1] = 1.0,
            _ => {
                let kf = (k - 1) as f64;
                for m in 0..n {
                    let shifted = if m > 0 { out[k - 1][m - 1] } else { 0.0 };
                    c[m] = ((2.0 * kf + 1.0) * shifted - kf * out[k - 2][m]) / (kf + 1.0);
                }
            }
        }
        out.push(c);
    }
    out
}

/// Re-expresses a polynomial in another basis of the same order.
///
/// Tensor-product data is transformed one dimension at a time.
pub fn change_basis(coeffs: &PolyCoeffs, target: &BasisSpec) -> Result<PolyCoeffs> {
    let c = coeffs.basis().transform_to(target)?;
    let mats = vec![c; coeffs.dim()];
    let values = coeffs.transform_axes(&mats);
    PolyCoeffs::new(coeffs.dim(), target.clone(), values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    /// `M - 2` Gauss-Legendre nodes plus both endpoints.
    GaussLegendreEndpoints,
    GaussLobatto,
    /// Chebyshev extrema `-cos(pi j / (M - 1))`.
    Chebyshev,
    Equispaced,
    Optimized,
    Explicit,
}

impl NodeKind {
    pub fn name(self) -> &'static str {
        match self {
            NodeKind::GaussLegendreEndpoints => "gauss-legendre",
            NodeKind::GaussLobatto => "gauss-lobatto",
            NodeKind::Chebyshev => "chebyshev",
            NodeKind::Equispaced => "equispaced",
            NodeKind::Optimized => "optimized",
            NodeKind::Explicit => "explicit",
        }
    }

    /// Kinds that [`make_node_set`] can build directly.
    pub const STANDARD: [NodeKind; 4] = [
        NodeKind::Equispaced,
        NodeKind::GaussLobatto,
        NodeKind::Chebyshev,
        NodeKind::GaussLegendreEndpoints,
    ];
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gauss-legendre" | "gauss-legendre+endpoints" | "legendre" => {
                Ok(NodeKind::GaussLegendreEndpoints)
            }
            "gauss-lobatto" | "lobatto" | "gll" => Ok(NodeKind::GaussLobatto),
            "chebyshev" | "cheb" => Ok(NodeKind::Chebyshev),
            "equispaced" | "uniform" => Ok(NodeKind::Equispaced),
            "optimized" | "optimal" => Ok(NodeKind::Optimized),
            "explicit" => Ok(NodeKind::Explicit),
            _ => Err(Error::UnknownName { what: "node kind", value: s.to_string() }),
        }
    }
}

/// Control nodes: strictly increasing, symmetric, with endpoints at -1 and 1.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSet {
    kind: NodeKind,
    positions: Vec<f64>,
}

impl NodeSet {
    /// Validates an arbitrary set of positions.
    pub fn new(kind: NodeKind, positions: Vec<f64>) -> Result<Self> {
        let m = positions.len();
        if m < 2 {
            return Err(Error::TooFewNodes(m));
        }
        if positions[0] != -1.0 || positions[m - 1] != 1.0 {
            return Err(Error::InvalidNodeSet("endpoints must be exactly -1 and 1".into()));
        }
        if let Some(k) = positions.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidNodeSet(format!(
                "positions must be strictly increasing (index {k})"
            )));
        }
        for j in 0..m / 2 {
            if (positions[j] + positions[m - 1 - j]).abs() > 1e-12 {
                return Err(Error::InvalidNodeSet(format!(
                    "positions must be symmetric about 0 (index {j})"
                )));
            }
        }
        Ok(NodeSet { kind, positions })
    }

    pub fn explicit(positions: Vec<f64>) -> Result<Self> {
        Self::new(NodeKind::Explicit, positions)
    }

    /// Builds nodes from left-half positions, mirroring the right half exactly.
    fn from_left_half(kind: NodeKind, m: usize, left: impl Fn(usize) -> f64) -> Result<Self> {
        let mut positions = vec![0.0; m];
        positions[0] = -1.0;
        positions[m - 1] = 1.0;
        for j in 1..m / 2 {
            let x = left(j);
            positions[j] = x;
            positions[m - 1 - j] = -x;
        }
        if m % 2 == 1 {
            positions[m / 2] = 0.0;
        }
        Self::new(kind, positions)
    }

    /// Nodes from unbounded auxiliary variables `z`, one per subinterval:
    /// `eta_i = -1 + 2 sum_{j<=i} exp(z_j) / sum_j exp(z_j)`.
    pub fn from_auxiliary(z: &[f64]) -> Result<Self> {
        let m = z.len() + 1;
        if m < 2 {
            return Err(Error::TooFewNodes(m));
        }
        let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = z.iter().map(|&v| (v - zmax).exp()).collect();
        let total: f64 = w.iter().sum();
        let mut acc = 0.0;
        let mut positions = Vec::with_capacity(m);
        positions.push(-1.0);
        for &wi in &w[..m - 2] {
            acc += wi;
            positions.push(-1.0 + 2.0 * acc / total);
        }
        positions.push(1.0);
        let raw = NodeSet::new(NodeKind::Optimized, positions)?;
        // remove round-off asymmetry
        let p = raw.positions();
        NodeSet::from_left_half(NodeKind::Optimized, m, |j| 0.5 * (p[j] - p[m - 1 - j]))
    }

    /// Auxiliary variables reproducing these nodes (`z_0 = 0`).
    pub fn to_auxiliary(&self) -> Vec<f64> {
        let w0 = self.positions[1] - self.positions[0];
        self.positions.windows(2).map(|w| ((w[1] - w[0]) / w0).ln()).collect()
    }

    pub fn with_kind(mut self, kind: NodeKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Index `j` of the subinterval `[eta_j, eta_{j+1}]` containing `x`.
    pub fn locate(&self, x: f64) -> usize {
        let m = self.positions.len();
        match self.positions.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(j) => j.min(m - 2),
            Err(j) => j.saturating_sub(1).min(m - 2),
        }
    }

    /// Evaluates the piecewise-linear interpolant of `values` at `x`.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let j = self.locate(x);
        let (a, b) = (self.positions[j], self.positions[j + 1]);
        let t = (x - a) / (b - a);
        values[j] + t * (values[j + 1] - values[j])
    }
}

/// Builds one of the standard control-node families with `m` nodes.
pub fn make_node_set(kind: NodeKind, m: usize) -> Result<NodeSet> {
    if m < 2 {
        return Err(Error::TooFewNodes(m));
    }
    match kind {
        NodeKind::Equispaced => {
            let h = 2.0 / (m - 1) as f64;
            NodeSet::from_left_half(kind, m, |j| -1.0 + h * j as f64)
        }
        NodeKind::GaussLobatto => {
            let q = gauss_lobatto(m);
            NodeSet::from_left_half(kind, m, |j| q.points[j])
        }
        NodeKind::Chebyshev => NodeSet::from_left_half(kind, m, |j| {
            -(std::f64::consts::PI * j as f64 / (m - 1) as f64).cos()
        }),
        NodeKind::GaussLegendreEndpoints => {
            if m == 2 {
                return NodeSet::new(kind, vec![-1.0, 1.0]);
            }
            let q = gauss_legendre(m - 2);
            NodeSet::from_left_half(kind, m, |j| q.points[j - 1])
        }
        NodeKind::Optimized | NodeKind::Explicit => {
            Err(Error::UnsupportedNodeKind(kind.name().to_string()))
        }
    }
}
