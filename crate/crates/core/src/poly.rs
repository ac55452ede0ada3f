//! Tensor-product polynomials on the reference element `[-1, 1]^d`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::basis::{BasisFamily, BasisSpec};
use crate::error::{Error, Result};
use crate::quadrature::gauss_lobatto;

/// Coefficients of a `d`-dimensional polynomial in a tensor-product basis.
///
/// Multi-indices are stored lexicographically with the x index fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCoeffs {
    dim: usize,
    basis: BasisSpec,
    values: Vec<f64>,
}

impl PolyCoeffs {
    pub fn new(dim: usize, basis: BasisSpec, values: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let expected = basis.len().pow(dim as u32);
        if values.len() != expected {
            return Err(Error::CoefficientCount { expected, found: values.len() });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(PolyCoeffs { dim, basis, values })
    }

    pub fn new_1d(basis: BasisSpec, values: Vec<f64>) -> Result<Self> {
        Self::new(1, basis, values)
    }

    /// Interpolates `f` at the Gauss-Lobatto points and converts to `basis`.
    pub fn interpolate<F: Fn(&[f64]) -> f64>(dim: usize, basis: &BasisSpec, f: F) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let n = basis.len();
        let pts = gauss_lobatto(n).points;
        let total = n.pow(dim as u32);
        let mut values = Vec::with_capacity(total);
        let mut x = vec![0.0; dim];
        for flat in 0..total {
            let mut r = flat;
            for xk in x.iter_mut() {
                *xk = pts[r % n];
                r /= n;
            }
            values.push(f(&x));
        }
        let nodal = PolyCoeffs::new(dim, BasisSpec::lobatto(basis.order())?, values)?;
        if basis.family() == BasisFamily::LobattoNodal {
            Ok(nodal)
        } else {
            crate::basis::change_basis(&nodal, basis)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Number of basis functions per dimension.
    pub fn n(&self) -> usize {
        self.basis.len()
    }

    /// Evaluates the polynomial at a reference point.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::UnsupportedDimension(x.len()));
        }
        let tables = x
            .iter()
            .map(|&xk| self.basis.eval_all(xk))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.contract(&tables))
    }

    /// Value, gradient and Hessian at `x` (no range checks).
    pub fn eval_derivatives(&self, x: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let n = self.n();
        let d = self.dim;
        let mut per_axis = Vec::with_capacity(d);
        for &xk in x {
            let (mut v, mut d1, mut d2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
            self.basis.eval_with_derivatives(xk, &mut v, &mut d1, &mut d2);
            per_axis.push([v, d1, d2]);
        }
        let mut grad = vec![0.0; d];
        let mut hess = vec![0.0; d * d];
        let select = |orders: &[usize]| -> Vec<Vec<f64>> {
            (0..d).map(|k| per_axis[k][orders[k]].clone()).collect()
        };
        let value = self.contract(&select(&vec![0; d]));
        for a in 0..d {
            let mut o = vec![0; d];
            o[a] = 1;
            grad[a] = self.contract(&select(&o));
            for b in a..d {
                let mut o = vec![0; d];
                o[a] += 1;
                o[b] += 1;
                let h = self.contract(&select(&o));
                hess[a * d + b] = h;
                hess[b * d + a] = h;
            }
        }
        (value, grad, hess)
    }

    /// `sum_I u_I prod_k t_k[i_k]` for per-axis value tables `t_k`.
    fn contract(&self, tables: &[Vec<f64>]) -> f64 {
        let n = self.n();
        match self.dim {
            1 => self.values.iter().zip(&tables[0]).map(|(u, t)| u * t).sum(),
            2 => {
                let mut s = 0.0;
                for j in 0..n {
                    let row: f64 = (0..n).map(|i| self.values[j * n + i] * tables[0][i]).sum();
                    s += row * tables[1][j];
                }
                s
            }
            _ => {
                let mut s = 0.0;
                for k in 0..n {
                    for j in 0..n {
                        let base = (k * n + j) * n;
                        let row: f64 = (0..n).map(|i| self.values[base + i] * tables[0][i]).sum();
                        s += row * tables[1][j] * tables[2][k];
                    }
                }
                s
            }
        }
    }

    /// Applies `mats[k]` along axis `k`; matrices may be rectangular.
    pub fn transform_axes(&self, mats: &[DMatrix<f64>]) -> Vec<f64> {
        let mut shape = vec![self.n(); self.dim];
        let mut data = self.values.clone();
        for (axis, m) in mats.iter().enumerate() {
            data = apply_along_axis(&data, &shape, axis, m);
            shape[axis] = m.nrows();
        }
        data
    }

    /// Serializes in the `polybound-coeffs v1` text format.
    pub fn to_text(&self) -> String {
        let mut s = String::from("polybound-coeffs v1\n");
        let _ = writeln!(s, "dim={} family={} p={}", self.dim, self.basis.family(), self.basis.order());
        let nums: Vec<String> = self.values.iter().map(|v| format!("{v:?}")).collect();
        s.push_str(&nums.join(" "));
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("unexpected end of file, expected {what}"),
            })
        };
        let (ln, magic) = next("header")?;
        if magic != "polybound-coeffs v1" {
            return Err(Error::Parse { line: ln, message: format!("bad magic `{magic}`") });
        }
        let (ln, meta) = next("metadata line")?;
        let kv = parse_key_values(meta, ln)?;
        let dim: usize = kv.get_parsed("dim", ln)?;
        let family: BasisFamily = kv
            .get("family", ln)?
            .parse()
            .map_err(|e: Error| Error::Parse { line: ln, message: e.to_string() })?;
        let p: usize = kv.get_parsed("p", ln)?;
        let basis = BasisSpec::new(family, p).map_err(|e| Error::Parse { line: ln, message: e.to_string() })?;
        let (ln, data) = next("coefficient line")?;
        let values = parse_floats(data, ln)?;
        PolyCoeffs::new(dim, basis, values).map_err(|e| Error::Parse { line: ln, message: e.to_string() })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Multiplies `data` (row-major in reverse axis order, axis 0 fastest) by `m` along `axis`.
pub(crate) fn apply_along_axis(data: &[f64], shape: &[usize], axis: usize, m: &DMatrix<f64>) -> Vec<f64> {
    let inner: usize = shape[..axis].iter().product();
    let len = shape[axis];
    let outer: usize = shape[axis + 1..].iter().product();
    let rows = m.nrows();
    debug_assert_eq!(m.ncols(), len);
    let mut out = vec![0.0; inner * rows * outer];
    for o in 0..outer {
        for r in 0..rows {
            let dst = (o * rows + r) * inner;
            for k in 0..len {
                let c = m[(r, k)];
                if c == 0.0 {
                    continue;
                }
                let src = (o * len + k) * inner;
                for i in 0..inner {
                    out[dst + i] += c * data[src + i];
                }
            }
        }
    }
    out
}

pub(crate) struct KeyValues<'a>(Vec<(&'a str, &'a str)>);

impl<'a> KeyValues<'a> {
    pub(crate) fn get(&self, key: &str, line: usize) -> Result<&'a str> {
        self.0
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Parse { line, message: format!("missing `{key}=`") })
    }

    pub(crate) fn get_parsed<T: std::str::FromStr>(&self, key: &str, line: usize) -> Result<T> {
        let v = self.get(key, line)?;
        v.parse()
            .map_err(|_| Error::Parse { line, message: format!("bad value `{v}` for `{key}`") })
    }
}

pub(crate) fn parse_key_values(s: &str, line: usize) -> Result<KeyValues<'_>> {
    s.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .ok_or_else(|| Error::Parse { line, message: format!("expected key=value, got `{tok}`") })
        })
        .collect::<Result<Vec<_>>>()
        .map(KeyValues)
}

pub(crate) fn parse_floats(s: &str, line: usize) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::Parse { line, message: format!("bad number `{tok}`") })
        })
        .collect()
}
