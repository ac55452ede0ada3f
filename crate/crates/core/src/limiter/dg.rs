//! Nodal DG for linear transport on the periodic unit square.
//!
//! Collocated Gauss-Lobatto nodes, upwind fluxes and SSP-RK3. Each element
//! stores `(p+1)^2` nodal values with the x index running fastest.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{element_mean, Limiter, LimiterDecision};
use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::poly::PolyCoeffs;
use crate::quadrature::{gauss_legendre, gauss_lobatto};

/// Time steps satisfy `dt <= CFL_NUMBER / (2p + 1) * h / max|c|`.
pub const CFL_NUMBER: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Velocity {
    /// One counterclockwise turn per unit time about (0.5, 0.5).
    Rotation,
    Constant([f64; 2]),
}

impl Velocity {
    pub fn at(&self, x: f64, y: f64) -> [f64; 2] {
        match *self {
            Velocity::Rotation => rotation_velocity(x, y),
            Velocity::Constant(c) => c,
        }
    }

    /// Upper bound of `|c|` on the unit square.
    pub fn max_speed(&self) -> f64 {
        match *self {
            Velocity::Rotation => 2.0 * PI * 0.5f64.hypot(0.5),
            Velocity::Constant([a, b]) => a.hypot(b),
        }
    }
}

pub fn rotation_velocity(x: f64, y: f64) -> [f64; 2] {
    [-2.0 * PI * (y - 0.5), 2.0 * PI * (x - 0.5)]
}

/// Notched cylinder, cosine hump and cone.
pub fn rotation_initial_condition(x: f64, y: f64) -> f64 {
    let r = |cx: f64, cy: f64| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
    let notch = (0.475..=0.525).contains(&x) && (0.6..=0.85).contains(&y);
    if r(0.5, 0.75) <= 0.15 && !notch {
        1.0
    } else if r(0.25, 0.5) <= 0.15 {
        0.25 * (1.0 + (PI / 0.15 * r(0.25, 0.5)).cos())
    } else if r(0.5, 0.25) <= 0.15 {
        1.0 - r(0.5, 0.25) / 0.15
    } else {
        0.0
    }
}

#[derive(Clone, Debug)]
pub struct DGState {
    ne: usize,
    basis: BasisSpec,
    weights: Vec<f64>,
    /// `deriv[i * n + k] = phi_k'(xi_i)`.
    deriv: Vec<f64>,
    u: Vec<f64>,
    t: f64,
    velocity: Velocity,
}

impl DGState {
    /// Interpolates `f` at the nodes of an `ne x ne` mesh of order `p`.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(ne: usize, p: usize, velocity: Velocity, f: F) -> Result<Self> {
        if ne == 0 {
            return Err(Error::InvalidParameter("mesh needs at least one element per side".into()));
        }
        let basis = BasisSpec::lobatto(p)?;
        let n = p + 1;
        let weights = gauss_lobatto(n).weights;
        let mut deriv = vec![0.0; n * n];
        let (mut v, mut d2) = (vec![0.0; n], vec![0.0; n]);
        let xi = basis.nodes().expect("nodal basis").to_vec();
        for (i, &x) in xi.iter().enumerate() {
            basis.eval_with_derivatives(x, &mut v, &mut deriv[i * n..(i + 1) * n], &mut d2);
        }
        let mut state = DGState { ne, basis, weights, deriv, u: Vec::new(), t: 0.0, velocity };
        let mut u = Vec::with_capacity(ne * ne * n * n);
        for e in 0..ne * ne {
            for j in 0..n {
                for i in 0..n {
                    let [x, y] = state.node(e, i, j);
                    u.push(f(x, y));
                }
            }
        }
        if let Some(k) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        state.u = u;
        Ok(state)
    }

    pub fn ne(&self) -> usize {
        self.ne
    }

    pub fn order(&self) -> usize {
        self.basis.order()
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn velocity(&self) -> Velocity {
        self.velocity
    }

    pub fn h(&self) -> f64 {
        1.0 / self.ne as f64
    }

    pub fn num_elements(&self) -> usize {
        self.ne * self.ne
    }

    fn npe(&self) -> usize {
        let n = self.basis.len();
        n * n
    }

    fn xi(&self) -> &[f64] {
        self.basis.nodes().expect("nodal basis")
    }

    /// Physical position of local node `(i, j)` of element `e`.
    fn node(&self, e: usize, i: usize, j: usize) -> [f64; 2] {
        let (ex, ey) = (e % self.ne, e / self.ne);
        let h = self.h();
        let xi = self.xi();
        [(ex as f64 + 0.5 * (xi[i] + 1.0)) * h, (ey as f64 + 0.5 * (xi[j] + 1.0)) * h]
    }

    pub fn element_values(&self, e: usize) -> &[f64] {
        let m = self.npe();
        &self.u[e * m..(e + 1) * m]
    }

    pub fn element(&self, e: usize) -> PolyCoeffs {
        PolyCoeffs::new(2, self.basis.clone(), self.element_values(e).to_vec()).expect("consistent element storage")
    }

    pub fn means(&self) -> Vec<f64> {
        (0..self.num_elements()).map(|e| element_mean(&self.element(e))).collect()
    }

    /// Integral of the solution over the domain.
    pub fn total_mass(&self) -> f64 {
        let h2 = self.h() * self.h();
        self.means().iter().map(|m| m * h2).sum()
    }

    /// Value at reference point `(xi, eta)` of element `e`.
    pub fn eval_element(&self, e: usize, xi: f64, eta: f64) -> f64 {
        let n = self.basis.len();
        let mut bx = vec![0.0; n];
        let mut by = vec![0.0; n];
        self.basis.eval_all_unchecked(xi, &mut bx);
        self.basis.eval_all_unchecked(eta, &mut by);
        let u = self.element_values(e);
        (0..n).map(|j| by[j] * (0..n).map(|i| u[j * n + i] * bx[i]).sum::<f64>()).sum()
    }

    /// L2 distance to `f`, with a Gauss rule of `p + 3` points per direction.
    pub fn l2_error<F: Fn(f64, f64) -> f64 + Sync>(&self, f: F) -> f64 {
        let q = gauss_legendre(self.order() + 3);
        let h = self.h();
        let sum: f64 = (0..self.num_elements())
            .into_par_iter()
            .map(|e| {
                let (ex, ey) = ((e % self.ne) as f64, (e / self.ne) as f64);
                let mut s = 0.0;
                for (b, &eta) in q.points.iter().enumerate() {
                    for (a, &xi) in q.points.iter().enumerate() {
                        let x = (ex + 0.5 * (xi + 1.0)) * h;
                        let y = (ey + 0.5 * (eta + 1.0)) * h;
                        let d = self.eval_element(e, xi, eta) - f(x, y);
                        s += q.weights[a] * q.weights[b] * d * d;
                    }
                }
                s * h * h / 4.0
            })
            .sum();
        sum.sqrt()
    }

    pub(crate) fn limit_in_place(&mut self, limiter: &Limiter) -> Result<Vec<LimiterDecision>> {
        let m = self.npe();
        let basis = self.basis.clone();
        self.u
            .par_chunks_mut(m)
            .enumerate()
            .map(|(e, chunk)| {
                let mut c = PolyCoeffs::new(2, basis.clone(), chunk.to_vec())?;
                let d = limiter.limit(&mut c).map_err(|err| Error::Element { element: e, message: err.to_string() })?;
                if d.alpha < 1.0 {
                    chunk.copy_from_slice(c.values());
                }
                Ok(d)
            })
            .collect()
    }

    /// Semi-discrete right-hand side for nodal values `u`.
    fn rhs(&self, u: &[f64]) -> Vec<f64> {
        let n = self.basis.len();
        let npe = n * n;
        let ne = self.ne;
        let s = 2.0 / self.h();
        let p = n - 1;
        let mut r = vec![0.0; u.len()];
        let mut fx = vec![0.0; u.len()];
        let mut fy = vec![0.0; u.len()];
        for e in 0..ne * ne {
            for j in 0..n {
                for i in 0..n {
                    let [x, y] = self.node(e, i, j);
                    let c = self.velocity.at(x, y);
                    let k = e * npe + j * n + i;
                    fx[k] = c[0] * u[k];
                    fy[k] = c[1] * u[k];
                }
            }
        }
        let d = &self.deriv;
        for e in 0..ne * ne {
            let base = e * npe;
            for j in 0..n {
                for i in 0..n {
                    let mut acc = 0.0;
                    for k in 0..n {
                        acc += d[i * n + k] * fx[base + j * n + k] + d[j * n + k] * fy[base + k * n + i];
                    }
                    r[base + j * n + i] = -s * acc;
                }
            }
        }
        let (w0, wp) = (self.weights[0], self.weights[p]);
        for ey in 0..ne {
            for ex in 0..ne {
                let e = ey * ne + ex;
                let right = ey * ne + (ex + 1) % ne;
                let top = ((ey + 1) % ne) * ne + ex;
                for j in 0..n {
                    // face between e (node p, j) and right (node 0, j)
                    let kl = e * npe + j * n + p;
                    let kr = right * npe + j * n;
                    let [x, y] = self.node(e, p, j);
                    let c = self.velocity.at(x, y)[0];
                    let flux = if c >= 0.0 { c * u[kl] } else { c * u[kr] };
                    r[kl] -= s * (flux - fx[kl]) / wp;
                    r[kr] += s * (flux - fx[kr]) / w0;
                }
                for i in 0..n {
                    let kb = e * npe + p * n + i;
                    let kt = top * npe + i;
                    let [x, y] = self.node(e, i, p);
                    let c = self.velocity.at(x, y)[1];
                    let flux = if c >= 0.0 { c * u[kb] } else { c * u[kt] };
                    r[kb] -= s * (flux - fy[kb]) / wp;
                    r[kt] += s * (flux - fy[kt]) / w0;
                }
            }
        }
        r
    }
}

pub fn cfl_limit(state: &DGState) -> f64 {
    CFL_NUMBER / (2 * state.order() + 1) as f64 * state.h() / state.velocity.max_speed()
}

/// One SSP-RK3 step, limiting after every stage when a limiter is given.
pub fn dg_step(state: &DGState, dt: f64, limiter: Option<&Limiter>) -> Result<DGState> {
    let limit = cfl_limit(state);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, limit });
    }
    let stage = |combo: &[(f64, &[f64])], base: &[f64]| -> DGState {
        let r = state.rhs(base);
        let mut next = state.clone();
        for (k, v) in next.u.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &(c, w) in combo {
                acc += c * w[k];
            }
            *v = acc + combo.last().map_or(1.0, |c| c.0) * dt * r[k];
        }
        next
    };
    let finish = |mut s: DGState| -> Result<DGState> {
        if let Some(l) = limiter {
            s.limit_in_place(l)?;
        }
        Ok(s)
    };
    let u0 = state.u.clone();
    let s1 = finish(stage(&[(1.0, &u0)], &u0))?;
    let s2 = finish(stage(&[(0.75, &u0), (0.25, &s1.u)], &s1.u))?;
    let mut s3 = finish(stage(&[(1.0 / 3.0, &u0), (2.0 / 3.0, &s2.u)], &s2.u))?;
    s3.t = state.t + dt;
    Ok(s3)
}

/// Sampled extrema over `per_element` uniform random points in every element.
pub fn sample_extrema(state: &DGState, per_element: usize, seed: u64) -> (f64, f64) {
    (0..state.num_elements())
        .into_par_iter()
        .map(|e| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (e as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for _ in 0..per_element {
                let v = state.eval_element(e, rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
                lo = lo.min(v);
                hi = hi.max(v);
            }
            (lo, hi)
        })
        .reduce(|| (f64::INFINITY, f64::NEG_INFINITY), |a, b| (a.0.min(b.0), a.1.max(b.1)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub ne: usize,
    pub order: usize,
    pub t_final: f64,
    /// Evenly spaced output times after the initial one.
    pub snapshots: usize,
    pub samples_per_element: usize,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { ne: 16, order: 3, t_final: 1.0, snapshots: 4, samples_per_element: 1000, seed: 0x5eed }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub ne: usize,
    pub order: usize,
    pub steps: usize,
    pub dt: f64,
    pub limited: bool,
    pub snapshots: Vec<Snapshot>,
    pub initial_mass: f64,
    pub final_mass: f64,
    /// Largest mass change over a single step.
    pub max_step_drift: f64,
    /// Smallest blending coefficient applied.
    pub min_alpha: f64,
}

impl RunReport {
    pub fn relative_drift(&self) -> f64 {
        (self.final_mass - self.initial_mass).abs() / self.initial_mass.abs().max(f64::MIN_POSITIVE)
    }

    /// Extrema over all snapshots.
    pub fn extrema(&self) -> (f64, f64) {
        self.snapshots.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, s| (a.0.min(s.min), a.1.max(s.max)))
    }
}

/// Solid-body rotation with the three-body initial condition.
pub fn run(options: &RunOptions, limiter: Option<&Limiter>) -> Result<RunReport> {
    if !(options.t_final > 0.0) || options.snapshots == 0 {
        return Err(Error::InvalidParameter("t_final and snapshots must be positive".into()));
    }
    let mut state = DGState::from_fn(options.ne, options.order, Velocity::Rotation, rotation_initial_condition)?;
    let mut min_alpha = 1.0f64;
    if let Some(l) = limiter {
        for d in state.limit_in_place(l)? {
            min_alpha = min_alpha.min(d.alpha);
        }
    }
    let steps = (options.t_final / cfl_limit(&state)).ceil() as usize;
    let dt = options.t_final / steps as f64;
    let snap = |s: &DGState, k: usize| {
        let (min, max) = sample_extrema(s, options.samples_per_element, options.seed.wrapping_add(k as u64));
        Snapshot { t: s.time(), min, max }
    };
    let mut snapshots = vec![snap(&state, 0)];
    let initial_mass = state.total_mass();
    let mut mass = initial_mass;
    let mut max_step_drift = 0.0f64;
    let mut next_out = 1;
    for step in 1..=steps {
        let mut next = dg_step(&state, dt, limiter)?;
        if step == steps {
            next.t = options.t_final;
        }
        state = next;
        let m = state.total_mass();
        max_step_drift = max_step_drift.max((m - mass).abs());
        mass = m;
        if step * options.snapshots >= next_out * steps {
            snapshots.push(snap(&state, next_out));
            next_out += 1;
        }
    }
    if let Some(l) = limiter {
        // alpha of the final state, for reporting only
        let (_, decisions) = super::apply_limiter(&state, l)?;
        for d in decisions {
            min_alpha = min_alpha.min(d.alpha);
        }
    }
    Ok(RunReport {
        ne: options.ne,
        order: options.order,
        steps,
        dt,
        limited: limiter.is_some(),
        snapshots,
        initial_mass,
        final_mass: mass,
        max_step_drift,
        min_alpha,
    })
}
