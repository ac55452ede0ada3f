//! Legendre polynomials and the Gauss-Legendre / Gauss-Lobatto rules on [-1, 1].
//!
//! Nodes are found by Newton iteration on the defining polynomials; only the
//! left half is iterated and the right half is mirrored, so every rule is
//! exactly symmetric about the origin.

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// Writes `P_0(x) .. P_{n-1}(x)` into `out[..n]`.
pub fn legendre_values(n: usize, x: f64, out: &mut [f64]) {
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n == 1 {
        return;
    }
    out[1] = x;
    for k in 1..n - 1 {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

/// Values and first two derivatives of `P_0 .. P_{n-1}` at `x`.
///
/// Uses `P'_{k+1} = P'_{k-1} + (2k+1) P_k`, which stays finite at the
/// endpoints (unlike the `(1 - x^2)` form).
pub fn legendre_with_derivatives(
    n: usize,
    x: f64,
    p: &mut [f64],
    dp: &mut [f64],
    ddp: &mut [f64],
) {
    legendre_values(n, x, p);
    if n == 0 {
        return;
    }
    dp[0] = 0.0;
    ddp[0] = 0.0;
    if n == 1 {
        return;
    }
    dp[1] = 1.0;
    ddp[1] = 0.0;
    for k in 1..n - 1 {
        let c = 2.0 * k as f64 + 1.0;
        dp[k + 1] = dp[k - 1] + c * p[k];
        ddp[k + 1] = ddp[k - 1] + c * dp[k];
    }
}

/// `(P_n(x), P'_n(x))` by the three-term recurrence.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    let (mut d0, mut d1) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        let d2 = d0 + (2.0 * kf + 1.0) * p1;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    (p1, d1)
}

/// A quadrature rule on [-1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integrates `f` over `[a, b]` with the rule mapped affinely.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// `n`-point Gauss-Legendre rule, exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Quadrature {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n / 2 {
        // Chebyshev-like initial guess for the k-th largest root
        let mut x = -(std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < NEWTON_TOL {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[k] = x;
        points[n - 1 - k] = -x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_and_derivative(n, 0.0);
        points[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (d * d);
    }
    Quadrature { points, weights }
}

/// `n`-point Gauss-Lobatto rule (both endpoints included), exact for degree `2n - 3`.
pub fn gauss_lobatto(n: usize) -> Quadrature {
    assert!(n >= 2, "Gauss-Lobatto rule needs at least two points");
    let deg = n - 1;
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let end_w = 2.0 / (n as f64 * deg as f64);
    points[0] = -1.0;
    points[n - 1] = 1.0;
    weights[0] = end_w;
    weights[n - 1] = end_w;
    let scale = 2.0 / (n as f64 * deg as f64);
    let df = deg as f64;
    for k in 1..n / 2 {
        // interior nodes are the roots of P'_deg
        let mut x = -(std::f64::consts::PI * k as f64 / deg as f64).cos();
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre_and_derivative(deg, x);
            let dd = (2.0 * x * d - df * (df + 1.0) * p) / (1.0 - x * x);
            let dx = d / dd;
            x -= dx;
            if dx.abs() < NEWTON_TOL {
                break;
            }
        }
        let (p, _) = legendre_and_derivative(deg, x);
        let w = scale / (p * p);
        points[k] = x;
        points[n - 1 - k] = -x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    if n % 2 == 1 {
        let (p, _) = legendre_and_derivative(deg, 0.0);
        points[n / 2] = 0.0;
        weights[n / 2] = scale / (p * p);
    }
    Quadrature { points, weights }
}
