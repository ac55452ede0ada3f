//! Real roots of small polynomials via companion-matrix eigenvalues.

use nalgebra::{DMatrix, Schur};

/// Coefficients (ascending) of `p(m + h t)` given those of `p(x)`.
pub(crate) fn shift_scale(c: &[f64], m: f64, h: f64) -> Vec<f64> {
    let n = c.len();
    let mut a = c.to_vec();
    for i in 0..n {
        for k in (i..n.saturating_sub(1)).rev() {
            a[k] += m * a[k + 1];
        }
    }
    let mut hp = 1.0;
    for ak in a.iter_mut() {
        *ak *= hp;
        hp *= h;
    }
    a
}

pub(crate) fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

/// Candidate points in `[-1, 1]` containing every real root of `c` there.
///
/// Returns `None` if the eigenvalue iteration fails. Real parts of
/// near-real complex pairs are kept as candidates too.
pub(crate) fn roots_in_unit_interval(c: &[f64]) -> Option<Vec<f64>> {
    let scale = c.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if scale == 0.0 {
        return Some(Vec::new());
    }
    let mut deg = c.len() - 1;
    while deg > 0 && c[deg].abs() <= 1e-14 * scale {
        deg -= 1;
    }
    let raw: Vec<f64> = match deg {
        0 => Vec::new(),
        1 => vec![-c[0] / c[1]],
        _ => {
            let lead = c[deg];
            let mut comp = DMatrix::zeros(deg, deg);
            for i in 1..deg {
                comp[(i, i - 1)] = 1.0;
            }
            for i in 0..deg {
                comp[(i, deg - 1)] = -c[i] / lead;
            }
            let schur = Schur::try_new(comp, 1e-15, 500)?;
            schur
                .complex_eigenvalues()
                .iter()
                .filter(|z| z.im.abs() <= 1e-6 * (1.0 + z.re.abs()))
                .map(|z| z.re)
                .collect()
        }
    };
    let dc: Vec<f64> = (1..=deg).map(|k| k as f64 * c[k]).collect();
    let mut out = Vec::new();
    for r in raw {
        if !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&r) {
            continue;
        }
        let mut t = r.clamp(-1.0, 1.0);
        for _ in 0..4 {
            let d = horner(&dc, t);
            if d == 0.0 {
                break;
            }
            let next = t - horner(&c[..=deg], t) / d;
            if !next.is_finite() || (next - t).abs() > 1e-3 {
                break;
            }
            t = next.clamp(-1.0, 1.0);
        }
        out.push(t);
        // keep the unpolished point too; both are admissible samples
        out.push(r.clamp(-1.0, 1.0));
    }
    Some(out)
}
