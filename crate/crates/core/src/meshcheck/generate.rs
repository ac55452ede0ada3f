//! Synthetic meshes on the unit square.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_order, detj_coeffs, CurvedMesh};
use crate::bounder::brute_force_extrema;
use crate::basis::BasisSpec;
use crate::error::{Error, Result};

/// Global node coordinates along one axis for `ne` elements of order `p`.
fn axis_points(ne: usize, p: usize) -> Result<Vec<f64>> {
    let gll = BasisSpec::lobatto(p)?.nodes().expect("nodal basis").to_vec();
    let h = 1.0 / ne as f64;
    let mut pts = Vec::with_capacity(ne * p + 1);
    for e in 0..ne {
        for &xi in &gll[..p] {
            pts.push((e as f64 + 0.5 * (xi + 1.0)) * h);
        }
    }
    pts.push(1.0);
    Ok(pts)
}

fn gather(ne: usize, p: usize, global: &[[f64; 2]]) -> Result<CurvedMesh> {
    let stride = ne * p + 1;
    let mut elements = Vec::with_capacity(ne * ne);
    for ey in 0..ne {
        for ex in 0..ne {
            let mut nodes = Vec::with_capacity((p + 1) * (p + 1));
            for j in 0..=p {
                for i in 0..=p {
                    nodes.push(global[(ex * p + i) + stride * (ey * p + j)]);
                }
            }
            elements.push(nodes);
        }
    }
    CurvedMesh::new(p, elements)
}

fn grid(ne: usize, p: usize) -> Result<Vec<[f64; 2]>> {
    if ne == 0 {
        return Err(Error::InvalidParameter("mesh needs at least one element per side".into()));
    }
    check_order(p)?;
    let ax = axis_points(ne, p)?;
    Ok(ax.iter().flat_map(|&y| ax.iter().map(move |&x| [x, y])).collect())
}

/// `ne x ne` affine elements of order `p` covering the unit square.
pub fn uniform_mesh(ne: usize, p: usize) -> Result<CurvedMesh> {
    gather(ne, p, &grid(ne, p)?)
}

/// Uniform mesh with every interior node displaced by up to
/// `amplitude * h` per coordinate, `h` being the mean node spacing `1 / (ne p)`.
pub fn perturbed_mesh(ne: usize, p: usize, amplitude: f64, seed: u64) -> Result<CurvedMesh> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidParameter(format!("perturbation amplitude must be non-negative, got {amplitude}")));
    }
    let mut g = grid(ne, p)?;
    let stride = ne * p + 1;
    let a = amplitude / (ne * p) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (k, node) in g.iter_mut().enumerate() {
        let (i, j) = (k % stride, k / stride);
        if i == 0 || j == 0 || i == stride - 1 || j == stride - 1 || a == 0.0 {
            continue;
        }
        node[0] += rng.random_range(-a..a);
        node[1] += rng.random_range(-a..a);
    }
    gather(ne, p, &g)
}

/// Mirrors element `index` in its first reference direction, inverting it.
pub fn flip_element(mesh: &CurvedMesh, index: usize) -> Result<CurvedMesh> {
    if index >= mesh.len() {
        return Err(Error::IndexOutOfRange { index, count: mesh.len() });
    }
    let mut out = mesh.clone();
    let n = mesh.order() + 1;
    for row in out.elements_mut()[index].chunks_mut(n) {
        row.reverse();
    }
    Ok(out)
}

/// Order-2 element on `[-1, 1]^2` with its bottom mid-edge node pushed
/// inward along `(1/2, sqrt(3)/2)` until the sampled min det J reaches `min_detj`.
///
/// The minimum sits inside the element away from dyadic subcell corners.
pub fn dip_element(min_detj: f64) -> Result<Vec<[f64; 2]>> {
    if !(min_detj < 1.0) {
        return Err(Error::InvalidParameter(format!("target min det J must be below 1, got {min_detj}")));
    }
    let square: Vec<[f64; 2]> = uniform_mesh(1, 2)?.elements()[0].iter().map(|q| [2.0 * q[0] - 1.0, 2.0 * q[1] - 1.0]).collect();
    let dir = [0.5, 0.75f64.sqrt()];
    let moved = |t: f64| {
        let mut e = square.clone();
        e[1][0] += t * dir[0];
        e[1][1] += t * dir[1];
        e
    };
    let min_of = |t: f64| -> Result<f64> { Ok(brute_force_extrema(&detj_coeffs(&moved(t), 2)?, 200)?.0) };
    let (mut lo, mut hi) = (0.0, 0.05);
    while min_of(hi)? > min_detj {
        lo = hi;
        hi += 0.05;
        if hi > 4.0 {
            return Err(Error::InvalidParameter(format!("min det J {min_detj} not reachable")));
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if min_of(mid)? > min_detj {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(moved(hi))
}
