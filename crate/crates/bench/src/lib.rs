//! Inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polybound_core::meshcheck::{perturbed_mesh, CurvedMesh};
use polybound_core::{BasisSpec, PolyCoeffs};

/// Lobatto-nodal coefficients drawn uniformly from `[-1, 1]`.
pub fn random_coeffs(dim: usize, p: usize, seed: u64) -> PolyCoeffs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (p + 1).pow(dim as u32);
    let values = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    PolyCoeffs::new(dim, BasisSpec::lobatto(p).expect("order >= 1"), values).expect("consistent length")
}

/// An 8x8 mesh of order `p` with interior nodes jittered by 30% of the node spacing.
pub fn jittered_mesh(p: usize) -> CurvedMesh {
    perturbed_mesh(8, p, 0.3, 1).expect("valid parameters")
}
