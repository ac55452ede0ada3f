//! Guaranteed bounds on high-order polynomials from precomputed
//! piecewise-linear bounding boxes of their basis functions.

pub mod basis;
pub mod bounder;
pub mod boxopt;
pub mod error;
pub mod limiter;
pub mod meshcheck;
pub mod poly;
pub mod quadrature;
pub mod tables;

pub use basis::{change_basis, make_node_set, BasisFamily, BasisSpec, NodeKind, NodeSet};
pub use bounder::{
    bernstein_bounds, bound_1d, bound_adaptive, bound_tensor, brute_force_extrema, project_p1, subdivide, BoundSummary,
    LinearPart, NodeBounds, Strategy,
};
pub use boxopt::{
    load_table, offset_correction, optimize_nodes, optimize_values, save_table, verify_table, BoundingTable,
    BoxOptions, BoxQuality, Provenance,
};
pub use error::{Error, Result};
pub use limiter::{
    apply_limiter, dg_step, element_mean, squeeze_alpha, step_interpolation_table, DGState, Limiter, LimiterDecision,
};
pub use meshcheck::{check_mesh, classify_element, detj_coeffs, CurvedMesh, ElementReport, Status, ValidityReport};
pub use poly::PolyCoeffs;
