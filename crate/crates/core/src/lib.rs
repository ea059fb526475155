//! Stiffness matrices of linear elasticity for laminated composites on
//! extruded B-spline geometries.
//!
//! Three assemblers produce the same matrix:
//! - [`assemble_standard`]: 3D Gauss quadrature layer by layer.
//! - [`assemble_fast`]: in-plane operators per distinct ply configuration
//!   combined with 1D thickness operators.
//! - [`assemble_fast_voigt_free`]: the split method with the material entering
//!   through closed-form tensor contractions.
//!
//! Basis functions are numbered `i = i_t * n_s + i_s` with `i_s = i_v * n_u + i_u`,
//! and the unknowns of function `i` are rows `3i..3i + 3`.

pub mod error;
pub mod experiment;
pub mod fast;
pub mod geometry;
pub mod materials;
pub mod problem;
pub mod quadrature;
pub mod sparse;
pub mod splines;
pub mod standard;
pub mod voigt_free;

mod element;

pub use error::{Error, Result};
pub use experiment::{pagano_setup, pagano_setup_with_angles, LayupFamily};
pub use fast::{
    assemble_fast, assemble_fast_with, compute_inplane_operators, compute_thickness_operators, FastOptions,
    InPlaneOperators, OperatorPair, ThicknessOperators,
};
pub use geometry::{ExtrudedGeometry, GeometryFrame, SurfaceMap};
pub use materials::{Layup, MaterialConfig, OrthotropicConstants, VoigtMatrix};
pub use problem::{AssemblyStats, ProblemSetup, QuadratureOrders};
pub use sparse::{frobenius_rel_diff, SparseMatrixBuilder, StiffnessMatrix};
pub use splines::{KnotVector, TensorProductSpace};
pub use standard::{assemble_standard, assemble_standard_with, reference_bilinear, StandardOptions};
pub use voigt_free::{assemble_fast_voigt_free, assemble_fast_voigt_free_with_stats, ContractionTable};
