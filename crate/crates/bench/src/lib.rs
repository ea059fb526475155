//! Problem sizes shared by the criterion benchmarks.

use laminate_core::{pagano_setup, LayupFamily, ProblemSetup, Result};

/// A named benchmark problem.
pub struct Case {
    pub name: String,
    pub setup: ProblemSetup,
}

/// Cross-ply plates with `p = 3` on a 4 x 4 mesh over increasing layer counts.
pub fn layer_sweep() -> Result<Vec<Case>> {
    [8, 16, 32, 64]
        .into_iter()
        .map(|m| {
            Ok(Case { name: format!("p3_4x4_m{m}"), setup: pagano_setup(m, LayupFamily::CrossPly, 3, 4)? })
        })
        .collect()
}

/// Quad-ply plates with 16 layers on a 4 x 4 mesh over degrees 1 to 4.
pub fn degree_sweep() -> Result<Vec<Case>> {
    (1..=4)
        .map(|p| {
            Ok(Case { name: format!("p{p}_4x4_m16"), setup: pagano_setup(16, LayupFamily::QuadPly, p, 4)? })
        })
        .collect()
}
