//! Plate setups used by the benchmark grid.

use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::geometry::ExtrudedGeometry;
use crate::materials::{Layup, OrthotropicConstants};
use crate::problem::ProblemSetup;
use crate::splines::TensorProductSpace;

/// Repeating stacking sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayupFamily {
    /// 0/90/0/90/...
    CrossPly,
    /// 0/45/-45/90/0/...
    QuadPly,
}

impl LayupFamily {
    const CROSS: [f64; 2] = [0.0, 2.0 * FRAC_PI_4];
    const QUAD: [f64; 4] = [0.0, FRAC_PI_4, -FRAC_PI_4, 2.0 * FRAC_PI_4];

    /// Ply angles in radians for `m` layers.
    pub fn angles(self, m: usize) -> Vec<f64> {
        let cycle: &[f64] = match self {
            Self::CrossPly => &Self::CROSS,
            Self::QuadPly => &Self::QUAD,
        };
        cycle.iter().copied().cycle().take(m).collect()
    }
}

/// Default plate: 1 x 1 in-plane, 0.1 thick.
pub fn default_plate() -> ExtrudedGeometry {
    ExtrudedGeometry::plate(1.0, 1.0, 0.1)
}

/// Pagano material, `m` equal plies of `family`, degree `p` in every
/// direction with maximal smoothness, `elements x elements` in-plane and one
/// element through the thickness.
pub fn pagano_setup(m: usize, family: LayupFamily, p: usize, elements: usize) -> Result<ProblemSetup> {
    pagano_setup_with_angles(&family.angles(m), p, [elements, elements], 1)
}

/// As [`pagano_setup`] with explicit ply angles (radians).
pub fn pagano_setup_with_angles(
    angles: &[f64],
    p: usize,
    elements: [usize; 2],
    thickness_elements: usize,
) -> Result<ProblemSetup> {
    if angles.is_empty() {
        return Err(Error::InvalidLayup("at least one layer is required".into()));
    }
    let layers: Vec<_> = angles.iter().map(|&a| (OrthotropicConstants::pagano(), a)).collect();
    let layup = Layup::equal_thickness(&layers)?;
    let space = TensorProductSpace::uniform(p, elements, thickness_elements)?;
    ProblemSetup::new(space, default_plate(), layup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn family_angles() {
        assert_eq!(LayupFamily::CrossPly.angles(4), vec![0.0, FRAC_PI_2, 0.0, FRAC_PI_2]);
        assert_eq!(
            LayupFamily::QuadPly.angles(6),
            vec![0.0, FRAC_PI_4, -FRAC_PI_4, FRAC_PI_2, 0.0, FRAC_PI_4]
        );
    }

    #[test]
    fn cross_ply_interfaces_and_distinct_counts() {
        let s = pagano_setup(4, LayupFamily::CrossPly, 2, 1).unwrap();
        assert_eq!(s.layup.interfaces(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(s.layup.num_distinct(), 2);
        assert_eq!(pagano_setup(1, LayupFamily::QuadPly, 1, 1).unwrap().layup.num_distinct(), 1);
        for m in [4, 8, 16, 32, 64] {
            assert_eq!(pagano_setup(m, LayupFamily::QuadPly, 1, 1).unwrap().layup.num_distinct(), 4);
        }
    }
}
