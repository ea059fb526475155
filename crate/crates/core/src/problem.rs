use crate::error::{Error, Result};
use crate::geometry::ExtrudedGeometry;
use crate::materials::Layup;
use crate::splines::TensorProductSpace;

/// Gauss points per knot span in each direction. Thickness points are per
/// span-layer intersection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureOrders {
    pub inplane_u: usize,
    pub inplane_v: usize,
    pub thickness: usize,
}

impl QuadratureOrders {
    /// `p + 1` points per direction.
    pub fn for_space(space: &TensorProductSpace) -> Self {
        Self {
            inplane_u: space.inplane_u().degree() + 1,
            inplane_v: space.inplane_v().degree() + 1,
            thickness: space.thickness().degree() + 1,
        }
    }
}

/// Everything an assembler needs: the discrete space, the geometry and the stack.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSetup {
    pub space: TensorProductSpace,
    pub geometry: ExtrudedGeometry,
    pub layup: Layup,
    pub quadrature: QuadratureOrders,
}

impl ProblemSetup {
    pub fn new(space: TensorProductSpace, geometry: ExtrudedGeometry, layup: Layup) -> Result<Self> {
        if layup.num_layers() == 0 {
            return Err(Error::InvalidLayup("empty layup".into()));
        }
        let quadrature = QuadratureOrders::for_space(&space);
        Ok(Self { space, geometry, layup, quadrature })
    }

    pub fn with_thickness_points(mut self, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("thickness quadrature needs at least one point".into()));
        }
        self.quadrature.thickness = n;
        Ok(self)
    }

    pub fn with_inplane_points(mut self, n_u: usize, n_v: usize) -> Result<Self> {
        if n_u < 1 || n_v < 1 {
            return Err(Error::InvalidArgument("in-plane quadrature needs at least one point".into()));
        }
        self.quadrature.inplane_u = n_u;
        self.quadrature.inplane_v = n_v;
        Ok(self)
    }

    /// Number of displacement unknowns, `3 n`.
    pub fn num_dofs(&self) -> usize {
        3 * self.space.dim()
    }
}

/// Work counters reported by the assemblers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AssemblyStats {
    pub inplane_elements: usize,
    /// Quadrature point visits: 3D points for the standard assembler, in-plane
    /// points times operator sets for the split assemblers.
    pub quadrature_points: u64,
    /// Number of in-plane operator sets computed (split assemblers only).
    pub inplane_operator_computations: usize,
}

impl AssemblyStats {
    pub fn points_per_element(&self) -> f64 {
        self.quadrature_points as f64 / self.inplane_elements as f64
    }
}
