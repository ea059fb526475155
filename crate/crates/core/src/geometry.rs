//! Extruded geometries `F(u, v, t) = S(u, v) + t * a`.
//!
//! The only way to build an [`ExtrudedGeometry`] is from a surface map and a
//! constant extrusion vector, so its jacobian never depends on the thickness
//! coordinate. Both assemblers rely on that to evaluate one [`GeometryFrame`]
//! per in-plane quadrature point and reuse it through the whole thickness.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::splines::KnotVector;

const MIN_DET: f64 = 1e-14;

/// Tensor-product B-spline surface with control points ordered `u` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct BSplineSurface {
    u: KnotVector,
    v: KnotVector,
    control_points: Vec<Vector3<f64>>,
}

impl BSplineSurface {
    pub fn new(u: KnotVector, v: KnotVector, control_points: Vec<Vector3<f64>>) -> Result<Self> {
        let expected = u.num_basis() * v.num_basis();
        if control_points.len() != expected {
            return Err(Error::DimensionMismatch(control_points.len(), expected));
        }
        Ok(Self { u, v, control_points })
    }

    fn eval_with_derivs(&self, xi: [f64; 2]) -> Result<[Vector3<f64>; 3]> {
        let bu = self.u.eval(xi[0])?;
        let bv = self.v.eval(xi[1])?;
        let nu = self.u.num_basis();
        let mut out = [Vector3::zeros(); 3];
        for (b, (vv, dv)) in bv.values.iter().zip(&bv.derivs).enumerate() {
            for (a, (vu, du)) in bu.values.iter().zip(&bu.derivs).enumerate() {
                let cp = &self.control_points[(bv.first_active + b) * nu + bu.first_active + a];
                out[0] += cp * (vu * vv);
                out[1] += cp * (du * vv);
                out[2] += cp * (vu * dv);
            }
        }
        Ok(out)
    }
}

/// Mid-surface `S: [0,1]^2 -> R^3`.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceMap {
    /// Axis-aligned rectangle `[0, lx] x [0, ly]` in the plane `z = 0`.
    Rectangle { lx: f64, ly: f64 },
    /// Bilinear patch through four corners ordered (0,0), (1,0), (0,1), (1,1).
    BilinearQuad { corners: [Vector3<f64>; 4] },
    BSpline(BSplineSurface),
}

impl SurfaceMap {
    fn check(xi: [f64; 2]) -> Result<()> {
        for x in xi {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::OutOfDomain(x));
            }
        }
        Ok(())
    }

    pub fn eval(&self, xi: [f64; 2]) -> Result<Vector3<f64>> {
        Ok(self.eval_with_derivs(xi)?[0])
    }

    /// Partial derivatives `(dS/du, dS/dv)`.
    pub fn derivs(&self, xi: [f64; 2]) -> Result<(Vector3<f64>, Vector3<f64>)> {
        let [_, du, dv] = self.eval_with_derivs(xi)?;
        Ok((du, dv))
    }

    fn eval_with_derivs(&self, xi: [f64; 2]) -> Result<[Vector3<f64>; 3]> {
        Self::check(xi)?;
        let [u, v] = xi;
        match self {
            SurfaceMap::Rectangle { lx, ly } => Ok([
                Vector3::new(lx * u, ly * v, 0.0),
                Vector3::new(*lx, 0.0, 0.0),
                Vector3::new(0.0, *ly, 0.0),
            ]),
            SurfaceMap::BilinearQuad { corners: [c00, c10, c01, c11] } => Ok([
                c00 * ((1.0 - u) * (1.0 - v)) + c10 * (u * (1.0 - v)) + c01 * ((1.0 - u) * v) + c11 * (u * v),
                (c10 - c00) * (1.0 - v) + (c11 - c01) * v,
                (c01 - c00) * (1.0 - u) + (c11 - c10) * u,
            ]),
            SurfaceMap::BSpline(s) => s.eval_with_derivs(xi),
        }
    }
}

/// Jacobian data at one in-plane point.
///
/// Column `k` of `jacobian` is the covariant vector `g_k`; column `k` of
/// `inv_transpose` is the contravariant vector `g^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryFrame {
    pub jacobian: Matrix3<f64>,
    pub det: f64,
    pub inv_transpose: Matrix3<f64>,
}

impl GeometryFrame {
    pub fn from_jacobian(jacobian: Matrix3<f64>, at: [f64; 2]) -> Result<Self> {
        let det = jacobian.determinant();
        if det.is_nan() || det < MIN_DET {
            return Err(Error::DegenerateGeometry(det, at[0], at[1]));
        }
        let inv = jacobian
            .try_inverse()
            .ok_or(Error::DegenerateGeometry(det, at[0], at[1]))?;
        Ok(Self { jacobian, det, inv_transpose: inv.transpose() })
    }

    pub fn covariant(&self, k: usize) -> Vector3<f64> {
        self.jacobian.column(k).into_owned()
    }

    pub fn contravariant(&self, k: usize) -> Vector3<f64> {
        self.inv_transpose.column(k).into_owned()
    }

    /// Physical gradient `DF^{-T} grad_hat` of a function with parametric gradient `grad_hat`.
    pub fn pullback_gradient(&self, grad_hat: &Vector3<f64>) -> Vector3<f64> {
        self.inv_transpose * grad_hat
    }

    /// Same as [`Self::pullback_gradient`] on plain arrays, for inner loops.
    #[inline]
    pub fn pullback(&self, g: [f64; 3]) -> [f64; 3] {
        let m = &self.inv_transpose;
        [
            m[(0, 0)] * g[0] + m[(0, 1)] * g[1] + m[(0, 2)] * g[2],
            m[(1, 0)] * g[0] + m[(1, 1)] * g[1] + m[(1, 2)] * g[2],
            m[(2, 0)] * g[0] + m[(2, 1)] * g[1] + m[(2, 2)] * g[2],
        ]
    }
}

/// `F(u, v, t) = S(u, v) + t * a` on the unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtrudedGeometry {
    surface: SurfaceMap,
    extrusion: Vector3<f64>,
}

impl ExtrudedGeometry {
    pub fn new(surface: SurfaceMap, extrusion: Vector3<f64>) -> Self {
        Self { surface, extrusion }
    }

    /// The identity map of the unit cube.
    pub fn unit_cube() -> Self {
        Self::new(SurfaceMap::Rectangle { lx: 1.0, ly: 1.0 }, Vector3::z())
    }

    /// Flat plate `[0, lx] x [0, ly] x [0, thickness]`.
    pub fn plate(lx: f64, ly: f64, thickness: f64) -> Self {
        Self::new(SurfaceMap::Rectangle { lx, ly }, Vector3::new(0.0, 0.0, thickness))
    }

    pub fn surface(&self) -> &SurfaceMap {
        &self.surface
    }

    pub fn extrusion(&self) -> &Vector3<f64> {
        &self.extrusion
    }

    pub fn map(&self, xi: [f64; 3]) -> Result<Vector3<f64>> {
        if !(0.0..=1.0).contains(&xi[2]) {
            return Err(Error::OutOfDomain(xi[2]));
        }
        Ok(self.surface.eval([xi[0], xi[1]])? + self.extrusion * xi[2])
    }

    /// Frame at an in-plane point, `DF = [dS/du | dS/dv | a]`.
    pub fn frame_at(&self, xi_bar: [f64; 2]) -> Result<GeometryFrame> {
        let (du, dv) = self.surface.derivs(xi_bar)?;
        GeometryFrame::from_jacobian(Matrix3::from_columns(&[du, dv, self.extrusion]), xi_bar)
    }

    /// Frame at a full parametric point; identical to `frame_at` for any thickness coordinate.
    pub fn frame_at_point(&self, xi: [f64; 3]) -> Result<GeometryFrame> {
        if !(0.0..=1.0).contains(&xi[2]) {
            return Err(Error::OutOfDomain(xi[2]));
        }
        self.frame_at([xi[0], xi[1]])
    }
}

/// Frame of `geom` at `xi_bar`.
pub fn frame_at(geom: &ExtrudedGeometry, xi_bar: [f64; 2]) -> Result<GeometryFrame> {
    geom.frame_at(xi_bar)
}

/// `DF^{-T} grad_hat`.
pub fn pullback_gradient(frame: &GeometryFrame, grad_hat: &Vector3<f64>) -> Vector3<f64> {
    frame.pullback_gradient(grad_hat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn curved_surface() -> SurfaceMap {
        let u = KnotVector::uniform(2, 2).unwrap();
        let v = KnotVector::uniform(2, 1).unwrap();
        let mut cps = Vec::new();
        for j in 0..v.num_basis() {
            for i in 0..u.num_basis() {
                let x = i as f64;
                let y = j as f64 * 0.8;
                cps.push(Vector3::new(x + 0.1 * y, y, 0.3 * (x - 1.5).powi(2) + 0.1 * y));
            }
        }
        SurfaceMap::BSpline(BSplineSurface::new(u, v, cps).unwrap())
    }

    fn surfaces() -> Vec<SurfaceMap> {
        vec![
            SurfaceMap::Rectangle { lx: 3.0, ly: 0.5 },
            SurfaceMap::BilinearQuad {
                corners: [
                    Vector3::new(0.0, 0.0, 0.0),
                    Vector3::new(2.0, 0.1, 0.0),
                    Vector3::new(-0.2, 1.0, 0.3),
                    Vector3::new(1.7, 1.4, 0.2),
                ],
            },
            curved_surface(),
        ]
    }

    fn inverse_oracle(m: &Matrix3<f64>) -> Matrix3<f64> {
        // Adjugate / determinant, written out by cofactors.
        let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[(r0, c0)] * m[(r1, c1)] - m[(r0, c1)] * m[(r1, c0)];
        let det = m[(0, 0)] * c(1, 2, 1, 2) - m[(0, 1)] * c(1, 2, 0, 2) + m[(0, 2)] * c(1, 2, 0, 1);
        let adj = Matrix3::new(
            c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2),
            -c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2),
            c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1),
        );
        adj / det
    }

    #[test]
    fn unit_cube_frame_is_identity() {
        let f = ExtrudedGeometry::unit_cube().frame_at([0.3, 0.9]).unwrap();
        assert_eq!(f.jacobian, Matrix3::identity());
        assert_eq!(f.det, 1.0);
        assert_eq!(f.inv_transpose, Matrix3::identity());
        for k in 0..3 {
            assert_eq!(f.covariant(k), f.contravariant(k));
        }
        assert_eq!(f.pullback_gradient(&Vector3::new(1.0, 2.0, 3.0)), Vector3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn plate_frame_is_diagonal() {
        let f = ExtrudedGeometry::plate(4.0, 2.0, 0.1).frame_at([0.5, 0.5]).unwrap();
        assert_eq!(f.jacobian, Matrix3::from_diagonal(&Vector3::new(4.0, 2.0, 0.1)));
        assert_abs_diff_eq!(f.det, 0.8, epsilon = 1e-15);
        let g = f.pullback_gradient(&Vector3::new(1.0, 0.0, 0.0));
        assert_abs_diff_eq!(g, Vector3::new(0.25, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn sheared_extrusion_matches_direct_inversion() {
        let geom = ExtrudedGeometry::new(SurfaceMap::Rectangle { lx: 1.0, ly: 1.0 }, Vector3::new(0.2, 0.0, 1.0));
        let f = geom.frame_at([0.1, 0.2]).unwrap();
        let expected = inverse_oracle(&f.jacobian).transpose();
        assert_abs_diff_eq!(f.inv_transpose, expected, epsilon = 1e-15);
        // g^3 = (0, 0, 1) is orthogonal to both in-plane tangents.
        assert_abs_diff_eq!(f.contravariant(2), Vector3::new(0.0, 0.0, 1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(f.contravariant(0), Vector3::new(1.0, 0.0, -0.2), epsilon = 1e-15);
    }

    #[test]
    fn degenerate_geometry_is_rejected() {
        let geom = ExtrudedGeometry::new(SurfaceMap::Rectangle { lx: 1.0, ly: 1.0 }, Vector3::new(1.0, 0.0, 0.0));
        assert!(matches!(geom.frame_at([0.5, 0.5]), Err(Error::DegenerateGeometry(..))));
        let flipped = ExtrudedGeometry::new(SurfaceMap::Rectangle { lx: 1.0, ly: 1.0 }, -Vector3::z());
        assert!(flipped.frame_at([0.5, 0.5]).is_err());
    }

    #[test]
    fn frames_do_not_depend_on_thickness() {
        for s in surfaces() {
            let geom = ExtrudedGeometry::new(s, Vector3::new(0.05, -0.1, 0.4));
            for xi_bar in [[0.1, 0.7], [0.5, 0.5], [0.93, 0.02]] {
                let reference = geom.frame_at(xi_bar).unwrap();
                for t in [0.0, 0.37, 1.0] {
                    assert_eq!(geom.frame_at_point([xi_bar[0], xi_bar[1], t]).unwrap(), reference);
                    // The finite-difference jacobian of the full map agrees at every t too.
                    let h = 1e-7;
                    let x0 = [xi_bar[0], xi_bar[1], t];
                    for k in 0..3 {
                        let (mut lo, mut hi) = (x0, x0);
                        lo[k] = (x0[k] - h).max(0.0);
                        hi[k] = (x0[k] + h).min(1.0);
                        let fd = (geom.map(hi).unwrap() - geom.map(lo).unwrap()) / (hi[k] - lo[k]);
                        assert_abs_diff_eq!(fd, reference.covariant(k), epsilon = 1e-6);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn bases_are_dual_and_det_is_triple_product(u in 0.0f64..=1.0, v in 0.0f64..=1.0, which in 0usize..3) {
            let geom = ExtrudedGeometry::new(surfaces().swap_remove(which), Vector3::new(0.05, -0.1, 0.4));
            let f = geom.frame_at([u, v]).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let d = f.contravariant(i).dot(&f.covariant(j));
                    let expected = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((d - expected).abs() < 1e-12);
                }
            }
            let triple = f.covariant(0).cross(&f.covariant(1)).dot(geom.extrusion());
            prop_assert!((f.det - triple).abs() < 1e-12 * triple.abs().max(1.0));
        }

        #[test]
        fn surface_derivatives_match_finite_differences(u in 0.01f64..0.99, v in 0.01f64..0.99, which in 0usize..3) {
            let s = surfaces().swap_remove(which);
            let (du, dv) = s.derivs([u, v]).unwrap();
            let h = 1e-7;
            let fdu = (s.eval([u + h, v]).unwrap() - s.eval([u - h, v]).unwrap()) / (2.0 * h);
            let fdv = (s.eval([u, v + h]).unwrap() - s.eval([u, v - h]).unwrap()) / (2.0 * h);
            prop_assert!((fdu - du).norm() < 1e-6);
            prop_assert!((fdv - dv).norm() < 1e-6);
        }

        #[test]
        fn pullback_solves_transposed_system(
            entries in proptest::collection::vec(-1.0f64..1.0, 9),
            grad in proptest::collection::vec(-5.0f64..5.0, 3),
        ) {
            let m = Matrix3::from_row_slice(&entries) + Matrix3::identity() * 2.5;
            prop_assume!(m.determinant() > 1e-3);
            let f = GeometryFrame::from_jacobian(m, [0.0, 0.0]).unwrap();
            let g = Vector3::new(grad[0], grad[1], grad[2]);
            let y = f.pullback_gradient(&g);
            // DF^T y = grad, checked through LU rather than the stored inverse.
            let solved = m.transpose().lu().solve(&g).unwrap();
            prop_assert!((y - solved).norm() < 1e-12 * (1.0 + g.norm()));
            prop_assert!((m.transpose() * y - g).norm() < 1e-12 * (1.0 + g.norm()));
        }
    }
}
