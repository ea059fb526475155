//! Orthotropic elasticity, in-plane rotations and layered stacks.
//!
//! **Voigt ordering.** Every 6-vector and 6x6 matrix in this crate uses the
//! component order `(11, 22, 33, 12, 13, 23)`, not the more common
//! `(11, 22, 33, 23, 13, 12)`. Strain vectors carry engineering shear strains
//! (`gamma_12 = 2 eps_12`, ...), and the entries of a [`VoigtMatrix`] are the
//! tensor components `C_ijkl` themselves, so that `eps_v^T D eps_v` equals
//! `eps : C : eps`.

use nalgebra::{Matrix3, Matrix6, SMatrix, SVector};

use crate::error::{Error, Result};
use crate::quadrature::validate_interfaces;

/// Index pairs of the Voigt components, in storage order.
pub const VOIGT_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

/// Voigt position of the symmetric index pair `(i, j)`.
#[inline]
pub const fn voigt_index(i: usize, j: usize) -> usize {
    const MAP: [[usize; 3]; 3] = [[0, 3, 4], [3, 1, 5], [4, 5, 2]];
    MAP[i][j]
}

/// Nine engineering constants of an orthotropic material in its own axes.
///
/// Axis 1 is the fiber direction, axis 3 the thickness direction. Poisson ratios
/// follow `nu_ij = -eps_j / eps_i` under uniaxial stress along `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthotropicConstants {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub g12: f64,
    pub g13: f64,
    pub g23: f64,
    pub nu12: f64,
    pub nu13: f64,
    pub nu23: f64,
}

impl OrthotropicConstants {
    pub fn isotropic(e: f64, nu: f64) -> Self {
        let g = e / (2.0 * (1.0 + nu));
        Self { e1: e, e2: e, e3: e, g12: g, g13: g, g23: g, nu12: nu, nu13: nu, nu23: nu }
    }

    /// The unidirectional ply of the classical Pagano plate problem (GPa).
    pub fn pagano() -> Self {
        Self { e1: 25.0, e2: 1.0, e3: 1.0, g12: 0.2, g13: 0.2, g23: 0.5, nu12: 0.25, nu13: 0.25, nu23: 0.25 }
    }

    /// Compliance matrix in Voigt order, mapping stresses to engineering strains.
    pub fn compliance(&self) -> Matrix6<f64> {
        let mut s = Matrix6::zeros();
        s[(0, 0)] = 1.0 / self.e1;
        s[(1, 1)] = 1.0 / self.e2;
        s[(2, 2)] = 1.0 / self.e3;
        s[(0, 1)] = -self.nu12 / self.e1;
        s[(0, 2)] = -self.nu13 / self.e1;
        s[(1, 2)] = -self.nu23 / self.e2;
        s[(1, 0)] = s[(0, 1)];
        s[(2, 0)] = s[(0, 2)];
        s[(2, 1)] = s[(1, 2)];
        s[(3, 3)] = 1.0 / self.g12;
        s[(4, 4)] = 1.0 / self.g13;
        s[(5, 5)] = 1.0 / self.g23;
        s
    }

    /// Recovers the constants from a compliance matrix in material axes.
    pub fn from_compliance(s: &Matrix6<f64>) -> Self {
        let e1 = 1.0 / s[(0, 0)];
        let e2 = 1.0 / s[(1, 1)];
        Self {
            e1,
            e2,
            e3: 1.0 / s[(2, 2)],
            g12: 1.0 / s[(3, 3)],
            g13: 1.0 / s[(4, 4)],
            g23: 1.0 / s[(5, 5)],
            nu12: -s[(0, 1)] * e1,
            nu13: -s[(0, 2)] * e1,
            nu23: -s[(1, 2)] * e2,
        }
    }

    fn validate(&self) -> Result<()> {
        let all = [self.e1, self.e2, self.e3, self.g12, self.g13, self.g23, self.nu12, self.nu13, self.nu23];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMaterial("non-finite constant".into()));
        }
        if [self.e1, self.e2, self.e3, self.g12, self.g13, self.g23].iter().any(|&x| x <= 0.0) {
            return Err(Error::InvalidMaterial("moduli must be positive".into()));
        }
        Ok(())
    }
}

/// Symmetric 6x6 material matrix in `(11, 22, 33, 12, 13, 23)` order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoigtMatrix(pub Matrix6<f64>);

impl VoigtMatrix {
    pub fn as_matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    pub fn to_tensor(&self) -> ElasticityTensor {
        ElasticityTensor::from_fn(|i, j, k, l| self.0[(voigt_index(i, j), voigt_index(k, l))])
    }

    pub fn from_tensor(c: &ElasticityTensor) -> Self {
        Self(Matrix6::from_fn(|r, s| {
            let (i, j) = VOIGT_PAIRS[r];
            let (k, l) = VOIGT_PAIRS[s];
            c.get(i, j, k, l)
        }))
    }

    /// Row-major copy for inner loops.
    pub fn to_array(&self) -> [[f64; 6]; 6] {
        let mut out = [[0.0; 6]; 6];
        for (r, row) in out.iter_mut().enumerate() {
            for (s, v) in row.iter_mut().enumerate() {
                *v = self.0[(r, s)];
            }
        }
        out
    }

    pub fn is_positive_definite(&self) -> bool {
        self.0.cholesky().is_some()
    }
}

/// Dense fourth-order elasticity tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticityTensor {
    c: [f64; 81],
}

impl ElasticityTensor {
    #[inline]
    const fn offset(i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * 3 + j) * 3 + k) * 3 + l
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut c = [0.0; 81];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        c[Self::offset(i, j, k, l)] = f(i, j, k, l);
                    }
                }
            }
        }
        Self { c }
    }

    /// `lambda I (x) I + 2 mu I_sym`.
    pub fn isotropic(lambda: f64, mu: f64) -> Self {
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        Self::from_fn(|i, j, k, l| lambda * d(i, j) * d(k, l) + mu * (d(i, k) * d(j, l) + d(i, l) * d(j, k)))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.c[Self::offset(i, j, k, l)]
    }

    /// `C'_ijkl = R_ia R_jb R_kc R_ld C_abcd`.
    pub fn rotated(&self, r: &Matrix3<f64>) -> Self {
        // One index at a time keeps this at 4 * 3^5 products.
        let mut cur = self.c;
        for slot in 0..4 {
            let mut next = [0.0; 81];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        for l in 0..3 {
                            let idx = [i, j, k, l];
                            let mut acc = 0.0;
                            for a in 0..3 {
                                let mut src = idx;
                                src[slot] = a;
                                acc += r[(idx[slot], a)] * cur[Self::offset(src[0], src[1], src[2], src[3])];
                            }
                            next[Self::offset(i, j, k, l)] = acc;
                        }
                    }
                }
            }
            cur = next;
        }
        Self { c: cur }
    }

    /// `a : C : b` for second-order tensors.
    pub fn double_contract(&self, a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        acc += a[(i, j)] * self.get(i, j, k, l) * b[(k, l)];
                    }
                }
            }
        }
        acc
    }

    /// Bracket contraction `C{b, d}` with entries `sum_jl b_j C_ijkl d_l`, so that
    /// `a . (C{b, d} c) = (a (x) b) : C : (c (x) d)`.
    pub fn bracket(&self, b: &nalgebra::Vector3<f64>, d: &nalgebra::Vector3<f64>) -> Matrix3<f64> {
        Matrix3::from_fn(|i, k| {
            let mut acc = 0.0;
            for j in 0..3 {
                for l in 0..3 {
                    acc += b[j] * self.get(i, j, k, l) * d[l];
                }
            }
            acc
        })
    }
}

/// Rotation by `theta` about the thickness axis.
pub fn rotation_about_thickness(theta: f64) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Material matrix of `c` in its own axes.
pub fn voigt_from_constants(c: &OrthotropicConstants) -> Result<VoigtMatrix> {
    c.validate()?;
    let compliance = c.compliance();
    if compliance.cholesky().is_none() {
        return Err(Error::InvalidMaterial("compliance is not positive definite".into()));
    }
    let d = compliance
        .try_inverse()
        .ok_or_else(|| Error::InvalidMaterial("singular compliance".into()))?;
    // Restore exact symmetry lost in the inversion.
    let d = VoigtMatrix((d + d.transpose()) * 0.5);
    if !d.is_positive_definite() {
        return Err(Error::InvalidMaterial("material matrix is not positive definite".into()));
    }
    Ok(d)
}

/// Material matrix rotated by `theta` about the thickness axis.
pub fn rotate_inplane(d: &VoigtMatrix, theta: f64) -> VoigtMatrix {
    if theta == 0.0 {
        return *d;
    }
    let r = VoigtMatrix::from_tensor(&d.to_tensor().rotated(&rotation_about_thickness(theta)));
    VoigtMatrix((r.0 + r.0.transpose()) * 0.5)
}

/// `D(theta) = A1 + c^4 A2 + c^3 s A3 + c^2 A4 + c s A5`, with `c = cos(theta)`, `s = sin(theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleDecomposition {
    pub terms: [VoigtMatrix; 5],
}

impl AngleDecomposition {
    pub fn weights(theta: f64) -> [f64; 5] {
        let (s, c) = theta.sin_cos();
        [1.0, c.powi(4), c.powi(3) * s, c * c, c * s]
    }

    pub fn reconstruct(&self, theta: f64) -> VoigtMatrix {
        let w = Self::weights(theta);
        VoigtMatrix(self.terms.iter().zip(w).fold(Matrix6::zeros(), |acc, (t, w)| acc + t.0 * w))
    }
}

const SAMPLE_ANGLE_SETS: [[f64; 5]; 2] = [
    [0.0, 0.3, 0.7, 1.1, 1.9],
    [0.1, 0.5, 0.9, 1.4, 2.6],
];

/// Splits the rotated material matrix of `c` into five angle-independent terms.
///
/// The terms are fitted by sampling [`rotate_inplane`] at five angles and solving
/// the 5x5 interpolation system entrywise.
pub fn angle_decomposition(c: &OrthotropicConstants) -> Result<AngleDecomposition> {
    let d = voigt_from_constants(c)?;
    for angles in SAMPLE_ANGLE_SETS {
        let system = SMatrix::<f64, 5, 5>::from_fn(|r, k| AngleDecomposition::weights(angles[r])[k]);
        let lu = system.lu();
        // Reject nearly singular samplings before trusting the solve.
        let det = lu.determinant();
        if det.is_nan() || det.abs() <= 1e-8 {
            continue;
        }
        let samples: Vec<Matrix6<f64>> = angles.iter().map(|&a| rotate_inplane(&d, a).0).collect();
        let mut terms = [VoigtMatrix(Matrix6::zeros()); 5];
        for r in 0..6 {
            for s in 0..6 {
                let rhs = SVector::<f64, 5>::from_fn(|k, _| samples[k][(r, s)]);
                let sol = lu
                    .solve(&rhs)
                    .ok_or_else(|| Error::Singular("angle sampling system".into()))?;
                for k in 0..5 {
                    terms[k].0[(r, s)] = sol[k];
                }
            }
        }
        return Ok(AngleDecomposition { terms });
    }
    Err(Error::Singular("no nonsingular angle sampling found".into()))
}

/// A material with an in-plane orientation, as stacked in a [`Layup`].
///
/// `config_id` is the position of the configuration in its layup; equality
/// compares only the constants and the angle.
#[derive(Debug, Clone)]
pub struct MaterialConfig {
    pub constants: OrthotropicConstants,
    /// In-plane rotation about the thickness axis, radians.
    pub angle: f64,
    pub config_id: usize,
    voigt: VoigtMatrix,
}

impl PartialEq for MaterialConfig {
    fn eq(&self, other: &Self) -> bool {
        self.constants == other.constants && self.angle == other.angle
    }
}

impl MaterialConfig {
    pub fn new(constants: OrthotropicConstants, angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::InvalidMaterial("non-finite angle".into()));
        }
        let voigt = rotate_inplane(&voigt_from_constants(&constants)?, angle);
        Ok(Self { constants, angle, config_id: 0, voigt })
    }

    /// Rotated material matrix.
    pub fn voigt(&self) -> &VoigtMatrix {
        &self.voigt
    }

    pub fn tensor(&self) -> ElasticityTensor {
        self.voigt.to_tensor()
    }
}

/// Stack of `m` layers over the parametric thickness `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layup {
    interfaces: Vec<f64>,
    configs: Vec<MaterialConfig>,
    layer_configs: Vec<usize>,
}

impl Layup {
    /// Builds a layup from interfaces `0 = t_0 < ... < t_m = 1` and one
    /// `(constants, angle)` per layer. Repeated configurations share one id.
    pub fn new(interfaces: Vec<f64>, layers: &[(OrthotropicConstants, f64)]) -> Result<Self> {
        validate_interfaces(&interfaces)?;
        if layers.len() != interfaces.len() - 1 {
            return Err(Error::InvalidLayup(format!(
                "{} layers for {} interfaces",
                layers.len(),
                interfaces.len()
            )));
        }
        let mut configs: Vec<MaterialConfig> = Vec::new();
        let mut layer_configs = Vec::with_capacity(layers.len());
        for &(constants, angle) in layers {
            let id = match configs.iter().position(|c| c.constants == constants && c.angle == angle) {
                Some(id) => id,
                None => {
                    let mut cfg = MaterialConfig::new(constants, angle)?;
                    cfg.config_id = configs.len();
                    configs.push(cfg);
                    configs.len() - 1
                }
            };
            layer_configs.push(id);
        }
        Ok(Self { interfaces, configs, layer_configs })
    }

    /// Layers of equal parametric thickness.
    pub fn equal_thickness(layers: &[(OrthotropicConstants, f64)]) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidLayup("at least one layer is required".into()));
        }
        let m = layers.len();
        let mut interfaces: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
        interfaces[m] = 1.0;
        Self::new(interfaces, layers)
    }

    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    /// Number of layers `m`.
    pub fn num_layers(&self) -> usize {
        self.layer_configs.len()
    }

    /// Number of distinct configurations.
    pub fn num_distinct(&self) -> usize {
        self.configs.len()
    }

    pub fn configs(&self) -> &[MaterialConfig] {
        &self.configs
    }

    pub fn layer_config_ids(&self) -> &[usize] {
        &self.layer_configs
    }

    pub fn layer_config(&self, layer: usize) -> &MaterialConfig {
        &self.configs[self.layer_configs[layer]]
    }

    pub fn layer_interval(&self, layer: usize) -> (f64, f64) {
        (self.interfaces[layer], self.interfaces[layer + 1])
    }

    /// Layer whose half-open interval `[t_{l}, t_{l+1})` contains `xi3`; `xi3 = 1` is in the last layer.
    pub fn layer_at(&self, xi3: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&xi3) {
            return Err(Error::OutOfDomain(xi3));
        }
        let upper = self.interfaces.partition_point(|&t| t <= xi3);
        Ok((upper - 1).min(self.num_layers() - 1))
    }

    pub fn material_at(&self, xi3: f64) -> Result<&MaterialConfig> {
        Ok(self.layer_config(self.layer_at(xi3)?))
    }
}

/// Configuration of the layer containing `xi3`.
pub fn material_at(layup: &Layup, xi3: f64) -> Result<&MaterialConfig> {
    layup.material_at(xi3)
}
