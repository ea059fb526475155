//! Split assembly without Voigt matrices. The material enters through the
//! contractions `C{b, d}_ik = sum_jl b_j C_ijkl d_l`, which for an orthotropic
//! material have a closed form in the fibre directions.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};

use crate::element::InPlanePoint;
use crate::error::{Error, Result};
use crate::fast::{combine, compute_inplane_operators_with, compute_thickness_operators, InPlaneKernel, InPlaneOperators};
use crate::geometry::GeometryFrame;
use crate::materials::{voigt_from_constants, ElasticityTensor, MaterialConfig, OrthotropicConstants};
use crate::problem::{AssemblyStats, ProblemSetup};
use crate::sparse::StiffnessMatrix;

/// Coefficients of the orthotropic contraction formula: `lambda`, `mu` and
/// `alpha_1..alpha_7`, defined in the material frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthotropicCoefficients {
    pub lambda: f64,
    pub mu: f64,
    pub alpha: [f64; 7],
}

const FIT_ENTRIES: [(usize, usize, usize, usize); 9] = [
    (0, 0, 0, 0),
    (1, 1, 1, 1),
    (2, 2, 2, 2),
    (0, 0, 1, 1),
    (0, 0, 2, 2),
    (1, 1, 2, 2),
    (0, 1, 0, 1),
    (0, 2, 0, 2),
    (1, 2, 1, 2),
];

impl OrthotropicCoefficients {
    /// Matches the nine independent entries of the unrotated stiffness tensor.
    pub fn from_constants(c: &OrthotropicConstants) -> Result<Self> {
        let target = voigt_from_constants(c)?.to_tensor();
        let (a1, a2) = (Vector3::x(), Vector3::y());
        let mut system = SMatrix::<f64, 9, 9>::zeros();
        for k in 0..9 {
            let mut coeffs = [0.0; 9];
            coeffs[k] = 1.0;
            let basis = Self::from_array(coeffs);
            for (r, &(i, j, kk, l)) in FIT_ENTRIES.iter().enumerate() {
                // C_ijkl = C{e_j, e_l}_ik
                system[(r, k)] = basis.contraction(a1, a2, j, l)[(i, kk)];
            }
        }
        let rhs = SVector::<f64, 9>::from_fn(|r, _| {
            let (i, j, k, l) = FIT_ENTRIES[r];
            target.get(i, j, k, l)
        });
        let sol = system
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singular("orthotropic coefficient fit".into()))?;
        Ok(Self::from_array(std::array::from_fn(|k| sol[k])))
    }

    fn from_array(c: [f64; 9]) -> Self {
        Self { lambda: c[0], mu: c[1], alpha: [c[2], c[3], c[4], c[5], c[6], c[7], c[8]] }
    }

    /// `C{e_i, e_j}` for fibre directions `a1`, `a2`.
    pub fn contraction(&self, a1: Vector3<f64>, a2: Vector3<f64>, i: usize, j: usize) -> Matrix3<f64> {
        let e = |k: usize| Vector3::ith(k, 1.0);
        let (ei, ej) = (e(i), e(j));
        let delta = if i == j { 1.0 } else { 0.0 };
        let m1 = a1 * a1.transpose();
        let m2 = a2 * a2.transpose();
        let (b1i, b1j) = (a1 * a1[i], a1 * a1[j]);
        let (b2i, b2j) = (a2 * a2[i], a2 * a2[j]);
        let id = Matrix3::identity();
        let [a_1, a_2, a_3, a_4, a_5, a_6, a_7] = self.alpha;
        let mixed = |m: &Matrix3<f64>, bi: &Vector3<f64>, bj: &Vector3<f64>| {
            id * ei.dot(bj) + m * delta + ej * bi.transpose() + bj * ei.transpose()
        };
        ei * ej.transpose() * self.lambda
            + (id * delta + ej * ei.transpose()) * self.mu
            + b1i * b1j.transpose() * a_1
            + b2i * b2j.transpose() * a_2
            + mixed(&m1, &b1i, &b1j) * a_3
            + mixed(&m2, &b2i, &b2j) * a_4
            + (ei * b1j.transpose() + b1i * ej.transpose()) * a_5
            + (ei * b2j.transpose() + b2i * ej.transpose()) * a_6
            + (b1i * b2j.transpose() + b2i * b1j.transpose()) * a_7
    }
}

/// `C{e_i, e_j}` of an isotropic material.
pub fn contraction_isotropic(lambda: f64, mu: f64, i: usize, j: usize) -> Matrix3<f64> {
    let mut out = Matrix3::zeros();
    out[(i, j)] += lambda;
    out[(j, i)] += mu;
    if i == j {
        out += Matrix3::identity() * mu;
    }
    out
}

/// `C{e_i, e_j}` of a rotated orthotropic configuration.
pub fn contraction_orthotropic(config: &MaterialConfig, i: usize, j: usize) -> Result<Matrix3<f64>> {
    Ok(ContractionTable::orthotropic(config)?.get(i, j))
}

/// The nine contractions `C{e_i, e_j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionTable {
    entries: [Matrix3<f64>; 9],
}

impl ContractionTable {
    pub fn orthotropic(config: &MaterialConfig) -> Result<Self> {
        let coeffs = OrthotropicCoefficients::from_constants(&config.constants)?;
        let (s, c) = config.angle.sin_cos();
        let a1 = Vector3::new(c, s, 0.0);
        let a2 = Vector3::new(-s, c, 0.0);
        Ok(Self { entries: std::array::from_fn(|k| coeffs.contraction(a1, a2, k / 3, k % 3)) })
    }

    pub fn isotropic(lambda: f64, mu: f64) -> Self {
        Self { entries: std::array::from_fn(|k| contraction_isotropic(lambda, mu, k / 3, k % 3)) }
    }

    pub fn from_tensor(c: &ElasticityTensor) -> Self {
        Self {
            entries: std::array::from_fn(|k| c.bracket(&Vector3::ith(k / 3, 1.0), &Vector3::ith(k % 3, 1.0))),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Matrix3<f64> {
        self.entries[3 * i + j]
    }

    /// `C{b, d}` by bilinearity.
    pub fn bracket(&self, b: &Vector3<f64>, d: &Vector3<f64>) -> Matrix3<f64> {
        let mut out = Matrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                out += self.entries[3 * i + j] * (b[i] * d[j]);
            }
        }
        out
    }
}

/// Contractions between contravariant vectors, `C~_ab = C{g^a, g^b}`.
pub fn pullback_contraction_table(table: &ContractionTable, frame: &GeometryFrame) -> ContractionTable {
    let g: [Vector3<f64>; 3] = std::array::from_fn(|k| frame.contravariant(k));
    ContractionTable { entries: std::array::from_fn(|k| table.bracket(&g[k / 3], &g[k % 3])) }
}

struct ContractionKernel(ContractionTable);

impl InPlaneKernel for ContractionKernel {
    fn accumulate(&self, qp: &InPlanePoint, local: &mut [Vec<[f64; 9]>; 4]) {
        let ct = pullback_contraction_table(&self.0, &qp.frame);
        let c: [Matrix3<f64>; 9] = std::array::from_fn(|k| ct.entries[k] * qp.jxw);
        let nsl = qp.values.len();
        let add = |dst: &mut [f64; 9], m: &Matrix3<f64>, w: f64| {
            for r in 0..3 {
                for s in 0..3 {
                    dst[3 * r + s] += w * m[(r, s)];
                }
            }
        };
        for i in 0..nsl {
            let (ui, vi, si) = (qp.du[i], qp.dv[i], qp.values[i]);
            for j in 0..nsl {
                let (uj, vj, sj) = (qp.du[j], qp.dv[j], qp.values[j]);
                let k = i * nsl + j;
                let p11 = &mut local[0][k];
                add(p11, &c[0], ui * uj);
                add(p11, &c[1], ui * vj);
                add(p11, &c[3], vi * uj);
                add(p11, &c[4], vi * vj);
                let p12 = &mut local[1][k];
                add(p12, &c[2], ui * sj);
                add(p12, &c[5], vi * sj);
                let p21 = &mut local[2][k];
                add(p21, &c[6], si * uj);
                add(p21, &c[7], si * vj);
                add(&mut local[3][k], &c[8], si * sj);
            }
        }
    }
}

/// In-plane operators of every distinct configuration, from contraction tables.
pub fn compute_inplane_operators_voigt_free(setup: &ProblemSetup) -> Result<(Vec<InPlaneOperators>, AssemblyStats)> {
    let kernels = setup
        .layup
        .configs()
        .iter()
        .map(|c| ContractionTable::orthotropic(c).map(ContractionKernel))
        .collect::<Result<Vec<_>>>()?;
    compute_inplane_operators_with(setup, &kernels)
}

/// Assembles the stiffness matrix with the split method and contraction tables.
pub fn assemble_fast_voigt_free(setup: &ProblemSetup) -> Result<StiffnessMatrix> {
    Ok(assemble_fast_voigt_free_with_stats(setup)?.0)
}

pub fn assemble_fast_voigt_free_with_stats(setup: &ProblemSetup) -> Result<(StiffnessMatrix, AssemblyStats)> {
    let (ops, stats) = compute_inplane_operators_voigt_free(setup)?;
    let thickness = compute_thickness_operators(setup.space.thickness(), &setup.layup, setup.quadrature.thickness)?;
    let reduced = thickness.reduced(&setup.layup);
    let terms: Vec<_> = ops.iter().zip(&reduced).collect();
    Ok((combine(&setup.space, &terms)?, stats))
}
