//! Split assembler. The stiffness matrix is combined from in-plane operators
//! `P_ab` (one set per material configuration) and thickness operators `Q_ab`
//! (one set per layer, summed over layers that share a configuration).

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::element::{add_bt_db, build_inplane_element, d_times_b, inplane_element_spans, InPlanePoint};
use crate::error::{Error, Result};
use crate::materials::{angle_decomposition, AngleDecomposition, Layup};
use crate::problem::{AssemblyStats, ProblemSetup};
use crate::quadrature::layerwise_thickness_rule;
use crate::sparse::{Block3, SparseMatrixBuilder, StiffnessMatrix};
use crate::splines::{KnotVector, TensorProductSpace};

/// The four in-plane operator blocks. `P12` couples the gradient part of the
/// test function with the thickness-derivative part of the trial function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorPair {
    P11,
    P12,
    P21,
    P22,
}

impl OperatorPair {
    pub const ALL: [OperatorPair; 4] = [Self::P11, Self::P12, Self::P21, Self::P22];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Index of the thickness operator this block is paired with:
    /// `P11 Q11 + P12 Q21 + P21 Q12 + P22 Q22`.
    pub fn thickness_partner(self) -> usize {
        [0, 2, 1, 3][self.index()]
    }
}

/// Sparsity pattern of the in-plane operators: pairs of in-plane functions
/// sharing at least one element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InPlanePattern {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
}

impl InPlanePattern {
    pub fn from_space(space: &TensorProductSpace) -> Self {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); space.n_s()];
        let (pu, pv) = (space.inplane_u().degree(), space.inplane_v().degree());
        for (su, sv) in inplane_element_spans(space) {
            let functions: Vec<usize> = (0..=pv)
                .flat_map(|b| (0..=pu).map(move |a| (a, b)))
                .map(|(a, b)| space.inplane_index(su.first_active + a, sv.first_active + b))
                .collect();
            for &i in &functions {
                rows[i].extend_from_slice(&functions);
            }
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        for mut row in rows {
            row.sort_unstable();
            row.dedup();
            cols.extend(row);
            row_ptr.push(cols.len());
        }
        Self { row_ptr, cols }
    }

    pub fn num_rows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Storage position of `(i, j)`, if it is in the pattern.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_ptr[i];
        self.row(i).binary_search(&j).ok().map(|k| start + k)
    }
}

/// In-plane operators of one material matrix, stored as 3x3 blocks on a shared pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct InPlaneOperators {
    pub pattern: Arc<InPlanePattern>,
    pub blocks: [Vec<Block3>; 4],
}

impl InPlaneOperators {
    fn zeros(pattern: Arc<InPlanePattern>) -> Self {
        let n = pattern.nnz();
        Self { pattern, blocks: std::array::from_fn(|_| vec![[[0.0; 3]; 3]; n]) }
    }

    /// Block `(i_s, j_s)` of `pair`; zero outside the pattern.
    pub fn block(&self, pair: OperatorPair, i_s: usize, j_s: usize) -> Block3 {
        self.pattern
            .position(i_s, j_s)
            .map_or([[0.0; 3]; 3], |k| self.blocks[pair.index()][k])
    }
}

/// Point-level integrand of the in-plane operators.
pub(crate) trait InPlaneKernel: Sync {
    /// Adds the contribution of one quadrature point. `local[pair]` holds
    /// `nsl * nsl` row-major 3x3 blocks.
    fn accumulate(&self, qp: &InPlanePoint, local: &mut [Vec<[f64; 9]>; 4]);
}

/// Voigt kernel: `P_ab = int B_a^T D B_b |det DF|`.
pub(crate) struct VoigtKernel(pub [[f64; 6]; 6]);

impl InPlaneKernel for VoigtKernel {
    fn accumulate(&self, qp: &InPlanePoint, local: &mut [Vec<[f64; 9]>; 4]) {
        let nsl = qp.values.len();
        let g3 = qp.frame.contravariant(2);
        let mut grads = Vec::with_capacity(2 * nsl);
        for s in 0..nsl {
            grads.push(qp.frame.pullback([qp.du[s], qp.dv[s], 0.0]));
        }
        for s in 0..nsl {
            let v = qp.values[s];
            grads.push([v * g3[0], v * g3[1], v * g3[2]]);
        }
        let dbs: Vec<[[f64; 3]; 6]> = grads.iter().map(|g| d_times_b(&self.0, *g, qp.jxw)).collect();
        for pair in OperatorPair::ALL {
            let (a, b) = match pair {
                OperatorPair::P11 => (0, 0),
                OperatorPair::P12 => (0, 1),
                OperatorPair::P21 => (1, 0),
                OperatorPair::P22 => (1, 1),
            };
            let out = &mut local[pair.index()];
            for i in 0..nsl {
                let gi = grads[a * nsl + i];
                for j in 0..nsl {
                    add_bt_db(&mut out[i * nsl + j], 3, gi, &dbs[b * nsl + j]);
                }
            }
        }
    }
}

/// Per-element output: active functions, local blocks per kernel, point visits.
type ElementBlocks = (Vec<usize>, Vec<[Vec<[f64; 9]>; 4]>, u64);

/// Element loop shared by all in-plane operator computations. Elements are
/// processed in fixed order so results do not depend on the thread count.
pub(crate) fn compute_inplane_operators_with<K: InPlaneKernel>(
    setup: &ProblemSetup,
    kernels: &[K],
) -> Result<(Vec<InPlaneOperators>, AssemblyStats)> {
    let space = &setup.space;
    let pattern = Arc::new(InPlanePattern::from_space(space));
    let mut ops: Vec<InPlaneOperators> = kernels.iter().map(|_| InPlaneOperators::zeros(pattern.clone())).collect();
    let elements = inplane_element_spans(space);
    let chunk = rayon::current_num_threads().max(1) * 4;
    let mut visits = 0u64;
    for group in elements.chunks(chunk) {
        let locals: Vec<ElementBlocks> = group
            .par_iter()
            .map(|&spans| {
                let el = build_inplane_element(space, &setup.geometry, &setup.quadrature, spans)?;
                let nsl = el.functions.len();
                let mut per_kernel = Vec::with_capacity(kernels.len());
                for kernel in kernels {
                    let mut local: [Vec<[f64; 9]>; 4] = std::array::from_fn(|_| vec![[0.0; 9]; nsl * nsl]);
                    for qp in &el.points {
                        kernel.accumulate(qp, &mut local);
                    }
                    per_kernel.push(local);
                }
                let n = (el.points.len() * kernels.len()) as u64;
                Ok((el.functions, per_kernel, n))
            })
            .collect::<Result<_>>()?;
        for (functions, per_kernel, n) in locals {
            visits += n;
            let nsl = functions.len();
            let positions: Vec<usize> = functions
                .iter()
                .flat_map(|&i| functions.iter().map(move |&j| (i, j)))
                .map(|(i, j)| pattern.position(i, j).expect("element pairs are in the pattern"))
                .collect();
            for (op, local) in ops.iter_mut().zip(per_kernel) {
                for (dst, src) in op.blocks.iter_mut().zip(local.iter()) {
                    for (k, &pos) in positions.iter().enumerate().take(nsl * nsl) {
                        let blk = &mut dst[pos];
                        for r in 0..3 {
                            for c in 0..3 {
                                blk[r][c] += src[k][3 * r + c];
                            }
                        }
                    }
                }
            }
        }
    }
    let stats = AssemblyStats {
        inplane_elements: elements.len(),
        quadrature_points: visits,
        inplane_operator_computations: kernels.len(),
    };
    Ok((ops, stats))
}

/// In-plane operators of a single material matrix.
pub fn compute_inplane_operators(setup: &ProblemSetup, d: &[[f64; 6]; 6]) -> Result<InPlaneOperators> {
    Ok(compute_inplane_operators_with(setup, &[VoigtKernel(*d)])?.0.remove(0))
}

/// In-plane operators of several material matrices in one element pass.
pub fn compute_inplane_operators_batch(
    setup: &ProblemSetup,
    materials: &[[[f64; 6]; 6]],
) -> Result<(Vec<InPlaneOperators>, AssemblyStats)> {
    let kernels: Vec<VoigtKernel> = materials.iter().map(|d| VoigtKernel(*d)).collect();
    compute_inplane_operators_with(setup, &kernels)
}

/// Thickness operators of every layer: `[Q11, Q12, Q21, Q22]` with
/// `Q11 = int T_i T_j`, `Q12 = int T_i' T_j`, `Q21 = int T_i T_j'`, `Q22 = int T_i' T_j'`
/// over the layer interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ThicknessOperators {
    pub layers: Vec<[DMatrix<f64>; 4]>,
}

impl ThicknessOperators {
    /// Sums the layer operators with per-layer weights, grouped by `group_of(layer)`.
    pub fn weighted_sums(
        &self,
        num_groups: usize,
        group_of: impl Fn(usize) -> usize,
        weight_of: impl Fn(usize) -> f64,
    ) -> Vec<[DMatrix<f64>; 4]> {
        let n = self.layers.first().map_or(0, |q| q[0].nrows());
        let mut out: Vec<[DMatrix<f64>; 4]> =
            (0..num_groups).map(|_| std::array::from_fn(|_| DMatrix::zeros(n, n))).collect();
        for (l, q) in self.layers.iter().enumerate() {
            let w = weight_of(l);
            for (dst, src) in out[group_of(l)].iter_mut().zip(q) {
                *dst += src * w;
            }
        }
        out
    }

    /// Operators summed over the layers of each distinct configuration.
    pub fn reduced(&self, layup: &Layup) -> Vec<[DMatrix<f64>; 4]> {
        let ids = layup.layer_config_ids();
        self.weighted_sums(layup.num_distinct(), |l| ids[l], |_| 1.0)
    }
}

/// Integrates the thickness operators layer by layer with `n_per_cell`
/// Gauss points on each span-layer intersection.
pub fn compute_thickness_operators(kv: &KnotVector, layup: &Layup, n_per_cell: usize) -> Result<ThicknessOperators> {
    let spans = kv.element_spans();
    let intervals: Vec<(f64, f64)> = spans.iter().map(|s| (s.start, s.end)).collect();
    let cells = layerwise_thickness_rule(&intervals, layup.interfaces(), n_per_cell)?;
    let n = kv.num_basis();
    let p = kv.degree();
    let mut layers: Vec<[DMatrix<f64>; 4]> =
        (0..layup.num_layers()).map(|_| std::array::from_fn(|_| DMatrix::zeros(n, n))).collect();
    for cell in &cells {
        let span = &spans[cell.span];
        let q = &mut layers[cell.layer];
        for (x, w) in cell.rule.iter() {
            let e = kv.eval_in_span(span.knot_index, x);
            for a in 0..=p {
                for b in 0..=p {
                    let (i, j) = (span.first_active + a, span.first_active + b);
                    q[0][(i, j)] += w * e.values[a] * e.values[b];
                    q[1][(i, j)] += w * e.derivs[a] * e.values[b];
                    q[2][(i, j)] += w * e.values[a] * e.derivs[b];
                    q[3][(i, j)] += w * e.derivs[a] * e.derivs[b];
                }
            }
        }
    }
    Ok(ThicknessOperators { layers })
}

/// `K = sum_terms sum_pairs P_pair (x) Q_partner`, with thickness pairs of
/// disjoint support skipped. Terms are accumulated in the given order.
pub(crate) fn combine(
    space: &TensorProductSpace,
    terms: &[(&InPlaneOperators, &[DMatrix<f64>; 4])],
) -> Result<StiffnessMatrix> {
    let Some((first, _)) = terms.first() else {
        return Err(Error::EmptyBuilder);
    };
    let pattern = first.pattern.clone();
    let kt = space.thickness();
    let (ns, nt) = (space.n_s(), space.n_t());
    let t_pairs: Vec<(usize, usize)> = (0..nt)
        .flat_map(|i| (0..nt).map(move |j| (i, j)))
        .filter(|&(i, j)| kt.supports_overlap(i, j))
        .collect();
    let parts: Vec<SparseMatrixBuilder> = (0..ns)
        .into_par_iter()
        .map(|is| {
            let mut builder = SparseMatrixBuilder::new(space.dim());
            let start = pattern.row_ptr[is];
            builder.reserve(9 * t_pairs.len() * pattern.row(is).len());
            for (k, &js) in pattern.row(is).iter().enumerate() {
                let pos = start + k;
                for &(it, jt) in &t_pairs {
                    let mut blk = [[0.0; 3]; 3];
                    for (ops, q) in terms {
                        for pair in OperatorPair::ALL {
                            let w = q[pair.thickness_partner()][(it, jt)];
                            let p = &ops.blocks[pair.index()][pos];
                            for r in 0..3 {
                                for c in 0..3 {
                                    blk[r][c] += w * p[r][c];
                                }
                            }
                        }
                    }
                    builder.add_block(it * ns + is, jt * ns + js, &blk)?;
                }
            }
            Ok(builder)
        })
        .collect::<Result<_>>()?;
    let mut builder = SparseMatrixBuilder::new(space.dim());
    builder.reserve(parts.iter().map(SparseMatrixBuilder::len).sum());
    for mut part in parts {
        builder.append(&mut part)?;
    }
    builder.finalize()
}

/// Options of the split assembler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FastOptions {
    /// Sum thickness operators over layers sharing a configuration, so in-plane
    /// work scales with the number of distinct configurations. When off, every
    /// layer gets its own in-plane operators.
    pub reduce_layers: bool,
    /// Compute five angle-independent operator sets per distinct set of
    /// material constants and fold the angles into the thickness weights.
    pub decompose_angles: bool,
}

impl Default for FastOptions {
    fn default() -> Self {
        Self { reduce_layers: true, decompose_angles: false }
    }
}

/// Assembles the stiffness matrix with the split method.
pub fn assemble_fast(setup: &ProblemSetup) -> Result<StiffnessMatrix> {
    Ok(assemble_fast_with(setup, &FastOptions::default())?.0)
}

/// As [`assemble_fast`] with explicit options, also returning work counters.
pub fn assemble_fast_with(setup: &ProblemSetup, options: &FastOptions) -> Result<(StiffnessMatrix, AssemblyStats)> {
    let layup = &setup.layup;
    let thickness = compute_thickness_operators(setup.space.thickness(), layup, setup.quadrature.thickness)?;
    let ids = layup.layer_config_ids();

    if options.decompose_angles {
        let mut constants = Vec::new();
        let mut group = Vec::with_capacity(layup.num_layers());
        for l in 0..layup.num_layers() {
            let c = layup.layer_config(l).constants;
            let g = match constants.iter().position(|x| *x == c) {
                Some(g) => g,
                None => {
                    constants.push(c);
                    constants.len() - 1
                }
            };
            group.push(g);
        }
        let mut materials = Vec::with_capacity(5 * constants.len());
        for c in &constants {
            let dec = angle_decomposition(c)?;
            materials.extend(dec.terms.iter().map(|t| t.to_array()));
        }
        let (ops, stats) = compute_inplane_operators_batch(setup, &materials)?;
        let mut weights: Vec<[DMatrix<f64>; 4]> = Vec::with_capacity(materials.len());
        for g in 0..constants.len() {
            for k in 0..5 {
                let sums = thickness.weighted_sums(
                    1,
                    |_| 0,
                    |l| if group[l] == g { AngleDecomposition::weights(layup.layer_config(l).angle)[k] } else { 0.0 },
                );
                weights.extend(sums);
            }
        }
        let terms: Vec<_> = ops.iter().zip(&weights).collect();
        return Ok((combine(&setup.space, &terms)?, stats));
    }

    if options.reduce_layers {
        let materials: Vec<_> = layup.configs().iter().map(|c| c.voigt().to_array()).collect();
        let (ops, stats) = compute_inplane_operators_batch(setup, &materials)?;
        let reduced = thickness.reduced(layup);
        let terms: Vec<_> = ops.iter().zip(&reduced).collect();
        Ok((combine(&setup.space, &terms)?, stats))
    } else {
        let materials: Vec<_> = ids.iter().map(|&c| layup.configs()[c].voigt().to_array()).collect();
        let (ops, stats) = compute_inplane_operators_batch(setup, &materials)?;
        let terms: Vec<_> = ops.iter().zip(&thickness.layers).collect();
        Ok((combine(&setup.space, &terms)?, stats))
    }
}
