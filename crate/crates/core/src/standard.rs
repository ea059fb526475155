//! Reference assembler: full 3D Gauss quadrature with a composite rule through
//! the layers. Per in-plane element it visits `m (p + 1)^3` points and couples
//! `(p + 1)^3` functions at each of them.

use rayon::prelude::*;

use crate::element::{add_bt_db, build_inplane_element, d_times_b, inplane_element_spans, InPlaneElement};
use crate::error::{Error, Result};
use crate::materials::ElasticityTensor;
use crate::problem::{AssemblyStats, ProblemSetup};
use crate::quadrature::{layerwise_thickness_rule, ThicknessCell};
use crate::sparse::{SparseMatrixBuilder, StiffnessMatrix};
use crate::splines::{BasisEval1D, KnotSpan};
use nalgebra::Matrix3;

/// Options of the standard assembler.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StandardOptions {
    /// When set, only layers flagged `true` contribute; the rest act as void.
    pub layer_mask: Option<Vec<bool>>,
}

/// Thickness quadrature points of one knot span, tagged with their layer.
struct ThicknessSpanPoints {
    span: KnotSpan,
    points: Vec<(usize, f64, BasisEval1D)>,
}

fn thickness_points(setup: &ProblemSetup) -> Result<(Vec<ThicknessSpanPoints>, Vec<ThicknessCell>)> {
    let kt = setup.space.thickness();
    let spans = kt.element_spans();
    let intervals: Vec<(f64, f64)> = spans.iter().map(|s| (s.start, s.end)).collect();
    let cells = layerwise_thickness_rule(&intervals, setup.layup.interfaces(), setup.quadrature.thickness)?;
    let mut grouped: Vec<ThicknessSpanPoints> =
        spans.iter().map(|&span| ThicknessSpanPoints { span, points: Vec::new() }).collect();
    for cell in &cells {
        let group = &mut grouped[cell.span];
        for (x, w) in cell.rule.iter() {
            group.points.push((cell.layer, w, kt.eval_in_span(group.span.knot_index, x)));
        }
    }
    Ok((grouped, cells))
}

/// Assembles the free-free stiffness matrix by layerwise 3D quadrature.
pub fn assemble_standard(setup: &ProblemSetup) -> Result<StiffnessMatrix> {
    Ok(assemble_standard_with(setup, &StandardOptions::default())?.0)
}

/// As [`assemble_standard`], also returning work counters.
pub fn assemble_standard_with(
    setup: &ProblemSetup,
    options: &StandardOptions,
) -> Result<(StiffnessMatrix, AssemblyStats)> {
    let layup = &setup.layup;
    if layup.num_layers() == 0 {
        return Err(Error::InvalidLayup("empty layup".into()));
    }
    if let Some(mask) = &options.layer_mask {
        if mask.len() != layup.num_layers() {
            return Err(Error::DimensionMismatch(mask.len(), layup.num_layers()));
        }
    }
    let materials: Vec<[[f64; 6]; 6]> = (0..layup.num_layers())
        .map(|l| {
            let active = options.layer_mask.as_ref().is_none_or(|m| m[l]);
            if active { layup.layer_config(l).voigt().to_array() } else { [[0.0; 6]; 6] }
        })
        .collect();
    let (thickness, _) = thickness_points(setup)?;
    let elements = inplane_element_spans(&setup.space);

    let parts: Vec<(SparseMatrixBuilder, u64)> = elements
        .par_iter()
        .map(|&spans| {
            let el = build_inplane_element(&setup.space, &setup.geometry, &setup.quadrature, spans)?;
            Ok(assemble_element(setup, &el, &thickness, &materials))
        })
        .collect::<Result<_>>()?;

    let mut builder = SparseMatrixBuilder::new(setup.space.dim());
    builder.reserve(parts.iter().map(|(b, _)| b.len()).sum());
    let mut points = 0;
    for (mut part, n) in parts {
        builder.append(&mut part)?;
        points += n;
    }
    let stats = AssemblyStats {
        inplane_elements: elements.len(),
        quadrature_points: points,
        inplane_operator_computations: 0,
    };
    Ok((builder.finalize()?, stats))
}

fn assemble_element(
    setup: &ProblemSetup,
    el: &InPlaneElement,
    thickness: &[ThicknessSpanPoints],
    materials: &[[[f64; 6]; 6]],
) -> (SparseMatrixBuilder, u64) {
    let space = &setup.space;
    let nsl = el.functions.len();
    let ntl = space.thickness().degree() + 1;
    let nloc = nsl * ntl;
    let stride = 3 * nloc;
    let mut builder = SparseMatrixBuilder::new(space.dim());
    builder.reserve(thickness.len() * stride * stride);
    let mut local = vec![0.0; stride * stride];
    let mut grads = vec![[0.0; 3]; nloc];
    let mut dbs = vec![[[0.0; 3]; 6]; nloc];
    let mut visits = 0u64;

    for group in thickness {
        local.iter_mut().for_each(|v| *v = 0.0);
        for (layer, wt, tb) in &group.points {
            let d = &materials[*layer];
            for qp in &el.points {
                visits += 1;
                for it in 0..ntl {
                    let (t, dt) = (tb.values[it], tb.derivs[it]);
                    for is in 0..nsl {
                        let g_hat = [qp.du[is] * t, qp.dv[is] * t, qp.values[is] * dt];
                        grads[it * nsl + is] = qp.frame.pullback(g_hat);
                    }
                }
                let scale = qp.jxw * wt;
                for (db, g) in dbs.iter_mut().zip(&grads) {
                    *db = d_times_b(d, *g, scale);
                }
                // Upper block triangle only; the element matrix is symmetric.
                for (i, gi) in grads.iter().enumerate() {
                    let row = &mut local[3 * i * stride..];
                    for (j, db) in dbs.iter().enumerate().skip(i) {
                        add_bt_db(&mut row[3 * j..], stride, *gi, db);
                    }
                }
            }
        }
        let global = |a: usize| (group.span.first_active + a / nsl) * space.n_s() + el.functions[a % nsl];
        for i in 0..nloc {
            for j in i..nloc {
                let mut blk = [[0.0; 3]; 3];
                for (r, row) in blk.iter_mut().enumerate() {
                    row.copy_from_slice(&local[(3 * i + r) * stride + 3 * j..][..3]);
                }
                let (gi, gj) = (global(i), global(j));
                builder.add_block(gi, gj, &blk).expect("local-to-global map stays in range");
                if j != i {
                    let t = std::array::from_fn(|r| std::array::from_fn(|c| blk[c][r]));
                    builder.add_block(gj, gi, &t).expect("local-to-global map stays in range");
                }
            }
        }
    }
    (builder, visits)
}

/// Evaluates `a(v, u) = int eps(v) : C : eps(u)` by quadrature of the strain
/// fields, without forming any strain-displacement or material matrix.
///
/// `u` and `v` hold three coefficients per basis function.
pub fn reference_bilinear(setup: &ProblemSetup, u: &[f64], v: &[f64]) -> Result<f64> {
    let n = setup.num_dofs();
    for x in [u, v] {
        if x.len() != n {
            return Err(Error::DimensionMismatch(x.len(), n));
        }
    }
    let space = &setup.space;
    let tensors: Vec<ElasticityTensor> =
        (0..setup.layup.num_layers()).map(|l| setup.layup.layer_config(l).tensor()).collect();
    let (thickness, _) = thickness_points(setup)?;
    let mut total = 0.0;
    for spans in inplane_element_spans(space) {
        let el = build_inplane_element(space, &setup.geometry, &setup.quadrature, spans)?;
        for group in &thickness {
            for (layer, wt, tb) in &group.points {
                for qp in &el.points {
                    let mut grad_u = Matrix3::zeros();
                    let mut grad_v = Matrix3::zeros();
                    for (it, (t, dt)) in tb.values.iter().zip(&tb.derivs).enumerate() {
                        for (is, &f) in el.functions.iter().enumerate() {
                            let g_hat = nalgebra::Vector3::new(qp.du[is] * t, qp.dv[is] * t, qp.values[is] * dt);
                            let g = qp.frame.pullback_gradient(&g_hat);
                            let i = (group.span.first_active + it) * space.n_s() + f;
                            let cu = nalgebra::Vector3::new(u[3 * i], u[3 * i + 1], u[3 * i + 2]);
                            let cv = nalgebra::Vector3::new(v[3 * i], v[3 * i + 1], v[3 * i + 2]);
                            grad_u += cu * g.transpose();
                            grad_v += cv * g.transpose();
                        }
                    }
                    let eps_u = (grad_u + grad_u.transpose()) * 0.5;
                    let eps_v = (grad_v + grad_v.transpose()) * 0.5;
                    total += tensors[*layer].double_contract(&eps_v, &eps_u) * qp.jxw * wt;
                }
            }
        }
    }
    Ok(total)
}
