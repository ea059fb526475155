//! Per-element tables shared by the assemblers and small strain-displacement kernels.

use crate::error::Result;
use crate::geometry::{ExtrudedGeometry, GeometryFrame};
use crate::problem::QuadratureOrders;
use crate::quadrature::gauss_legendre;
use crate::splines::{KnotSpan, TensorProductSpace};

/// In-plane basis data at one quadrature point. `jxw` is `|det DF| w_u w_v`.
pub(crate) struct InPlanePoint {
    pub jxw: f64,
    pub frame: GeometryFrame,
    pub values: Vec<f64>,
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
}

/// One in-plane element: its active functions (local index `b * (p_u + 1) + a`)
/// and cached frames and basis values at every in-plane quadrature point.
pub(crate) struct InPlaneElement {
    pub functions: Vec<usize>,
    pub points: Vec<InPlanePoint>,
}

pub(crate) fn inplane_element_spans(space: &TensorProductSpace) -> Vec<(KnotSpan, KnotSpan)> {
    let su = space.inplane_u().element_spans();
    let sv = space.inplane_v().element_spans();
    sv.iter().flat_map(|v| su.iter().map(move |u| (*u, *v))).collect()
}

pub(crate) fn build_inplane_element(
    space: &TensorProductSpace,
    geom: &ExtrudedGeometry,
    orders: &QuadratureOrders,
    (span_u, span_v): (KnotSpan, KnotSpan),
) -> Result<InPlaneElement> {
    let ku = space.inplane_u();
    let kv = space.inplane_v();
    let (pu, pv) = (ku.degree(), kv.degree());
    let functions = (0..=pv)
        .flat_map(|b| (0..=pu).map(move |a| (a, b)))
        .map(|(a, b)| space.inplane_index(span_u.first_active + a, span_v.first_active + b))
        .collect();
    let rule_u = gauss_legendre(orders.inplane_u, span_u.start, span_u.end)?;
    let rule_v = gauss_legendre(orders.inplane_v, span_v.start, span_v.end)?;
    let evals_u: Vec<_> = rule_u.points.iter().map(|&x| ku.eval_in_span(span_u.knot_index, x)).collect();
    let evals_v: Vec<_> = rule_v.points.iter().map(|&x| kv.eval_in_span(span_v.knot_index, x)).collect();
    let nloc = (pu + 1) * (pv + 1);
    let mut points = Vec::with_capacity(rule_u.len() * rule_v.len());
    for (qv, (yv, wv)) in rule_v.iter().enumerate() {
        for (qu, (xu, wu)) in rule_u.iter().enumerate() {
            let frame = geom.frame_at([xu, yv])?;
            let (eu, ev) = (&evals_u[qu], &evals_v[qv]);
            let mut values = Vec::with_capacity(nloc);
            let mut du = Vec::with_capacity(nloc);
            let mut dv = Vec::with_capacity(nloc);
            for b in 0..=pv {
                for a in 0..=pu {
                    values.push(eu.values[a] * ev.values[b]);
                    du.push(eu.derivs[a] * ev.values[b]);
                    dv.push(eu.values[a] * ev.derivs[b]);
                }
            }
            points.push(InPlanePoint { jxw: frame.det.abs() * wu * wv, frame, values, du, dv });
        }
    }
    Ok(InPlaneElement { functions, points })
}

/// `scale * D * B(g)` where `B(g)` is the 6x3 strain-displacement matrix of a
/// function with physical gradient `g`, rows `(11, 22, 33, 12, 13, 23)`.
#[inline(always)]
pub(crate) fn d_times_b(d: &[[f64; 6]; 6], g: [f64; 3], scale: f64) -> [[f64; 3]; 6] {
    let g = [g[0] * scale, g[1] * scale, g[2] * scale];
    let mut out = [[0.0; 3]; 6];
    for (k, row) in d.iter().enumerate() {
        out[k][0] = row[0] * g[0] + row[3] * g[1] + row[4] * g[2];
        out[k][1] = row[1] * g[1] + row[3] * g[0] + row[5] * g[2];
        out[k][2] = row[2] * g[2] + row[4] * g[0] + row[5] * g[1];
    }
    out
}

/// Adds `B(g)^T db` into the 3x3 block starting at `dst[0]` with row stride `stride`.
#[inline(always)]
pub(crate) fn add_bt_db(dst: &mut [f64], stride: usize, g: [f64; 3], db: &[[f64; 3]; 6]) {
    for c in 0..3 {
        dst[c] += g[0] * db[0][c] + g[1] * db[3][c] + g[2] * db[4][c];
        dst[stride + c] += g[1] * db[1][c] + g[0] * db[3][c] + g[2] * db[5][c];
        dst[2 * stride + c] += g[2] * db[2][c] + g[0] * db[4][c] + g[1] * db[5][c];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Explicit 6x3 strain-displacement matrix for comparison.
    fn b_matrix(g: [f64; 3]) -> [[f64; 3]; 6] {
        [
            [g[0], 0.0, 0.0],
            [0.0, g[1], 0.0],
            [0.0, 0.0, g[2]],
            [g[1], g[0], 0.0],
            [g[2], 0.0, g[0]],
            [0.0, g[2], g[1]],
        ]
    }

    #[test]
    fn kernels_match_explicit_products() {
        let mut d = [[0.0; 6]; 6];
        for (r, row) in d.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = 1.0 + (r * 7 + c * 3) as f64 * 0.1 + if r == c { 5.0 } else { 0.0 };
            }
        }
        let gi = [0.3, -1.2, 0.7];
        let gj = [-0.4, 0.5, 2.0];
        let scale = 0.37;
        let db = d_times_b(&d, gj, scale);
        let bj = b_matrix(gj);
        let bi = b_matrix(gi);
        for k in 0..6 {
            for c in 0..3 {
                let explicit: f64 = (0..6).map(|s| d[k][s] * bj[s][c]).sum::<f64>() * scale;
                assert!((db[k][c] - explicit).abs() < 1e-14);
            }
        }
        let mut dst = vec![0.0; 3 * 5];
        add_bt_db(&mut dst, 5, gi, &db);
        for a in 0..3 {
            for c in 0..3 {
                let explicit: f64 = (0..6).map(|k| bi[k][a] * db[k][c]).sum();
                assert!((dst[a * 5 + c] - explicit).abs() < 1e-13);
            }
        }
    }
}
