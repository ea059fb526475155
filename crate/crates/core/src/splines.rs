//! Univariate B-spline spaces on `[0, 1]` and their tensor-product combination.
//!
//! Only open (clamped) knot vectors are supported. A 3D space is the product of
//! two in-plane directions `u`, `v` and the thickness direction `t`; functions are
//! numbered with `u` fastest and `t` slowest, so that every global function is the
//! product of one in-plane function and one thickness function.

use crate::error::{Error, Result};

/// Clamped knot vector of a univariate B-spline space.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    degree: usize,
    knots: Vec<f64>,
}

/// Values and first derivatives of the `p + 1` functions that are active at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEval1D {
    pub point: f64,
    /// Index of the first nonzero function (0-based).
    pub first_active: usize,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

/// A nonempty knot span with the functions that do not vanish on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnotSpan {
    pub start: f64,
    pub end: f64,
    /// Index `s` of the span in the knot vector, `knots[s] < knots[s + 1]`.
    pub knot_index: usize,
    /// First active function; the active set is `first_active..=first_active + p`.
    pub first_active: usize,
}

impl KnotSpan {
    pub fn active_functions(&self, degree: usize) -> std::ops::RangeInclusive<usize> {
        self.first_active..=self.first_active + degree
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

impl KnotVector {
    /// Validates and wraps a clamped knot vector.
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidKnotVector("degree must be at least 1".into()));
        }
        if knots.len() < 2 * (degree + 1) {
            return Err(Error::InvalidKnotVector(format!(
                "{} knots cannot hold a degree {degree} space",
                knots.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidKnotVector("non-finite knot".into()));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidKnotVector("knots must be nondecreasing".into()));
        }
        let n = knots.len() - degree - 1;
        if knots[..=degree].iter().any(|&k| k != 0.0) || knots[n..].iter().any(|&k| k != 1.0) {
            return Err(Error::InvalidKnotVector(
                "first and last p + 1 knots must equal 0 and 1".into(),
            ));
        }
        let interior = &knots[degree + 1..n];
        if interior.iter().any(|&k| k <= 0.0 || k >= 1.0) {
            return Err(Error::InvalidKnotVector("interior knots must lie in (0, 1)".into()));
        }
        let mut run = 1;
        for w in interior.windows(2) {
            run = if w[0] == w[1] { run + 1 } else { 1 };
            if run > degree {
                return Err(Error::InvalidKnotVector(format!(
                    "interior knot {} repeated more than p = {degree} times",
                    w[0]
                )));
            }
        }
        Ok(Self { degree, knots })
    }

    /// Uniform knot vector with `n_elements` equal spans and maximal continuity.
    pub fn uniform(degree: usize, n_elements: usize) -> Result<Self> {
        if n_elements < 1 {
            return Err(Error::InvalidArgument("number of elements must be at least 1".into()));
        }
        let mut knots = vec![0.0; degree + 1];
        knots.extend((1..n_elements).map(|i| i as f64 / n_elements as f64));
        knots.extend(std::iter::repeat_n(1.0, degree + 1));
        Self::new(degree, knots)
    }

    /// Same degree, `n_elements` uniform spans, C^{p-1} at every interior knot.
    pub fn uniformly_refined(&self, n_elements: usize) -> Result<Self> {
        Self::uniform(self.degree, n_elements)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of basis functions.
    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Closed support `[knots[i], knots[i + p + 1]]` of function `i`.
    pub fn support(&self, i: usize) -> (f64, f64) {
        (self.knots[i], self.knots[i + self.degree + 1])
    }

    /// Whether the supports of functions `i` and `j` share a set of positive measure.
    pub fn supports_overlap(&self, i: usize, j: usize) -> bool {
        let (a0, a1) = self.support(i);
        let (b0, b1) = self.support(j);
        a0.max(b0) < a1.min(b1)
    }

    /// Knot index `s` with `knots[s] <= x < knots[s + 1]`; `x = 1` maps to the last span.
    pub fn find_span(&self, x: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        let n = self.num_basis();
        if x >= self.knots[n] {
            return Ok(n - 1);
        }
        // First index whose knot exceeds x, minus one.
        let upper = self.knots[..=n].partition_point(|&k| k <= x);
        Ok(upper - 1)
    }

    /// Nonempty spans in increasing order.
    pub fn element_spans(&self) -> Vec<KnotSpan> {
        let p = self.degree;
        (p..self.num_basis())
            .filter(|&s| self.knots[s] < self.knots[s + 1])
            .map(|s| KnotSpan {
                start: self.knots[s],
                end: self.knots[s + 1],
                knot_index: s,
                first_active: s - p,
            })
            .collect()
    }

    pub fn num_elements(&self) -> usize {
        self.element_spans().len()
    }

    /// Evaluates the active functions and their first derivatives at `x`.
    pub fn eval(&self, x: f64) -> Result<BasisEval1D> {
        let span = self.find_span(x)?;
        Ok(self.eval_in_span(span, x))
    }

    /// Cox-de Boor evaluation in a known span. `x` may lie anywhere in the
    /// closed span, which lets quadrature code reuse the span of its element.
    pub fn eval_in_span(&self, span: usize, x: f64) -> BasisEval1D {
        let p = self.degree;
        let u = &self.knots;
        // ndu[j][r] (j > r) holds knot differences, ndu[r][j] (r <= j) basis values.
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = x - u[span + 1 - j];
            right[j] = u[span + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }
        let values = (0..=p).map(|r| ndu[r][p]).collect();
        let derivs = (0..=p)
            .map(|r| {
                let mut d = 0.0;
                if r >= 1 {
                    d += ndu[r - 1][p - 1] / ndu[p][r - 1];
                }
                if r < p {
                    d -= ndu[r][p - 1] / ndu[p][r];
                }
                d * p as f64
            })
            .collect();
        BasisEval1D { point: x, first_active: span - p, values, derivs }
    }
}

/// Evaluates the basis at `x`.
pub fn eval_basis(kv: &KnotVector, x: f64) -> Result<BasisEval1D> {
    kv.eval(x)
}

/// Nonempty knot spans of `kv` with their active functions.
pub fn element_spans(kv: &KnotVector) -> Vec<KnotSpan> {
    kv.element_spans()
}

/// Uniform refinement of `kv` into `n_elements` spans, keeping its degree.
pub fn greville_or_uniform_refine(kv: &KnotVector, n_elements: usize) -> Result<KnotVector> {
    kv.uniformly_refined(n_elements)
}

/// Global function index split into its directional components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitIndex {
    pub u: usize,
    pub v: usize,
    pub t: usize,
}

/// Product space `S(u, v) * T(t)` with in-plane functions `S` and thickness functions `T`.
///
/// Global index `i = i_t * n_s + i_s` with in-plane index `i_s = i_v * n_u + i_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorProductSpace {
    inplane_u: KnotVector,
    inplane_v: KnotVector,
    thickness: KnotVector,
}

impl TensorProductSpace {
    pub fn new(inplane_u: KnotVector, inplane_v: KnotVector, thickness: KnotVector) -> Self {
        Self { inplane_u, inplane_v, thickness }
    }

    /// Same degree everywhere, uniform in-plane meshes and uniform thickness mesh.
    pub fn uniform(degree: usize, elements: [usize; 2], thickness_elements: usize) -> Result<Self> {
        Ok(Self::new(
            KnotVector::uniform(degree, elements[0])?,
            KnotVector::uniform(degree, elements[1])?,
            KnotVector::uniform(degree, thickness_elements)?,
        ))
    }

    pub fn inplane_u(&self) -> &KnotVector {
        &self.inplane_u
    }

    pub fn inplane_v(&self) -> &KnotVector {
        &self.inplane_v
    }

    pub fn thickness(&self) -> &KnotVector {
        &self.thickness
    }

    pub fn n_u(&self) -> usize {
        self.inplane_u.num_basis()
    }

    pub fn n_v(&self) -> usize {
        self.inplane_v.num_basis()
    }

    /// Number of in-plane functions.
    pub fn n_s(&self) -> usize {
        self.n_u() * self.n_v()
    }

    /// Number of thickness functions.
    pub fn n_t(&self) -> usize {
        self.thickness.num_basis()
    }

    /// Dimension of the scalar space.
    pub fn dim(&self) -> usize {
        self.n_s() * self.n_t()
    }

    pub fn inplane_index(&self, i_u: usize, i_v: usize) -> usize {
        i_v * self.n_u() + i_u
    }

    pub fn inplane_split(&self, i_s: usize) -> (usize, usize) {
        (i_s % self.n_u(), i_s / self.n_u())
    }

    pub fn flatten(&self, idx: SplitIndex) -> usize {
        idx.t * self.n_s() + self.inplane_index(idx.u, idx.v)
    }

    pub fn split(&self, i: usize) -> SplitIndex {
        let i_s = i % self.n_s();
        let (u, v) = self.inplane_split(i_s);
        SplitIndex { u, v, t: i / self.n_s() }
    }

    /// Whether in-plane functions `i_s` and `j_s` have overlapping supports.
    pub fn inplane_overlap(&self, i_s: usize, j_s: usize) -> bool {
        let (iu, iv) = self.inplane_split(i_s);
        let (ju, jv) = self.inplane_split(j_s);
        self.inplane_u.supports_overlap(iu, ju) && self.inplane_v.supports_overlap(iv, jv)
    }
}
