//! Gauss-Legendre rules and the composite thickness rule used by the assemblers.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// One-dimensional quadrature rule on the interval `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule1D {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
}

impl QuadRule1D {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Legendre polynomial P_n(x) and its derivative, by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `n`-point Gauss-Legendre rule mapped to `(a, b)`, points ascending.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadRule1D> {
    if n < 1 {
        return Err(Error::InvalidArgument("quadrature needs at least one point".into()));
    }
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(Error::InvalidArgument(format!("empty interval ({a}, {b})")));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    if n == 1 {
        weights[0] = 2.0;
    } else {
        // Roots come in +/- pairs; compute the positive half and mirror.
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..NEWTON_MAX_ITER {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < NEWTON_TOL {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(QuadRule1D {
        points: nodes.iter().map(|x| mid + half * x).collect(),
        weights: weights.iter().map(|w| half * w).collect(),
        interval: (a, b),
    })
}

/// A thickness integration cell: the intersection of one knot span with one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ThicknessCell {
    pub rule: QuadRule1D,
    /// Layer index (0-based).
    pub layer: usize,
    /// Position of the knot span in the list passed to [`layerwise_thickness_rule`].
    pub span: usize,
}

/// Checks `0 = t_0 < t_1 < ... < t_m = 1`.
pub fn validate_interfaces(interfaces: &[f64]) -> Result<()> {
    if interfaces.len() < 2 {
        return Err(Error::InvalidLayup("at least one layer is required".into()));
    }
    if interfaces[0] != 0.0 || interfaces[interfaces.len() - 1] != 1.0 {
        return Err(Error::InvalidLayup("interfaces must start at 0 and end at 1".into()));
    }
    if interfaces.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::InvalidLayup("interfaces must be strictly increasing".into()));
    }
    Ok(())
}

/// Composite rule through the thickness: `n_per_cell` Gauss points on every
/// nonempty intersection of a knot span with a layer interval.
///
/// Cells are returned ordered by position; intersections of zero length are dropped.
pub fn layerwise_thickness_rule(
    thickness_spans: &[(f64, f64)],
    layer_interfaces: &[f64],
    n_per_cell: usize,
) -> Result<Vec<ThicknessCell>> {
    validate_interfaces(layer_interfaces)?;
    if thickness_spans.is_empty() {
        return Err(Error::InvalidArgument("no thickness spans".into()));
    }
    let mut cells = Vec::new();
    let (mut s, mut l) = (0, 0);
    let m = layer_interfaces.len() - 1;
    while s < thickness_spans.len() && l < m {
        let (s0, s1) = thickness_spans[s];
        let (l0, l1) = (layer_interfaces[l], layer_interfaces[l + 1]);
        let lo = s0.max(l0);
        let hi = s1.min(l1);
        if hi > lo {
            cells.push(ThicknessCell { rule: gauss_legendre(n_per_cell, lo, hi)?, layer: l, span: s });
        }
        if s1 < l1 {
            s += 1;
        } else if l1 < s1 {
            l += 1;
        } else {
            s += 1;
            l += 1;
        }
    }
    Ok(cells)
}
