#![allow(dead_code)]

use laminate_core::materials::OrthotropicConstants;
use laminate_core::{Layup, StiffnessMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Element stiffness of an 8-node trilinear brick on the unit cube, isotropic
/// material, 2x2x2 Gauss. Node `(iu, iv, it)` has index `4 it + 2 iv + iu`;
/// unknowns are ordered `3 node + component`.
pub fn hex8_unit_cube_stiffness(e: f64, nu: f64) -> Vec<Vec<f64>> {
    let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    let mu = e / (2.0 * (1.0 + nu));
    let mut d = [[0.0; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            d[i][j] = lambda;
        }
        d[i][i] += 2.0 * mu;
        d[i + 3][i + 3] = mu;
    }
    let g = 0.5 / 3f64.sqrt();
    let pts = [0.5 - g, 0.5 + g];
    let mut k = vec![vec![0.0; 24]; 24];
    for &x in &pts {
        for &y in &pts {
            for &z in &pts {
                let mut b = [[0.0; 24]; 6];
                for node in 0..8 {
                    let c = [node & 1, (node >> 1) & 1, (node >> 2) & 1];
                    let f = |t: f64, ci: usize| if ci == 1 { t } else { 1.0 - t };
                    let df = |ci: usize| if ci == 1 { 1.0 } else { -1.0 };
                    let dn = [
                        df(c[0]) * f(y, c[1]) * f(z, c[2]),
                        f(x, c[0]) * df(c[1]) * f(z, c[2]),
                        f(x, c[0]) * f(y, c[1]) * df(c[2]),
                    ];
                    let col = 3 * node;
                    b[0][col] = dn[0];
                    b[1][col + 1] = dn[1];
                    b[2][col + 2] = dn[2];
                    b[3][col] = dn[1];
                    b[3][col + 1] = dn[0];
                    b[4][col] = dn[2];
                    b[4][col + 2] = dn[0];
                    b[5][col + 1] = dn[2];
                    b[5][col + 2] = dn[1];
                }
                for r in 0..24 {
                    for s in 0..24 {
                        let mut acc = 0.0;
                        for a in 0..6 {
                            for c in 0..6 {
                                acc += b[a][r] * d[a][c] * b[c][s];
                            }
                        }
                        k[r][s] += acc / 8.0;
                    }
                }
            }
        }
    }
    k
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_angles(seed: u64, m: usize) -> Vec<f64> {
    let mut r = rng(seed);
    (0..m).map(|_| r.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}

pub fn random_vector(seed: u64, n: usize) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.gen_range(-1.0..1.0)).collect()
}

pub fn pagano_layup(angles: &[f64]) -> Layup {
    let layers: Vec<_> = angles.iter().map(|&a| (OrthotropicConstants::pagano(), a)).collect();
    Layup::equal_thickness(&layers).unwrap()
}

/// `max_k |(K t)_k| / ||K||_F` over the three unit translations.
pub fn translation_residual(k: &StiffnessMatrix) -> f64 {
    let n = k.dim() / 3;
    let norm = k.frobenius_norm();
    (0..3)
        .map(|c| {
            let t: Vec<f64> = (0..3 * n).map(|r| if r % 3 == c { 1.0 } else { 0.0 }).collect();
            k.mul_vec(&t).unwrap().iter().fold(0.0f64, |m, v| m.max(v.abs())) / norm
        })
        .fold(0.0, f64::max)
}
