mod common;

use common::{hex8_unit_cube_stiffness, pagano_layup, random_angles, translation_residual};
use laminate_core::fast::InPlanePattern;
use laminate_core::materials::OrthotropicConstants;
use laminate_core::quadrature::gauss_legendre;
use laminate_core::{
    assemble_fast, assemble_standard, assemble_standard_with, compute_inplane_operators, compute_thickness_operators,
    frobenius_rel_diff, ExtrudedGeometry, KnotVector, Layup, OperatorPair, ProblemSetup, SparseMatrixBuilder,
    StandardOptions, TensorProductSpace,
};
use proptest::prelude::*;

fn isotropic_cube(p: usize) -> ProblemSetup {
    let space = TensorProductSpace::uniform(p, [1, 1], 1).unwrap();
    let layup = Layup::equal_thickness(&[(OrthotropicConstants::isotropic(1.0, 0.0), 0.0)]).unwrap();
    ProblemSetup::new(space, ExtrudedGeometry::unit_cube(), layup).unwrap()
}

#[test]
fn single_trilinear_element_matches_brick_oracle() {
    let setup = isotropic_cube(1);
    let oracle = hex8_unit_cube_stiffness(1.0, 0.0);
    let scale = oracle.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for k in [assemble_standard(&setup).unwrap(), assemble_fast(&setup).unwrap()] {
        let dense = k.to_dense();
        for r in 0..24 {
            for c in 0..24 {
                assert!((dense[r][c] - oracle[r][c]).abs() <= 1e-12 * scale, "({r},{c})");
            }
        }
    }
}

#[test]
fn brick_oracle_with_poisson_coupling() {
    let space = TensorProductSpace::uniform(1, [1, 1], 1).unwrap();
    let layup = Layup::equal_thickness(&[(OrthotropicConstants::isotropic(2.5, 0.3), 0.0)]).unwrap();
    let setup = ProblemSetup::new(space, ExtrudedGeometry::unit_cube(), layup).unwrap();
    let oracle = hex8_unit_cube_stiffness(2.5, 0.3);
    let scale = oracle.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let dense = assemble_standard(&setup).unwrap().to_dense();
    for r in 0..24 {
        for c in 0..24 {
            assert!((dense[r][c] - oracle[r][c]).abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn layers_add_up() {
    let space = TensorProductSpace::uniform(2, [2, 1], 1).unwrap();
    let angles = random_angles(3, 3);
    let setup = ProblemSetup::new(space, ExtrudedGeometry::plate(1.0, 2.0, 0.3), pagano_layup(&angles)).unwrap();
    let full = assemble_standard(&setup).unwrap();
    let mut sum = SparseMatrixBuilder::with_dim(full.dim());
    for l in 0..3 {
        let mask = (0..3).map(|k| k == l).collect();
        let (k, _) = assemble_standard_with(&setup, &StandardOptions { layer_mask: Some(mask) }).unwrap();
        sum.append(&mut k.to_builder()).unwrap();
    }
    assert!(frobenius_rel_diff(&full, &sum.finalize().unwrap()).unwrap() <= 1e-13);
}

#[test]
fn two_layer_cube_equals_sum_of_sublayer_assemblies() {
    let space = TensorProductSpace::uniform(1, [1, 1], 1).unwrap();
    let setup = ProblemSetup::new(space, ExtrudedGeometry::unit_cube(), pagano_layup(&[0.0, std::f64::consts::FRAC_PI_2]))
        .unwrap();
    let full = assemble_standard(&setup).unwrap();
    let bottom = assemble_standard_with(&setup, &StandardOptions { layer_mask: Some(vec![true, false]) }).unwrap().0;
    let top = assemble_standard_with(&setup, &StandardOptions { layer_mask: Some(vec![false, true]) }).unwrap().0;
    let mut sum = bottom.to_builder();
    sum.append(&mut top.to_builder()).unwrap();
    assert!(frobenius_rel_diff(&full, &sum.finalize().unwrap()).unwrap() <= 1e-13);
}

#[test]
fn extra_thickness_points_change_nothing() {
    for p in 1..=3 {
        let space = TensorProductSpace::uniform(p, [2, 2], 1).unwrap();
        let setup =
            ProblemSetup::new(space, ExtrudedGeometry::plate(1.0, 1.0, 0.1), pagano_layup(&random_angles(p as u64, 3)))
                .unwrap();
        let base = assemble_standard(&setup).unwrap();
        let refined = assemble_standard(&setup.clone().with_thickness_points(p + 3).unwrap()).unwrap();
        assert!(frobenius_rel_diff(&base, &refined).unwrap() <= 1e-13);
    }
}

#[test]
fn symmetry_and_translations_for_all_degrees() {
    for p in 1..=4 {
        for el in [1, 2] {
            let space = TensorProductSpace::uniform(p, [el, el], 1).unwrap();
            let setup = ProblemSetup::new(space, ExtrudedGeometry::plate(2.0, 1.0, 0.1), pagano_layup(&[0.0, 0.7, 0.0]))
                .unwrap();
            let k = assemble_fast(&setup).unwrap();
            assert!(k.symmetry_defect() <= 1e-13 * k.frobenius_norm());
            assert!(translation_residual(&k) <= 1e-12);
        }
    }
}

#[test]
fn thickness_operator_identities() {
    let kv = KnotVector::uniform(3, 2).unwrap();
    let layup = Layup::new(vec![0.0, 0.2, 0.5, 0.7, 1.0], &[(OrthotropicConstants::pagano(), 0.0); 4]).unwrap();
    let q = compute_thickness_operators(&kv, &layup, 4).unwrap();
    let n = kv.num_basis();
    // Oracle: 50-point Gauss on every layer, basis evaluated through the public API.
    for (l, ops) in q.layers.iter().enumerate() {
        let (a, b) = layup.layer_interval(l);
        let rule = gauss_legendre(50, a, b).unwrap();
        let mut oracle = vec![nalgebra::DMatrix::<f64>::zeros(n, n); 4];
        for (x, w) in rule.iter() {
            let e = kv.eval(x).unwrap();
            let mut vals = vec![0.0; n];
            let mut ders = vec![0.0; n];
            for k in 0..e.values.len() {
                vals[e.first_active + k] = e.values[k];
                ders[e.first_active + k] = e.derivs[k];
            }
            for i in 0..n {
                for j in 0..n {
                    oracle[0][(i, j)] += w * vals[i] * vals[j];
                    oracle[1][(i, j)] += w * ders[i] * vals[j];
                    oracle[2][(i, j)] += w * vals[i] * ders[j];
                    oracle[3][(i, j)] += w * ders[i] * ders[j];
                }
            }
        }
        for k in 0..4 {
            assert!((&ops[k] - &oracle[k]).abs().max() <= 1e-14, "layer {l} op {k}");
        }
        assert!((&ops[0] - ops[0].transpose()).abs().max() <= 1e-14);
        assert!((&ops[3] - ops[3].transpose()).abs().max() <= 1e-14);
        assert!((&ops[1] - ops[2].transpose()).abs().max() <= 1e-14);
    }
    let single = Layup::equal_thickness(&[(OrthotropicConstants::pagano(), 0.0)]).unwrap();
    let mass = &compute_thickness_operators(&kv, &single, 4).unwrap().layers[0][0];
    let total = q.layers.iter().fold(nalgebra::DMatrix::zeros(n, n), |acc, ops| acc + &ops[0]);
    assert!((total - mass).abs().max() <= 1e-13);
}

#[test]
fn thickness_mass_splits_over_two_equal_layers() {
    let kv = KnotVector::uniform(1, 1).unwrap();
    let two = pagano_layup(&[0.0, 0.0]);
    let one = pagano_layup(&[0.0]);
    let q2 = compute_thickness_operators(&kv, &two, 2).unwrap();
    let q1 = compute_thickness_operators(&kv, &one, 2).unwrap();
    let sum = &q2.layers[0][0] + &q2.layers[1][0];
    assert!((sum - &q1.layers[0][0]).abs().max() <= 1e-15);
}

#[test]
fn inplane_operator_on_identity_geometry() {
    let setup = isotropic_cube(1);
    let d = setup.layup.configs()[0].voigt().to_array();
    let ops = compute_inplane_operators(&setup, &d).unwrap();
    // Independent 2D quadrature of C_3333 * int S_i^2 with bilinear S_0 = (1-u)(1-v).
    let rule = gauss_legendre(3, 0.0, 1.0).unwrap();
    let mut oracle = 0.0;
    for (u, wu) in rule.iter() {
        for (v, wv) in rule.iter() {
            oracle += wu * wv * ((1.0 - u) * (1.0 - v)).powi(2);
        }
    }
    for i in 0..4 {
        let blk = ops.block(OperatorPair::P22, i, i);
        assert!((blk[2][2] - oracle).abs() < 1e-15);
        assert!((blk[2][2] - 1.0 / 9.0).abs() < 1e-15);
    }
}

#[test]
fn isotropic_operators_ignore_ply_angle() {
    let make = |theta: f64| {
        let space = TensorProductSpace::uniform(2, [2, 2], 1).unwrap();
        let layup = Layup::equal_thickness(&[(OrthotropicConstants::isotropic(3.0, 0.25), theta)]).unwrap();
        let setup = ProblemSetup::new(space, ExtrudedGeometry::plate(1.0, 1.0, 0.2), layup).unwrap();
        let d = setup.layup.configs()[0].voigt().to_array();
        compute_inplane_operators(&setup, &d).unwrap()
    };
    let (a, b) = (make(0.0), make(std::f64::consts::FRAC_PI_3));
    for pair in 0..4 {
        for (x, y) in a.blocks[pair].iter().zip(&b.blocks[pair]) {
            for r in 0..3 {
                for c in 0..3 {
                    assert!((x[r][c] - y[r][c]).abs() <= 1e-13);
                }
            }
        }
    }
}

#[test]
fn inplane_pattern_is_support_overlap() {
    let ku = KnotVector::new(2, vec![0.0, 0.0, 0.0, 0.3, 0.3, 0.6, 1.0, 1.0, 1.0]).unwrap();
    let kv = KnotVector::uniform(3, 3).unwrap();
    let space = TensorProductSpace::new(ku, kv, KnotVector::uniform(1, 1).unwrap());
    let pattern = InPlanePattern::from_space(&space);
    for i in 0..space.n_s() {
        for j in 0..space.n_s() {
            assert_eq!(pattern.position(i, j).is_some(), space.inplane_overlap(i, j), "({i},{j})");
        }
    }
}

#[test]
fn standard_counts_points() {
    let setup = ProblemSetup::new(
        TensorProductSpace::uniform(2, [2, 3], 1).unwrap(),
        ExtrudedGeometry::plate(1.0, 1.0, 0.1),
        pagano_layup(&[0.0, 1.0, 0.0, 1.0, 0.0]),
    )
    .unwrap();
    let (_, stats) = assemble_standard_with(&setup, &StandardOptions::default()).unwrap();
    assert_eq!(stats.inplane_elements, 6);
    assert_eq!(stats.quadrature_points, 6 * 5 * 27);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operator_transposes(theta in -3.2f64..3.2, p in 1usize..=3, skew in -0.3f64..0.3) {
        let geom = ExtrudedGeometry::new(
            laminate_core::SurfaceMap::BilinearQuad {
                corners: [
                    nalgebra::Vector3::new(0.0, 0.0, 0.0),
                    nalgebra::Vector3::new(1.0, skew, 0.0),
                    nalgebra::Vector3::new(skew, 1.0, 0.1),
                    nalgebra::Vector3::new(1.2, 1.1, 0.0),
                ],
            },
            nalgebra::Vector3::new(0.0, 0.0, 0.2),
        );
        let space = TensorProductSpace::uniform(p, [2, 1], 1).unwrap();
        let setup = ProblemSetup::new(space, geom, pagano_layup(&[theta])).unwrap();
        let ops = compute_inplane_operators(&setup, &setup.layup.configs()[0].voigt().to_array()).unwrap();
        let scale = ops.blocks[0].iter().flatten().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..setup.space.n_s() {
            for &j in ops.pattern.row(i) {
                for (a, b) in [(OperatorPair::P11, OperatorPair::P11), (OperatorPair::P12, OperatorPair::P21), (OperatorPair::P22, OperatorPair::P22)] {
                    let x = ops.block(a, i, j);
                    let y = ops.block(b, j, i);
                    for r in 0..3 {
                        for c in 0..3 {
                            prop_assert!((x[r][c] - y[c][r]).abs() <= 1e-13 * scale);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fast_equals_standard_on_random_stacks(
        angles in prop::collection::vec(-3.2f64..3.2, 1..6),
        p in 1usize..=2,
        nx in 1usize..=2,
    ) {
        let space = TensorProductSpace::uniform(p, [nx, 1], 1).unwrap();
        let setup = ProblemSetup::new(space, ExtrudedGeometry::plate(1.0, 0.5, 0.1), pagano_layup(&angles)).unwrap();
        let d = frobenius_rel_diff(&assemble_standard(&setup).unwrap(), &assemble_fast(&setup).unwrap()).unwrap();
        prop_assert!(d <= 1e-12);
    }
}
