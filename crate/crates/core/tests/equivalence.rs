mod common;

use common::{pagano_layup, random_angles, random_vector, translation_residual};
use laminate_core::geometry::BSplineSurface;
use laminate_core::materials::OrthotropicConstants;
use laminate_core::{
    assemble_fast, assemble_fast_voigt_free, assemble_fast_with, assemble_standard, frobenius_rel_diff,
    reference_bilinear, ExtrudedGeometry, FastOptions, KnotVector, Layup, ProblemSetup, SurfaceMap,
    TensorProductSpace,
};
use nalgebra::Vector3;

fn skewed_quad() -> ExtrudedGeometry {
    let corners = [
        Vector3::new(0.0, 0.0, 0.0),
        Vector3::new(2.0, 0.2, 0.1),
        Vector3::new(-0.3, 1.5, 0.0),
        Vector3::new(1.8, 1.9, 0.3),
    ];
    ExtrudedGeometry::new(SurfaceMap::BilinearQuad { corners }, Vector3::new(0.05, -0.02, 0.15))
}

fn curved_surface() -> ExtrudedGeometry {
    let ku = KnotVector::uniform(2, 1).unwrap();
    let kv = KnotVector::uniform(2, 1).unwrap();
    let mut cps = Vec::new();
    for j in 0..3 {
        for i in 0..3 {
            let (x, y) = (i as f64 * 0.5, j as f64 * 0.5);
            let bump = if i == 1 && j == 1 { 0.3 } else { 0.0 };
            cps.push(Vector3::new(x + 0.1 * y, y, bump + 0.05 * x));
        }
    }
    let surface = BSplineSurface::new(ku, kv, cps).unwrap();
    ExtrudedGeometry::new(SurfaceMap::BSpline(surface), Vector3::new(0.0, 0.02, 0.1))
}

fn check_all_backends(setup: &ProblemSetup) {
    let ks = assemble_standard(setup).unwrap();
    let kf = assemble_fast(setup).unwrap();
    let kv = assemble_fast_voigt_free(setup).unwrap();
    let d1 = frobenius_rel_diff(&ks, &kf).unwrap();
    let d2 = frobenius_rel_diff(&ks, &kv).unwrap();
    assert!(d1 <= 1e-12, "standard vs fast: {d1:e}");
    assert!(d2 <= 1e-12, "standard vs voigt-free: {d2:e}");
    assert!(ks.symmetry_defect() <= 1e-13 * ks.frobenius_norm());
    assert!(translation_residual(&ks) <= 1e-12);
}

#[test]
fn backends_agree_on_plates() {
    for p in 1..=3 {
        for angles in [vec![0.0], vec![0.0, 1.0, 0.0], random_angles(p as u64, 5)] {
            let space = TensorProductSpace::uniform(p, [2, 2], 1).unwrap();
            let setup = ProblemSetup::new(space, ExtrudedGeometry::plate(1.0, 1.5, 0.1), pagano_layup(&angles)).unwrap();
            check_all_backends(&setup);
        }
    }
}

#[test]
fn backends_agree_on_nonaffine_geometry() {
    for geom in [skewed_quad(), curved_surface()] {
        let space = TensorProductSpace::uniform(2, [2, 3], 2).unwrap();
        let layup = Layup::new(
            vec![0.0, 0.3, 0.45, 1.0],
            &[
                (OrthotropicConstants::pagano(), 0.2),
                (OrthotropicConstants::isotropic(3.0, 0.3), 0.0),
                (OrthotropicConstants::pagano(), -0.7),
            ],
        )
        .unwrap();
        let setup = ProblemSetup::new(space, geom, layup).unwrap();
        check_all_backends(&setup);
    }
}

#[test]
fn backends_agree_with_thickness_refinement() {
    let space = TensorProductSpace::uniform(2, [1, 2], 3).unwrap();
    let setup = ProblemSetup::new(space, ExtrudedGeometry::plate(1.0, 1.0, 0.2), pagano_layup(&random_angles(7, 4))).unwrap();
    check_all_backends(&setup);
}

#[test]
fn reduced_and_per_layer_combination_agree() {
    let space = TensorProductSpace::uniform(2, [2, 2], 1).unwrap();
    let angles: Vec<f64> = [0.0, 1.2, 0.0, 1.2, -0.4, 0.0].to_vec();
    let setup = ProblemSetup::new(space, skewed_quad(), pagano_layup(&angles)).unwrap();
    let reduced = assemble_fast_with(&setup, &FastOptions { reduce_layers: true, decompose_angles: false }).unwrap();
    let naive = assemble_fast_with(&setup, &FastOptions { reduce_layers: false, decompose_angles: false }).unwrap();
    assert_eq!(reduced.1.inplane_operator_computations, 3);
    assert_eq!(naive.1.inplane_operator_computations, 6);
    assert!(frobenius_rel_diff(&reduced.0, &naive.0).unwrap() <= 1e-13);
}

#[test]
fn angle_decomposition_mode_matches_default() {
    let space = TensorProductSpace::uniform(2, [2, 2], 1).unwrap();
    let setup = ProblemSetup::new(space, skewed_quad(), pagano_layup(&random_angles(11, 7))).unwrap();
    let default = assemble_fast(&setup).unwrap();
    let (decomposed, stats) =
        assemble_fast_with(&setup, &FastOptions { reduce_layers: true, decompose_angles: true }).unwrap();
    assert_eq!(stats.inplane_operator_computations, 5);
    assert!(frobenius_rel_diff(&default, &decomposed).unwrap() <= 1e-12);
}

#[test]
fn matrix_matches_direct_bilinear_form() {
    let space = TensorProductSpace::uniform(2, [2, 1], 1).unwrap();
    let setup = ProblemSetup::new(space, curved_surface(), pagano_layup(&[0.3, -1.0])).unwrap();
    let k = assemble_fast(&setup).unwrap();
    let n = setup.num_dofs();
    for seed in 0..3 {
        let u = random_vector(100 + seed, n);
        let v = random_vector(200 + seed, n);
        let direct = reference_bilinear(&setup, &u, &v).unwrap();
        let via_k = k.bilinear(&v, &u).unwrap();
        assert!((direct - via_k).abs() <= 1e-11 * direct.abs().max(1e-300), "{direct} vs {via_k}");
    }
}

#[test]
fn unit_stretch_energy_on_unit_cube() {
    let space = TensorProductSpace::uniform(1, [1, 1], 1).unwrap();
    let layup = Layup::equal_thickness(&[(OrthotropicConstants::isotropic(1.0, 0.0), 0.0)]).unwrap();
    let setup = ProblemSetup::new(space, ExtrudedGeometry::unit_cube(), layup).unwrap();
    // u_x = x: x-coefficient of each trilinear function is its node's x coordinate.
    let n = setup.space.dim();
    let mut u = vec![0.0; 3 * n];
    for i in 0..n {
        u[3 * i] = (i % 2) as f64;
    }
    assert!((reference_bilinear(&setup, &u, &u).unwrap() - 1.0).abs() < 1e-14);
    let translation: Vec<f64> = (0..3 * n).map(|r| if r % 3 == 1 { 1.0 } else { 0.0 }).collect();
    assert!(reference_bilinear(&setup, &translation, &translation).unwrap().abs() < 1e-14);
}
