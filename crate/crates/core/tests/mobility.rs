use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use proptest::prelude::*;
use roughwall::mobility::*;
use roughwall::quadrature::sphere_rule;
use roughwall::swimmer::{centers3, frame3, Limits};
use roughwall::wall::{FluidParams, QuadSpec, WallProfile};
use roughwall::{Error, Violation};

fn cluster(centers: Vec<[f64; 3]>, a: f64, profile: WallProfile) -> SphereCluster {
    SphereCluster {
        centers,
        a,
        fluid: FluidParams::default(),
        profile,
    }
}

fn bump() -> WallProfile {
    WallProfile::two_bump([[0.5, 0.5], [-0.6, 0.1]], [0.5, 0.5], -0.6, 1e-2).unwrap()
}

#[test]
fn eigenvalues_and_drag() {
    let f = FluidParams::new(2.0).unwrap();
    assert!((lambda_translation(0.1, &f) - 0.3).abs() < 1e-15);
    assert!((lambda_rotation(0.1, &f) - 0.6).abs() < 1e-15);
    let t = dtn_rigid(RigidKind::Translation, &Vector3::new(0.0, 3.0, 0.0), 0.1, &f).unwrap();
    assert!((t.force - Vector3::new(0.0, drag_translation(0.1, 2.0), 0.0)).norm() < 1e-14);
    let r = dtn_rigid(RigidKind::Rotation, &Vector3::new(0.0, 0.0, -1.0), 0.1, &f).unwrap();
    assert!((r.torque.z + drag_rotation(0.1, 2.0)).abs() < 1e-15);
    assert!(dtn_rigid(RigidKind::Rotation, &Vector3::zeros(), 0.1, &f).is_err());
    assert!(dtn_rigid(RigidKind::Translation, &Vector3::x(), 0.0, &f).is_err());
}

#[test]
fn translation_traction_is_uniform_over_the_sphere() {
    // the single layer of a constant density is the rigid velocity 2c/(3μa)
    let f = FluidParams::new(0.8).unwrap();
    let c = Vector3::new(1.0, -0.5, 0.25);
    let a = 0.02;
    let want = c * (2.0 / (3.0 * f.mu * a));
    for (r, _) in sphere_rule(5, 7) {
        let v = single_layer_quadrature(&c, a, &f, &Vector3::from(r), 16, 24).unwrap();
        assert!((v - want).norm() < 1e-3 * want.norm());
    }
}

#[test]
fn rotational_traction_has_zero_mean() {
    let omega = Vector3::new(-0.4, 0.2, 1.0);
    let mean: Vector3<f64> = sphere_rule(16, 32).iter().map(|(r, w)| omega.cross(&Vector3::from(*r)) * *w).sum();
    assert!(mean.norm() < 1e-10);
    let area: f64 = sphere_rule(16, 32).iter().map(|p| p.1).sum();
    assert!((area - 4.0 * PI).abs() < 1e-12);
}

#[test]
fn interaction_matrix_is_symmetric() {
    let x = [1.2, 0.9, 1.45, 0.3, 0.0, 0.0, 0.9];
    for profile in [WallProfile::flat(), bump()] {
        let cl = cluster(centers3(&x).to_vec(), 1e-2, profile);
        let m = assemble_a(&cl, true, &QuadSpec::default(), &Limits::default()).unwrap();
        assert!((&m.a - m.a.transpose()).amax() < 1e-12);
        let a1 = m.a1.unwrap();
        let a2 = m.a2.unwrap();
        assert!((&m.a - (DMatrix::identity(9, 9) + &a1 + &a2)).amax() < 1e-15);
        if cl.profile.epsilon == 0.0 {
            assert_eq!(a2.amax(), 0.0);
        } else {
            assert!(a2.amax() > 0.0 && a2.amax() < 1e-2 * a1.amax());
        }
    }
}

#[test]
fn first_order_block_scales_with_the_radius() {
    let x = [1.0, 1.1, 1.3, -0.4, 0.2, 0.1, 2.0];
    let get = |a: f64| {
        let cl = cluster(centers3(&x).to_vec(), a, WallProfile::flat());
        assemble_a(&cl, true, &QuadSpec::default(), &Limits::default()).unwrap().a1.unwrap()
    };
    let (p, q) = (get(1e-3), get(2e-3));
    assert!((q - p * 2.0).amax() < 1e-15);
}

#[test]
fn single_sphere_far_from_the_wall_feels_stokes_drag() {
    let cl = cluster(vec![[0.0, 0.0, 1e7]], 0.1, WallProfile::flat());
    let basis = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let g = grand_resistance(&cl, [0.0, 0.0, 1e7], basis, &DMatrix::zeros(3, 0), &QuadSpec::default(), &Limits::default()).unwrap();
    for k in 0..3 {
        assert!((g.m[(k, k)] + drag_rotation(0.1, 1.0)).abs() < 1e-12);
        assert!((g.m[(3 + k, 3 + k)] + drag_translation(0.1, 1.0)).abs() < 1e-6);
    }
}

#[test]
fn shape_columns_give_the_forces_of_prescribed_motions() {
    let x = [1.0, 1.0, 1.2, 0.0, 0.0, 0.0, 3.0];
    let c = centers3(&x);
    let e = frame3(&x[2], &x[3]);
    let mut shape = DMatrix::zeros(9, 1);
    for k in 0..3 {
        // a rigid translation along e₁ written as a shape input
        for i in 0..3 {
            shape[(3 * i + k, 0)] = e[0][k];
        }
    }
    let cl = cluster(c.to_vec(), 1e-2, WallProfile::flat());
    let g = grand_resistance(&cl, c[1], e, &shape, &QuadSpec::default(), &Limits::default()).unwrap();
    for row in 0..6 {
        assert!((g.n[(row, 0)] - g.m[(row, 3)]).abs() < 1e-15);
    }
}

#[test]
fn invalid_clusters_are_rejected() {
    let q = QuadSpec::default();
    let l = Limits::default();
    let overlap = cluster(vec![[0.0, 0.0, 2.0], [0.01, 0.0, 2.0]], 0.1, WallProfile::flat());
    assert!(matches!(assemble_a(&overlap, false, &q, &l), Err(Error::ClusterInvalid(Violation::Overlap))));
    let low = cluster(vec![[0.0, 0.0, 0.3]], 0.1, WallProfile::flat());
    assert!(matches!(assemble_a(&low, false, &q, &l), Err(Error::ClusterInvalid(Violation::WallClearance))));
    let bad = cluster(vec![[0.0, f64::NAN, 2.0]], 0.1, WallProfile::flat());
    assert!(matches!(assemble_a(&bad, false, &q, &l), Err(Error::ClusterInvalid(Violation::NonFinite))));
    let ok = cluster(vec![[0.0, 0.0, 2.0]], 0.1, WallProfile::flat());
    let e = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    assert!(grand_resistance(&ok, [0.0, 0.0, 2.0], e, &DMatrix::zeros(4, 1), &q, &l).is_err());
    let zero = cluster(vec![[0.0, 0.0, 2.0]], 0.0, WallProfile::flat());
    assert!(matches!(assemble_a(&zero, false, &q, &l), Err(Error::InvalidParameter(_))));
}

#[test]
fn rough_resistance_is_symmetric_and_negative_definite() {
    let x = [1.2, 0.9, 1.45, 0.3, 0.0, 0.0, 0.7];
    let c = centers3(&x);
    let cl = cluster(c.to_vec(), 1e-2, bump());
    let g = grand_resistance(&cl, c[1], frame3(&x[2], &x[3]), &DMatrix::zeros(9, 0), &QuadSpec::default(), &Limits::default()).unwrap();
    assert!((g.m - g.m.transpose()).norm() < 1e-12 * g.m.norm());
    assert!(g.m.symmetric_eigenvalues().iter().all(|&v| v < 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn flat_resistance_is_symmetric_and_negative_definite(
        xi1 in 0.8..2.0f64, xi2 in 0.8..2.0f64, theta in 0.3..2.8f64, phi in -3.0..3.0f64,
        z in 2.5..10.0f64, a in 1e-3..5e-2f64,
    ) {
        let x = [xi1, xi2, theta, phi, 0.1, -0.3, z];
        let c = centers3(&x);
        let cl = cluster(c.to_vec(), a, WallProfile::flat());
        let g = grand_resistance(&cl, c[1], frame3(&theta, &phi), &DMatrix::zeros(9, 0), &QuadSpec::default(), &Limits::default()).unwrap();
        prop_assert!((g.m - g.m.transpose()).norm() <= 1e-12 * g.m.norm());
        prop_assert!(g.m.symmetric_eigenvalues().iter().all(|&v| v < 0.0));
        prop_assert!((g.m[(0, 0)] + 24.0 * PI * a.powi(3)).abs() < 1e-12 * a.powi(3));
    }
}
