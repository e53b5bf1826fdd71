use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use roughwall::dynamics::{Swimmer3, Swimmer4};
use roughwall::stroke::*;
use roughwall::wall::{FluidParams, WallProfile};
use roughwall::Error;

fn flat(a: f64) -> Swimmer3 {
    Swimmer3::new(a, FluidParams::default(), WallProfile::flat()).unwrap()
}

fn bump(eps: f64) -> WallProfile {
    WallProfile::two_bump([[0.5, 0.5], [-0.6, 0.1]], [0.5, 0.5], -0.6, eps).unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn roughness_part_vanishes_on_a_flat_wall_and_is_linear_in_eps() {
    let x = [1.2, 0.9, 1.45, 0.3, 0.0, 0.0, 0.8];
    let f = flat(1e-2).split_fields(&x).unwrap();
    assert!(f.f2.iter().flatten().all(|v| *v == 0.0));
    let s = Swimmer3::new(1e-2, FluidParams::default(), bump(1e-2)).unwrap();
    let p = s.split_fields(&x).unwrap().f2;
    let q = s.with_profile(bump(2e-2)).split_fields(&x).unwrap().f2;
    for i in 0..2 {
        for k in 0..7 {
            assert!((q[i][k] - 2.0 * p[i][k]).abs() < 1e-10 * max_abs(&p[i]), "{:?} {:?}", p, q);
        }
    }
    // and linear in a at fixed ε
    let r = s.with_radius(2e-2).split_fields(&x).unwrap().f2;
    assert!((r[0][6] - 2.0 * p[0][6]).abs() < 1e-8 * p[0][6].abs());
}

#[test]
fn flat_wall_keeps_the_motion_in_the_vertical_plane() {
    let sw = flat(1e-2);
    for phi in [0.0, 0.4, -2.0] {
        let x = [1.1, 0.8, 1.1, phi, 0.3, 0.4, 2.0];
        for f in sw.split_fields(&x).unwrap().total {
            assert!(f[3].abs() < 1e-14);
            assert!((f[5] * phi.cos() - f[4] * phi.sin()).abs() < 1e-14);
        }
    }
}

#[test]
fn far_from_the_wall_the_swimmer_moves_along_its_axis() {
    let sw = flat(1e-2);
    let (theta, phi): (f64, f64) = (1.0, 0.7);
    let x = [1.0, 1.4, theta, phi, 0.0, 0.0, 1e6];
    let e1 = [phi.cos() * theta.sin(), phi.sin() * theta.sin(), theta.cos()];
    for f in sw.split_fields(&x).unwrap().total {
        assert!(f[2].abs() < 1e-12 && f[3].abs() < 1e-12);
        let v = [f[4], f[5], f[6]];
        let cross = [v[1] * e1[2] - v[2] * e1[1], v[2] * e1[0] - v[0] * e1[2], v[0] * e1[1] - v[1] * e1[0]];
        assert!(max_abs(&cross) < 1e-10);
    }
}

#[test]
fn axial_spin_vanishes() {
    let sw = flat(1e-2);
    let x = [1.0, 1.0, FRAC_PI_2, 0.0, 0.0, 0.0, 2.0];
    assert!(sw.omega1(&x, [1.0, 0.3]).unwrap().abs() < 1e-10);
    assert_eq!(sw.omega1(&x, [0.0, 0.0]).unwrap(), 0.0);
}

#[test]
fn general_and_asymptotic_fields_agree_at_small_radius() {
    let x = [1.2, 0.9, 1.45, 0.3, 0.0, 0.0, 0.9];
    let s = Swimmer3::new(1e-3, FluidParams::default(), bump(1e-2)).unwrap();
    let total = s.split_fields(&x).unwrap().total;
    let general = s.general_fields(&x).unwrap();
    for i in 0..2 {
        for k in 0..7 {
            assert!((total[i][k] - general[i][k]).abs() < 1e-6 * max_abs(&general[i]));
        }
    }
}

#[test]
fn inadmissible_states_are_rejected() {
    let sw = flat(1e-2);
    assert!(matches!(sw.split_fields(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 3.0]), Err(Error::StateInvalid(_))));
    assert!(Swimmer3::new(-1.0, FluidParams::default(), WallProfile::flat()).is_err());
    let stroke = stroke_square([1.0, 1.0], [1.3, 1.3], 1.0).unwrap();
    let bad_start = integrate_stroke(&sw, [1.1, 1.0, 1.2, 0.0, 0.0, 0.0, 3.0], &stroke, FieldsMode::Asymptotic, &IntegratorSpec::default());
    assert!(matches!(bad_start, Err(Error::InvalidParameter(_))));
    let tight = IntegratorSpec {
        tol: 1e-30,
        initial_steps: 2,
        max_steps: 8,
    };
    let r = integrate_stroke(&sw, [1.0, 1.0, 1.2, 0.0, 0.0, 0.0, 3.0], &stroke, FieldsMode::Asymptotic, &tight);
    assert!(matches!(r, Err(Error::IntegrationNotConverged { steps: 8, .. })));
}

#[test]
fn a_resting_stroke_leaves_the_state_unchanged() {
    let sw = flat(1e-2);
    let stroke = Stroke::waypoints(vec![[1.0, 1.2], [1.0, 1.2]], 2.0).unwrap();
    let x0 = [1.0, 1.2, 1.2, 0.3, 0.1, 0.2, 3.0];
    let t = integrate_stroke(&sw, x0, &stroke, FieldsMode::General, &IntegratorSpec::default()).unwrap();
    assert!(t.states.iter().all(|s| *s == x0));
}

#[test]
fn square_stroke_on_a_flat_wall() {
    let sw = flat(1e-2);
    let stroke = stroke_square([1.0, 1.0], [1.3, 1.3], 4.0).unwrap();
    let x0 = [1.0, 1.0, 1.2, 0.0, 0.0, 0.0, 3.0];
    let spec = IntegratorSpec::default();
    let fwd = integrate_stroke(&sw, x0, &stroke, FieldsMode::Asymptotic, &spec).unwrap();
    let end = fwd.final_state();
    assert_eq!(fwd.times.len(), fwd.states.len());
    assert!((fwd.times.last().unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(&end[..2], &[1.0, 1.0]);
    assert!(fwd.max_deviation(3) < 1e-8 && fwd.max_deviation(5) < 1e-8);
    let dx = end[4] - x0[4];
    assert!(dx.abs() > 1e-6, "no net motion: {dx}");

    // retracing returns to the start
    let back = integrate_stroke(&sw, end, &stroke.reversed(), FieldsMode::Asymptotic, &spec).unwrap();
    for (p, q) in back.final_state().iter().zip(&x0) {
        assert!((p - q).abs() < 1e-8);
    }

    // the opposite loop from the same start moves the other way
    let rev = integrate_stroke(&sw, x0, &stroke.reversed(), FieldsMode::Asymptotic, &spec).unwrap();
    let dr = rev.final_state()[4] - x0[4];
    assert!(dr * dx < 0.0);
    assert!((dr + dx).abs() < 0.1 * dx.abs());

    let gen = integrate_stroke(&sw, x0, &stroke, FieldsMode::General, &spec).unwrap();
    for (p, q) in gen.final_state().iter().zip(&end) {
        assert!((p - q).abs() < 1e-8);
    }
}

#[test]
fn four_sphere_fields() {
    let sw = Swimmer4::new(1e-2, FluidParams::default(), WallProfile::flat()).unwrap();
    let x = [1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1e6, 0.2, -0.1, 0.3];
    let f = sw.fields(&x).unwrap();
    for (i, fi) in f.iter().enumerate() {
        for k in 0..4 {
            assert_eq!(fi[k], if k == i { 1.0 } else { 0.0 });
        }
    }
    // equal arm rates on a regular tetrahedron produce no net motion
    let sum: Vec<f64> = (4..10).map(|k| f.iter().map(|fi| fi[k]).sum()).collect();
    // rotation rates pass through the a³ spin block, so their rounding is larger
    assert!(max_abs(&sum[..3]) < 1e-12 && max_abs(&sum[3..]) < 1e-9, "{sum:?}");
    // a single arm extension moves the center back by a quarter of it, up to O(a)
    let d = roughwall::swimmer::arm_directions4(&x);
    for k in 0..3 {
        assert!((f[0][4 + k] + 0.25 * d[0][k]).abs() < 0.05 * 0.25, "{:?} vs {:?}", &f[0][4..7], d[0]);
    }
    assert!(sw.fields(&[1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 3.0, PI, 0.0, 0.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn leading_order_fields_are_closed_form(
        xi1 in 0.8..2.0f64, xi2 in 0.8..2.0f64, theta in 0.2..2.9f64, phi in -3.1..3.1f64, z in 2.0..50.0f64,
    ) {
        let sw = flat(1e-3);
        let f = sw.split_fields(&[xi1, xi2, theta, phi, 0.0, 0.0, z]).unwrap();
        let e1 = [phi.cos() * theta.sin(), phi.sin() * theta.sin(), theta.cos()];
        for k in 0..3 {
            prop_assert!((f.f0[0][4 + k] - e1[k] / 3.0).abs() < 1e-12);
            prop_assert!((f.f0[1][4 + k] + e1[k] / 3.0).abs() < 1e-12);
        }
        prop_assert!(max_abs(&f.f0[0][2..4]) < 1e-12 && max_abs(&f.f0[1][2..4]) < 1e-12);
    }
}
