use std::f64::consts::PI;

use nalgebra::Rotation3;
use proptest::prelude::*;
use scalespin::hyperhelix::{
    curve_spin, iterate, measured_dimension, measured_scaling, scaling_factor,
    similarity_dimension, FractalCurve, GeneratorSpec,
};
use scalespin::quaternion::Vec3;
use scalespin::Error;

fn nine() -> GeneratorSpec {
    GeneratorSpec::helical(9, 1.0 / 3.0, 1, 0.0).unwrap()
}

fn koch_like() -> GeneratorSpec {
    GeneratorSpec::helical(4, 1.0 / 3.0, 1, 0.0).unwrap()
}

fn straight() -> GeneratorSpec {
    GeneratorSpec::from_segments(&[[0.0, 0.0, 1.0 / 3.0]; 3]).unwrap()
}

#[test]
fn length_recurrence_is_exact() {
    for level in 0..=5 {
        let c = iterate(&nine(), level).unwrap();
        assert_eq!(c.vertices.len(), 9usize.pow(level as u32) + 1);
        let expected = 3f64.powi(level as i32);
        assert!((c.total_length() - expected).abs() < 1e-9 * expected);
        assert!((c.end() - Vec3::z()).norm() < 1e-9);
    }
}

#[test]
fn similarity_dimension_closed_forms() {
    assert_eq!(similarity_dimension(&nine()), 2.0);
    assert!((similarity_dimension(&koch_like()) - 4f64.ln() / 3f64.ln()).abs() < 1e-15);
    assert!((similarity_dimension(&straight()) - 1.0).abs() < 1e-15);
}

#[test]
fn measured_dimension_examples() {
    let d = measured_dimension(&iterate(&nine(), 5).unwrap()).unwrap();
    assert!((d - 2.0).abs() < 0.1, "{d}");
    let d = measured_dimension(&iterate(&straight(), 5).unwrap()).unwrap();
    assert!((d - 1.0).abs() < 0.01, "{d}");
    let d = measured_dimension(&iterate(&koch_like(), 6).unwrap()).unwrap();
    assert!((d - 1.2619).abs() < 0.05, "{d}");
}

#[test]
fn measured_dimension_error_shrinks_with_level() {
    let errs: Vec<f64> = (3..=6)
        .map(|l| (measured_dimension(&iterate(&nine(), l).unwrap()).unwrap() - 2.0).abs())
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "{errs:?}");
    }
}

#[test]
fn shallow_curves_are_insufficient() {
    assert!(matches!(
        measured_dimension(&iterate(&nine(), 2).unwrap()),
        Err(Error::InsufficientData(_))
    ));
}

#[test]
fn helical_generator_needs_enough_length() {
    assert!(matches!(
        GeneratorSpec::helical(2, 0.4, 1, 0.0),
        Err(Error::GeometryInvalid(_))
    ));
}

#[test]
fn straight_and_planar_curves_have_no_spin() {
    let c = iterate(&straight(), 3).unwrap();
    assert_eq!(curve_spin(&c, 1.0, 1.0, 1.0).unwrap(), 0.0);
    let zigzag = GeneratorSpec::from_segments(&[
        [0.3, 0.0, 0.25],
        [-0.3, 0.0, 0.25],
        [-0.3, 0.0, 0.25],
        [0.3, 0.0, 0.25],
    ])
    .unwrap();
    let c = iterate(&zigzag, 3).unwrap();
    assert!(curve_spin(&c, 1.0, 1.0, 1.0).unwrap().abs() < 1e-12);
}

#[test]
fn circle_spin_matches_hand_value() {
    // one turn of radius a about the axis, spanning λ along it:
    // ∫ r² dφ = 2π a² in the limit of many sides, T = λ/v, σ = m 2π a² v/λ
    let n = 4000;
    let a = 0.2;
    let vertices: Vec<[f64; 3]> = (0..=n)
        .map(|i| {
            let s = i as f64 / n as f64;
            let ph = 2.0 * PI * s;
            let r = if i == 0 || i == n { 0.0 } else { a };
            [r * ph.cos(), r * ph.sin(), s]
        })
        .collect();
    let c = FractalCurve {
        vertices,
        level: 1,
        ratio: 0.5,
    };
    let (m, v, hbar) = (1.0, 2.0, 0.5);
    let lambda = 2.0 * PI * hbar / (m * v);
    let expected = m * 2.0 * PI * (a * lambda).powi(2) * v / lambda;
    let got = curve_spin(&c, m, v, hbar).unwrap();
    assert!((got / expected - 1.0).abs() < 1e-3, "{got} {expected}");
}

#[test]
fn spin_converges_between_levels() {
    let s4 = curve_spin(&iterate(&nine(), 4).unwrap(), 1.0, 1.0, 1.0).unwrap();
    let s5 = curve_spin(&iterate(&nine(), 5).unwrap(), 1.0, 1.0, 1.0).unwrap();
    assert!(s4 != 0.0);
    assert!(((s5 - s4) / s5).abs() < 0.05);
}

#[test]
fn rescaling_matches_power_law() {
    let c = iterate(&nine(), 4).unwrap();
    for q in [2.0, 3.0, 9.0] {
        for d_f in [2.0, 1.5] {
            let expected = scaling_factor(q, d_f).unwrap();
            let got = measured_scaling(&c, q, d_f).unwrap();
            assert!(
                (got / expected - 1.0).abs() < 0.02,
                "q={q} D_F={d_f}: {got} vs {expected}"
            );
        }
    }
}

#[test]
fn scaling_factor_examples() {
    assert_eq!(scaling_factor(5.0, 2.0).unwrap(), 1.0);
    assert!((scaling_factor(4.0, 1.5).unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(scaling_factor(1.0, 1.3).unwrap(), 1.0);
    assert!(scaling_factor(-1.0, 2.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spin_is_invariant_under_axial_rotation_and_translation(
        angle in 0.0..(2.0 * PI), tx in -5.0..5.0f64, ty in -5.0..5.0f64, tz in -5.0..5.0f64,
        tilt in 0.0..PI,
    ) {
        let c = iterate(&nine(), 3).unwrap();
        let base = curve_spin(&c, 1.0, 1.0, 1.0).unwrap();
        let rz = Rotation3::from_axis_angle(&Vec3::z_axis(), angle);
        let t = Vec3::new(tx, ty, tz);
        let moved = c.map(|p| rz * p + t);
        prop_assert!((curve_spin(&moved, 1.0, 1.0, 1.0).unwrap() - base).abs() < 1e-9 * base.abs());
        // a rigid motion that also moves the axis changes nothing either
        let rx = Rotation3::from_axis_angle(&Vec3::x_axis(), tilt);
        let moved = c.map(|p| rx * p + t);
        prop_assert!((curve_spin(&moved, 1.0, 1.0, 1.0).unwrap() - base).abs() < 1e-9 * base.abs());
    }

    #[test]
    fn helical_family_chains_for_any_phase(theta0 in 0.0..(2.0 * PI), turns in 1usize..8) {
        let g = GeneratorSpec::helical(9, 1.0 / 3.0, turns, theta0).unwrap();
        let c = iterate(&g, 2).unwrap();
        prop_assert!((c.end() - Vec3::z()).norm() < 1e-9);
    }
}
