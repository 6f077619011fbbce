use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use ppkit_core::compactification::{
    boundary_atlas_report, classify_bidisk, detect_limit, estimate_c, separation_check, sphere_direction,
    ApproachSequence, Generator, LimitKernel, Schedule,
};
use ppkit_core::domain::Domain;
use ppkit_core::l1::{compactness_probe, embed, l1_distance, Discretization};
use ppkit_core::pluri::PluriGreenEvaluator;
use ppkit_core::sampling::Strategy as NodeStrategy;
use ppkit_core::{Error, Point};

fn unit(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, t)
}

proptest! {
    #[test]
    fn ball_kernel_is_the_poisson_type_expression(t in 0.0..PI / 2.0, a in 0.0..2.0 * PI, r in 0.0f64..0.9, s in 0.0..PI / 2.0, b in 0.0..2.0 * PI) {
        let zeta = sphere_direction(t, a);
        let z = sphere_direction(s, b).scale(r);
        let k = LimitKernel::ball(zeta).unwrap();
        let inner = z.z1() * zeta.z1().conj() + z.z2() * zeta.z2().conj();
        let oracle = -(1.0 - z.norm_sqr()) / (Complex64::new(1.0, 0.0) - inner).norm_sqr();
        let v = k.eval(&z).unwrap();
        prop_assert!((v - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()));
    }

    #[test]
    fn mixed_kernel_interpolates_between_the_faces(c in 0.01f64..100.0, a in coord(), b in coord()) {
        let z = Point::c2(Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        prop_assume!(z.z1().norm() < 0.95 && z.z2().norm() < 0.95);
        let (w1, w2) = (unit(0.3), unit(-1.1));
        let k1 = LimitKernel::face1(w1).unwrap().eval(&z).unwrap();
        let k2 = LimitKernel::face2(w2).unwrap().eval(&z).unwrap();
        let m = LimitKernel::mixed(w1, w2, c).unwrap().eval(&z).unwrap();
        let expect = if c <= 1.0 { k1.max(k2 / c) } else { (c * k1).max(k2) };
        prop_assert!((m - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
        prop_assert!(m < 0.0);
    }
}

fn coord() -> impl Strategy<Value = (f64, f64)> {
    (-0.67f64..0.67, -0.67f64..0.67)
}

#[test]
fn kernels_reject_interior_boundary_points() {
    assert!(matches!(LimitKernel::ball(Point::new(&[0.5, 0.0, 0.0, 0.0]).unwrap()), Err(Error::NotOnBoundary(_))));
    assert!(LimitKernel::face1(Complex64::new(0.5, 0.0)).is_err());
    assert!(LimitKernel::mixed(unit(0.0), unit(0.0), -1.0).is_err());
}

#[test]
fn schedules_approach_the_boundary() {
    assert_eq!(Schedule::DYADIC.radius(1), 0.5);
    assert!((Schedule::TRIADIC.radius(2) - 8.0 / 9.0).abs() < 1e-15);
    let seq = ApproachSequence::ball_radial(sphere_direction(0.4, 1.0), Schedule::DYADIC, 12).unwrap();
    assert_eq!(seq.len(), 12);
    let back = seq.points().to_vec();
    assert!(ApproachSequence::new(Domain::cball2(), Generator::Explicit, back.into_iter().rev().collect()).is_err());
}

#[test]
fn exponent_estimate_recovers_the_power() {
    for c in [0.25, 0.5, 1.0, 3.0] {
        let seq = ApproachSequence::bidisk_power(0.2, -0.4, 1.0 / c, 12).unwrap();
        assert!((estimate_c(&seq).unwrap() - c).abs() < 1e-9, "{c}");
        assert_eq!(seq.expected_c(), Some(c));
    }
}

#[test]
fn ball_limit_matches_its_kernel_and_probe_agrees() {
    let disc = Discretization::new(Domain::cball2(), 20_000, 6, NodeStrategy::Uniform).unwrap();
    let e = PluriGreenEvaluator::ball();
    let zeta = sphere_direction(0.7, 2.0);
    let seq = ApproachSequence::ball_radial(zeta, Schedule::DYADIC, 12).unwrap();
    let det = detect_limit(&e, &disc, &seq, 1e-2).unwrap();
    assert!(det.converged, "{:?}", det.successive);
    let k = LimitKernel::ball(zeta).unwrap().normalized(&disc).unwrap();
    assert!(l1_distance(&det.limit, k.sample()).unwrap() < 3e-2);

    let family: Vec<_> = seq.points().iter().map(|w| embed(&e, &disc, w).unwrap().into_sample()).collect();
    let probe = compactness_probe(&family, 1e-2).unwrap();
    assert_eq!(*probe.indices.last().unwrap(), family.len() - 1);
    assert!(probe.distances.iter().all(|d| *d < 1e-2));
}

#[test]
fn probe_on_spread_out_poles_is_inconclusive() {
    let disc = Discretization::new(Domain::cball2(), 5000, 6, NodeStrategy::Uniform).unwrap();
    let e = PluriGreenEvaluator::ball();
    let family: Vec<_> = (0..6)
        .map(|k| embed(&e, &disc, &sphere_direction(0.3, k as f64).scale(0.9)).unwrap().into_sample())
        .collect();
    assert!(matches!(compactness_probe(&family, 1e-2), Err(Error::Inconclusive { .. })));
}

#[test]
fn distinct_boundary_points_give_separated_limits() {
    let disc = Discretization::new(Domain::cball2(), 10_000, 2, NodeStrategy::Uniform).unwrap();
    let ks: Vec<_> = (0..4).map(|k| LimitKernel::ball(sphere_direction(0.5, k as f64 * PI / 2.0)).unwrap()).collect();
    assert!(separation_check(&ks, &disc).unwrap() > 1e-2);
}

#[test]
fn bidisk_classification_and_atlas() {
    let disc = Discretization::new(Domain::bidisk(), 20_000, 3, NodeStrategy::Uniform).unwrap();
    let seq = ApproachSequence::bidisk_power(PI / 4.0, 0.0, 2.0, 12).unwrap();
    let cl = classify_bidisk(&seq, &disc, 1e-2).unwrap();
    assert_eq!(cl.kernel.name(), "bidisk-mixed");
    assert!((cl.c_hat - 0.5).abs() < 1e-9);
    assert!(cl.distance < 3e-2);

    let alt = ApproachSequence::bidisk_cycling(0.0, 0.0, &[0.5, 2.0], 12).unwrap();
    assert!(matches!(classify_bidisk(&alt, &disc, 1e-2), Err(Error::Divergent { .. })));

    let atlas = boundary_atlas_report(Domain::bidisk(), 0, &disc, 16, 1e-2).unwrap();
    assert_eq!(atlas.failure(), None);
    assert!(boundary_atlas_report(Domain::cball2(), 4, &disc, 12, 1e-2).is_err());
}
