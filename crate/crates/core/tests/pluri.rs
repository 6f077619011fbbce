use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ppkit_core::domain::Domain;
use ppkit_core::pluri::{
    automorphism_invariance, ball_green, polydisk_green, BallAutomorphism, KobayashiOracle, PluriGreenEvaluator,
};
use ppkit_core::Point;

fn c2(a: (f64, f64), b: (f64, f64)) -> Point {
    Point::c2(Complex64::new(a.0, a.1), Complex64::new(b.0, b.1))
}

fn inside_bidisk(p: &Point) -> bool {
    p.z1().norm() < 0.95 && p.z2().norm() < 0.95
}

fn coord() -> impl Strategy<Value = (f64, f64)> {
    (-0.95f64..0.95, -0.95f64..0.95)
}

fn ball_point(max: f64) -> impl Strategy<Value = Point> {
    (0.0..max, 0.0..std::f64::consts::FRAC_PI_2, 0.0..std::f64::consts::TAU, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, t, a, b)| Point::c2(Complex64::from_polar(r * t.cos(), a), Complex64::from_polar(r * t.sin(), b)))
}

proptest! {
    #[test]
    fn polydisk_green_is_the_largest_disk_moebius_modulus(a in coord(), b in coord(), c in coord(), d in coord()) {
        let (z, w) = (c2(a, b), c2(c, d));
        prop_assume!(inside_bidisk(&z) && inside_bidisk(&w) && z.dist(&w) > 1e-6);
        let m = |u: Complex64, v: Complex64| ((u - v) / (Complex64::new(1.0, 0.0) - v.conj() * u)).norm();
        let oracle = m(z.z1(), w.z1()).max(m(z.z2(), w.z2())).ln();
        let g = polydisk_green(&z, &w).unwrap();
        prop_assert!((g - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()));
    }

    #[test]
    fn ball_green_matches_the_invariant_form(z in ball_point(0.9), w in ball_point(0.9)) {
        prop_assume!(z.dist(&w) > 1e-2);
        // 1 - |φ_w(z)|² = (1 - |z|²)(1 - |w|²) / |1 - <z, w>|²
        let inner = z.z1() * w.z1().conj() + z.z2() * w.z2().conj();
        let q = (1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr()) / (Complex64::new(1.0, 0.0) - inner).norm_sqr();
        let oracle = 0.5 * (1.0 - q).ln();
        let g = ball_green(&z, &w).unwrap();
        prop_assert!((g - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()), "{} vs {}", g, oracle);
        prop_assert!((g - ball_green(&w, &z).unwrap()).abs() <= 1e-12 * (1.0 + g.abs()));
    }

    #[test]
    fn ball_green_is_log_tanh_of_the_kobayashi_distance(z in ball_point(0.999), w in ball_point(0.999)) {
        prop_assume!(z != w);
        let k = KobayashiOracle.distance(&z, &w).unwrap();
        prop_assert!((ball_green(&z, &w).unwrap() - k.tanh().ln()).abs() < 1e-10);
    }

    #[test]
    fn ball_green_is_invariant_under_automorphisms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = BallAutomorphism::random(&mut rng);
        let r = automorphism_invariance(&f, 200, seed);
        prop_assert!(r.max_deviation < 1e-10, "{}", r.max_deviation);
    }
}

#[test]
fn automorphisms_preserve_the_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let f = BallAutomorphism::random(&mut rng);
        for p in [c2((0.1, 0.2), (0.3, -0.4)), c2((0.0, 0.0), (0.0, 0.99)), c2((-0.7, 0.0), (0.0, 0.7))] {
            assert!(f.apply(&p).norm() < 1.0);
        }
    }
    let u = [[Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]];
    assert!(BallAutomorphism::unitary(u).is_err());
}

#[test]
fn green_is_minus_infinity_at_the_pole_and_negative_elsewhere() {
    let w = c2((0.2, 0.1), (-0.3, 0.0));
    for e in [PluriGreenEvaluator::ball(), PluriGreenEvaluator::bidisk()] {
        assert_eq!(e.green(&w, &w).unwrap(), f64::NEG_INFINITY);
        assert!(e.green(&c2((0.0, 0.0), (0.1, 0.0)), &w).unwrap() < 0.0);
    }
    assert!(PluriGreenEvaluator::new(Domain::unit_disk()).is_err());
}

#[test]
fn circumscribed_ball_lower_bound_holds() {
    for e in [PluriGreenEvaluator::ball(), PluriGreenEvaluator::bidisk()] {
        let r = e.lower_bound_check(5000, 2);
        assert_eq!(r.violations, 0, "{} {}", r.radius_rule, r.max_violation);
    }
}

#[test]
fn kl_ratio_tightens_as_the_pole_region_shrinks() {
    let e = PluriGreenEvaluator::ball();
    let w0 = c2((0.5, 0.0), (0.0, 0.0));
    let eps: Vec<f64> = [0.05, 0.025, 0.0125]
        .iter()
        .map(|y| e.kl_ratio(&w0, 0.2, *y, 1000, 5).unwrap().epsilon())
        .collect();
    assert!(eps.windows(2).all(|p| p[1] < p[0]), "{eps:?}");
    // roughly linear in Y
    assert!((eps[0] / eps[2] - 4.0).abs() < 1.0, "{eps:?}");
}
