use std::f64::consts::PI;

use ppkit_core::classical::GreenEvaluator;
use ppkit_core::domain::{Domain, Exhaustion};
use ppkit_core::norming::{
    build_weight, check_mass_growth, compact_lower_bound, equivalence_ratio, pointwise_mass_constant, weighted_norm,
    CompactSet, ConstantWeight, FamilyMember, TestFamily, Weight, IM_INV_SQUARE_TAG,
};
use ppkit_core::sampling::{sample_nodes, Node, Strategy};
use ppkit_core::Point;

fn disk_nodes(n: usize, seed: u64) -> Vec<Node> {
    sample_nodes(Domain::unit_disk(), n, seed, Strategy::BoundaryStratified).unwrap()
}

#[test]
fn im_inverse_square_truncations_grow_like_log() {
    // ∫_{ε<|z|<1, x,y>0} 2xy/|z|⁴ dA = ∫ sin 2θ dθ ∫ dr/r = log(1/ε)
    let q = Domain::quarter_disk();
    let nodes = sample_nodes(q, 200_000, 8, Strategy::BoundaryStratified).unwrap();
    let fam = TestFamily::standard(q).unwrap();
    let u = fam.members().iter().find(|m| m.tag() == IM_INV_SQUARE_TAG).unwrap();
    for eps in [0.1f64, 0.01] {
        let v = weighted_norm(&nodes, |p| u.eval(p), &ConstantWeight(1.0), |p| p.norm() > eps);
        assert!((v / (1.0 / eps).ln() - 1.0).abs() < 1e-2, "{eps}: {v}");
    }
}

#[test]
fn weight_respects_its_ceilings_and_is_positive() {
    let e = Exhaustion::dyadic(Domain::quarter_disk(), 6).unwrap();
    let w = build_weight(&e).unwrap();
    let nodes = sample_nodes(Domain::quarter_disk(), 20_000, 1, Strategy::BoundaryStratified).unwrap();
    for n in &nodes {
        let j = e.annulus_index(&n.point).max(1);
        assert!(w.log_value(&n.point) <= w.log_ceiling(j) + 1e-12);
        assert!(w.value(&n.point) > 0.0);
    }
    assert!(w.b().iter().all(|b| *b > 0.0 && *b < 1.0));
    let d = w.d();
    assert_eq!(d[0], 1.0);
    assert!(d.windows(2).zip(w.b()).all(|(p, b)| (p[1] - p[0] * b).abs() <= 1e-12 * p[0]));
    // the ceiling halves at least once per level
    for j in 1..10 {
        assert!(w.log_ceiling(j + 1) < w.log_ceiling(j) - std::f64::consts::LN_2 + 1e-12);
    }
}

#[test]
fn weights_need_real_domains_and_three_levels() {
    assert!(build_weight(&Exhaustion::dyadic(Domain::cball2(), 4).unwrap()).is_err());
    assert!(build_weight(&Exhaustion::dyadic(Domain::unit_disk(), 2).unwrap()).is_err());
}

type Probe = Box<dyn Fn(&Point) -> f64>;

#[test]
fn chain_constants_are_sound_on_positive_superharmonic_functions() {
    let e = Exhaustion::dyadic(Domain::unit_disk(), 3).unwrap();
    let g = GreenEvaluator::new(Domain::unit_disk()).unwrap();
    let unit = disk_nodes(40_000, 12);
    for j in 1..=2 {
        let f = CompactSet::Level(j);
        let m = pointwise_mass_constant(&e, j, &f).unwrap();
        assert!(m.log_constant.is_finite() && m.cells > 0);
        let boundary = f.boundary_samples(&e, 512).unwrap();
        let t_next = e.scales()[j];
        let poles = [Point::xy(0.0, 0.0), Point::xy(0.6, 0.1), Point::xy(-0.2, 0.9)];
        let mut probes: Vec<Probe> = poles
            .iter()
            .map(|y| {
                let y = *y;
                Box::new(move |p: &Point| -g.green(p, &y).unwrap()) as Probe
            })
            .collect();
        probes.push(Box::new(|p: &Point| (1.0 - p.norm_sqr()) / p.dist(&Point::xy(1.0, 0.0)).powi(2)));
        for v in &probes {
            // superharmonic functions take their minimum over D_j on its boundary
            let inf_f = boundary.iter().map(v).fold(f64::INFINITY, f64::min);
            let mass: f64 = unit
                .iter()
                .filter(|n| n.point.norm() < t_next)
                .map(|n| {
                    let x = v(&n.point);
                    if x.is_finite() { x * n.weight } else { 0.0 }
                })
                .sum();
            assert!(inf_f.ln() >= m.log_constant + mass.ln(), "level {j}");
            for probe in &m.probes {
                let ball: f64 = unit
                    .iter()
                    .map(|n| {
                        let p = probe.center.add(&n.point.scale(probe.radius));
                        let x = v(&p);
                        if x.is_finite() { x * n.weight * probe.radius.powi(2) } else { 0.0 }
                    })
                    .sum();
                assert!(inf_f.ln() >= probe.log_k + ball.ln() - 1e-9, "probe at {}", probe.center);
            }
        }
    }
}

#[test]
fn single_ball_shortcut_on_a_small_exhaustion() {
    let e = Exhaustion::new(Domain::unit_disk(), Point::origin(2), vec![0.25, 0.5, 0.75]).unwrap();
    let m = pointwise_mass_constant(&e, 1, &CompactSet::Point(Point::origin(2))).unwrap();
    assert!(m.single_ball);
    // the super-mean-value ball about the point is D_2 = B(0, 1/2) itself
    assert!((m.constant() - 1.0 / (PI * 0.25)).abs() < 1e-12);
}

#[test]
fn mass_growth_holds_for_the_built_ratios() {
    let e = Exhaustion::dyadic(Domain::unit_disk(), 5).unwrap();
    let w = build_weight(&e).unwrap();
    let fam = TestFamily::standard(Domain::unit_disk()).unwrap();
    let growth = check_mass_growth(&w.b(), &fam, &e, &disk_nodes(50_000, 2)).unwrap();
    assert!(!growth.is_empty());
    assert!(growth.iter().all(|g| g.holds()), "{:?}", growth.iter().find(|g| !g.holds()));
}

#[test]
fn constant_weights_are_equivalent_with_their_ratio() {
    let fam = TestFamily::standard(Domain::unit_disk()).unwrap();
    let nodes = disk_nodes(20_000, 3);
    assert_eq!(equivalence_ratio(&ConstantWeight(1.0), &ConstantWeight(1.0), &fam, &nodes).unwrap(), (1.0, 1.0));
    let (lo, hi) = equivalence_ratio(&ConstantWeight(1.0), &ConstantWeight(2.0), &fam, &nodes).unwrap();
    assert!((lo - 2.0).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
}

#[test]
fn compact_lower_bound_of_minus_one() {
    // ĉ = |F| / (|F| · |D|) = 1/π for u ≡ -1 and φ ≡ 1
    let e = Exhaustion::dyadic(Domain::unit_disk(), 3).unwrap();
    let fam = TestFamily::new(Domain::unit_disk(), vec![FamilyMember::new("minus one", |_| -1.0)]).unwrap();
    let nodes = disk_nodes(20_000, 4);
    for f in [CompactSet::Level(1), CompactSet::Ball { center: Point::xy(0.1, 0.1), radius: 0.2 }] {
        let c = compact_lower_bound(&ConstantWeight(1.0), &f, &e, &fam, &nodes).unwrap();
        assert!((c - 1.0 / PI).abs() < 1e-12, "{f}: {c}");
    }
    assert!(compact_lower_bound(&ConstantWeight(1.0), &CompactSet::Point(Point::origin(2)), &e, &fam, &nodes).is_err());
}

#[test]
fn standard_families_are_negative() {
    for d in [Domain::unit_disk(), Domain::quarter_disk(), Domain::ball3()] {
        let fam = TestFamily::standard(d).unwrap();
        assert!(fam.len() >= 5);
        fam.spot_check(2000, 1).unwrap();
    }
    let fam = TestFamily::standard(Domain::quarter_disk()).unwrap().without(IM_INV_SQUARE_TAG);
    assert!(fam.members().iter().all(|m| m.tag() != IM_INV_SQUARE_TAG));
}
