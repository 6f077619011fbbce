use proptest::prelude::*;

use ppkit_core::domain::Domain;
use ppkit_core::l1::{
    alpha_scaled, c_v, embed, embed_martin, l1_distance, l1_norm, Discretization, KernelSample, Normalizer,
};
use ppkit_core::classical::GreenEvaluator;
use ppkit_core::pluri::PluriGreenEvaluator;
use ppkit_core::sampling::Strategy as NodeStrategy;
use ppkit_core::{Error, Point};

fn disc(seed: u64) -> Discretization {
    Discretization::new(Domain::cball2(), 2000, seed, NodeStrategy::Uniform).unwrap()
}

fn pole() -> impl Strategy<Value = Point> {
    (-0.6f64..0.6, -0.6f64..0.6, -0.6f64..0.6, -0.6f64..0.6)
        .prop_map(|(a, b, c, d)| Point::new(&[a, b, c, d]).unwrap())
        .prop_filter("inside", |p| p.norm() < 0.95)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn distance_is_a_metric_on_samples(w1 in pole(), w2 in pole(), w3 in pole()) {
        let d = disc(1);
        let e = PluriGreenEvaluator::ball();
        let (a, b, c) = (embed(&e, &d, &w1).unwrap(), embed(&e, &d, &w2).unwrap(), embed(&e, &d, &w3).unwrap());
        let (a, b, c) = (a.sample(), b.sample(), c.sample());
        let ab = l1_distance(a, b).unwrap();
        prop_assert_eq!(ab, l1_distance(b, a).unwrap());
        prop_assert_eq!(l1_distance(a, a).unwrap(), 0.0);
        prop_assert!(ab <= l1_distance(a, c).unwrap() + l1_distance(c, b).unwrap() + 1e-12);
        // unit vectors are at most 2 apart
        prop_assert!(ab <= 2.0 + 1e-9);
    }

    #[test]
    fn embedding_has_unit_norm(w in pole()) {
        let d = disc(2);
        let bd = Discretization::new(Domain::bidisk(), 2000, 2, NodeStrategy::Uniform).unwrap();
        let k = embed(&PluriGreenEvaluator::bidisk(), &bd, &w).unwrap();
        prop_assert!((k.norm() - 1.0).abs() < 1e-9);
        prop_assert!(matches!(k.normalizer(), Normalizer::NormV(_)));
        let e = PluriGreenEvaluator::ball();
        prop_assert!((c_v(&e, &d, &w).unwrap() * l1_norm(&alpha_scaled(&e, &d, &w).unwrap()) > 0.0));
    }
}

#[test]
fn samples_from_different_discretizations_cannot_be_compared() {
    let (a, b) = (disc(1), disc(2));
    let (sa, sb) = (a.sample(|p| -p.norm()).unwrap(), b.sample(|p| -p.norm()).unwrap());
    assert_eq!(l1_distance(&sa, &sb), Err(Error::DiscretizationMismatch));
    assert_ne!(a.id(), b.id());
    assert_eq!(a.id(), disc(1).id());
}

#[test]
fn one_pole_is_omitted_and_the_mass_renormalized() {
    let d = disc(3);
    let w = d.nodes()[5].point;
    let k = embed(&PluriGreenEvaluator::ball(), &d, &w).unwrap();
    assert_eq!(k.sample().omitted(), Some(5));
    assert!((k.norm() - 1.0).abs() < 1e-9);

    let mut values = vec![-1.0; d.len()];
    values[0] = f64::NEG_INFINITY;
    values[1] = f64::NEG_INFINITY;
    assert_eq!(KernelSample::new(&d, values).err(), Some(Error::PoleBudgetExceeded(2)));
    let mut values = vec![-1.0; d.len()];
    values[3] = f64::NAN;
    assert!(KernelSample::new(&d, values).is_err());
}

#[test]
fn constant_function_has_the_volume_as_norm() {
    let d = Discretization::new(Domain::unit_disk(), 5000, 1, NodeStrategy::Uniform).unwrap();
    let s = d.sample(|_| -1.0).unwrap();
    assert!((l1_norm(&s) - std::f64::consts::PI).abs() < 1e-12);
    let weighted = Discretization::new(Domain::unit_disk(), 5000, 1, NodeStrategy::Uniform)
        .unwrap()
        .with_weight("half", |_| 0.5)
        .unwrap();
    assert_ne!(weighted.id(), d.id());
    assert!((l1_norm(&weighted.sample(|_| -1.0).unwrap()) - std::f64::consts::PI / 2.0).abs() < 1e-12);
}

#[test]
fn too_few_nodes_are_rejected() {
    assert!(Discretization::new(Domain::unit_disk(), 999, 1, NodeStrategy::Uniform).is_err());
}

#[test]
fn martin_embedding_is_unit_normalized() {
    let d = Discretization::new(Domain::unit_disk(), 5000, 1, NodeStrategy::Uniform).unwrap();
    let g = GreenEvaluator::new(Domain::unit_disk()).unwrap();
    let k = embed_martin(&g, &d, &Point::xy(0.9, 0.0), &Point::origin(2)).unwrap();
    assert!((k.norm() - 1.0).abs() < 1e-9);
    assert!(k.sample().values().iter().all(|v| *v >= 0.0));
}
