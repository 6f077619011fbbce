use proptest::prelude::*;

use ppkit::io::{read_nodes, read_sample, read_weight, write_nodes, write_sample, write_weight, IoError};
use ppkit_core::domain::{Domain, DomainKind};
use ppkit_core::l1::Discretization;
use ppkit_core::sampling::{sample_nodes, Strategy as NodeStrategy};
use ppkit_core::Point;

fn strategy() -> impl Strategy<Value = NodeStrategy> {
    prop_oneof![
        Just(NodeStrategy::Uniform),
        Just(NodeStrategy::BoundaryStratified),
        (0.05f64..0.4, 0.05f64..0.4).prop_map(|(x, y)| NodeStrategy::PoleRefined(Point::xy(x, y))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nodes_round_trip_exactly(seed in any::<u64>(), n in 100usize..400, s in strategy()) {
        let d = Domain::quarter_disk();
        let nodes = sample_nodes(d, n, seed, s).unwrap();
        let mut buf = Vec::new();
        write_nodes(&mut buf, d, seed, &s, &nodes).unwrap();
        let back = read_nodes(buf.as_slice()).unwrap();
        prop_assert_eq!(back.domain, d);
        prop_assert_eq!(back.seed, seed);
        prop_assert_eq!(back.strategy, s);
        prop_assert_eq!(back.nodes, nodes);
    }

    #[test]
    fn weights_and_samples_round_trip(seed in any::<u64>(), k in 0usize..5, scale in 0.1f64..10.0) {
        let d = Domain::new(DomainKind::ALL[k]);
        let disc = Discretization::new(d, 1000, seed, NodeStrategy::Uniform)
            .unwrap()
            .with_weight("radial", |p| 1.0 + scale * p.norm_sqr())
            .unwrap();
        let mut buf = Vec::new();
        write_weight(&mut buf, &disc).unwrap();
        let back = read_weight(buf.as_slice()).unwrap();
        prop_assert_eq!(back.id(), disc.id());
        prop_assert_eq!(back.nodes(), disc.nodes());
        prop_assert_eq!(back.weight_values(), disc.weight_values());

        let sample = disc.sample(|p| -scale * p.norm()).unwrap();
        let mut buf = Vec::new();
        write_sample(&mut buf, &sample).unwrap();
        let read = read_sample(buf.as_slice(), &back).unwrap();
        prop_assert_eq!(read.values(), sample.values());
    }
}

#[test]
fn sample_from_another_discretization_is_rejected() {
    let a = Discretization::new(Domain::unit_disk(), 1000, 1, NodeStrategy::Uniform).unwrap();
    let b = Discretization::new(Domain::unit_disk(), 1000, 2, NodeStrategy::Uniform).unwrap();
    let s = a.sample(|p| p.norm() - 1.0).unwrap();
    let mut buf = Vec::new();
    write_sample(&mut buf, &s).unwrap();
    assert!(read_sample(buf.as_slice(), &b).is_err());
}

#[test]
fn missing_magic_is_a_format_error() {
    let text = "0.1,0.2,0.3\n";
    assert!(matches!(read_nodes(text.as_bytes()), Err(IoError::Format(_))));
    assert!(matches!(read_weight(text.as_bytes()), Err(IoError::Format(_))));
}

#[test]
fn pole_sample_round_trips_as_negative_infinity() {
    let d = Discretization::new(Domain::unit_disk(), 1000, 3, NodeStrategy::Uniform).unwrap();
    let target = d.nodes()[17].point;
    let s = d.sample(|p| if *p == target { f64::NEG_INFINITY } else { -1.0 }).unwrap();
    let mut buf = Vec::new();
    write_sample(&mut buf, &s).unwrap();
    let back = read_sample(buf.as_slice(), &d).unwrap();
    assert_eq!(back.omitted(), Some(17));
    assert_eq!(back.values(), s.values());
}

#[test]
fn weight_labels_may_contain_spaces() {
    let disc = Discretization::new(Domain::unit_disk(), 1000, 4, NodeStrategy::BoundaryStratified)
        .unwrap()
        .with_weight("norming(unit-disk, 4 levels)", |p| 2.0 - p.norm())
        .unwrap();
    let mut buf = Vec::new();
    write_weight(&mut buf, &disc).unwrap();
    let back = read_weight(buf.as_slice()).unwrap();
    assert_eq!(back.weight_tag(), Some("norming(unit-disk, 4 levels)"));
    assert_eq!(back.id(), disc.id());
}
