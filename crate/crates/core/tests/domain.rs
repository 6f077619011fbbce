use std::f64::consts::PI;

use proptest::prelude::*;

use ppkit_core::domain::{Domain, DomainKind, Exhaustion};
use ppkit_core::sampling::{sample_nodes, total_weight, Strategy};
use ppkit_core::Point;

#[test]
fn domain_names_round_trip() {
    for k in DomainKind::ALL {
        assert_eq!(k.name().parse::<DomainKind>().unwrap(), k);
    }
    assert_eq!("disk".parse::<DomainKind>().unwrap(), DomainKind::UnitDisk);
    assert!("torus".parse::<DomainKind>().is_err());
}

#[test]
fn volumes_are_the_textbook_ones() {
    let v = |k| Domain::new(k).volume();
    assert!((v(DomainKind::UnitDisk) - PI).abs() < 1e-15);
    assert!((v(DomainKind::QuarterDisk) - PI / 4.0).abs() < 1e-15);
    assert!((v(DomainKind::Ball3) - 4.0 * PI / 3.0).abs() < 1e-14);
    assert!((v(DomainKind::CBall2) - PI * PI / 2.0).abs() < 1e-14);
    assert!((v(DomainKind::Bidisk) - PI * PI).abs() < 1e-14);
}

proptest! {
    #[test]
    fn boundary_distance_closed_forms(x in 0.001f64..0.999, y in 0.001f64..0.999) {
        let p = Point::xy(x, y);
        prop_assume!(p.norm() < 0.999);
        let disk = Domain::unit_disk().boundary_distance(&p).unwrap();
        prop_assert!((disk - (1.0 - p.norm())).abs() < 1e-15);
        let q = Domain::quarter_disk().boundary_distance(&p).unwrap();
        prop_assert!((q - x.min(y).min(1.0 - p.norm())).abs() < 1e-15);
    }

    #[test]
    fn bidisk_distance_is_the_smaller_coordinate_gap(a in -0.69f64..0.69, b in -0.69f64..0.69, c in -0.69f64..0.69, d in -0.69f64..0.69) {
        let p = Point::new(&[a, b, c, d]).unwrap();
        let expect = (1.0 - p.z1().norm()).min(1.0 - p.z2().norm());
        prop_assert!((Domain::bidisk().boundary_distance(&p).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn pole_refined_strategy_round_trips(x in -0.9f64..0.9, y in -0.9f64..0.9) {
        let s = Strategy::PoleRefined(Point::xy(x, y));
        prop_assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
    }

    #[test]
    fn quadrature_weights_sum_to_the_volume(k in 0usize..5, seed in any::<u64>(), n in 200usize..3000, which in 0usize..3) {
        let d = Domain::new(DomainKind::ALL[k]);
        let s = match which {
            0 => Strategy::Uniform,
            1 => Strategy::BoundaryStratified,
            _ => Strategy::PoleRefined(d.default_anchor()),
        };
        let nodes = sample_nodes(d, n, seed, s).unwrap();
        prop_assert_eq!(nodes.len(), n);
        prop_assert!((total_weight(&nodes) / d.volume() - 1.0).abs() < 1e-12);
        for node in &nodes {
            prop_assert!(d.contains(&node.point).unwrap());
        }
    }
}

#[test]
fn stratified_quadrature_integrates_a_radial_moment() {
    // ∫_disk |z|² dA = π/2
    for s in [Strategy::Uniform, Strategy::BoundaryStratified] {
        let nodes = sample_nodes(Domain::unit_disk(), 100_000, 4, s).unwrap();
        let v: f64 = nodes.iter().map(|n| n.point.norm_sqr() * n.weight).sum();
        assert!((v / (PI / 2.0) - 1.0).abs() < 1e-2, "{s}: {v}");
    }
}

#[test]
fn exhaustion_levels_are_nested() {
    let e = Exhaustion::dyadic(Domain::quarter_disk(), 6).unwrap();
    assert_eq!(e.len(), 6);
    assert!(e.scales().windows(2).all(|w| w[0] < w[1]));
    let nodes = sample_nodes(Domain::quarter_disk(), 5000, 1, Strategy::BoundaryStratified).unwrap();
    for n in &nodes {
        let j = e.annulus_index(&n.point);
        assert!(j <= e.len());
        for k in 1..=e.len() {
            let inside = e.level(k).unwrap().contains(&n.point);
            assert_eq!(inside, k > j, "level {k}, index {j}");
        }
    }
    assert!(e.level(7).is_err());
    assert!(Exhaustion::new(Domain::unit_disk(), Point::origin(2), vec![0.5, 0.4]).is_err());
}
