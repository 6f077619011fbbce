//! Seeded quadrature nodes.
//!
//! Every strategy is an unbiased stratified Monte Carlo rule: the domain is
//! split into strata of exactly known volume, each stratum receives a fixed
//! number of uniformly distributed nodes, and each node carries the weight
//! `vol(stratum) / count(stratum)`. Weights therefore always sum to the
//! domain volume.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::Domain;
use crate::numeric::{ball_volume, pairwise_sum};
use crate::{error::invalid, Error, Point, Result};

/// Number of geometric shells around a pole.
pub const POLE_SHELLS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Strategy {
    Uniform,
    /// Half the nodes go to geometrically shrinking shells around the pole.
    PoleRefined(Point),
    /// Equal node counts in dyadic layers of the radial gauge, refined both
    /// toward the gauge center and toward the boundary.
    BoundaryStratified,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Uniform => f.write_str("uniform"),
            Strategy::BoundaryStratified => f.write_str("boundary-stratified"),
            Strategy::PoleRefined(p) => {
                f.write_str("pole-refined(")?;
                for (i, c) in p.coords().iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl core::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Strategy::Uniform),
            "boundary-stratified" => Ok(Strategy::BoundaryStratified),
            _ => {
                let inner = s
                    .strip_prefix("pole-refined(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| invalid(alloc::format!("unknown strategy `{s}`")))?;
                let coords = inner
                    .split(',')
                    .map(|c| c.trim().parse::<f64>())
                    .collect::<core::result::Result<Vec<_>, _>>()
                    .map_err(|_| invalid(alloc::format!("bad pole in `{s}`")))?;
                Ok(Strategy::PoleRefined(Point::new(&coords)?))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub point: Point,
    pub weight: f64,
}

/// Generates `n` nodes; deterministic in `(domain, n, seed, strategy)`.
pub fn sample_nodes(domain: Domain, n: usize, seed: u64, strategy: Strategy) -> Result<Vec<Node>> {
    if n == 0 {
        return Err(invalid("node count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match strategy {
        Strategy::Uniform => {
            let w = domain.volume() / n as f64;
            Ok((0..n)
                .map(|_| Node {
                    point: uniform_point(domain, &mut rng),
                    weight: w,
                })
                .collect())
        }
        Strategy::PoleRefined(pole) => pole_refined(domain, n, pole, &mut rng),
        Strategy::BoundaryStratified => boundary_stratified(domain, n, &mut rng),
    }
}

/// Sum of quadrature weights.
pub fn total_weight(nodes: &[Node]) -> f64 {
    let w: Vec<f64> = nodes.iter().map(|n| n.weight).collect();
    pairwise_sum(&w)
}

pub(crate) fn uniform_point<R: Rng>(domain: Domain, rng: &mut R) -> Point {
    let (lo, hi) = domain.bounding_box();
    let dim = domain.ambient_dim();
    loop {
        let mut c = [0.0; 4];
        for k in 0..dim {
            c[k] = lo[k] + (hi[k] - lo[k]) * rng.gen::<f64>();
        }
        let p = Point::from_array(c, dim);
        if domain.contains_unchecked(&p) {
            return p;
        }
    }
}

/// Uniform direction on the unit sphere of R^dim.
pub(crate) fn unit_direction<R: Rng>(dim: usize, rng: &mut R) -> Point {
    loop {
        let mut c = [0.0; 4];
        for v in c.iter_mut().take(dim) {
            *v = 2.0 * rng.gen::<f64>() - 1.0;
        }
        let p = Point::from_array(c, dim);
        let r2 = p.norm_sqr();
        if r2 > 1e-12 && r2 <= 1.0 {
            return p.scale(1.0 / r2.sqrt());
        }
    }
}

/// Radius distributed like a uniform point of the shell `a ≤ r < b`.
fn shell_radius<R: Rng>(dim: usize, a: f64, b: f64, rng: &mut R) -> f64 {
    let d = dim as i32;
    let (ad, bd) = (a.powi(d), b.powi(d));
    (ad + rng.gen::<f64>() * (bd - ad)).powf(1.0 / dim as f64)
}

fn split_counts(total: usize, parts: usize) -> Vec<usize> {
    let base = total / parts;
    let extra = total % parts;
    (0..parts).map(|i| base + usize::from(i < extra)).collect()
}

fn pole_refined<R: Rng>(domain: Domain, n: usize, pole: Point, rng: &mut R) -> Result<Vec<Node>> {
    let delta = domain.boundary_distance(&pole)?;
    let dim = domain.ambient_dim();
    let radius = 0.5 * delta;
    let n_in = n / 2;
    let n_out = n - n_in;
    let mut nodes = Vec::with_capacity(n);

    let outer_volume = domain.volume() - ball_volume(dim, radius);
    let w_out = outer_volume / n_out as f64;
    while nodes.len() < n_out {
        let p = uniform_point(domain, rng);
        if p.dist(&pole) >= radius {
            nodes.push(Node { point: p, weight: w_out });
        }
    }

    if n_in > 0 {
        let shells = POLE_SHELLS.min(n_in - 1);
        let counts = split_counts(n_in, shells + 1);
        for (k, &m) in counts.iter().enumerate() {
            // shells k < `shells` are annuli, the last stratum is the core ball
            let outer = radius * 0.5f64.powi(k as i32);
            let inner = if k < shells { 0.5 * outer } else { 0.0 };
            let w = (ball_volume(dim, outer) - ball_volume(dim, inner)) / m as f64;
            for _ in 0..m {
                let r = shell_radius(dim, inner, outer, rng);
                let p = pole.add(&unit_direction(dim, rng).scale(r));
                nodes.push(Node { point: p, weight: w });
            }
        }
    }
    Ok(nodes)
}

/// Breakpoints of the radial-gauge strata for `n` nodes. The finest layer
/// width is `n^{-1/2}`, so doubling the node count resolves a deeper layer.
pub fn gauge_breakpoints(n: usize) -> Vec<f64> {
    let eps = 1.0 / (n as f64).sqrt();
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    let mut k = 1;
    loop {
        let h = 0.5f64.powi(k);
        if h <= eps {
            break;
        }
        inner.push(h);
        if k >= 2 {
            outer.push(1.0 - h);
        }
        k += 1;
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(inner.len() + outer.len() + 3);
    cuts.push(0.0);
    if eps < 0.5 {
        cuts.push(eps);
    }
    cuts.extend(inner.iter().rev());
    cuts.extend(outer);
    if eps < 0.25 {
        cuts.push(1.0 - eps);
    }
    cuts.push(1.0);
    cuts
}

fn boundary_stratified<R: Rng>(domain: Domain, n: usize, rng: &mut R) -> Result<Vec<Node>> {
    let cuts = gauge_breakpoints(n);
    let strata = cuts.len() - 1;
    if n < strata {
        return Err(invalid(alloc::format!(
            "boundary-stratified sampling needs at least {strata} nodes"
        )));
    }
    let dim = domain.ambient_dim();
    let counts = split_counts(n, strata);
    let mut nodes = Vec::with_capacity(n);
    for (k, &m) in counts.iter().enumerate() {
        let (a, b) = (cuts[k], cuts[k + 1]);
        let w = (domain.radial_volume(b) - domain.radial_volume(a)) / m as f64;
        for _ in 0..m {
            let s = shell_radius(dim, a, b, rng);
            let q = loop {
                let q = uniform_point(domain, rng);
                let g = domain.radial_gauge(&q);
                if g > 1e-12 {
                    break q.scale(s / g);
                }
            };
            nodes.push(Node { point: q, weight: w });
        }
    }
    Ok(nodes)
}

/// Human-readable strategy tag, used in file headers and ids.
pub fn strategy_tag(s: &Strategy) -> String {
    alloc::format!("{s}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn uniform_small_example() {
        let nodes = sample_nodes(Domain::unit_disk(), 4, 7, Strategy::Uniform).unwrap();
        assert_eq!(nodes.len(), 4);
        for n in &nodes {
            assert!(Domain::unit_disk().contains(&n.point).unwrap());
            assert_eq!(n.weight, PI / 4.0);
        }
    }

    #[test]
    fn deterministic() {
        let s = Strategy::PoleRefined(Point::xy(0.2, 0.1));
        let a = sample_nodes(Domain::unit_disk(), 1000, 5, s).unwrap();
        let b = sample_nodes(Domain::unit_disk(), 1000, 5, s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn strategy_round_trips_through_text() {
        for s in [
            Strategy::Uniform,
            Strategy::BoundaryStratified,
            Strategy::PoleRefined(Point::xy(0.25, -0.5)),
        ] {
            let text = strategy_tag(&s);
            assert_eq!(text.parse::<Strategy>().unwrap(), s);
        }
        assert!("spiral".parse::<Strategy>().is_err());
    }

    #[test]
    fn pole_outside_is_rejected() {
        let s = Strategy::PoleRefined(Point::xy(1.5, 0.0));
        assert_eq!(
            sample_nodes(Domain::unit_disk(), 100, 1, s),
            Err(Error::OutsideDomain)
        );
        assert!(sample_nodes(Domain::unit_disk(), 0, 1, Strategy::Uniform).is_err());
    }

    #[test]
    fn breakpoints_are_increasing() {
        for n in [100, 10_000, 200_000] {
            let c = gauge_breakpoints(n);
            assert!(c.windows(2).all(|w| w[0] < w[1]), "{c:?}");
            assert_eq!(c[0], 0.0);
            assert_eq!(*c.last().unwrap(), 1.0);
        }
    }
}
