//! Certified constants `c` with `inf_F v ≥ c ∫_{D_{j+1}} v` for every
//! nonnegative superharmonic `v`.
//!
//! `D_{j+1}` is covered by Whitney cells of a `2^d`-tree. Each cell ball is
//! linked to a fixed hub ball around the anchor by a chain of small balls
//! along the segment joining their centers. One hop uses the
//! super-mean-value inequality on a ball that swallows the next small ball,
//! so for `y` in the current ball
//! `v(y) ≥ |B(y, R)|⁻¹ ∫_{B_next} v ≥ (σ_next / R)^d inf_{B_next} v`.
//! Everything is accumulated in logarithms; the constants are tiny.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::domain::{Domain, DomainKind, Exhaustion};
use crate::numeric::ball_volume;
use crate::{error::invalid, Error, Point, Result};

/// A cell is a leaf once its half-diagonal is at most this fraction of the
/// distance from its center to the boundary.
pub const LEAF_RATIO: f64 = 0.25;

/// Radius of an intermediate chain ball relative to its depth.
const SPREAD: f64 = 1.0 / 9.0;

/// Fraction of the admissible hop length actually used.
const STRIDE: f64 = 7.0 / 8.0;

const MAX_TREE_DEPTH: usize = 48;
const MAX_HOPS: usize = 100_000;
const PROBES: usize = 64;

/// A compact subset of the domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CompactSet {
    Point(Point),
    /// Closed ball.
    Ball { center: Point, radius: f64 },
    /// Closure of the exhaustion level `D_j` (1-based).
    Level(usize),
}

impl fmt::Display for CompactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompactSet::Point(p) => write!(f, "point{p}"),
            CompactSet::Ball { center, radius } => write!(f, "ball({center}, {radius})"),
            CompactSet::Level(j) => write!(f, "D_{j}"),
        }
    }
}

impl CompactSet {
    /// Whether `p` lies in the set.
    pub fn contains(&self, e: &Exhaustion, p: &Point) -> bool {
        match self {
            CompactSet::Point(q) => p == q,
            CompactSet::Ball { center, radius } => p.dist(center) <= *radius,
            CompactSet::Level(j) => match e.scales().get(j.wrapping_sub(1)) {
                Some(t) => e.domain().gauge(&e.anchor(), p) <= *t,
                None => false,
            },
        }
    }

    /// `m` points on the topological boundary of the set (one for a point).
    pub fn boundary_samples(&self, e: &Exhaustion, m: usize) -> Result<Vec<Point>> {
        let dim = e.domain().ambient_dim();
        let dirs = directions(dim, m);
        match self {
            CompactSet::Point(p) => Ok(alloc::vec![*p]),
            CompactSet::Ball { center, radius } => Ok(dirs.iter().map(|u| center.add(&u.scale(*radius))).collect()),
            CompactSet::Level(j) => {
                let t = e.level(*j)?.scale;
                let a = e.anchor();
                Ok(dirs
                    .iter()
                    .map(|u| {
                        let b = e.domain().boundary_point_along(&a, u);
                        a.lerp(&b, t)
                    })
                    .collect())
            }
        }
    }

    /// Checks that the set lies in `D_j` (closures of levels up to `j` allowed).
    fn check_inside(&self, e: &Exhaustion, j: usize) -> Result<()> {
        let level = e.level(j)?;
        let ok = match self {
            CompactSet::Point(p) => level.contains(p),
            CompactSet::Ball { center, radius } => {
                *radius >= 0.0 && level.contains(center) && level.boundary_distance(center)? > *radius
            }
            CompactSet::Level(k) => *k >= 1 && *k <= j,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(alloc::format!("{self} is not compactly contained in D_{j}")))
        }
    }
}

/// `m` unit vectors spread over the circle or the sphere.
pub(crate) fn directions(dim: usize, m: usize) -> Vec<Point> {
    let m = m.max(1);
    match dim {
        2 => (0..m)
            .map(|k| {
                let t = core::f64::consts::TAU * k as f64 / m as f64;
                Point::xy(t.cos(), t.sin())
            })
            .collect(),
        _ => {
            let golden = core::f64::consts::PI * (3.0 - 5.0f64.sqrt());
            (0..m)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / m as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    Point::xyz(r * t.cos(), r * t.sin(), z)
                })
                .collect()
        }
    }
}

/// `ln K` with `inf_{B(start, s0)} v ≥ K ∫_{B(target, rt)} v`, and the
/// number of hops, or `None` if the chain cannot be built.
fn chain_log(domain: Domain, start: &Point, s0: f64, target: &Point, rt: f64) -> Option<(f64, usize)> {
    let d = domain.ambient_dim();
    let (mut p, mut s, mut log_k) = (*start, s0, 0.0);
    for hops in 1..=MAX_HOPS {
        let budget = domain.depth(&p) - 2.0 * s;
        if budget <= 0.0 {
            return None;
        }
        let r = p.dist(target);
        if r + rt <= budget {
            return Some((log_k - ball_volume(d, r + s + rt).ln(), hops));
        }
        let step = (STRIDE * budget).min(r);
        let q = p.lerp(target, step / r);
        let sq = (SPREAD * domain.depth(&q)).min(budget - step);
        if sq <= 0.0 {
            return None;
        }
        log_k += d as f64 * (sq / (step + s + sq)).ln();
        p = q;
        s = sq;
    }
    None
}

/// Visits the leaves of the Whitney tree covering `D_t`: cells whose center
/// `c` satisfies `gauge(c) ≤ t + ρ/δ(anchor)` and `ρ ≤ LEAF_RATIO · δ(c)`.
fn for_each_leaf(e: &Exhaustion, t: f64, mut visit: impl FnMut(&Point, f64) -> Result<()>) -> Result<()> {
    let domain = e.domain();
    let dim = domain.ambient_dim();
    let (a, da) = (e.anchor(), e.anchor_depth());
    let (lo, hi) = domain.bounding_box();
    let mut half = [0.0; 4];
    let mut center = [0.0; 4];
    for k in 0..dim {
        half[k] = 0.5 * (hi[k] - lo[k]);
        center[k] = 0.5 * (hi[k] + lo[k]);
    }
    let mut stack = alloc::vec![(center, half, 0usize)];
    while let Some((c, h, level)) = stack.pop() {
        let rho = h[..dim].iter().map(|x| x * x).sum::<f64>().sqrt();
        let cp = Point::new(&c[..dim])?;
        if domain.gauge(&a, &cp) > t + rho / da {
            continue;
        }
        let depth = domain.depth(&cp);
        if depth > 0.0 && rho <= LEAF_RATIO * depth {
            visit(&cp, rho)?;
            continue;
        }
        if level >= MAX_TREE_DEPTH {
            return Err(invalid("Whitney tree exceeded its depth limit"));
        }
        let mut hc = h;
        for x in hc.iter_mut().take(dim) {
            *x *= 0.5;
        }
        for mask in 0..(1usize << dim) {
            let mut cc = c;
            for k in 0..dim {
                cc[k] += if mask >> k & 1 == 1 { hc[k] } else { -hc[k] };
            }
            stack.push((cc, hc, level + 1));
        }
    }
    Ok(())
}

/// A sampled cell with its certified constant: `inf_F v ≥ e^{log_k} ∫_B v`
/// for `B = B(center, radius)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellProbe {
    pub center: Point,
    pub radius: f64,
    pub log_k: f64,
}

/// Result of [`pointwise_mass_constant`].
#[derive(Clone, Debug, PartialEq)]
pub struct MassConstant {
    pub log_constant: f64,
    /// Leaf cells covering `D_{j+1}`.
    pub cells: usize,
    /// Longest chain in hops.
    pub max_hops: usize,
    /// Whether a single super-mean-value ball around `F` beat the chains.
    pub single_ball: bool,
    /// A spread-out subset of cells with their individual constants.
    pub probes: Vec<CellProbe>,
}

impl MassConstant {
    /// The constant itself; may underflow to 0 for deep levels.
    pub fn constant(&self) -> f64 {
        self.log_constant.exp()
    }
}

/// Radius of the hub ball around the anchor, inside `D_1`.
pub(crate) fn hub_radius(e: &Exhaustion) -> f64 {
    e.anchor_depth() * (0.25f64).min(0.5 * e.scales()[0])
}

pub(crate) fn check_real(domain: Domain) -> Result<()> {
    match domain.kind() {
        DomainKind::UnitDisk | DomainKind::QuarterDisk | DomainKind::Ball3 => Ok(()),
        k => Err(invalid(alloc::format!("norming weights are built on real domains, not {k}"))),
    }
}

/// Sum over the cover of `D_{j+1}`, plus the seed constant for `F`.
pub(crate) struct LevelSums {
    /// `ln Σ_i 1/k_i` with `inf_hub v ≥ k_i ∫_{cell_i} v`.
    pub log_out: f64,
    /// `ln K` with `inf_F v ≥ K inf_hub v`.
    pub log_in: f64,
    pub cells: usize,
    pub max_hops: usize,
    pub probes: Vec<CellProbe>,
}

pub(crate) fn level_sums(e: &Exhaustion, j: usize, f: &CompactSet) -> Result<LevelSums> {
    let domain = e.domain();
    let dim = domain.ambient_dim();
    let t_next = e.level(j)?.next_scale;
    if j >= e.len() {
        return Err(Error::LevelOutOfRange {
            level: j + 1,
            levels: e.len(),
        });
    }
    let a = e.anchor();
    let da = e.anchor_depth();
    let hub_r = hub_radius(e);
    let log_hub = ball_volume(dim, hub_r).ln();
    let fail = |reason: &str| Error::CertificationFailed {
        level: j,
        reason: reason.into(),
    };

    let mut seed_log = f64::INFINITY;
    let direct_seed = match f {
        CompactSet::Point(p) => Some((*p, 0.0)),
        CompactSet::Ball { center, radius } => Some((*center, *radius)),
        CompactSet::Level(_) => None,
    };
    if let Some((x, r)) = direct_seed {
        if x.dist(&a) + r <= hub_r {
            seed_log = 0.0;
        } else if r <= LEAF_RATIO * domain.depth(&x) {
            let (k, _) = chain_log(domain, &x, r, &a, hub_r).ok_or_else(|| fail("seed chain broke"))?;
            seed_log = k + log_hub;
        }
    }
    let cell_seeds = seed_log.is_infinite();
    let seed_scale = match f {
        CompactSet::Level(k) => Some(e.level(*k)?.scale),
        _ => None,
    };

    let (mut max_lo, mut acc) = (f64::NEG_INFINITY, 0.0f64);
    let mut cells = 0usize;
    let mut max_hops = 0usize;
    let mut outs: Vec<(Point, f64, f64)> = Vec::new();
    for_each_leaf(e, t_next, |c, rho| {
        let (k_out, hops) = chain_log(domain, &a, hub_r, c, rho).ok_or_else(|| fail("cover chain broke"))?;
        cells += 1;
        max_hops = max_hops.max(hops);
        let x = -k_out;
        if x > max_lo {
            acc = acc * (max_lo - x).exp() + 1.0;
            max_lo = x;
        } else {
            acc += (x - max_lo).exp();
        }
        if outs.len() < 1 << 16 {
            outs.push((*c, rho, k_out));
        }
        if cell_seeds {
            let touches = match (f, seed_scale) {
                (CompactSet::Level(_), Some(t)) => domain.gauge(&a, c) <= t + rho / da,
                (CompactSet::Ball { center, radius }, _) => c.dist(center) <= radius + rho,
                (CompactSet::Point(p), _) => c.dist(p) <= rho,
                _ => false,
            };
            if touches {
                let (k_in, h) = chain_log(domain, c, rho, &a, hub_r).ok_or_else(|| fail("seed chain broke"))?;
                max_hops = max_hops.max(h);
                seed_log = seed_log.min(k_in + log_hub);
            }
        }
        Ok(())
    })?;
    if cells == 0 || !seed_log.is_finite() {
        return Err(fail("the cover does not reach F"));
    }
    let log_out = max_lo + acc.ln();
    let stride = (outs.len() / PROBES).max(1);
    let probes = outs
        .iter()
        .step_by(stride)
        .map(|(c, rho, k)| CellProbe {
            center: *c,
            radius: *rho,
            log_k: seed_log + k,
        })
        .collect();
    Ok(LevelSums {
        log_out,
        log_in: seed_log,
        cells,
        max_hops,
        probes,
    })
}

/// A certified `c > 0` with `inf_F v ≥ c ∫_{D_{j+1}} v` for every
/// nonnegative superharmonic `v` on the domain, for a compact `F ⊂ D_j`.
///
/// `c = K_F / Σ_i k_i⁻¹`, where `inf_hub v ≥ k_i ∫_{cell_i} v` over the
/// cover of `D_{j+1}` and `inf_F v ≥ K_F inf_hub v`. When `F` is a ball
/// whose center sees all of `D_{j+1}` inside one ball `B(x, R) ⊂ D`, the
/// single-ball bound `1/|B(x, R)|` is used if it is larger.
pub fn pointwise_mass_constant(e: &Exhaustion, j: usize, f: &CompactSet) -> Result<MassConstant> {
    let domain = e.domain();
    check_real(domain)?;
    f.check_inside(e, j)?;
    let sums = level_sums(e, j, f)?;
    let mut log_c = sums.log_in - sums.log_out;
    let mut single_ball = false;
    if let CompactSet::Point(_) | CompactSet::Ball { .. } = f {
        let (x, r) = match f {
            CompactSet::Point(p) => (*p, 0.0),
            CompactSet::Ball { center, radius } => (*center, *radius),
            _ => unreachable!(),
        };
        // every model real domain lies in the unit ball, so D_{j+1} lies in
        // the ball of radius t about (1 - t) a
        let t = e.level(j)?.next_scale;
        let big = e.anchor().scale(1.0 - t).dist(&x) + t + r;
        if big <= domain.depth(&x) - r {
            let alt = -ball_volume(domain.ambient_dim(), big).ln();
            if alt > log_c {
                log_c = alt;
                single_ball = true;
            }
        }
    }
    Ok(MassConstant {
        log_constant: log_c,
        cells: sums.cells,
        max_hops: sums.max_hops,
        single_ball,
        probes: sums.probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn single_ball_case() {
        let e = Exhaustion::new(Domain::unit_disk(), Point::origin(2), alloc::vec![0.5, 0.75]).unwrap();
        let m = pointwise_mass_constant(&e, 1, &CompactSet::Point(Point::origin(2))).unwrap();
        assert!(m.single_ball);
        assert!((m.constant() - 1.0 / (PI * 0.5625)).abs() < 1e-12);
    }

    #[test]
    fn level_constant_is_positive() {
        let e = Exhaustion::dyadic(Domain::quarter_disk(), 3).unwrap();
        let m = pointwise_mass_constant(&e, 1, &CompactSet::Level(2)).unwrap_err();
        assert!(matches!(m, Error::InvalidParameter(_)));
        let m = pointwise_mass_constant(&e, 2, &CompactSet::Level(1)).unwrap();
        assert!(m.log_constant.is_finite());
        assert!(m.cells > 10);
    }

    #[test]
    fn chain_to_itself_is_one_ball() {
        let d = Domain::unit_disk();
        let (k, hops) = chain_log(d, &Point::origin(2), 0.1, &Point::origin(2), 0.2).unwrap();
        assert_eq!(hops, 1);
        assert!((k + (PI * 0.09).ln()).abs() < 1e-12);
    }
}
