//! Classical Green functions and Poisson kernels on the unit disk and the
//! unit ball of R³.
//!
//! Normalization: `G(x, y) ~ log|x - y|` in the plane and
//! `G(x, y) ~ -|x - y|^{-1}` in R³, with no `1/((n-2)σ)` prefactor. The
//! Poisson kernel is the outward normal derivative of `G` at the boundary,
//! which gives `(1 - |x|²)/|x - ζ|^n` in both cases.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{Domain, DomainKind};
use crate::numeric::pairwise_sum_by;
use crate::sampling::{gauge_breakpoints, unit_direction, Node};
use crate::{error::invalid, Error, Point, Result};

/// Slack used when counting inequality violations, relative to the bound.
pub const VIOLATION_SLACK: f64 = 1e-12;

/// Step of the one-sided normal-derivative stencil.
pub const NORMAL_FD_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenEvaluator {
    domain: Domain,
}

impl GreenEvaluator {
    pub fn new(domain: Domain) -> Result<Self> {
        match domain.kind() {
            DomainKind::UnitDisk | DomainKind::Ball3 => Ok(Self { domain }),
            k => Err(invalid(alloc::format!("no classical Green evaluator for {k}"))),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.ambient_dim()
    }

    fn check_interior(&self, p: &Point) -> Result<()> {
        if self.domain.contains(p)? {
            Ok(())
        } else {
            Err(Error::OutsideDomain)
        }
    }

    /// `G_D(x, y)`, `-inf` on the diagonal.
    pub fn green(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_interior(x)?;
        self.check_interior(y)?;
        Ok(self.green_unchecked(x, y))
    }

    pub(crate) fn green_unchecked(&self, x: &Point, y: &Point) -> f64 {
        let d2 = x.sub(y).norm_sqr();
        if d2 == 0.0 {
            return f64::NEG_INFINITY;
        }
        // (1-|x|²)(1-|y|²) = |y|²|x-y*|² - |x-y|² for the reflected pole y*
        let m = (1.0 - x.norm_sqr()) * (1.0 - y.norm_sqr());
        match self.domain.kind() {
            DomainKind::UnitDisk => -0.5 * (m / d2).ln_1p(),
            _ => {
                let d = d2.sqrt();
                let q = (d2 + m).sqrt();
                -m / (d * q * (q + d))
            }
        }
    }

    /// Poisson kernel `P_D(x, ζ) = ∂G/∂n(ζ)`.
    pub fn poisson(&self, x: &Point, zeta: &Point) -> Result<f64> {
        self.check_interior(x)?;
        zeta.expect_dim(self.dim())?;
        let off = (zeta.norm() - 1.0).abs();
        if off > 1e-12 {
            return Err(Error::NotOnBoundary(off));
        }
        Ok(self.poisson_unchecked(x, zeta))
    }

    pub(crate) fn poisson_unchecked(&self, x: &Point, zeta: &Point) -> f64 {
        (1.0 - x.norm_sqr()) / x.dist(zeta).powi(self.dim() as i32)
    }

    /// Outward normal derivative of `G(x, ·)` at `ζ` by the one-sided
    /// second-order stencil `(4f(h) - f(2h)) / 2h` along the inward normal.
    pub fn poisson_by_difference(&self, x: &Point, zeta: &Point) -> Result<f64> {
        self.check_interior(x)?;
        let h = NORMAL_FD_STEP;
        let n = zeta.scale(1.0 / zeta.norm());
        let f = |t: f64| self.green_unchecked(x, &zeta.sub(&n.scale(t)));
        Ok(-(4.0 * f(h) - f(2.0 * h)) / (2.0 * h))
    }

    /// `Ĝ(x, y) = G(x, y) / G(x₀, y)`.
    pub fn martin_normalized(&self, x: &Point, y: &Point, x0: &Point) -> Result<f64> {
        if y == x0 {
            return Err(invalid("pole coincides with the normalization point"));
        }
        let den = self.green(x0, y)?;
        Ok(self.green(x, y)? / den)
    }

    /// The quantity that makes the Green lower bound tight at `(x, y)`:
    /// `(e^{-2G} - 1)|x-y|²/(δ(x)δ(y))` in the plane,
    /// `-G |x-y|³/(δ(x)δ(y))` in R³.
    pub fn green_bound_ratio(&self, x: &Point, y: &Point) -> f64 {
        let g = self.green_unchecked(x, y);
        let d2 = x.sub(y).norm_sqr();
        let dd = self.domain.depth(x) * self.domain.depth(y);
        match self.domain.kind() {
            DomainKind::UnitDisk => (-2.0 * g).exp_m1() * d2 / dd,
            _ => -g * d2 * d2.sqrt() / dd,
        }
    }

    /// Lower bound for `G(x, y)` with constant `a`.
    pub fn green_lower_bound(&self, a: f64, x: &Point, y: &Point) -> f64 {
        let d2 = x.sub(y).norm_sqr();
        let dd = self.domain.depth(x) * self.domain.depth(y);
        match self.domain.kind() {
            DomainKind::UnitDisk => -0.5 * (a * dd / d2).ln_1p(),
            _ => -a * dd / (d2 * d2.sqrt()),
        }
    }

    /// `P(x, ζ)|x-ζ|^n / δ(x)`.
    pub fn poisson_bound_ratio(&self, x: &Point, zeta: &Point) -> f64 {
        self.poisson_unchecked(x, zeta) * x.dist(zeta).powi(self.dim() as i32) / self.domain.depth(x)
    }

    /// Scans `n_pairs` seeded pairs for the Green constant `A`, then
    /// certifies `1.01·Â` on a fresh sample drawn from `seed + 1`.
    pub fn scan_green_bound(&self, n_pairs: usize, seed: u64) -> BoundScan {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a_hat = 0.0f64;
        for _ in 0..n_pairs {
            let (x, y) = self.random_pair(&mut rng);
            a_hat = a_hat.max(self.green_bound_ratio(&x, &y));
        }
        let certificate = self.check_green_bound(1.01 * a_hat, n_pairs, seed.wrapping_add(1));
        BoundScan {
            constant: a_hat,
            sample_count: n_pairs,
            seed,
            certificate,
        }
    }

    /// Counts pairs violating `G ≥ bound(a)` on `n_pairs` seeded pairs.
    pub fn check_green_bound(&self, a: f64, n_pairs: usize, seed: u64) -> BoundCertificate {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cert = BoundCertificate::new(a, n_pairs, seed);
        for _ in 0..n_pairs {
            let (x, y) = self.random_pair(&mut rng);
            let g = self.green_unchecked(&x, &y);
            let bound = self.green_lower_bound(a, &x, &y);
            cert.record(bound - g, bound);
        }
        cert
    }

    pub fn scan_poisson_bound(&self, n_pairs: usize, seed: u64) -> BoundScan {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b_hat = 0.0f64;
        for _ in 0..n_pairs {
            let (x, zeta) = self.random_boundary_pair(&mut rng);
            b_hat = b_hat.max(self.poisson_bound_ratio(&x, &zeta));
        }
        let certificate = self.check_poisson_bound(1.01 * b_hat, n_pairs, seed.wrapping_add(1));
        BoundScan {
            constant: b_hat,
            sample_count: n_pairs,
            seed,
            certificate,
        }
    }

    pub fn check_poisson_bound(&self, b: f64, n_pairs: usize, seed: u64) -> BoundCertificate {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cert = BoundCertificate::new(b, n_pairs, seed);
        for _ in 0..n_pairs {
            let (x, zeta) = self.random_boundary_pair(&mut rng);
            let p = self.poisson_unchecked(&x, &zeta);
            let bound = b * self.domain.depth(&x) / x.dist(&zeta).powi(self.dim() as i32);
            cert.record(p - bound, bound);
        }
        cert
    }

    /// Both constants in one report.
    pub fn scan_bounds(&self, n_pairs: usize, seed: u64) -> BoundConstants {
        let green = self.scan_green_bound(n_pairs, seed);
        let poisson = self.scan_poisson_bound(n_pairs, seed.wrapping_add(2));
        BoundConstants {
            a_hat: green.constant,
            b_hat: poisson.constant,
            sample_count: n_pairs,
            seed,
            green: green.certificate,
            poisson: poisson.certificate,
        }
    }

    /// Interior point whose radius is drawn from dyadic layers refined toward
    /// the center and toward the boundary, so that the extremes of the bound
    /// ratios are visited.
    fn random_point<R: Rng>(&self, rng: &mut R) -> Point {
        let cuts = gauge_breakpoints(1 << 24);
        loop {
            let k = rng.gen_range(0..cuts.len() - 1);
            let r = cuts[k] + (cuts[k + 1] - cuts[k]) * rng.gen::<f64>();
            let p = unit_direction(self.dim(), rng).scale(r);
            if self.domain.depth(&p) > 0.0 {
                return p;
            }
        }
    }

    fn random_pair<R: Rng>(&self, rng: &mut R) -> (Point, Point) {
        loop {
            let x = self.random_point(rng);
            let y = self.random_point(rng);
            if x != y {
                return (x, y);
            }
        }
    }

    fn random_boundary_pair<R: Rng>(&self, rng: &mut R) -> (Point, Point) {
        let x = self.random_point(rng);
        let zeta = unit_direction(self.dim(), rng);
        (x, zeta)
    }

    /// Poisson–Jensen right-hand side
    /// `∫ G(x, y) dν(y) - Σ P(x, ζ_i) μ_i`, with the density part of `ν`
    /// integrated on `nodes`.
    pub fn poisson_jensen_eval(&self, r: &RieszDecomposition, x: &Point, nodes: &[Node]) -> Result<f64> {
        self.check_interior(x)?;
        let interior = match &r.riesz {
            RieszMeasure::Zero => 0.0,
            RieszMeasure::PointMasses(masses) => masses
                .iter()
                .map(|(y, m)| self.green_unchecked(x, y) * m)
                .sum(),
            RieszMeasure::Density(rho) => {
                for n in nodes {
                    if !self.domain.contains(&n.point)? {
                        return Err(invalid("quadrature node outside the evaluator's domain"));
                    }
                }
                pairwise_sum_by(nodes.len(), &mut |i| {
                    let n = &nodes[i];
                    let g = self.green_unchecked(x, &n.point);
                    if g.is_finite() {
                        g * rho(&n.point) * n.weight
                    } else {
                        0.0
                    }
                })
            }
        };
        Ok(interior + r.majorant_with(self, x))
    }
}

/// Result of scanning one constant.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundScan {
    pub constant: f64,
    pub sample_count: usize,
    pub seed: u64,
    pub certificate: BoundCertificate,
}

/// Outcome of testing an inequality with a fixed constant.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCertificate {
    pub constant_tested: f64,
    pub pairs: usize,
    pub seed: u64,
    pub violations: usize,
    /// Largest observed `lhs - rhs` in the violating direction (≤ 0 when the
    /// inequality holds everywhere).
    pub max_violation: f64,
}

impl BoundCertificate {
    fn new(constant: f64, pairs: usize, seed: u64) -> Self {
        Self {
            constant_tested: constant,
            pairs,
            seed,
            violations: 0,
            max_violation: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, excess: f64, bound: f64) {
        self.max_violation = self.max_violation.max(excess);
        if excess > VIOLATION_SLACK * (1.0 + bound.abs()) {
            self.violations += 1;
        }
    }

    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundConstants {
    pub a_hat: f64,
    pub b_hat: f64,
    pub sample_count: usize,
    pub seed: u64,
    pub green: BoundCertificate,
    pub poisson: BoundCertificate,
}

impl BoundConstants {
    pub fn pass(&self) -> bool {
        self.a_hat.is_finite()
            && self.b_hat.is_finite()
            && self.a_hat > 0.0
            && self.b_hat > 0.0
            && self.green.holds()
            && self.poisson.holds()
    }
}

/// The interior part `ν` of a Riesz decomposition, normalized so that
/// `ν = Δu/2π` in the plane and `ν = Δu/4π` in R³.
pub enum RieszMeasure {
    Zero,
    Density(Box<dyn Fn(&Point) -> f64 + Send + Sync>),
    PointMasses(Vec<(Point, f64)>),
}

/// Closed-form data `(ν, μ)` of a negative subharmonic function
/// `u = ∫G dν - ∫P dμ`.
pub struct RieszDecomposition {
    pub riesz: RieszMeasure,
    pub boundary: Vec<(Point, f64)>,
}

impl RieszDecomposition {
    pub fn new(riesz: RieszMeasure, boundary: Vec<(Point, f64)>) -> Result<Self> {
        if boundary.iter().any(|(_, m)| *m < 0.0) {
            return Err(invalid("boundary masses must be nonnegative"));
        }
        if let RieszMeasure::PointMasses(ms) = &riesz {
            if ms.iter().any(|(_, m)| *m < 0.0) {
                return Err(invalid("Riesz point masses must be nonnegative"));
            }
        }
        Ok(Self { riesz, boundary })
    }

    /// Least harmonic majorant `H(x) = -Σ P(x, ζ_i) μ_i`.
    pub fn majorant_with(&self, g: &GreenEvaluator, x: &Point) -> f64 {
        -self
            .boundary
            .iter()
            .map(|(z, m)| g.poisson_unchecked(x, z) * m)
            .sum::<f64>()
    }

    /// `u(z) = |z|² - 1` on the disk: `ν = (2/π) dA`, `μ = 0`.
    pub fn disk_quadratic() -> Self {
        Self {
            riesz: RieszMeasure::Density(Box::new(|_| 2.0 / PI)),
            boundary: Vec::new(),
        }
    }

    /// `u = G(·, a)`, which is `log|z|` on the disk for `a = 0`: `ν = δ_a`, `μ = 0`.
    pub fn log_pole(a: Point) -> Self {
        Self {
            riesz: RieszMeasure::PointMasses(alloc::vec![(a, 1.0)]),
            boundary: Vec::new(),
        }
    }

    /// `u = -P(·, ζ)`: `ν = 0`, `μ = δ_ζ`.
    pub fn negated_poisson(zeta: Point) -> Self {
        Self {
            riesz: RieszMeasure::Zero,
            boundary: alloc::vec![(zeta, 1.0)],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk() -> GreenEvaluator {
        GreenEvaluator::new(Domain::unit_disk()).unwrap()
    }

    #[test]
    fn green_examples() {
        let g = disk();
        let v = g.green(&Point::xy(0.0, 0.0), &Point::xy(0.5, 0.0)).unwrap();
        assert!((v - 0.5f64.ln()).abs() < 1e-15);
        let a = g.green(&Point::xy(0.3, 0.0), &Point::xy(0.7, 0.0)).unwrap();
        assert!((a - (0.4f64 / 0.79).ln()).abs() < 1e-14);
        let b = g.green(&Point::xy(0.7, 0.0), &Point::xy(0.3, 0.0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            g.green(&Point::xy(0.2, 0.1), &Point::xy(0.2, 0.1)).unwrap(),
            f64::NEG_INFINITY
        );
        assert_eq!(
            g.green(&Point::xy(1.2, 0.0), &Point::xy(0.0, 0.0)),
            Err(Error::OutsideDomain)
        );
    }

    #[test]
    fn poisson_examples() {
        let g = disk();
        assert_eq!(g.poisson(&Point::xy(0.0, 0.0), &Point::xy(0.6, 0.8)).unwrap(), 1.0);
        let p = g.poisson(&Point::xy(0.5, 0.0), &Point::xy(1.0, 0.0)).unwrap();
        assert!((p - 3.0).abs() < 1e-14);
        assert!(matches!(
            g.poisson(&Point::xy(0.5, 0.0), &Point::xy(0.9, 0.0)),
            Err(Error::NotOnBoundary(_))
        ));
        let p = g.poisson(&Point::xy(0.99, 0.0), &Point::xy(1.0, 0.0)).unwrap();
        assert!((p - 199.0).abs() < 1e-9);
        assert!(p <= 2.0 * 0.01 / 1e-4);
    }

    #[test]
    fn only_disk_and_ball3() {
        assert!(GreenEvaluator::new(Domain::bidisk()).is_err());
        assert!(GreenEvaluator::new(Domain::ball3()).is_ok());
    }

    #[test]
    fn martin_ratio_is_one_at_base_point() {
        let g = disk();
        let x0 = Point::xy(0.0, 0.0);
        let y = Point::xy(0.4, 0.2);
        assert_eq!(g.martin_normalized(&x0, &y, &x0).unwrap(), 1.0);
        assert!(g.martin_normalized(&x0, &x0, &x0).is_err());
    }

    #[test]
    fn common_radius_pair_satisfies_disk_bound() {
        let g = disk();
        let (x, y) = (Point::xy(0.9, 0.0), Point::xy(0.95, 0.0));
        let v = g.green(&x, &y).unwrap();
        assert!(v >= g.green_lower_bound(4.0, &x, &y));
        assert!(g.green_bound_ratio(&x, &y) <= 4.0);
    }

    #[test]
    fn point_mass_and_boundary_mass_reproduce_exactly() {
        let g = disk();
        let x = Point::xy(0.5, 0.0);
        let u = RieszDecomposition::log_pole(Point::xy(0.0, 0.0));
        let v = g.poisson_jensen_eval(&u, &x, &[]).unwrap();
        assert!((v - 0.5f64.ln()).abs() < 1e-15);
        let u = RieszDecomposition::negated_poisson(Point::xy(1.0, 0.0));
        let v = g.poisson_jensen_eval(&u, &Point::xy(0.0, 0.0), &[]).unwrap();
        assert_eq!(v, -1.0);
    }

    #[test]
    fn negative_masses_rejected() {
        assert!(RieszDecomposition::new(RieszMeasure::Zero, alloc::vec![(Point::xy(1.0, 0.0), -1.0)]).is_err());
    }
}
