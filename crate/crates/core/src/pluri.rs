//! Pluricomplex Green functions on the unit ball of C² and on the bidisk.
//!
//! Convention: the pole is logarithmic, `g(z, w) - log‖z - w‖` bounded near
//! `w`. On the ball this is `g(z, a) = log‖φ_a(z)‖` for the involutive
//! automorphism `φ_a` exchanging `a` and `0`; on the bidisk it is the log of
//! the larger coordinate Möbius modulus.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compactification::LimitKernel;
use crate::domain::{Domain, DomainKind};
use crate::numeric::five_point_laplacian;
use crate::sampling::{uniform_point, unit_direction};
use crate::{error::invalid, Error, Point, Result};

/// Hermitian product `⟨z, a⟩ = z₁ā₁ + z₂ā₂`.
#[inline]
pub fn hermitian(z: &Point, a: &Point) -> Complex64 {
    z.z1() * a.z1().conj() + z.z2() * a.z2().conj()
}

fn check_ball(p: &Point) -> Result<()> {
    if Domain::cball2().contains(p)? {
        Ok(())
    } else {
        Err(Error::OutsideDomain)
    }
}

fn check_bidisk(p: &Point) -> Result<()> {
    if Domain::bidisk().contains(p)? {
        Ok(())
    } else {
        Err(Error::OutsideDomain)
    }
}

/// `‖φ_a(z)‖²` through
/// `(|z - a|² - |z₁a₂ - z₂a₁|²) / |1 - ⟨z, a⟩|²`, which avoids the
/// cancellation of `1 - (1-‖z‖²)(1-‖a‖²)/|1-⟨z,a⟩|²` near the pole.
#[inline]
pub(crate) fn ball_moebius_sqr(z: &Point, a: &Point) -> f64 {
    let (d1, d2) = (z.z1() - a.z1(), z.z2() - a.z2());
    let wedge = d1 * a.z2() - d2 * a.z1();
    let num = (d1.norm_sqr() + d2.norm_sqr() - wedge.norm_sqr()).max(0.0);
    num / (Complex64::new(1.0, 0.0) - hermitian(z, a)).norm_sqr()
}

/// Pluricomplex Green function of the unit ball of C².
pub fn ball_green(z: &Point, a: &Point) -> Result<f64> {
    check_ball(z)?;
    check_ball(a)?;
    Ok(ball_green_unchecked(z, a))
}

#[inline]
pub(crate) fn ball_green_unchecked(z: &Point, a: &Point) -> f64 {
    0.5 * ball_moebius_sqr(z, a).ln()
}

#[inline]
fn disk_moebius(z: Complex64, w: Complex64) -> f64 {
    ((z - w) / (Complex64::new(1.0, 0.0) - z * w.conj())).norm()
}

/// Pluricomplex Green function of the bidisk.
pub fn polydisk_green(z: &Point, w: &Point) -> Result<f64> {
    check_bidisk(z)?;
    check_bidisk(w)?;
    Ok(polydisk_green_unchecked(z, w))
}

#[inline]
pub(crate) fn polydisk_green_unchecked(z: &Point, w: &Point) -> f64 {
    disk_moebius(z.z1(), w.z1()).max(disk_moebius(z.z2(), w.z2())).ln()
}

/// Holomorphic automorphism `F(z) = U φ_a(z)` of the ball, with `U` unitary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallAutomorphism {
    a: Point,
    u: [[Complex64; 2]; 2],
}

impl BallAutomorphism {
    pub fn identity() -> Self {
        Self::from_unitary([[1.0.into(), 0.0.into()], [0.0.into(), 1.0.into()]])
    }

    /// Unitary map `z ↦ U z`.
    pub fn unitary(u: [[Complex64; 2]; 2]) -> Result<Self> {
        for i in 0..2 {
            for j in 0..2 {
                let e = u[0][i].conj() * u[0][j] + u[1][i].conj() * u[1][j];
                let target = if i == j { 1.0 } else { 0.0 };
                if (e - target).norm() > 1e-12 {
                    return Err(invalid("matrix is not unitary"));
                }
            }
        }
        Ok(Self::from_unitary(u))
    }

    fn from_unitary(u: [[Complex64; 2]; 2]) -> Self {
        // φ_0 is z ↦ -z, so absorb the sign into U
        Self {
            a: Point::origin(4),
            u: u.map(|row| row.map(|c| -c)),
        }
    }

    /// `(z₁, z₂) ↦ (z₂, z₁)`.
    pub fn swap() -> Self {
        Self::from_unitary([[0.0.into(), 1.0.into()], [1.0.into(), 0.0.into()]])
    }

    /// The involution `φ_b`.
    pub fn moebius(b: Point) -> Result<Self> {
        check_ball(&b)?;
        Ok(Self {
            a: b,
            u: [[1.0.into(), 0.0.into()], [0.0.into(), 1.0.into()]],
        })
    }

    /// Random automorphism: `b` uniform in the ball of radius 0.9 and
    /// `U = e^{iθ}[[α, -β̄], [β, ᾱ]]` with `(α, β)` uniform on the sphere.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let b = unit_direction(4, rng).scale(0.9 * rng.gen::<f64>().powf(0.25));
        let s = unit_direction(4, rng);
        let (alpha, beta) = (s.z1(), s.z2());
        let phase = Complex64::from_polar(1.0, core::f64::consts::TAU * rng.gen::<f64>());
        Self {
            a: b,
            u: [
                [phase * alpha, -phase * beta.conj()],
                [phase * beta, phase * alpha.conj()],
            ],
        }
    }

    pub fn apply(&self, z: &Point) -> Point {
        let v = moebius_map(&self.a, z);
        let (v1, v2) = (v.z1(), v.z2());
        Point::c2(
            self.u[0][0] * v1 + self.u[0][1] * v2,
            self.u[1][0] * v1 + self.u[1][1] * v2,
        )
    }
}

/// `φ_a(z) = (a - P_a z - s_a Q_a z) / (1 - ⟨z, a⟩)`, `s_a = √(1 - ‖a‖²)`.
pub fn moebius_map(a: &Point, z: &Point) -> Point {
    let aa = a.norm_sqr();
    if aa == 0.0 {
        return z.scale(-1.0);
    }
    let za = hermitian(z, a);
    let proj = za / aa;
    let (p1, p2) = (proj * a.z1(), proj * a.z2());
    let (q1, q2) = (z.z1() - p1, z.z2() - p2);
    let s = (1.0 - aa).sqrt();
    let den = Complex64::new(1.0, 0.0) - za;
    Point::c2((a.z1() - p1 - q1 * s) / den, (a.z2() - p2 - q2 * s) / den)
}

/// Kobayashi distance of the ball, computed from the explicit automorphism
/// `φ_w` as `artanh ‖φ_w(z)‖`. Independent of the closed form used by
/// [`ball_green`], which it checks through `g = log tanh k`.
#[derive(Clone, Copy, Debug, Default)]
pub struct KobayashiOracle;

impl KobayashiOracle {
    pub fn distance(&self, z: &Point, w: &Point) -> Result<f64> {
        check_ball(z)?;
        check_ball(w)?;
        Ok(moebius_map(w, z).norm().atanh())
    }
}

/// Evaluator for `g_M(z, w)` on one of the complex model domains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PluriGreenEvaluator {
    domain: Domain,
}

impl PluriGreenEvaluator {
    pub fn new(domain: Domain) -> Result<Self> {
        match domain.kind() {
            DomainKind::CBall2 | DomainKind::Bidisk => Ok(Self { domain }),
            k => Err(invalid(alloc::format!("no pluricomplex Green evaluator for {k}"))),
        }
    }

    pub fn ball() -> Self {
        Self {
            domain: Domain::cball2(),
        }
    }

    pub fn bidisk() -> Self {
        Self {
            domain: Domain::bidisk(),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn green(&self, z: &Point, w: &Point) -> Result<f64> {
        match self.domain.kind() {
            DomainKind::CBall2 => ball_green(z, w),
            _ => polydisk_green(z, w),
        }
    }

    #[inline]
    pub(crate) fn green_unchecked(&self, z: &Point, w: &Point) -> f64 {
        match self.domain.kind() {
            DomainKind::CBall2 => ball_green_unchecked(z, w),
            _ => polydisk_green_unchecked(z, w),
        }
    }

    /// Radius of the smallest ball centered at `w` containing the domain.
    pub fn circumscribed_radius(&self, w: &Point) -> f64 {
        match self.domain.kind() {
            DomainKind::CBall2 => 1.0 + w.norm(),
            _ => {
                let r1 = 1.0 + w.z1().norm();
                let r2 = 1.0 + w.z2().norm();
                (r1 * r1 + r2 * r2).sqrt()
            }
        }
    }

    pub fn radius_rule(&self) -> &'static str {
        match self.domain.kind() {
            DomainKind::CBall2 => "r_w = 1 + |w|",
            _ => "r_w = sqrt((1 + |w1|)^2 + (1 + |w2|)^2)",
        }
    }

    /// Checks `g(z, w) ≥ log(‖z - w‖ / r_w)` on seeded uniform pairs.
    pub fn lower_bound_check(&self, n_pairs: usize, seed: u64) -> LowerBoundReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = LowerBoundReport {
            pairs: n_pairs,
            seed,
            violations: 0,
            max_violation: f64::NEG_INFINITY,
            radius_rule: self.radius_rule(),
        };
        for _ in 0..n_pairs {
            let z = uniform_point(self.domain, &mut rng);
            let w = uniform_point(self.domain, &mut rng);
            let g = self.green_unchecked(&z, &w);
            let bound = (z.dist(&w) / self.circumscribed_radius(&w)).ln();
            let excess = bound - g;
            report.max_violation = report.max_violation.max(excess);
            if excess > 1e-12 * (1.0 + bound.abs()) {
                report.violations += 1;
            }
        }
        report
    }

    /// Extremes of `g(z, w₀)/g(z, w)` for `w ∈ B(w₀, Y)` and
    /// `z ∈ M \ B(w₀, X)`. The offsets of `w` are drawn from their own
    /// stream and scaled by `Y`, so runs that differ only in `Y` share
    /// directions.
    pub fn kl_ratio(&self, w0: &Point, x_radius: f64, y_radius: f64, n_z: usize, seed: u64) -> Result<KlRatio> {
        if !(y_radius > 0.0 && y_radius < x_radius) {
            return Err(invalid("need 0 < Y_radius < X_radius"));
        }
        if self.domain.boundary_distance(w0)? <= x_radius {
            return Err(invalid("B(w0, X_radius) must lie inside the domain"));
        }
        let mut rz = ChaCha8Rng::seed_from_u64(seed);
        let mut rw = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..n_z {
            let z = loop {
                let z = uniform_point(self.domain, &mut rz);
                if z.dist(w0) >= x_radius {
                    break z;
                }
            };
            let off = unit_direction(4, &mut rw).scale(rw.gen::<f64>().powf(0.25));
            let w = w0.add(&off.scale(y_radius));
            let r = self.green_unchecked(&z, w0) / self.green_unchecked(&z, &w);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        Ok(KlRatio {
            min_ratio: lo,
            max_ratio: hi,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LowerBoundReport {
    pub pairs: usize,
    pub seed: u64,
    pub violations: usize,
    pub max_violation: f64,
    pub radius_rule: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KlRatio {
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl KlRatio {
    /// `ε̂ = max(1 - min, max - 1)`.
    pub fn epsilon(&self) -> f64 {
        (1.0 - self.min_ratio).max(self.max_ratio - 1.0)
    }
}

/// Default minimum distance `|1 - ζ|` from the boundary singularity of
/// the restricted kernel in [`disk_harmonicity_check`].
pub const HARMONICITY_MIN_SEPARATION: f64 = 0.7;

/// Largest 5-point Laplacian of `ζ ↦ K(f(ζ))` for the analytic disk
/// `f(ζ) = ζ a + C(1 - ζ) a⊥` through the kernel's boundary point `a`,
/// over a deterministic grid of about `n_zeta` points of the unit disk.
/// Only points whose stencil maps into the ball and which stay
/// [`HARMONICITY_MIN_SEPARATION`] away from `ζ = 1` are used.
pub fn disk_harmonicity_check(kernel: &LimitKernel, c: Complex64, n_zeta: usize, h: f64) -> Result<f64> {
    let a = match kernel {
        LimitKernel::Ball { a } => *a,
        _ => return Err(invalid("harmonicity check needs a ball kernel")),
    };
    let (a1, a2) = (a.z1(), a.z2());
    let (p1, p2) = (-a2.conj(), a1.conj());
    let f = |x: f64, y: f64| {
        let zeta = Complex64::new(x, y);
        let t = c * (Complex64::new(1.0, 0.0) - zeta);
        Point::c2(zeta * a1 + t * p1, zeta * a2 + t * p2)
    };
    let ball = Domain::cball2();
    let side = (n_zeta as f64).sqrt().ceil().max(2.0) as usize;
    let mut worst = None::<f64>;
    for i in 0..side {
        for j in 0..side {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / side as f64;
            let y = -1.0 + 2.0 * (j as f64 + 0.5) / side as f64;
            if Complex64::new(1.0 - x, -y).norm() < HARMONICITY_MIN_SEPARATION {
                continue;
            }
            let stencil = [(x, y), (x + h, y), (x - h, y), (x, y + h), (x, y - h)];
            if !stencil.iter().all(|&(u, v)| ball.contains_unchecked(&f(u, v))) {
                continue;
            }
            let lap = five_point_laplacian(|u, v| kernel.eval_unchecked(&f(u, v)), x, y, h);
            worst = Some(worst.map_or(lap.abs(), |w: f64| w.max(lap.abs())));
        }
    }
    worst.ok_or_else(|| invalid("no admissible ζ: f(ζ) never lies inside the ball"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub pairs: usize,
    pub seed: u64,
    pub max_deviation: f64,
}

/// `max |g(F(z), F(w)) - g(z, w)|` over seeded pairs for one automorphism.
pub fn automorphism_invariance(f: &BallAutomorphism, n_pairs: usize, seed: u64) -> InvarianceReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ball = Domain::cball2();
    let mut worst = 0.0f64;
    for _ in 0..n_pairs {
        let z = uniform_point(ball, &mut rng);
        let w = uniform_point(ball, &mut rng);
        let d = (ball_green_unchecked(&f.apply(&z), &f.apply(&w)) - ball_green_unchecked(&z, &w)).abs();
        worst = worst.max(d);
    }
    InvarianceReport {
        pairs: n_pairs,
        seed,
        max_deviation: worst,
    }
}

/// Invariance over a fresh random automorphism for every pair.
pub fn automorphism_invariance_check(n_pairs: usize, seed: u64) -> InvarianceReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ball = Domain::cball2();
    let mut worst = 0.0f64;
    for _ in 0..n_pairs {
        let f = BallAutomorphism::random(&mut rng);
        let z = uniform_point(ball, &mut rng);
        let w = uniform_point(ball, &mut rng);
        let d = (ball_green_unchecked(&f.apply(&z), &f.apply(&w)) - ball_green_unchecked(&z, &w)).abs();
        worst = worst.max(d);
    }
    InvarianceReport {
        pairs: n_pairs,
        seed,
        max_deviation: worst,
    }
}

/// Samples `g(z, w)` along the segment from `z_start` toward the boundary
/// point `ζ`, at the given boundary distances.
pub fn radial_profile(e: &PluriGreenEvaluator, w: &Point, zeta: &Point, distances: &[f64]) -> Vec<f64> {
    distances
        .iter()
        .map(|d| e.green_unchecked(&zeta.scale(1.0 - d), w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::LN_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ball_green_examples() {
        let z = Point::c2(c(0.3, 0.0), c(0.4, 0.0));
        let o = Point::origin(4);
        assert!((ball_green(&z, &o).unwrap() + LN_2).abs() < 1e-15);
        let a = Point::c2(c(0.5, 0.0), c(0.0, 0.0));
        assert!((ball_green(&o, &a).unwrap() + LN_2).abs() < 1e-15);
        assert_eq!(ball_green(&a, &a).unwrap(), f64::NEG_INFINITY);
        let out = Point::c2(c(0.8, 0.0), c(0.8, 0.0));
        assert_eq!(ball_green(&out, &a), Err(Error::OutsideDomain));
    }

    #[test]
    fn polydisk_examples() {
        let o = Point::origin(4);
        let w = Point::c2(c(0.5, 0.0), c(0.25, 0.0));
        assert!((polydisk_green(&o, &w).unwrap() + LN_2).abs() < 1e-15);
        assert_eq!(polydisk_green(&w, &w).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn polydisk_monotone_toward_pole() {
        let w = Point::c2(c(0.4, 0.1), c(-0.2, 0.3));
        let mut prev = f64::INFINITY;
        for k in 0..50 {
            let t = k as f64 / 50.0;
            let z = Point::c2(c(0.9, 0.0) * (1.0 - t) + w.z1() * t, w.z2());
            let g = polydisk_green(&z, &w).unwrap();
            assert!(g <= prev);
            prev = g;
        }
    }

    #[test]
    fn lower_bound_equality_at_origin() {
        let e = PluriGreenEvaluator::ball();
        let o = Point::origin(4);
        let z = Point::c2(c(0.1, 0.2), c(-0.3, 0.05));
        let lhs = e.green(&z, &o).unwrap();
        let rhs = (z.norm() / e.circumscribed_radius(&o)).ln();
        assert!((lhs - rhs).abs() < 1e-15);
    }

    #[test]
    fn identity_and_swap_are_exact() {
        for f in [BallAutomorphism::identity(), BallAutomorphism::swap()] {
            let r = automorphism_invariance(&f, 500, 3);
            assert_eq!(r.max_deviation, 0.0);
        }
    }

    #[test]
    fn kl_identity_pole() {
        let e = PluriGreenEvaluator::ball();
        let w0 = Point::c2(c(0.5, 0.0), c(0.0, 0.0));
        assert!(e.kl_ratio(&w0, 0.2, 0.3, 10, 1).is_err());
        assert!(e.kl_ratio(&w0, 0.6, 0.1, 10, 1).is_err());
    }
}
