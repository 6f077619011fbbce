//! Boundary limits of normalized Green functions.
//!
//! An [`ApproachSequence`] walks a pole toward the boundary; [`detect_limit`]
//! embeds each term and watches successive `L¹` distances. The closed-form
//! candidates for the limit are the [`LimitKernel`]s.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::classical::GreenEvaluator;
use crate::domain::{Domain, DomainKind};
use crate::l1::{alpha_scaled, embed, embed_martin, l1_distance, Discretization, KernelSample, KernelTag, NormalizedKernel};
use crate::pluri::{hermitian, PluriGreenEvaluator};
use crate::{error::invalid, Error, Point, Result};

const UNIT_TOL: f64 = 1e-12;

/// Above this `ĉ` the sequence is read as approaching the second face.
pub const FACE2_THRESHOLD: f64 = 1e2;
/// Below this `ĉ` the sequence is read as approaching the first face.
pub const FACE1_THRESHOLD: f64 = 1e-2;

fn on_circle(w: Complex64) -> Result<()> {
    if (w.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotOnBoundary(w.norm()));
    }
    Ok(())
}

/// Face kernel `(|z|² - 1)/|1 - z w̄₀|²` of one disk factor.
#[inline]
fn face(z: Complex64, w0: Complex64) -> f64 {
    (z.norm_sqr() - 1.0) / (Complex64::new(1.0, 0.0) - z * w0.conj()).norm_sqr()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LimitKernel {
    /// Poisson kernel of the disk at `ζ`, the Martin kernel normalized at 0.
    MartinDisk { zeta: Point },
    /// `(‖z‖² - 1)/|1 - ⟨z, a⟩|²` for `a` on the unit sphere of C².
    Ball { a: Point },
    /// Depends on `z₁` only; `|w₁₀| = 1`.
    BidiskFace1 { w10: Complex64 },
    /// Depends on `z₂` only; `|w₂₀| = 1`.
    BidiskFace2 { w20: Complex64 },
    /// `max(K₁, K₂/c)` for `c ≤ 1` and `max(cK₁, K₂)` for `c ≥ 1`.
    BidiskMixed { w10: Complex64, w20: Complex64, c: f64 },
}

impl LimitKernel {
    pub fn martin_disk(zeta: Point) -> Result<Self> {
        zeta.expect_dim(2)?;
        if (zeta.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotOnBoundary(zeta.norm()));
        }
        Ok(Self::MartinDisk { zeta })
    }

    pub fn ball(a: Point) -> Result<Self> {
        a.expect_dim(4)?;
        if (a.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotOnBoundary(a.norm()));
        }
        Ok(Self::Ball { a })
    }

    pub fn face1(w10: Complex64) -> Result<Self> {
        on_circle(w10)?;
        Ok(Self::BidiskFace1 { w10 })
    }

    pub fn face2(w20: Complex64) -> Result<Self> {
        on_circle(w20)?;
        Ok(Self::BidiskFace2 { w20 })
    }

    pub fn mixed(w10: Complex64, w20: Complex64, c: f64) -> Result<Self> {
        on_circle(w10)?;
        on_circle(w20)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid("mixed kernel needs 0 < c < ∞"));
        }
        Ok(Self::BidiskMixed { w10, w20, c })
    }

    /// The bidisk kernel for exponent `c ∈ [0, ∞]`, with the faces at the ends.
    pub fn bidisk_for_c(w10: Complex64, w20: Complex64, c: f64) -> Result<Self> {
        if c == 0.0 {
            Self::face1(w10)
        } else if c == f64::INFINITY {
            Self::face2(w20)
        } else {
            Self::mixed(w10, w20, c)
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            Self::MartinDisk { .. } => Domain::unit_disk(),
            Self::Ball { .. } => Domain::cball2(),
            _ => Domain::bidisk(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::MartinDisk { .. } => "martin-disk",
            Self::Ball { .. } => "ball",
            Self::BidiskFace1 { .. } => "bidisk-face1",
            Self::BidiskFace2 { .. } => "bidisk-face2",
            Self::BidiskMixed { .. } => "bidisk-mixed",
        }
    }

    pub fn eval(&self, z: &Point) -> Result<f64> {
        if !self.domain().contains(z)? {
            return Err(Error::OutsideDomain);
        }
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: &Point) -> f64 {
        match *self {
            Self::MartinDisk { zeta } => (1.0 - z.norm_sqr()) / z.dist(&zeta).powi(2),
            Self::Ball { a } => {
                (z.norm_sqr() - 1.0) / (Complex64::new(1.0, 0.0) - hermitian(z, &a)).norm_sqr()
            }
            Self::BidiskFace1 { w10 } => face(z.z1(), w10),
            Self::BidiskFace2 { w20 } => face(z.z2(), w20),
            Self::BidiskMixed { w10, w20, c } => {
                let (k1, k2) = (face(z.z1(), w10), face(z.z2(), w20));
                if c <= 1.0 {
                    k1.max(k2 / c)
                } else {
                    (c * k1).max(k2)
                }
            }
        }
    }

    /// The kernel on `disc`, scaled to unit norm.
    pub fn normalized<'d>(&self, disc: &'d Discretization) -> Result<NormalizedKernel<'d>> {
        if disc.domain() != self.domain() {
            return Err(Error::DiscretizationMismatch);
        }
        NormalizedKernel::from_sample(disc.sample(|z| self.eval_unchecked(z))?, KernelTag::Limit(*self))
    }
}

/// Radii `ρ_j = 1 - base^{-j}`, `j = 1, 2, …`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub base: f64,
}

impl Schedule {
    pub const DYADIC: Schedule = Schedule { base: 2.0 };
    pub const TRIADIC: Schedule = Schedule { base: 3.0 };

    pub fn radius(&self, j: usize) -> f64 {
        1.0 - self.base.powi(-(j as i32))
    }
}

/// How the terms of an [`ApproachSequence`] were produced.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// `ρ_j a` in the ball.
    BallRadial { a: Point, schedule: Schedule },
    /// `ρ_j ζ` in the disk.
    DiskRadial { zeta: Point, schedule: Schedule },
    /// `(ρ_j e^{iα}, ρ_j^γ e^{iβ})`; the exponent ratio tends to `1/γ`.
    BidiskPower { alpha: f64, beta: f64, gamma: f64 },
    /// `(ρ_j e^{iα}, w₂)` with `|w₂| < 1` fixed.
    BidiskPinnedSecond { alpha: f64, w2: Complex64 },
    /// `(w₁, ρ_j e^{iβ})` with `|w₁| < 1` fixed.
    BidiskPinnedFirst { w1: Complex64, beta: f64 },
    /// Like [`Generator::BidiskPower`] with `γ` cycling through a list.
    BidiskCycling { alpha: f64, beta: f64, gammas: Vec<f64> },
    /// Points supplied by the caller.
    Explicit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproachSequence {
    domain: Domain,
    generator: Generator,
    points: Vec<Point>,
}

impl ApproachSequence {
    /// Checks that the points lie in `domain`, that their boundary distance
    /// never increases, and that it ends below where it started.
    pub fn new(domain: Domain, generator: Generator, points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("approach sequence needs at least two terms"));
        }
        let mut prev = f64::INFINITY;
        for p in &points {
            let d = domain.boundary_distance(p)?;
            if d > prev {
                return Err(invalid("boundary distance must not increase along the sequence"));
            }
            prev = d;
        }
        if !(prev < domain.boundary_distance(&points[0])?) {
            return Err(invalid("sequence does not approach the boundary"));
        }
        Ok(Self {
            domain,
            generator,
            points,
        })
    }

    pub fn ball_radial(a: Point, schedule: Schedule, len: usize) -> Result<Self> {
        LimitKernel::ball(a)?;
        let pts = (1..=len).map(|j| a.scale(schedule.radius(j))).collect();
        Self::new(Domain::cball2(), Generator::BallRadial { a, schedule }, pts)
    }

    pub fn disk_radial(zeta: Point, schedule: Schedule, len: usize) -> Result<Self> {
        LimitKernel::martin_disk(zeta)?;
        let pts = (1..=len).map(|j| zeta.scale(schedule.radius(j))).collect();
        Self::new(Domain::unit_disk(), Generator::DiskRadial { zeta, schedule }, pts)
    }

    pub fn bidisk_power(alpha: f64, beta: f64, gamma: f64, len: usize) -> Result<Self> {
        Self::bidisk_cycling_inner(alpha, beta, &[gamma], len, Generator::BidiskPower { alpha, beta, gamma })
    }

    pub fn bidisk_cycling(alpha: f64, beta: f64, gammas: &[f64], len: usize) -> Result<Self> {
        let g = Generator::BidiskCycling {
            alpha,
            beta,
            gammas: gammas.to_vec(),
        };
        Self::bidisk_cycling_inner(alpha, beta, gammas, len, g)
    }

    fn bidisk_cycling_inner(alpha: f64, beta: f64, gammas: &[f64], len: usize, g: Generator) -> Result<Self> {
        if gammas.is_empty() || gammas.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(invalid("exponents must be positive and finite"));
        }
        let pts = (1..=len)
            .map(|j| {
                let r = Schedule::DYADIC.radius(j);
                let gamma = gammas[(j - 1) % gammas.len()];
                Point::c2(
                    Complex64::from_polar(r, alpha),
                    Complex64::from_polar(r.powf(gamma), beta),
                )
            })
            .collect();
        Self::new(Domain::bidisk(), g, pts)
    }

    pub fn bidisk_pinned_second(alpha: f64, w2: Complex64, len: usize) -> Result<Self> {
        let pts = (1..=len)
            .map(|j| Point::c2(Complex64::from_polar(Schedule::DYADIC.radius(j), alpha), w2))
            .collect();
        Self::new(Domain::bidisk(), Generator::BidiskPinnedSecond { alpha, w2 }, pts)
    }

    pub fn bidisk_pinned_first(w1: Complex64, beta: f64, len: usize) -> Result<Self> {
        let pts = (1..=len)
            .map(|j| Point::c2(w1, Complex64::from_polar(Schedule::DYADIC.radius(j), beta)))
            .collect();
        Self::new(Domain::bidisk(), Generator::BidiskPinnedFirst { w1, beta }, pts)
    }

    /// A bidisk sequence whose exponent ratio tends to `c ∈ [0, ∞]`. The
    /// end cases pin the other coordinate at modulus 0.3.
    pub fn bidisk_for_c(alpha: f64, beta: f64, c: f64, len: usize) -> Result<Self> {
        if c == 0.0 {
            Self::bidisk_pinned_second(alpha, Complex64::from_polar(0.3, beta), len)
        } else if c == f64::INFINITY {
            Self::bidisk_pinned_first(Complex64::from_polar(0.3, alpha), beta, len)
        } else if c > 0.0 {
            Self::bidisk_power(alpha, beta, 1.0 / c, len)
        } else {
            Err(invalid("c must lie in [0, ∞]"))
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The exponent the generator is built to produce, if any.
    pub fn expected_c(&self) -> Option<f64> {
        match &self.generator {
            Generator::BidiskPower { gamma, .. } => Some(1.0 / gamma),
            Generator::BidiskPinnedSecond { .. } => Some(0.0),
            Generator::BidiskPinnedFirst { .. } => Some(f64::INFINITY),
            _ => None,
        }
    }
}

/// Terms that must all fall below the tolerance to declare a limit.
pub const CAUCHY_RUN: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct LimitDetection<'d> {
    /// `‖Φ(w_{j+1}) - Φ(w_j)‖` for consecutive terms.
    pub successive: Vec<f64>,
    pub tol: f64,
    pub converged: bool,
    /// The final term.
    pub limit: KernelSample<'d>,
}

impl<'d> LimitDetection<'d> {
    /// The limit sample, or [`Error::Divergent`] if the run did not settle.
    pub fn require(self) -> Result<KernelSample<'d>> {
        if self.converged {
            Ok(self.limit)
        } else {
            Err(Error::Divergent { tol: self.tol })
        }
    }
}

fn run_detection<'d>(
    len: usize,
    tol: f64,
    mut term: impl FnMut(usize) -> Result<KernelSample<'d>>,
) -> Result<LimitDetection<'d>> {
    if len < 4 {
        return Err(invalid("limit detection needs at least four terms"));
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let mut prev = term(0)?;
    let mut successive = Vec::with_capacity(len - 1);
    for j in 1..len {
        let next = term(j)?;
        successive.push(l1_distance(&prev, &next)?);
        prev = next;
    }
    let converged = successive.iter().rev().take(CAUCHY_RUN).all(|d| *d < tol);
    Ok(LimitDetection {
        successive,
        tol,
        converged,
        limit: prev,
    })
}

/// Embeds every term with `Φ_V` and checks the last [`CAUCHY_RUN`]
/// successive distances against `tol`.
pub fn detect_limit<'d>(
    e: &PluriGreenEvaluator,
    disc: &'d Discretization,
    seq: &ApproachSequence,
    tol: f64,
) -> Result<LimitDetection<'d>> {
    if seq.domain() != e.domain() {
        return Err(Error::DiscretizationMismatch);
    }
    run_detection(seq.len(), tol, |j| Ok(embed(e, disc, &seq.points[j])?.into_sample()))
}

/// [`detect_limit`] with the terms `α(w) g(·, w)`, `α(w) = 1/|g(0, w)|`,
/// left unnormalized; their limit is a scalar multiple of the `Φ_V` limit.
pub fn detect_limit_alpha<'d>(
    e: &PluriGreenEvaluator,
    disc: &'d Discretization,
    seq: &ApproachSequence,
    tol: f64,
) -> Result<LimitDetection<'d>> {
    if seq.domain() != e.domain() {
        return Err(Error::DiscretizationMismatch);
    }
    run_detection(seq.len(), tol, |j| alpha_scaled(e, disc, &seq.points[j]))
}

/// The real analogue of [`detect_limit`] with Martin-normalized Green
/// functions `G(·, y)/G(x₀, y)`, unit-normalized.
pub fn detect_martin_limit<'d>(
    e: &GreenEvaluator,
    disc: &'d Discretization,
    seq: &ApproachSequence,
    x0: &Point,
    tol: f64,
) -> Result<LimitDetection<'d>> {
    if seq.domain() != e.domain() {
        return Err(Error::DiscretizationMismatch);
    }
    run_detection(seq.len(), tol, |j| {
        Ok(embed_martin(e, disc, &seq.points[j], x0)?.into_sample())
    })
}

/// Averages `log|w₁|/log|w₂|` over the last four terms.
pub fn estimate_c(seq: &ApproachSequence) -> Result<f64> {
    if seq.domain().kind() != DomainKind::Bidisk {
        return Err(invalid("exponent estimate needs a bidisk sequence"));
    }
    let tail = &seq.points[seq.len().saturating_sub(4)..];
    let sum: f64 = tail
        .iter()
        .map(|w| w.z1().norm().ln() / w.z2().norm().ln())
        .sum();
    Ok(sum / tail.len() as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification<'d> {
    pub c_hat: f64,
    pub kernel: LimitKernel,
    pub distance: f64,
    pub detection: LimitDetection<'d>,
}

fn unit_or_one(w: Complex64) -> Complex64 {
    if w.norm() > 0.0 {
        w / w.norm()
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// Picks the kernel predicted by `ĉ` and measures how far the detected
/// limit is from it.
pub fn classify_bidisk<'d>(
    seq: &ApproachSequence,
    disc: &'d Discretization,
    tol: f64,
) -> Result<Classification<'d>> {
    let c_hat = estimate_c(seq)?;
    let detection = detect_limit(&PluriGreenEvaluator::bidisk(), disc, seq, tol)?;
    if !detection.converged {
        return Err(Error::Divergent { tol });
    }
    let last = seq.points[seq.len() - 1];
    let (w10, w20) = (unit_or_one(last.z1()), unit_or_one(last.z2()));
    let kernel = if c_hat > FACE2_THRESHOLD {
        LimitKernel::face2(w20)?
    } else if c_hat < FACE1_THRESHOLD {
        LimitKernel::face1(w10)?
    } else {
        LimitKernel::mixed(w10, w20, c_hat)?
    };
    let predicted = kernel.normalized(disc)?;
    let distance = l1_distance(&detection.limit, predicted.sample())?;
    Ok(Classification {
        c_hat,
        kernel,
        distance,
        detection,
    })
}

/// Smallest pairwise distance between the unit-normalized kernels.
pub fn separation_check(kernels: &[LimitKernel], disc: &Discretization) -> Result<f64> {
    if kernels.len() < 2 {
        return Err(invalid("separation needs at least two kernels"));
    }
    let samples = kernels
        .iter()
        .map(|k| k.normalized(disc))
        .collect::<Result<Vec<_>>>()?;
    min_pairwise(samples.iter().map(|k| k.sample()).collect::<Vec<_>>().as_slice())
}

fn min_pairwise(samples: &[&KernelSample<'_>]) -> Result<f64> {
    let mut best = f64::INFINITY;
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            best = best.min(l1_distance(samples[i], samples[j])?);
        }
    }
    Ok(best)
}

/// Sphere point `(cos θ e^{iα}, sin θ)`.
pub fn sphere_direction(theta: f64, alpha: f64) -> Point {
    Point::c2(
        Complex64::from_polar(theta.cos(), alpha),
        Complex64::new(theta.sin(), 0.0),
    )
}

/// `res × res` grid of sphere directions, `θ` strictly inside `(0, π/2)`.
pub fn ball_direction_grid(res: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(res * res);
    for i in 0..res {
        let theta = (i as f64 + 0.5) * FRAC_PI_2 / res as f64;
        for k in 0..res {
            out.push(sphere_direction(theta, TAU * k as f64 / res as f64));
        }
    }
    out
}

/// One direction of the ball atlas.
#[derive(Clone, Debug, PartialEq)]
pub struct BallAtlasEntry {
    pub direction: Point,
    pub converged: bool,
    /// Distance from the detected limit to the closed-form kernel.
    pub kernel_distance: f64,
}

/// One exponent of the bidisk atlas.
#[derive(Clone, Debug, PartialEq)]
pub struct BidiskAtlasEntry {
    pub c: f64,
    pub c_hat: f64,
    pub kernel: &'static str,
    pub converged: bool,
    pub match_distance: f64,
    pub to_face1: f64,
    pub to_face2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AtlasReport {
    Ball {
        entries: Vec<BallAtlasEntry>,
        /// Smallest distance between two detected limits.
        min_limit_separation: f64,
        /// Smallest Euclidean distance between two grid directions.
        min_direction_separation: f64,
        tol: f64,
    },
    Bidisk {
        alpha: f64,
        beta: f64,
        entries: Vec<BidiskAtlasEntry>,
        min_separation: f64,
        max_neighbor_distance: f64,
        extreme_distance: f64,
        /// Distance between the `c = 0` limits for `β = 0` and `β = π/2`.
        face1_beta_drift: f64,
        tol: f64,
    },
}

impl AtlasReport {
    /// Names the first property that fails, if any.
    pub fn failure(&self) -> Option<String> {
        match self {
            AtlasReport::Ball {
                entries,
                min_limit_separation,
                tol,
                ..
            } => {
                if let Some(e) = entries.iter().find(|e| !e.converged) {
                    return Some(alloc::format!("direction {} did not converge", e.direction));
                }
                if !(*min_limit_separation > *tol) {
                    return Some(alloc::format!("limits not separated: {min_limit_separation:.3e}"));
                }
                None
            }
            AtlasReport::Bidisk {
                entries,
                min_separation,
                max_neighbor_distance,
                extreme_distance,
                face1_beta_drift,
                tol,
                ..
            } => {
                if let Some(e) = entries.iter().find(|e| !e.converged) {
                    return Some(alloc::format!("c = {} did not converge", e.c));
                }
                if !(*min_separation > 0.0) {
                    return Some("two exponents gave the same kernel".into());
                }
                if !(max_neighbor_distance < extreme_distance) {
                    return Some("neighbor distance exceeds the face-to-face distance".into());
                }
                for w in entries.windows(2) {
                    if !(w[1].to_face1 > w[0].to_face1 && w[1].to_face2 < w[0].to_face2) {
                        return Some(alloc::format!("no monotone interpolation between c = {} and c = {}", w[0].c, w[1].c));
                    }
                }
                if !(*face1_beta_drift < *tol) {
                    return Some(alloc::format!("face1 limit depends on β: {face1_beta_drift:.3e}"));
                }
                None
            }
        }
    }
}

/// Exponent grid of the bidisk atlas.
pub const BIDISK_C_GRID: [f64; 5] = [0.0, 0.5, 1.0, 2.0, f64::INFINITY];

/// Ball: radial limits on a `res × res` direction grid and their
/// separation. Bidisk: limits for [`BIDISK_C_GRID`] at angles
/// `(α, β) = (0, 0)`, their ordering between the faces, and the
/// `β`-independence of the first face.
pub fn boundary_atlas_report(
    domain: Domain,
    res: usize,
    disc: &Discretization,
    len: usize,
    tol: f64,
) -> Result<AtlasReport> {
    if disc.domain() != domain {
        return Err(Error::DiscretizationMismatch);
    }
    match domain.kind() {
        DomainKind::CBall2 => ball_atlas(res, disc, len, tol),
        DomainKind::Bidisk => bidisk_atlas(disc, len, tol),
        k => Err(invalid(alloc::format!("no atlas for {k}"))),
    }
}

fn ball_atlas(res: usize, disc: &Discretization, len: usize, tol: f64) -> Result<AtlasReport> {
    if res < 2 {
        return Err(invalid("grid resolution must be at least 2"));
    }
    let e = PluriGreenEvaluator::ball();
    let dirs = ball_direction_grid(res);
    let mut limits = Vec::with_capacity(dirs.len());
    let mut entries = Vec::with_capacity(dirs.len());
    for a in &dirs {
        let seq = ApproachSequence::ball_radial(*a, Schedule::DYADIC, len)?;
        let det = detect_limit(&e, disc, &seq, tol)?;
        let kernel = LimitKernel::ball(*a)?.normalized(disc)?;
        entries.push(BallAtlasEntry {
            direction: *a,
            converged: det.converged,
            kernel_distance: l1_distance(&det.limit, kernel.sample())?,
        });
        limits.push(det.limit);
    }
    let mut min_dir = f64::INFINITY;
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            min_dir = min_dir.min(dirs[i].dist(&dirs[j]));
        }
    }
    Ok(AtlasReport::Ball {
        entries,
        min_limit_separation: min_pairwise(&limits.iter().collect::<Vec<_>>())?,
        min_direction_separation: min_dir,
        tol,
    })
}

fn bidisk_atlas(disc: &Discretization, len: usize, tol: f64) -> Result<AtlasReport> {
    let (alpha, beta) = (0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let face1 = LimitKernel::face1(one)?.normalized(disc)?;
    let face2 = LimitKernel::face2(one)?.normalized(disc)?;
    let mut entries = Vec::new();
    let mut limits = Vec::new();
    for &c in &BIDISK_C_GRID {
        let seq = ApproachSequence::bidisk_for_c(alpha, beta, c, len)?;
        let cl = classify_bidisk(&seq, disc, tol)?;
        entries.push(BidiskAtlasEntry {
            c,
            c_hat: cl.c_hat,
            kernel: cl.kernel.name(),
            converged: cl.detection.converged,
            match_distance: cl.distance,
            to_face1: l1_distance(&cl.detection.limit, face1.sample())?,
            to_face2: l1_distance(&cl.detection.limit, face2.sample())?,
        });
        limits.push(cl.detection.limit);
    }
    let mut max_nb = 0.0f64;
    for w in limits.windows(2) {
        max_nb = max_nb.max(l1_distance(&w[0], &w[1])?);
    }
    let extreme = l1_distance(&limits[0], &limits[limits.len() - 1])?;
    let rotated = ApproachSequence::bidisk_for_c(alpha, PI / 2.0, 0.0, len)?;
    let rot_limit = detect_limit(&PluriGreenEvaluator::bidisk(), disc, &rotated, tol)?.limit;
    Ok(AtlasReport::Bidisk {
        alpha,
        beta,
        entries,
        min_separation: min_pairwise(&limits.iter().collect::<Vec<_>>())?,
        max_neighbor_distance: max_nb,
        extreme_distance: extreme,
        face1_beta_drift: l1_distance(&limits[0], &rot_limit)?,
        tol,
    })
}
