//! `L¹(M, V)` on a fixed node set.
//!
//! Every sample carries a reference to the [`Discretization`] it was
//! evaluated on; norms and distances are weighted sums over its nodes with
//! a fixed pairwise reduction tree, so they are reproducible bit for bit.

use alloc::vec::Vec;
use core::hash::Hasher;

use fnv::FnvHasher;

use crate::classical::GreenEvaluator;
use crate::domain::{Domain, DomainKind};
use crate::numeric::pairwise_sum_by;
use crate::pluri::PluriGreenEvaluator;
use crate::sampling::{sample_nodes, Node, Strategy};
use crate::{error::invalid, Error, Point, Result};

/// Smallest node count accepted for a discretization.
pub const MIN_NODES: usize = 1000;

/// Default Cauchy tolerance for limit detection and compactness probes.
pub const DEFAULT_TOL: f64 = 1e-2;

/// Tolerance on the unit-norm invariant of a [`NormalizedKernel`].
pub const UNIT_NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Discretization {
    domain: Domain,
    nodes: Vec<Node>,
    weight_values: Vec<f64>,
    seed: u64,
    strategy: Strategy,
    weight_tag: Option<alloc::string::String>,
    id: u64,
}

fn discretization_id(domain: Domain, seed: u64, n: usize, strategy: &Strategy, weight_tag: Option<&str>) -> u64 {
    let mut h = FnvHasher::default();
    h.write(domain.kind().name().as_bytes());
    h.write_u64(seed);
    h.write_u64(n as u64);
    h.write(alloc::format!("{strategy}").as_bytes());
    if let Some(tag) = weight_tag {
        h.write(tag.as_bytes());
    }
    h.finish()
}

impl Discretization {
    /// Nodes from [`sample_nodes`] with the Lebesgue density `φ ≡ 1`.
    pub fn new(domain: Domain, n: usize, seed: u64, strategy: Strategy) -> Result<Self> {
        if n < MIN_NODES {
            return Err(invalid(alloc::format!("need at least {MIN_NODES} nodes, got {n}")));
        }
        let nodes = sample_nodes(domain, n, seed, strategy)?;
        Self::from_parts(domain, nodes, alloc::vec![1.0; n], seed, strategy, None)
    }

    /// Reassembles a discretization, e.g. one read back from disk.
    pub fn from_parts(
        domain: Domain,
        nodes: Vec<Node>,
        weight_values: Vec<f64>,
        seed: u64,
        strategy: Strategy,
        weight_tag: Option<alloc::string::String>,
    ) -> Result<Self> {
        if nodes.len() < MIN_NODES {
            return Err(invalid(alloc::format!(
                "need at least {MIN_NODES} nodes, got {}",
                nodes.len()
            )));
        }
        if weight_values.len() != nodes.len() {
            return Err(Error::DimensionMismatch {
                expected: nodes.len(),
                found: weight_values.len(),
            });
        }
        if let Some(v) = weight_values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(invalid(alloc::format!("weight value {v} is not positive")));
        }
        for n in &nodes {
            n.point.expect_dim(domain.ambient_dim())?;
            if !(n.weight > 0.0 && n.weight.is_finite()) {
                return Err(invalid("quadrature weights must be positive"));
            }
        }
        let id = discretization_id(domain, seed, nodes.len(), &strategy, weight_tag.as_deref());
        Ok(Self {
            domain,
            nodes,
            weight_values,
            seed,
            strategy,
            weight_tag,
            id,
        })
    }

    /// Replaces the density by `φ`, evaluated at every node. The tag names
    /// the weight and enters the id.
    pub fn with_weight(self, tag: &str, phi: impl Fn(&Point) -> f64) -> Result<Self> {
        let values = self.nodes.iter().map(|n| phi(&n.point)).collect();
        Self::from_parts(
            self.domain,
            self.nodes,
            values,
            self.seed,
            self.strategy,
            Some(tag.into()),
        )
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn weight_values(&self) -> &[f64] {
        &self.weight_values
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn weight_tag(&self) -> Option<&str> {
        self.weight_tag.as_deref()
    }

    /// Hash of domain, seed, node count, strategy and weight tag.
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Total mass `V(M)` as seen by the quadrature.
    pub fn total_mass(&self) -> f64 {
        pairwise_sum_by(self.len(), &mut |i| self.mass(i))
    }

    #[inline]
    fn mass(&self, i: usize) -> f64 {
        self.nodes[i].weight * self.weight_values[i]
    }

    /// Evaluates `f` at every node.
    pub fn sample(&self, f: impl Fn(&Point) -> f64) -> Result<KernelSample<'_>> {
        KernelSample::new(self, self.nodes.iter().map(|n| f(&n.point)).collect())
    }
}

/// Function values on the nodes of a [`Discretization`].
///
/// A non-finite value marks a node sitting on a pole. Such a node is left
/// out and its mass is spread proportionally over the others; at most one
/// node per sample may be dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSample<'d> {
    disc: &'d Discretization,
    values: Vec<f64>,
    omitted: Option<usize>,
}

impl<'d> KernelSample<'d> {
    pub fn new(disc: &'d Discretization, values: Vec<f64>) -> Result<Self> {
        if values.len() != disc.len() {
            return Err(Error::DimensionMismatch {
                expected: disc.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(invalid("sample contains NaN"));
        }
        let bad: Vec<usize> = (0..values.len()).filter(|&i| !values[i].is_finite()).collect();
        if bad.len() > 1 {
            return Err(Error::PoleBudgetExceeded(bad.len()));
        }
        Ok(Self {
            disc,
            values,
            omitted: bad.first().copied(),
        })
    }

    pub fn discretization(&self) -> &'d Discretization {
        self.disc
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn omitted(&self) -> Option<usize> {
        self.omitted
    }

    /// `c · s`; `c` must be finite and nonzero.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c != 0.0) {
            return Err(invalid("scale factor must be finite and nonzero"));
        }
        Self::new(self.disc, self.values.iter().map(|v| v * c).collect())
    }

    /// `s + c`.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        Self::new(self.disc, self.values.iter().map(|v| v + c).collect())
    }

    /// Largest value over the retained nodes.
    pub fn max_value(&self) -> f64 {
        self.retained().map(|i| self.values[i]).fold(f64::NEG_INFINITY, f64::max)
    }

    fn retained(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).filter(move |&i| Some(i) != self.omitted)
    }
}

fn same_disc(a: &Discretization, b: &Discretization) -> Result<()> {
    if core::ptr::eq(a, b) || (a.id == b.id && a.len() == b.len()) {
        Ok(())
    } else {
        Err(Error::DiscretizationMismatch)
    }
}

/// `Σ |f_i| m_i` over retained nodes, rescaled by `M / (M - m_dropped)`.
fn weighted_abs(disc: &Discretization, skip: [Option<usize>; 2], f: impl Fn(usize) -> f64) -> f64 {
    let sum = pairwise_sum_by(disc.len(), &mut |i| {
        if skip.contains(&Some(i)) {
            0.0
        } else {
            f(i).abs() * disc.mass(i)
        }
    });
    let mut dropped = 0.0;
    for (k, s) in skip.iter().enumerate() {
        if let Some(i) = s {
            if k == 0 || skip[0] != Some(*i) {
                dropped += disc.mass(*i);
            }
        }
    }
    if dropped == 0.0 {
        sum
    } else {
        let total = disc.total_mass();
        sum * total / (total - dropped)
    }
}

/// `‖s‖_V = ∫ |s| dV`.
pub fn l1_norm(s: &KernelSample<'_>) -> f64 {
    weighted_abs(s.disc, [s.omitted, None], |i| s.values[i])
}

/// `‖s₁ - s₂‖_V`; both samples must live on the same discretization.
pub fn l1_distance(s1: &KernelSample<'_>, s2: &KernelSample<'_>) -> Result<f64> {
    same_disc(s1.disc, s2.disc)?;
    Ok(weighted_abs(s1.disc, [s1.omitted, s2.omitted], |i| s1.values[i] - s2.values[i]))
}

/// What a normalized sample represents.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelTag {
    /// `g(·, w) / c_V(w)` for an interior pole.
    Pole(Point),
    /// Martin-normalized Green function with pole `y`.
    MartinPole(Point),
    /// A closed-form boundary kernel.
    Limit(crate::compactification::LimitKernel),
    /// Anything else, e.g. the terminal term of a sequence.
    Other,
}

/// The scalar by which the raw kernel was divided before the final unit
/// renormalization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Normalizer {
    /// `c_V(w) = ‖g(·, w)‖_V`.
    NormV(f64),
    /// `1/α(w) = |g(0, w)|`.
    Alpha(f64),
    /// Plain `L¹` norm of a non-Green sample.
    Unit(f64),
}

/// A sample with `‖s‖_V = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedKernel<'d> {
    sample: KernelSample<'d>,
    tag: KernelTag,
    normalizer: Normalizer,
}

impl<'d> NormalizedKernel<'d> {
    /// Divides `s` by its norm.
    pub fn from_sample(s: KernelSample<'d>, tag: KernelTag) -> Result<Self> {
        let n = l1_norm(&s);
        if !(n > 0.0 && n.is_finite()) {
            return Err(invalid("cannot normalize a sample with zero or infinite norm"));
        }
        Ok(Self {
            sample: s.scaled(1.0 / n)?,
            tag,
            normalizer: Normalizer::Unit(n),
        })
    }

    pub fn sample(&self) -> &KernelSample<'d> {
        &self.sample
    }

    pub fn into_sample(self) -> KernelSample<'d> {
        self.sample
    }

    pub fn tag(&self) -> &KernelTag {
        &self.tag
    }

    pub fn normalizer(&self) -> Normalizer {
        self.normalizer
    }

    pub fn norm(&self) -> f64 {
        l1_norm(&self.sample)
    }
}

fn green_sample<'d>(e: &PluriGreenEvaluator, disc: &'d Discretization, w: &Point) -> Result<KernelSample<'d>> {
    if disc.domain() != e.domain() {
        return Err(Error::DiscretizationMismatch);
    }
    if !e.domain().contains(w)? {
        return Err(Error::OutsideDomain);
    }
    disc.sample(|z| e.green_unchecked(z, w))
}

/// `c_V(w) = ‖g(·, w)‖_V`.
pub fn c_v(e: &PluriGreenEvaluator, disc: &Discretization, w: &Point) -> Result<f64> {
    Ok(l1_norm(&green_sample(e, disc, w)?))
}

/// `Φ_V(w) = g(·, w) / c_V(w)`.
pub fn embed<'d>(e: &PluriGreenEvaluator, disc: &'d Discretization, w: &Point) -> Result<NormalizedKernel<'d>> {
    let s = green_sample(e, disc, w)?;
    let c = l1_norm(&s);
    if c <= 0.0 {
        return Err(invalid("Green function vanishes on every node"));
    }
    Ok(NormalizedKernel {
        sample: s.scaled(1.0 / c)?,
        tag: KernelTag::Pole(*w),
        normalizer: Normalizer::NormV(c),
    })
}

/// `α(w) g(·, w)` with `α(w) = 1/|g(0, w)|`, which is `-1/log‖w‖` on the
/// ball and `-1/log max|w_k|` on the bidisk. Not unit-normalized.
pub fn alpha_scaled<'d>(e: &PluriGreenEvaluator, disc: &'d Discretization, w: &Point) -> Result<KernelSample<'d>> {
    let g0 = e.green(&Point::origin(4), w)?;
    if !(g0 < 0.0 && g0.is_finite()) {
        return Err(invalid("α(w) needs w away from the origin"));
    }
    green_sample(e, disc, w)?.scaled(-1.0 / g0)
}

/// `α(w) g(·, w)` renormalized to unit norm, remembering `1/α(w)`.
pub fn embed_alpha<'d>(e: &PluriGreenEvaluator, disc: &'d Discretization, w: &Point) -> Result<NormalizedKernel<'d>> {
    let s = alpha_scaled(e, disc, w)?;
    let inv_alpha = -e.green(&Point::origin(4), w)?;
    let mut k = NormalizedKernel::from_sample(s, KernelTag::Pole(*w))?;
    k.normalizer = Normalizer::Alpha(inv_alpha);
    Ok(k)
}

/// Martin-normalized Green function `G(·, y)/G(x₀, y)` of a real domain,
/// renormalized to unit norm.
pub fn embed_martin<'d>(
    e: &GreenEvaluator,
    disc: &'d Discretization,
    y: &Point,
    x0: &Point,
) -> Result<NormalizedKernel<'d>> {
    if disc.domain() != e.domain() {
        return Err(Error::DiscretizationMismatch);
    }
    if !matches!(e.domain().kind(), DomainKind::UnitDisk | DomainKind::Ball3) {
        return Err(invalid("Martin normalization needs a classical domain"));
    }
    let den = e.green(x0, y)?;
    if !(den.is_finite() && den < 0.0) {
        return Err(invalid("pole coincides with the normalization point"));
    }
    let s = disc.sample(|x| e.green_unchecked(x, y) / den)?;
    let mut k = NormalizedKernel::from_sample(s, KernelTag::MartinPole(*y))?;
    k.normalizer = Normalizer::NormV(-den);
    Ok(k)
}

/// Outcome of [`compactness_probe`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeResult<'d> {
    /// Indices of the extracted subsequence, increasing, ending at the last
    /// member of the family.
    pub indices: Vec<usize>,
    /// Successive distances along the subsequence.
    pub distances: Vec<f64>,
    pub limit: KernelSample<'d>,
    pub limit_norm: f64,
}

/// Greedy search for a subsequence that is Cauchy at `tol` and runs to the
/// end of the family. Starting from the earliest member that works, each
/// step jumps to the next member within `tol` of the current one. A chain
/// needs at least three members, or all of them for shorter families.
pub fn compactness_probe<'d>(family: &[KernelSample<'d>], tol: f64) -> Result<ProbeResult<'d>> {
    if family.is_empty() {
        return Err(invalid("empty family"));
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    for s in family {
        same_disc(family[0].disc, s.disc)?;
        if l1_norm(s) > 1.0 + UNIT_NORM_TOL {
            return Err(invalid("family members must have norm at most 1"));
        }
    }
    let n = family.len();
    let need = n.min(3);
    for start in 0..n {
        let mut idx = alloc::vec![start];
        let mut dists = Vec::new();
        let mut cur = start;
        for j in start + 1..n {
            let d = l1_distance(&family[cur], &family[j])?;
            if d < tol {
                idx.push(j);
                dists.push(d);
                cur = j;
            }
        }
        if cur == n - 1 && idx.len() >= need {
            let limit = family[n - 1].clone();
            let limit_norm = l1_norm(&limit);
            return Ok(ProbeResult {
                indices: idx,
                distances: dists,
                limit,
                limit_norm,
            });
        }
    }
    Err(Error::Inconclusive { tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn disk(n: usize) -> Discretization {
        Discretization::new(Domain::unit_disk(), n, 11, Strategy::Uniform).unwrap()
    }

    #[test]
    fn constant_norm_is_area() {
        let d = disk(4000);
        let s = d.sample(|_| -1.0).unwrap();
        assert!((l1_norm(&s) - PI).abs() < 1e-12);
    }

    #[test]
    fn quadratic_norm() {
        let d = Discretization::new(Domain::unit_disk(), 20_000, 2, Strategy::BoundaryStratified).unwrap();
        let s = d.sample(|p| p.norm_sqr() - 1.0).unwrap();
        assert!((l1_norm(&s) / (PI / 2.0) - 1.0).abs() < 0.01);
        assert_eq!(l1_norm(&s.scaled(2.0).unwrap()), 2.0 * l1_norm(&s));
    }

    #[test]
    fn shift_distance_is_mass() {
        let d = disk(2000);
        let s = d.sample(|p| p.norm() - 1.0).unwrap();
        let t = s.shifted(-0.5).unwrap();
        assert!((l1_distance(&s, &t).unwrap() - 0.5 * d.total_mass()).abs() < 1e-12);
        assert_eq!(l1_distance(&s, &s).unwrap(), 0.0);
    }

    #[test]
    fn pole_budget() {
        let d = disk(1000);
        let mut v = alloc::vec![-1.0; 1000];
        v[3] = f64::NEG_INFINITY;
        let s = KernelSample::new(&d, v.clone()).unwrap();
        assert!((l1_norm(&s) - PI).abs() < 1e-12);
        v[4] = f64::NEG_INFINITY;
        assert_eq!(KernelSample::new(&d, v), Err(Error::PoleBudgetExceeded(2)));
    }

    #[test]
    fn mismatched_discretizations() {
        let a = disk(1000);
        let b = Discretization::new(Domain::unit_disk(), 1000, 12, Strategy::Uniform).unwrap();
        let s = a.sample(|_| -1.0).unwrap();
        let t = b.sample(|_| -1.0).unwrap();
        assert_eq!(l1_distance(&s, &t), Err(Error::DiscretizationMismatch));
    }

    #[test]
    fn too_few_nodes() {
        assert!(Discretization::new(Domain::unit_disk(), 999, 1, Strategy::Uniform).is_err());
    }

    #[test]
    fn embed_is_unit() {
        let e = PluriGreenEvaluator::ball();
        let d = Discretization::new(Domain::cball2(), 5000, 1, Strategy::Uniform).unwrap();
        let w = Point::new(&[0.5, 0.0, 0.0, 0.0]).unwrap();
        let k = embed(&e, &d, &w).unwrap();
        assert!((k.norm() - 1.0).abs() < UNIT_NORM_TOL);
    }

    #[test]
    fn probe_constant_family() {
        let d = disk(1000);
        let s = d.sample(|_| -1.0 / PI).unwrap();
        let fam = alloc::vec![s.clone(), s.clone(), s.clone()];
        let r = compactness_probe(&fam, 1e-2).unwrap();
        assert_eq!(r.indices, alloc::vec![0, 1, 2]);
        assert_eq!(r.limit, s);
    }
}
