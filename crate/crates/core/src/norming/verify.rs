use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use super::chain::CompactSet;
use super::family::{FamilyMember, TestFamily};
use super::weight::Weight;
use crate::domain::Exhaustion;
use crate::numeric::pairwise_sum_by;
use crate::sampling::{sample_nodes, Node, Strategy};
use crate::{error::invalid, Error, Point, Result};

/// Boundary samples used to locate `max_F u`.
const BOUNDARY_SAMPLES: usize = 4096;

/// `∫_{region} |u| φ` by the given nodes; nodes where `u` is not finite
/// (a pole hit exactly) are skipped.
pub fn weighted_norm(
    nodes: &[Node],
    u: impl Fn(&Point) -> f64,
    w: &dyn Weight,
    region: impl Fn(&Point) -> bool,
) -> f64 {
    pairwise_sum_by(nodes.len(), &mut |i| {
        let n = &nodes[i];
        if !region(&n.point) {
            return 0.0;
        }
        let v = u(&n.point);
        if v.is_finite() {
            v.abs() * w.value(&n.point) * n.weight
        } else {
            0.0
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    /// Node count of the coarse set; the fine set has twice as many.
    pub nodes: usize,
    pub seed: u64,
    pub compacts: Vec<CompactSet>,
    /// Required bound on the last tail ratio.
    pub epsilon: f64,
    /// Largest relative change of a norm under node doubling.
    pub doubling_tol: f64,
}

impl VerifyConfig {
    /// 10⁵ nodes, `ε = 0.05`, doubling tolerance 2%, and the compacts
    /// `D_1`, `D_2` and the ball of radius `δ(anchor)/4` about the anchor.
    pub fn new(e: &Exhaustion) -> Self {
        let mut compacts = alloc::vec![CompactSet::Level(1)];
        if e.len() > 1 {
            compacts.push(CompactSet::Level(2));
        }
        compacts.push(CompactSet::Ball {
            center: e.anchor(),
            radius: 0.25 * e.anchor_depth(),
        });
        Self {
            nodes: 100_000,
            seed: 0,
            compacts,
            epsilon: 0.05,
            doubling_tol: 0.02,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormingProperty {
    Finiteness,
    CompactBound,
    Tail,
}

impl fmt::Display for NormingProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormingProperty::Finiteness => "finite norm",
            NormingProperty::CompactBound => "compact upper bound",
            NormingProperty::Tail => "tail decay",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormingFailure {
    pub member: String,
    pub property: NormingProperty,
    pub detail: String,
}

impl fmt::Display for NormingFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails {}: {}", self.member, self.property, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemberReport {
    pub tag: String,
    pub norm: f64,
    pub norm_doubled: f64,
    pub relative_change: f64,
    /// `max_F u` for each configured compact.
    pub compact_max: Vec<f64>,
    /// `‖u‖_{L¹(D \ D_j, φ)} / ‖u‖_φ` for `j = 1..L`.
    pub tail_ratios: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompactReport {
    pub set: CompactSet,
    /// `Ĉ(F) = min_u (-max_F u) / ‖u‖_φ`.
    pub c_hat: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormingReport {
    pub weight: String,
    pub nodes: usize,
    pub seed: u64,
    pub members: Vec<MemberReport>,
    pub compacts: Vec<CompactReport>,
    /// Largest tail ratio over the family, per level.
    pub epsilon_schedule: Vec<f64>,
    pub failures: Vec<NormingFailure>,
}

impl NormingReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

fn compact_max(set: &CompactSet, e: &Exhaustion, m: &FamilyMember) -> Result<f64> {
    Ok(set
        .boundary_samples(e, BOUNDARY_SAMPLES)?
        .iter()
        .map(|p| m.eval(p))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Checks finiteness under node doubling, the compact upper bound, and
/// tail decay for every member of the family, on boundary-stratified nodes.
pub fn verify_norming(w: &dyn Weight, fam: &TestFamily, e: &Exhaustion, cfg: &VerifyConfig) -> Result<NormingReport> {
    if fam.domain() != e.domain() {
        return Err(invalid("family and exhaustion live on different domains"));
    }
    let domain = e.domain();
    let coarse = sample_nodes(domain, cfg.nodes, cfg.seed, Strategy::BoundaryStratified)?;
    let fine = sample_nodes(domain, 2 * cfg.nodes, cfg.seed, Strategy::BoundaryStratified)?;
    if let Some(n) = fine.iter().find(|n| !(w.value(&n.point) > 0.0)) {
        return Err(invalid(alloc::format!("weight is not positive at {}", n.point)));
    }
    let (a, ts) = (e.anchor(), e.scales());
    let gauges: Vec<f64> = fine.iter().map(|n| domain.gauge(&a, &n.point)).collect();
    let mut members = Vec::with_capacity(fam.len());
    let mut failures = Vec::new();
    for m in fam.members() {
        let norm = weighted_norm(&coarse, |p| m.eval(p), w, |_| true);
        let norm_doubled = weighted_norm(&fine, |p| m.eval(p), w, |_| true);
        let relative_change = (norm_doubled - norm).abs() / norm_doubled;
        if !(norm_doubled.is_finite() && relative_change < cfg.doubling_tol) {
            failures.push(NormingFailure {
                member: m.tag().into(),
                property: NormingProperty::Finiteness,
                detail: alloc::format!("relative change {relative_change:.4} under node doubling"),
            });
        }
        let compact_max = cfg
            .compacts
            .iter()
            .map(|f| compact_max(f, e, m))
            .collect::<Result<Vec<_>>>()?;
        for (f, mx) in cfg.compacts.iter().zip(&compact_max) {
            if !(*mx < 0.0) {
                failures.push(NormingFailure {
                    member: m.tag().into(),
                    property: NormingProperty::CompactBound,
                    detail: alloc::format!("max over {f} is {mx:.3e}"),
                });
            }
        }
        let tail_ratios: Vec<f64> = ts
            .iter()
            .map(|t| {
                let tail = pairwise_sum_by(fine.len(), &mut |i| {
                    if gauges[i] > *t {
                        let v = m.eval(&fine[i].point);
                        if v.is_finite() {
                            return v.abs() * w.value(&fine[i].point) * fine[i].weight;
                        }
                    }
                    0.0
                });
                tail / norm_doubled
            })
            .collect();
        let monotone = tail_ratios.windows(2).all(|r| r[1] <= r[0] * (1.0 + 1e-12));
        let last = *tail_ratios.last().unwrap();
        if !(monotone && last < cfg.epsilon) {
            failures.push(NormingFailure {
                member: m.tag().into(),
                property: NormingProperty::Tail,
                detail: alloc::format!("last tail ratio {last:.4}, monotone {monotone}"),
            });
        }
        members.push(MemberReport {
            tag: m.tag().into(),
            norm,
            norm_doubled,
            relative_change,
            compact_max,
            tail_ratios,
        });
    }
    let compacts = cfg
        .compacts
        .iter()
        .enumerate()
        .map(|(k, f)| CompactReport {
            set: *f,
            c_hat: members
                .iter()
                .map(|r| -r.compact_max[k] / r.norm_doubled)
                .fold(f64::INFINITY, f64::min),
        })
        .collect();
    let epsilon_schedule = (0..ts.len())
        .map(|j| members.iter().map(|r| r.tail_ratios[j]).fold(0.0, f64::max))
        .collect();
    Ok(NormingReport {
        weight: w.label(),
        nodes: cfg.nodes,
        seed: cfg.seed,
        members,
        compacts,
        epsilon_schedule,
        failures,
    })
}

/// Observed `min` and `max` of `‖u‖_{w2} / ‖u‖_{w1}` over the family.
pub fn equivalence_ratio(w1: &dyn Weight, w2: &dyn Weight, fam: &TestFamily, nodes: &[Node]) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for m in fam.members() {
        let n1 = weighted_norm(nodes, |p| m.eval(p), w1, |_| true);
        let n2 = weighted_norm(nodes, |p| m.eval(p), w2, |_| true);
        if !(n1 > 0.0 && n1.is_finite() && n2.is_finite()) {
            return Err(invalid(alloc::format!("norm of {} is degenerate", m.tag())));
        }
        lo = lo.min(n2 / n1);
        hi = hi.max(n2 / n1);
    }
    Ok((lo, hi))
}

/// Largest `ĉ` with `ĉ ‖χ_F‖_φ ‖u‖_φ ≤ -∫_F u φ` across the family.
pub fn compact_lower_bound(
    w: &dyn Weight,
    f: &CompactSet,
    e: &Exhaustion,
    fam: &TestFamily,
    nodes: &[Node],
) -> Result<f64> {
    if matches!(f, CompactSet::Point(_)) || matches!(f, CompactSet::Ball { radius, .. } if *radius <= 0.0) {
        return Err(invalid("F must have positive measure"));
    }
    let chi = weighted_norm(nodes, |_| 1.0, w, |p| f.contains(e, p));
    if !(chi > 0.0) {
        return Err(invalid("F carries no quadrature mass"));
    }
    let mut best = f64::INFINITY;
    for m in fam.members() {
        let inner = weighted_norm(nodes, |p| m.eval(p), w, |p| f.contains(e, p));
        let total = weighted_norm(nodes, |p| m.eval(p), w, |_| true);
        best = best.min(inner / (chi * total));
    }
    Ok(best)
}

/// `A_j = ∫_{D_j} |u|` against `b_j A_{j+1}` for one member and level.
#[derive(Clone, Debug, PartialEq)]
pub struct MassGrowth {
    pub member: String,
    pub level: usize,
    pub inner: f64,
    pub outer: f64,
    pub b: f64,
}

impl MassGrowth {
    pub fn holds(&self) -> bool {
        self.inner >= self.b * self.outer
    }
}

/// `A_j ≥ b_j A_{j+1}` for every member and every level with a ratio.
pub fn check_mass_growth(b: &[f64], fam: &TestFamily, e: &Exhaustion, nodes: &[Node]) -> Result<Vec<MassGrowth>> {
    if b.len() + 1 != e.len() {
        return Err(Error::DimensionMismatch {
            expected: e.len() - 1,
            found: b.len(),
        });
    }
    let one = super::weight::ConstantWeight(1.0);
    let (domain, a) = (e.domain(), e.anchor());
    let mut out = Vec::new();
    for m in fam.members() {
        let masses: Vec<f64> = e
            .scales()
            .iter()
            .map(|t| weighted_norm(nodes, |p| m.eval(p), &one, |p| domain.gauge(&a, p) < *t))
            .collect();
        for (j, bj) in b.iter().enumerate() {
            out.push(MassGrowth {
                member: m.tag().into(),
                level: j + 1,
                inner: masses[j],
                outer: masses[j + 1],
                b: *bj,
            });
        }
    }
    Ok(out)
}
