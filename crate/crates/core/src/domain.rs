//! Model domains, their boundary geometry and concentric exhaustions.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{error::invalid, Error, Point, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainKind {
    /// `{|z| < 1}` in R².
    UnitDisk,
    /// `{x > 0, y > 0, x² + y² < 1}`.
    QuarterDisk,
    /// Unit ball of R³.
    Ball3,
    /// Unit ball of C² ≅ R⁴.
    CBall2,
    /// `{|z₁| < 1, |z₂| < 1}` in C².
    Bidisk,
}

impl DomainKind {
    pub const ALL: [DomainKind; 5] = [
        DomainKind::UnitDisk,
        DomainKind::QuarterDisk,
        DomainKind::Ball3,
        DomainKind::CBall2,
        DomainKind::Bidisk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DomainKind::UnitDisk => "unit-disk",
            DomainKind::QuarterDisk => "quarter-disk",
            DomainKind::Ball3 => "ball3",
            DomainKind::CBall2 => "cball2",
            DomainKind::Bidisk => "bidisk",
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DomainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit-disk" | "disk" => Ok(DomainKind::UnitDisk),
            "quarter-disk" => Ok(DomainKind::QuarterDisk),
            "ball3" => Ok(DomainKind::Ball3),
            "cball2" | "ball" => Ok(DomainKind::CBall2),
            "bidisk" => Ok(DomainKind::Bidisk),
            other => Err(invalid(alloc::format!("unknown domain `{other}`"))),
        }
    }
}

/// One of the five model domains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    kind: DomainKind,
}

impl From<DomainKind> for Domain {
    fn from(kind: DomainKind) -> Self {
        Domain { kind }
    }
}

impl Domain {
    pub const fn new(kind: DomainKind) -> Self {
        Domain { kind }
    }

    pub const fn unit_disk() -> Self {
        Self::new(DomainKind::UnitDisk)
    }
    pub const fn quarter_disk() -> Self {
        Self::new(DomainKind::QuarterDisk)
    }
    pub const fn ball3() -> Self {
        Self::new(DomainKind::Ball3)
    }
    pub const fn cball2() -> Self {
        Self::new(DomainKind::CBall2)
    }
    pub const fn bidisk() -> Self {
        Self::new(DomainKind::Bidisk)
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            DomainKind::UnitDisk | DomainKind::QuarterDisk => 2,
            DomainKind::Ball3 => 3,
            DomainKind::CBall2 | DomainKind::Bidisk => 4,
        }
    }

    pub fn smooth_boundary(&self) -> bool {
        matches!(
            self.kind,
            DomainKind::UnitDisk | DomainKind::Ball3 | DomainKind::CBall2
        )
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.kind, DomainKind::CBall2 | DomainKind::Bidisk)
    }

    pub fn volume(&self) -> f64 {
        match self.kind {
            DomainKind::UnitDisk => PI,
            DomainKind::QuarterDisk => PI / 4.0,
            DomainKind::Ball3 => 4.0 * PI / 3.0,
            DomainKind::CBall2 => PI * PI / 2.0,
            DomainKind::Bidisk => PI * PI,
        }
    }

    /// Axis-aligned box `(lo, hi)` containing the closure of the domain.
    pub fn bounding_box(&self) -> ([f64; 4], [f64; 4]) {
        match self.kind {
            DomainKind::QuarterDisk => ([0.0; 4], [1.0, 1.0, 0.0, 0.0]),
            _ => ([-1.0; 4], [1.0; 4]),
        }
    }

    /// Interior point about which exhaustions are scaled by default.
    pub fn default_anchor(&self) -> Point {
        match self.kind {
            DomainKind::QuarterDisk => Point::xy(0.3, 0.3),
            _ => Point::origin(self.ambient_dim()),
        }
    }

    pub fn contains(&self, p: &Point) -> Result<bool> {
        p.expect_dim(self.ambient_dim())?;
        Ok(self.contains_unchecked(p))
    }

    #[inline]
    pub(crate) fn contains_unchecked(&self, p: &Point) -> bool {
        let c = p.raw();
        match self.kind {
            DomainKind::UnitDisk => c[0] * c[0] + c[1] * c[1] < 1.0,
            DomainKind::QuarterDisk => c[0] > 0.0 && c[1] > 0.0 && c[0] * c[0] + c[1] * c[1] < 1.0,
            DomainKind::Ball3 => c[0] * c[0] + c[1] * c[1] + c[2] * c[2] < 1.0,
            DomainKind::CBall2 => c.iter().map(|v| v * v).sum::<f64>() < 1.0,
            DomainKind::Bidisk => c[0] * c[0] + c[1] * c[1] < 1.0 && c[2] * c[2] + c[3] * c[3] < 1.0,
        }
    }

    /// Euclidean distance δ(p) from an interior point to the boundary.
    pub fn boundary_distance(&self, p: &Point) -> Result<f64> {
        if !self.contains(p)? {
            return Err(Error::OutsideDomain);
        }
        Ok(self.depth(p))
    }

    /// δ(p) for interior points and 0 elsewhere.
    pub(crate) fn depth(&self, p: &Point) -> f64 {
        if !self.contains_unchecked(p) {
            return 0.0;
        }
        let c = p.raw();
        let d = match self.kind {
            DomainKind::UnitDisk | DomainKind::Ball3 | DomainKind::CBall2 => 1.0 - p.norm(),
            DomainKind::QuarterDisk => c[0].min(c[1]).min(1.0 - p.norm()),
            DomainKind::Bidisk => {
                let m1 = (c[0] * c[0] + c[1] * c[1]).sqrt();
                let m2 = (c[2] * c[2] + c[3] * c[3]).sqrt();
                (1.0 - m1).min(1.0 - m2)
            }
        };
        d.max(0.0)
    }

    /// Homogeneous gauge about the origin used for boundary-stratified
    /// sampling: the domain is exactly `{radial_gauge < 1}` and
    /// `radial_gauge(t p) = t radial_gauge(p)` for `t > 0`.
    ///
    /// For the quarter-disk the origin is the corner, so the strata also
    /// refine toward the corner singularity.
    pub fn radial_gauge(&self, p: &Point) -> f64 {
        let c = p.raw();
        match self.kind {
            DomainKind::Bidisk => {
                let m1 = (c[0] * c[0] + c[1] * c[1]).sqrt();
                let m2 = (c[2] * c[2] + c[3] * c[3]).sqrt();
                m1.max(m2)
            }
            _ => p.norm(),
        }
    }

    /// Volume of `{radial_gauge < s}`.
    pub fn radial_volume(&self, s: f64) -> f64 {
        self.volume() * s.powi(self.ambient_dim() as i32)
    }

    /// Minkowski gauge of `p` relative to the interior point `anchor`:
    /// the least `t > 0` with `anchor + (p - anchor)/t` in the domain.
    /// All model domains are convex, so `{gauge < t}` is the copy of the
    /// domain scaled by `t` about `anchor`.
    pub fn gauge(&self, anchor: &Point, p: &Point) -> f64 {
        let a = anchor.raw();
        let d = p.sub(anchor).raw();
        if d.iter().all(|v| *v == 0.0) {
            return 0.0;
        }
        match self.kind {
            DomainKind::UnitDisk => 1.0 / sphere_exit(&a[..2], &d[..2]),
            DomainKind::Ball3 => 1.0 / sphere_exit(&a[..3], &d[..3]),
            DomainKind::CBall2 => 1.0 / sphere_exit(&a, &d),
            DomainKind::Bidisk => {
                let s1 = 1.0 / sphere_exit(&a[..2], &d[..2]);
                let s2 = 1.0 / sphere_exit(&a[2..], &d[2..]);
                s1.max(s2)
            }
            DomainKind::QuarterDisk => {
                let mut s = 1.0 / sphere_exit(&a[..2], &d[..2]);
                for k in 0..2 {
                    if d[k] < 0.0 {
                        s = s.max(-d[k] / a[k]);
                    }
                }
                s
            }
        }
    }

    /// Boundary point reached from `anchor` in direction `dir`.
    pub fn boundary_point_along(&self, anchor: &Point, dir: &Point) -> Point {
        let s = self.gauge(anchor, &anchor.add(dir));
        anchor.add(&dir.scale(1.0 / s))
    }
}

/// Largest `u ≥ 0` with `|a + u d| ≤ 1`, for `|a| < 1`; `+inf` when `d = 0`.
fn sphere_exit(a: &[f64], d: &[f64]) -> f64 {
    let dd: f64 = d.iter().map(|v| v * v).sum();
    if dd == 0.0 {
        return f64::INFINITY;
    }
    let ad: f64 = a.iter().zip(d).map(|(x, y)| x * y).sum();
    let aa: f64 = a.iter().map(|v| v * v).sum();
    (-ad + (ad * ad + dd * (1.0 - aa)).sqrt()) / dd
}

/// Concentric exhaustion `D_j = anchor + t_j (D - anchor)` with
/// `t_1 < t_2 < … < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Exhaustion {
    domain: Domain,
    anchor: Point,
    levels: Vec<f64>,
}

/// One level `D_j` of an [`Exhaustion`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExhaustionLevel {
    pub domain: Domain,
    pub anchor: Point,
    pub index: usize,
    pub scale: f64,
    /// Scale of the next level (1 past the last configured level).
    pub next_scale: f64,
    /// `r_j = dist(D_j, ∂D_{j+1})`.
    pub gap: f64,
}

impl Exhaustion {
    pub fn new(domain: Domain, anchor: Point, levels: Vec<f64>) -> Result<Self> {
        anchor.expect_dim(domain.ambient_dim())?;
        if !domain.contains_unchecked(&anchor) {
            return Err(Error::OutsideDomain);
        }
        if levels.is_empty() {
            return Err(invalid("exhaustion needs at least one level"));
        }
        let increasing = levels.windows(2).all(|w| w[0] < w[1]);
        if !increasing || levels[0] <= 0.0 || *levels.last().unwrap() >= 1.0 {
            return Err(invalid("levels must increase strictly inside (0, 1)"));
        }
        Ok(Self {
            domain,
            anchor,
            levels,
        })
    }

    /// Dyadic schedule `t_j = 1 - 2^{-j}`, `j = 1..=n`, about the domain's
    /// default anchor.
    pub fn dyadic(domain: Domain, n: usize) -> Result<Self> {
        let levels = (1..=n).map(|j| 1.0 - 0.5f64.powi(j as i32)).collect();
        Self::new(domain, domain.default_anchor(), levels)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn anchor(&self) -> Point {
        self.anchor
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn scales(&self) -> &[f64] {
        &self.levels
    }

    pub fn anchor_depth(&self) -> f64 {
        self.domain.depth(&self.anchor)
    }

    /// Level `j` (1-based) with its exact gap to the next level.
    pub fn level(&self, j: usize) -> Result<ExhaustionLevel> {
        if j == 0 || j > self.levels.len() {
            return Err(Error::LevelOutOfRange {
                level: j,
                levels: self.levels.len(),
            });
        }
        let t = self.levels[j - 1];
        let next = self.levels.get(j).copied().unwrap_or(1.0);
        Ok(ExhaustionLevel {
            domain: self.domain,
            anchor: self.anchor,
            index: j,
            scale: t,
            next_scale: next,
            gap: (next - t) * self.anchor_depth(),
        })
    }

    /// Index `j` with `p ∈ G_j = D_{j+1} \ D_j`; 0 inside `D_1` and the
    /// number of levels outside the last one.
    pub fn annulus_index(&self, p: &Point) -> usize {
        let s = self.domain.gauge(&self.anchor, p);
        self.levels.iter().take_while(|t| s >= **t).count()
    }
}

impl ExhaustionLevel {
    pub fn contains(&self, p: &Point) -> bool {
        self.domain.gauge(&self.anchor, p) < self.scale
    }

    /// Distance from `p ∈ D_j` to `∂D_j`.
    pub fn boundary_distance(&self, p: &Point) -> Result<f64> {
        if !self.contains(p) {
            return Err(Error::OutsideDomain);
        }
        let q = self.anchor.add(&p.sub(&self.anchor).scale(1.0 / self.scale));
        Ok(self.scale * self.domain.depth(&q))
    }

    /// The next level `D_{j+1}` (the domain itself past the last level).
    pub fn next(&self) -> ExhaustionLevel {
        ExhaustionLevel {
            index: self.index + 1,
            scale: self.next_scale,
            next_scale: 1.0,
            gap: (1.0 - self.next_scale) * self.domain.depth(&self.anchor),
            ..*self
        }
    }

    pub fn volume(&self) -> f64 {
        self.domain.volume() * self.scale.powi(self.domain.ambient_dim() as i32)
    }
}
