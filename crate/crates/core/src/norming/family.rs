//! Closed-form negative subharmonic test functions.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classical::GreenEvaluator;
use crate::domain::{Domain, DomainKind};
use crate::sampling::uniform_point;
use crate::{error::invalid, Point, Result};

/// Tag of the harmonic function `Im(1/z²) = -2xy/(x²+y²)²` on the
/// quarter-disk, which is not integrable near the corner.
pub const IM_INV_SQUARE_TAG: &str = "Im(1/z²) example";

type Eval = Box<dyn Fn(&Point) -> f64 + Send + Sync>;

pub struct FamilyMember {
    tag: String,
    eval: Eval,
}

impl core::fmt::Debug for FamilyMember {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FamilyMember").field("tag", &self.tag).finish()
    }
}

impl FamilyMember {
    pub fn new(tag: impl Into<String>, eval: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            tag: tag.into(),
            eval: Box::new(eval),
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    #[inline]
    pub fn eval(&self, p: &Point) -> f64 {
        (self.eval)(p)
    }
}

/// Green function of the quarter-disk, obtained from the half-disk by
/// `z ↦ z²`.
pub fn quarter_disk_green(z: &Point, w: &Point) -> f64 {
    let (z, w) = (z.z1(), w.z1());
    let one = Complex64::new(1.0, 0.0);
    let wb = w.conj();
    let num = (z - w) * (z + w) * (one - z * w) * (one + z * w);
    let den = (z - wb) * (z + wb) * (one - z * wb) * (one + z * wb);
    (num / den).norm().ln()
}

#[derive(Debug)]
pub struct TestFamily {
    domain: Domain,
    members: Vec<FamilyMember>,
}

impl TestFamily {
    pub fn new(domain: Domain, members: Vec<FamilyMember>) -> Result<Self> {
        if members.is_empty() {
            return Err(invalid("a test family needs at least one member"));
        }
        Ok(Self { domain, members })
    }

    /// Green functions, a maximum of two Green functions, negated Poisson
    /// kernels, `-1`, and one more domain-specific member.
    pub fn standard(domain: Domain) -> Result<Self> {
        let members = match domain.kind() {
            DomainKind::UnitDisk => disk_members(),
            DomainKind::QuarterDisk => quarter_members(),
            DomainKind::Ball3 => ball3_members(),
            k => return Err(invalid(alloc::format!("no test family for {k}"))),
        };
        Self::new(domain, members)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn push(&mut self, m: FamilyMember) {
        self.members.push(m);
    }

    /// Drops the member with the given tag.
    pub fn without(mut self, tag: &str) -> Self {
        self.members.retain(|m| m.tag != tag);
        self
    }

    /// Checks `u ≤ 0` at `n` seeded uniform points; names the first
    /// offending member.
    pub fn spot_check(&self, n: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Point> = (0..n).map(|_| uniform_point(self.domain, &mut rng)).collect();
        for m in &self.members {
            if let Some(p) = pts.iter().find(|p| m.eval(p) > 1e-12) {
                return Err(invalid(alloc::format!("member {} is positive at {p}", m.tag)));
            }
        }
        Ok(())
    }
}

fn classical_members(g: GreenEvaluator, poles: [Point; 3], zetas: [Point; 2]) -> Vec<FamilyMember> {
    let mut out = Vec::new();
    for y in &poles[..2] {
        let y = *y;
        out.push(FamilyMember::new(alloc::format!("G(., {y})"), move |x| g.green_unchecked(x, &y)));
    }
    let (y1, y2) = (poles[1], poles[2]);
    out.push(FamilyMember::new(alloc::format!("max(G(., {y1}), G(., {y2}))"), move |x| {
        g.green_unchecked(x, &y1).max(g.green_unchecked(x, &y2))
    }));
    for z in zetas {
        out.push(FamilyMember::new(alloc::format!("-P(., {z})"), move |x| -g.poisson_unchecked(x, &z)));
    }
    out.push(FamilyMember::new("-1", |_| -1.0));
    out
}

fn disk_members() -> Vec<FamilyMember> {
    let g = GreenEvaluator::new(Domain::unit_disk()).unwrap();
    let mut out = classical_members(
        g,
        [Point::xy(0.0, 0.0), Point::xy(0.5, 0.2), Point::xy(-0.3, -0.4)],
        [Point::xy(1.0, 0.0), Point::xy(0.0, -1.0)],
    );
    out.push(FamilyMember::new("|z|^2-1", |x| x.norm_sqr() - 1.0));
    out
}

fn ball3_members() -> Vec<FamilyMember> {
    let g = GreenEvaluator::new(Domain::ball3()).unwrap();
    let mut out = classical_members(
        g,
        [Point::xyz(0.0, 0.0, 0.0), Point::xyz(0.4, 0.1, -0.2), Point::xyz(-0.3, 0.3, 0.2)],
        [Point::xyz(0.0, 0.0, 1.0), Point::xyz(1.0, 0.0, 0.0)],
    );
    out.push(FamilyMember::new("|x|^2-1", |x| x.norm_sqr() - 1.0));
    out
}

fn quarter_members() -> Vec<FamilyMember> {
    let disk = GreenEvaluator::new(Domain::unit_disk()).unwrap();
    let mut out = Vec::new();
    let poles = [Point::xy(0.5, 0.5), Point::xy(0.2, 0.7), Point::xy(0.7, 0.15)];
    for y in &poles[..2] {
        let y = *y;
        out.push(FamilyMember::new(alloc::format!("G_Q(., {y})"), move |x| quarter_disk_green(x, &y)));
    }
    let (y1, y2) = (poles[1], poles[2]);
    out.push(FamilyMember::new(alloc::format!("max(G_Q(., {y1}), G_Q(., {y2}))"), move |x| {
        quarter_disk_green(x, &y1).max(quarter_disk_green(x, &y2))
    }));
    let s = core::f64::consts::FRAC_1_SQRT_2;
    for z in [Point::xy(s, s), Point::xy(1.0, 0.0)] {
        out.push(FamilyMember::new(alloc::format!("-P_disk(., {z})"), move |x| {
            -disk.poisson_unchecked(x, &z)
        }));
    }
    out.push(FamilyMember::new("-1", |_| -1.0));
    out.push(FamilyMember::new(IM_INV_SQUARE_TAG, |p| {
        let c = p.coords();
        let r2 = c[0] * c[0] + c[1] * c[1];
        -2.0 * c[0] * c[1] / (r2 * r2)
    }));
    out
}
