//! The ten acceptance criteria, each a list of named checks with pinned
//! tolerances. `ppkit verify-all` and the `acceptance` test target both
//! run these.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use ppkit_core::classical::{GreenEvaluator, RieszDecomposition};
use ppkit_core::compactification::{
    boundary_atlas_report, classify_bidisk, detect_limit, detect_limit_alpha, detect_martin_limit, ApproachSequence,
    LimitKernel, Schedule, FACE1_THRESHOLD, FACE2_THRESHOLD,
};
use ppkit_core::domain::{Domain, Exhaustion};
use ppkit_core::l1::{compactness_probe, embed, l1_distance, Discretization, NormalizedKernel, KernelTag, UNIT_NORM_TOL};
use ppkit_core::norming::{
    build_weight, verify_norming, weighted_norm, ConstantWeight, TestFamily, VerifyConfig, IM_INV_SQUARE_TAG,
};
use ppkit_core::numeric::five_point_laplacian;
use ppkit_core::pluri::{ball_green, disk_harmonicity_check, KobayashiOracle, PluriGreenEvaluator};
use ppkit_core::sampling::{sample_nodes, Strategy};
use ppkit_core::Point;

use crate::report::Check;

/// Limit detection tolerance.
pub const TOL: f64 = 1e-2;
/// Largest `L¹` distance between a detected limit and its closed form.
pub const KERNEL_MATCH: f64 = 3e-2;
/// Largest distance between limits reached along different paths.
pub const PATH_AGREEMENT: f64 = 2e-2;
/// Node count for limit experiments.
pub const LIMIT_NODES: usize = 50_000;
/// Terms of the dyadic approach sequences.
pub const SEQUENCE_LEN: usize = 12;
/// Terms of the bidisk sequences; pinned coordinates converge more slowly.
pub const BIDISK_LEN: usize = 16;

pub const TITLES: [&str; 10] = [
    "disk Green closed form",
    "Green and Poisson bounds",
    "Poisson-Jensen reproduction",
    "non-integrable example and built weight",
    "compactness probe on the ball",
    "ball boundary limits",
    "bidisk boundary classification",
    "kl ratio estimate",
    "Martin limit on the disk",
    "normalizer independence",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Criterion {
    pub number: usize,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl Criterion {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// One summary line, e.g. `criterion 3 PASS Poisson-Jensen reproduction`.
    pub fn line(&self) -> String {
        let status = if self.pass() { "PASS" } else { "FAIL" };
        let failing: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        if failing.is_empty() {
            format!("criterion {} {status} {}", self.number, self.title)
        } else {
            format!("criterion {} {status} {} [{}]", self.number, self.title, failing.join(", "))
        }
    }
}

fn failed(name: &str, err: impl std::fmt::Display) -> Check {
    Check::new(name, false, format!("error: {err}"))
}

/// Runs criterion `n` (1-based).
pub fn criterion(n: usize, seed: u64) -> Criterion {
    let checks = match n {
        1 => disk_green(seed),
        2 => bounds(seed),
        3 => poisson_jensen(seed),
        4 => counterexample(seed),
        5 => probe(seed),
        6 => ball_limits(seed),
        7 => bidisk(seed),
        8 => kl(seed),
        9 => martin(seed),
        10 => normalizers(seed),
        _ => vec![Check::new("criterion number", false, format!("no criterion {n}"))],
    };
    Criterion {
        number: n,
        title: TITLES.get(n.wrapping_sub(1)).copied().unwrap_or("unknown"),
        checks,
    }
}

/// All criteria, in parallel, returned in order.
pub fn run_all(seed: u64) -> Vec<Criterion> {
    (1..=10).into_par_iter().map(|n| criterion(n, seed)).collect()
}

fn points(domain: Domain, n: usize, seed: u64) -> Vec<Point> {
    sample_nodes(domain, n, seed, Strategy::Uniform)
        .expect("uniform sampling with n > 0")
        .into_iter()
        .map(|n| n.point)
        .collect()
}

fn disk_green(seed: u64) -> Vec<Check> {
    let g = GreenEvaluator::new(Domain::unit_disk()).unwrap();
    let xs = points(Domain::unit_disk(), 10_000, seed);
    let ys = points(Domain::unit_disk(), 10_000, seed.wrapping_add(1));
    let (mut asym, mut worst) = (0.0f64, f64::NEG_INFINITY);
    for (x, y) in xs.iter().zip(&ys) {
        let (a, b) = (g.green(x, y).unwrap(), g.green(y, x).unwrap());
        asym = asym.max((a - b).abs() / (1.0 + a.abs()));
        worst = worst.max(a);
    }
    let mut residual = 0.0f64;
    let mut used = 0;
    for (x, y) in xs.iter().zip(&ys) {
        if x.norm() <= 0.9 && y.norm() <= 0.5 && x.dist(y) >= 0.4 {
            let c = x.coords();
            let lap = five_point_laplacian(|u, v| g.green(&Point::xy(u, v), y).unwrap(), c[0], c[1], 1e-3);
            residual = residual.max(lap.abs());
            used += 1;
        }
        if used == 200 {
            break;
        }
    }
    vec![
        Check::new("symmetry", asym <= 1e-12, format!("max relative asymmetry {asym:.3e} on 10000 pairs")),
        Check::new("negativity", worst < 0.0, format!("largest value {worst:.3e}")),
        Check::new(
            "harmonicity",
            used == 200 && residual < 1e-4,
            format!("max 5-point residual {residual:.3e} at h = 1e-3 over {used} points"),
        ),
    ]
}

fn bounds(seed: u64) -> Vec<Check> {
    let disk = GreenEvaluator::new(Domain::unit_disk()).unwrap();
    let a = disk.check_green_bound(4.0, 100_000, seed.wrapping_add(10));
    let b = disk.check_poisson_bound(2.0, 100_000, seed.wrapping_add(11));
    let ball = GreenEvaluator::new(Domain::ball3()).unwrap();
    let c = ball.scan_bounds(100_000, seed.wrapping_add(12));
    vec![
        Check::new("disk Green bound A = 4", a.holds(), format!("{} violations", a.violations)),
        Check::new("disk Poisson bound B = 2", b.holds(), format!("{} violations", b.violations)),
        Check::new(
            "ball3 scanned constants",
            c.a_hat.is_finite() && c.b_hat.is_finite() && c.pass(),
            format!(
                "A_hat {:.4}, B_hat {:.4}, violations at 1.01x: {} and {}",
                c.a_hat, c.b_hat, c.green.violations, c.poisson.violations
            ),
        ),
    ]
}

fn poisson_jensen(seed: u64) -> Vec<Check> {
    let g = GreenEvaluator::new(Domain::unit_disk()).unwrap();
    let o = Point::origin(2);
    let quad = sample_nodes(Domain::unit_disk(), 200_000, seed, Strategy::PoleRefined(o))
        .and_then(|nodes| g.poisson_jensen_eval(&RieszDecomposition::disk_quadratic(), &o, &nodes));
    let quad_check = match quad {
        Ok(v) => Check::below("quadratic at the origin", (v + 1.0).abs(), 1e-2),
        Err(e) => failed("quadratic at the origin", e),
    };
    let log_pole = RieszDecomposition::log_pole(o);
    let mut err = 0.0f64;
    for k in 0..10 {
        let t = 2.0 * PI * k as f64 / 10.0;
        let r = 0.05 + 0.09 * k as f64;
        let x = Point::xy(r * t.cos(), r * t.sin());
        let v = g.poisson_jensen_eval(&log_pole, &x, &[]).unwrap();
        err = err.max((v - r.ln()).abs());
    }
    vec![quad_check, Check::below("log|z| at 10 probes", err, 1e-10)]
}

fn counterexample(seed: u64) -> Vec<Check> {
    let q = Domain::quarter_disk();
    let mut checks = Vec::new();
    let nodes = sample_nodes(q, 200_000, seed, Strategy::BoundaryStratified).unwrap();
    let fam = TestFamily::standard(q).unwrap();
    let u = fam.members().iter().find(|m| m.tag() == IM_INV_SQUARE_TAG).unwrap();
    for eps in [0.1f64, 0.01] {
        let v = weighted_norm(&nodes, |p| u.eval(p), &ConstantWeight(1.0), |p| p.norm() > eps);
        let exact = (1.0 / eps).ln();
        checks.push(Check::below(
            format!("truncated integral at eps = {eps}"),
            (v / exact - 1.0).abs(),
            1e-2,
        ));
    }
    let e = Exhaustion::dyadic(q, 12).unwrap();
    match build_weight(&e) {
        Ok(w) => match verify_norming(&w, &fam, &e, &VerifyConfig::new(&e)) {
            Ok(r) => {
                let m = r.members.iter().find(|m| m.tag == IM_INV_SQUARE_TAG).unwrap();
                checks.push(Check::below("weighted norm under node doubling", m.relative_change, 0.02));
                let detail = r.failures.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; ");
                checks.push(Check::new("norming properties on the family", r.pass(), detail));
            }
            Err(err) => checks.push(failed("norming properties on the family", err)),
        },
        Err(err) => checks.push(failed("weight construction", err)),
    }
    checks
}

fn ball_disc(seed: u64) -> Discretization {
    Discretization::new(Domain::cball2(), LIMIT_NODES, seed, Strategy::Uniform).unwrap()
}

fn e1() -> Point {
    Point::new(&[1.0, 0.0, 0.0, 0.0]).unwrap()
}

fn probe(seed: u64) -> Vec<Check> {
    let disc = ball_disc(seed);
    let e = PluriGreenEvaluator::ball();
    let family: Result<Vec<_>, _> = (1..=SEQUENCE_LEN)
        .map(|j| embed(&e, &disc, &e1().scale(Schedule::DYADIC.radius(j))).map(NormalizedKernel::into_sample))
        .collect();
    match family.and_then(|f| compactness_probe(&f, TOL)) {
        Ok(r) => vec![
            Check::new("Cauchy subsequence", true, format!("indices {:?}", r.indices)),
            Check::new(
                "limit norm",
                r.limit_norm <= 1.0 + UNIT_NORM_TOL,
                format!("{:.12}", r.limit_norm),
            ),
        ],
        Err(err) => vec![failed("Cauchy subsequence", err)],
    }
}

fn ball_limits(seed: u64) -> Vec<Check> {
    let disc = ball_disc(seed);
    let e = PluriGreenEvaluator::ball();
    let mut checks = Vec::new();
    let kernel = LimitKernel::ball(e1()).unwrap();
    let run = |s: Schedule| {
        ApproachSequence::ball_radial(e1(), s, SEQUENCE_LEN).and_then(|q| detect_limit(&e, &disc, &q, TOL))
    };
    match (run(Schedule::DYADIC), run(Schedule::TRIADIC), kernel.normalized(&disc)) {
        (Ok(a), Ok(b), Ok(k)) => {
            checks.push(Check::new(
                "convergence",
                a.converged && b.converged,
                format!("last successive distance {:.3e}", a.successive.last().unwrap()),
            ));
            checks.push(Check::below("distance to closed form", l1_distance(&a.limit, k.sample()).unwrap(), KERNEL_MATCH));
            checks.push(Check::below("path independence", l1_distance(&a.limit, &b.limit).unwrap(), PATH_AGREEMENT));
        }
        (a, b, k) => {
            let err = a.err().or(b.err()).or(k.err()).unwrap();
            checks.push(failed("convergence", err));
        }
    }
    let zs = points(Domain::cball2(), 1000, seed.wrapping_add(20));
    let ws = points(Domain::cball2(), 1000, seed.wrapping_add(21));
    let mut dev = 0.0f64;
    for (z, w) in zs.iter().zip(&ws) {
        let g = ball_green(z, w).unwrap();
        let k = KobayashiOracle.distance(z, w).unwrap();
        dev = dev.max((g - k.tanh().ln()).abs());
    }
    checks.push(Check::below("Kobayashi identity on 1000 pairs", dev, 1e-10));
    let c = Complex64::new(0.3, 0.2);
    let res = |h: f64| disk_harmonicity_check(&kernel, c, 400, h);
    match (res(1e-3), res(1e-2), res(5e-3)) {
        (Ok(r), Ok(r1), Ok(r2)) => {
            checks.push(Check::below("analytic-disk harmonicity at h = 1e-3", r, 1e-4));
            let ratio = r1 / r2;
            checks.push(Check::new(
                "second-order decay",
                (3.0..=5.0).contains(&ratio),
                format!("residual ratio {ratio:.3} between h = 1e-2 and 5e-3"),
            ));
        }
        (a, b, c) => checks.push(failed("analytic-disk harmonicity", a.err().or(b.err()).or(c.err()).unwrap())),
    }
    checks
}

fn bidisk(seed: u64) -> Vec<Check> {
    let disc = Discretization::new(Domain::bidisk(), LIMIT_NODES, seed, Strategy::Uniform).unwrap();
    let mut checks = Vec::new();
    let (alpha, beta) = (PI / 4.0, 0.0);
    for (c, expected) in [
        (0.0, "bidisk-face1"),
        (0.5, "bidisk-mixed"),
        (1.0, "bidisk-mixed"),
        (2.0, "bidisk-mixed"),
        (f64::INFINITY, "bidisk-face2"),
    ] {
        let name = format!("c = {c}");
        let cl = ApproachSequence::bidisk_for_c(alpha, beta, c, BIDISK_LEN).and_then(|s| classify_bidisk(&s, &disc, TOL));
        match cl {
            Ok(cl) => {
                let c_ok = if c == 0.0 {
                    cl.c_hat < FACE1_THRESHOLD
                } else if c.is_infinite() {
                    cl.c_hat > FACE2_THRESHOLD
                } else {
                    (cl.c_hat / c - 1.0).abs() < 0.05
                };
                checks.push(Check::new(format!("{name}: exponent"), c_ok, format!("c_hat {:.6e}", cl.c_hat)));
                checks.push(Check::new(
                    format!("{name}: kernel"),
                    cl.kernel.name() == expected && cl.distance < KERNEL_MATCH,
                    format!("{} at distance {:.3e}", cl.kernel.name(), cl.distance),
                ));
            }
            Err(err) => checks.push(failed(&name, err)),
        }
    }
    let alt = ApproachSequence::bidisk_cycling(alpha, beta, &[0.5, 2.0], BIDISK_LEN)
        .and_then(|s| detect_limit(&PluriGreenEvaluator::bidisk(), &disc, &s, TOL));
    checks.push(match alt {
        Ok(d) => Check::new(
            "alternating exponents diverge",
            !d.converged,
            format!("last successive distance {:.3e}", d.successive.last().unwrap()),
        ),
        Err(err) => failed("alternating exponents diverge", err),
    });
    checks.push(match boundary_atlas_report(Domain::bidisk(), 0, &disc, BIDISK_LEN, TOL) {
        Ok(r) => match r.failure() {
            None => Check::new("interval structure of the c-grid", true, ""),
            Some(f) => Check::new("interval structure of the c-grid", false, f),
        },
        Err(err) => failed("interval structure of the c-grid", err),
    });
    checks
}

fn kl(seed: u64) -> Vec<Check> {
    let e = PluriGreenEvaluator::ball();
    let w0 = Point::new(&[0.5, 0.0, 0.0, 0.0]).unwrap();
    let eps: Result<Vec<f64>, _> = [0.05, 0.025, 0.0125]
        .iter()
        .map(|y| e.kl_ratio(&w0, 0.2, *y, 2000, seed).map(|r| r.epsilon()))
        .collect();
    match eps {
        Ok(v) => vec![Check::new(
            "epsilon decreases with Y",
            v.windows(2).all(|w| w[1] < w[0]),
            v.iter().map(|e| format!("{e:.4e}")).collect::<Vec<_>>().join(", "),
        )],
        Err(err) => vec![failed("epsilon decreases with Y", err)],
    }
}

fn martin(seed: u64) -> Vec<Check> {
    let disc = Discretization::new(Domain::unit_disk(), 100_000, seed, Strategy::Uniform).unwrap();
    let g = GreenEvaluator::new(Domain::unit_disk()).unwrap();
    let zeta = Point::xy(1.0, 0.0);
    let run = ApproachSequence::disk_radial(zeta, Schedule::DYADIC, SEQUENCE_LEN)
        .and_then(|s| detect_martin_limit(&g, &disc, &s, &Point::origin(2), TOL))
        .and_then(|d| {
            let k = LimitKernel::martin_disk(zeta)?.normalized(&disc)?;
            Ok((d.converged, l1_distance(&d.limit, k.sample())?))
        });
    match run {
        Ok((conv, dist)) => vec![
            Check::new("convergence", conv, ""),
            Check::below("distance to the Poisson kernel", dist, KERNEL_MATCH),
        ],
        Err(err) => vec![failed("convergence", err)],
    }
}

fn normalizers(seed: u64) -> Vec<Check> {
    let disc = ball_disc(seed);
    let e = PluriGreenEvaluator::ball();
    let run = ApproachSequence::ball_radial(e1(), Schedule::DYADIC, SEQUENCE_LEN).and_then(|s| {
        let a = detect_limit(&e, &disc, &s, TOL)?;
        let b = detect_limit_alpha(&e, &disc, &s, TOL)?;
        let b_unit = NormalizedKernel::from_sample(b.limit.clone(), KernelTag::Other)?;
        Ok((a.converged && b.converged, l1_distance(&a.limit, b_unit.sample())?))
    });
    match run {
        Ok((conv, dist)) => vec![
            Check::new("both normalizations converge", conv, ""),
            Check::below("unit-renormalized limits agree", dist, PATH_AGREEMENT),
        ],
        Err(err) => vec![failed("both normalizations converge", err)],
    }
}
