//! One function per subcommand. Each returns its checks, a JSON body and,
//! where the command produces a table, a CSV rendering of it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::{json, Value};

use ppkit_core::classical::{GreenEvaluator, RieszDecomposition};
use ppkit_core::compactification::{
    boundary_atlas_report, classify_bidisk, detect_limit, detect_martin_limit, ApproachSequence, AtlasReport,
    LimitKernel, Schedule,
};
use ppkit_core::domain::{Domain, DomainKind, Exhaustion};
use ppkit_core::l1::{c_v, embed, embed_alpha, l1_distance, Discretization, NormalizedKernel, UNIT_NORM_TOL};
use ppkit_core::norming::{
    build_weight, verify_norming, ConstantWeight, NormingReport, TestFamily, VerifyConfig, Weight,
};
use ppkit_core::pluri::{automorphism_invariance_check, KobayashiOracle, PluriGreenEvaluator};
use ppkit_core::sampling::{sample_nodes, Strategy};
use ppkit_core::{Error, Point};

use crate::acceptance::{self, KERNEL_MATCH};
use crate::io::{self, IoError};
use crate::report::Check;

/// Flags shared by every subcommand.
#[derive(Clone, Debug, Default)]
pub struct Common {
    pub domain: Option<DomainKind>,
    pub seed: u64,
    pub nodes: Option<usize>,
    pub tol: Option<f64>,
    pub levels: Option<usize>,
}

impl Common {
    fn domain_or(&self, default: DomainKind, allowed: &[DomainKind]) -> Result<Domain, CommandError> {
        let kind = self.domain.unwrap_or(default);
        if allowed.contains(&kind) {
            Ok(Domain::new(kind))
        } else {
            let names: Vec<&str> = allowed.iter().map(|k| k.name()).collect();
            Err(CommandError::Usage(format!(
                "domain {kind} is not supported here (expected one of {})",
                names.join(", ")
            )))
        }
    }

    fn tol(&self) -> f64 {
        self.tol.unwrap_or(acceptance::TOL)
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub body: Value,
    /// CSV rendering for `--format csv`, when the command has a table.
    pub table: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("{0}")]
    Usage(String),
    /// The computation ran but could not produce a result.
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Io(#[from] IoError),
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::Divergent { .. }
            | Error::Inconclusive { .. }
            | Error::CertificationFailed { .. }
            | Error::PoleBudgetExceeded(_) => CommandError::Failed(e.to_string()),
            _ => CommandError::Usage(e.to_string()),
        }
    }
}

type CmdResult = Result<Outcome, CommandError>;

/// Parses `x,y[,...]` into a point.
pub fn parse_point(s: &str) -> Result<Point, CommandError> {
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CommandError::Usage(format!("cannot parse point `{s}`")))?;
    Ok(Point::new(&coords)?)
}

/// Parses an exponent, accepting `inf`.
pub fn parse_exponent(s: &str) -> Result<f64, String> {
    match s {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|c| *c >= 0.0)
            .ok_or_else(|| format!("`{s}` is not a nonnegative exponent")),
    }
}

fn coords(p: &Point) -> Value {
    json!(p.coords())
}

fn table_of(write: impl FnOnce(&mut Vec<u8>) -> Result<(), IoError>) -> Result<Option<String>, CommandError> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(Some(String::from_utf8(buf).expect("tables are UTF-8")))
}

fn disc_body(disc: &Discretization) -> Value {
    json!({
        "discretization_id": format!("{:016x}", disc.id()),
        "nodes": disc.len(),
        "strategy": disc.strategy().to_string(),
        "weight": disc.weight_tag().unwrap_or("lebesgue"),
    })
}

pub fn green(c: &Common, x: &str, y: &str, zeta: Option<&str>) -> CmdResult {
    let domain = c.domain_or(DomainKind::UnitDisk, &[DomainKind::UnitDisk, DomainKind::Ball3])?;
    let g = GreenEvaluator::new(domain)?;
    let (x, y) = (parse_point(x)?, parse_point(y)?);
    let (gxy, gyx) = (g.green(&x, &y)?, g.green(&y, &x)?);
    let mut checks = vec![
        Check::new(
            "symmetry",
            (gxy - gyx).abs() <= 1e-12 * (1.0 + gxy.abs()),
            format!("G(x,y) = {gxy:.16e}, G(y,x) = {gyx:.16e}"),
        ),
        Check::new("negativity", gxy < 0.0, format!("{gxy:.16e}")),
    ];
    let mut body = json!({ "x": coords(&x), "y": coords(&y), "green": gxy });
    if let Some(z) = zeta {
        let zeta = parse_point(z)?;
        let p = g.poisson(&x, &zeta)?;
        let fd = g.poisson_by_difference(&x, &zeta)?;
        checks.push(Check::below("Poisson kernel against the normal derivative", (p - fd).abs() / p, 1e-4));
        body["zeta"] = coords(&zeta);
        body["poisson"] = json!(p);
    }
    Ok(Outcome { checks, body, table: None })
}

pub fn pluri_green(c: &Common, z: &str, w: &str) -> CmdResult {
    let domain = c.domain_or(DomainKind::CBall2, &[DomainKind::CBall2, DomainKind::Bidisk])?;
    let e = PluriGreenEvaluator::new(domain)?;
    let (z, w) = (parse_point(z)?, parse_point(w)?);
    let g = e.green(&z, &w)?;
    let pairs = c.nodes.unwrap_or(10_000);
    let lb = e.lower_bound_check(pairs, c.seed);
    let mut checks = vec![
        Check::new("nonpositive", g <= 0.0, format!("{g:.16e}")),
        Check::new(
            "circumscribed-ball lower bound",
            lb.violations == 0,
            format!("{} violations in {} pairs, radius rule {}", lb.violations, lb.pairs, lb.radius_rule),
        ),
    ];
    let mut body = json!({
        "z": coords(&z),
        "w": coords(&w),
        "green": g,
        "radius_rule": e.radius_rule(),
    });
    if domain.kind() == DomainKind::CBall2 {
        let k = KobayashiOracle.distance(&z, &w)?;
        checks.push(Check::below("Kobayashi identity", (g - k.tanh().ln()).abs(), 1e-10));
        let inv = automorphism_invariance_check(pairs.min(1000), c.seed);
        checks.push(Check::below("automorphism invariance", inv.max_deviation, 1e-10));
        body["kobayashi"] = json!(k);
    }
    Ok(Outcome { checks, body, table: None })
}

pub fn bounds(c: &Common, a: Option<f64>, b: Option<f64>) -> CmdResult {
    let domain = c.domain_or(DomainKind::UnitDisk, &[DomainKind::UnitDisk, DomainKind::Ball3])?;
    let g = GreenEvaluator::new(domain)?;
    let pairs = c.nodes.unwrap_or(100_000);
    let scan = g.scan_bounds(pairs, c.seed);
    let mut checks = vec![
        Check::new(
            "Green bound at 1.01 A_hat",
            scan.green.holds(),
            format!("A_hat = {:.6}, {} violations", scan.a_hat, scan.green.violations),
        ),
        Check::new(
            "Poisson bound at 1.01 B_hat",
            scan.poisson.holds(),
            format!("B_hat = {:.6}, {} violations", scan.b_hat, scan.poisson.violations),
        ),
    ];
    // the disk has closed-form constants to certify against
    let (a, b) = match domain.kind() {
        DomainKind::UnitDisk => (a.or(Some(4.0)), b.or(Some(2.0))),
        _ => (a, b),
    };
    let mut body = json!({
        "pairs": pairs,
        "A_hat": scan.a_hat,
        "B_hat": scan.b_hat,
    });
    if let Some(a) = a {
        let cert = g.check_green_bound(a, pairs, c.seed);
        checks.push(Check::new(
            format!("A_hat <= 1.01 A with A = {a}"),
            scan.a_hat <= 1.01 * a,
            format!("{:.6}", scan.a_hat),
        ));
        checks.push(Check::new(
            format!("Green bound with A = {a}"),
            cert.holds(),
            format!("{} violations", cert.violations),
        ));
        body["A"] = json!(a);
    }
    if let Some(b) = b {
        let cert = g.check_poisson_bound(b, pairs, c.seed.wrapping_add(1));
        checks.push(Check::new(
            format!("B_hat <= 1.01 B with B = {b}"),
            scan.b_hat <= 1.01 * b,
            format!("{:.6}", scan.b_hat),
        ));
        checks.push(Check::new(
            format!("Poisson bound with B = {b}"),
            cert.holds(),
            format!("{} violations", cert.violations),
        ));
        body["B"] = json!(b);
    }
    Ok(Outcome { checks, body, table: None })
}

pub fn poisson_jensen(c: &Common, function: &str, x: &str, zeta: &str) -> CmdResult {
    let domain = c.domain_or(DomainKind::UnitDisk, &[DomainKind::UnitDisk])?;
    let g = GreenEvaluator::new(domain)?;
    let x = parse_point(x)?;
    let (decomp, exact) = match function {
        "quadratic" => (RieszDecomposition::disk_quadratic(), x.norm_sqr() - 1.0),
        "log" => (RieszDecomposition::log_pole(Point::origin(2)), x.norm().ln()),
        "neg-poisson" => {
            let zeta = parse_point(zeta)?;
            let exact = -(1.0 - x.norm_sqr()) / x.dist(&zeta).powi(2);
            (RieszDecomposition::negated_poisson(zeta), exact)
        }
        other => return Err(CommandError::Usage(format!("unknown function `{other}`"))),
    };
    let n = c.nodes.unwrap_or(200_000);
    let nodes = sample_nodes(domain, n, c.seed, Strategy::PoleRefined(x))?;
    let rhs = g.poisson_jensen_eval(&decomp, &x, &nodes)?;
    let tol = c.tol.unwrap_or(1e-2);
    Ok(Outcome {
        checks: vec![Check::below("reproduction", (rhs - exact).abs(), tol)],
        body: json!({ "function": function, "x": coords(&x), "rhs": rhs, "exact": exact, "nodes": n }),
        table: None,
    })
}

fn exhaustion(c: &Common, domain: Domain) -> Result<Exhaustion, CommandError> {
    Ok(Exhaustion::dyadic(domain, c.levels.unwrap_or(12))?)
}

fn verify_config(c: &Common, e: &Exhaustion) -> VerifyConfig {
    let mut cfg = VerifyConfig::new(e);
    cfg.seed = c.seed;
    if let Some(n) = c.nodes {
        cfg.nodes = n;
    }
    cfg
}

fn norming_checks(r: &NormingReport) -> Vec<Check> {
    let mut checks: Vec<Check> = r
        .failures
        .iter()
        .map(|f| Check::new(format!("{} ({})", f.member, f.property), false, f.detail.clone()))
        .collect();
    if checks.is_empty() {
        checks.push(Check::new(
            "norming properties",
            true,
            format!("{} members on {} nodes", r.members.len(), r.nodes),
        ));
    }
    checks
}

fn family_results(r: &NormingReport) -> Value {
    json!({
        "weight": r.weight,
        "nodes": r.nodes,
        "seed": r.seed,
        "members": r.members.iter().map(|m| json!({
            "tag": m.tag,
            "norm": m.norm,
            "norm_doubled": m.norm_doubled,
            "relative_change": m.relative_change,
            "compact_max": m.compact_max,
            "tail_ratios": m.tail_ratios,
        })).collect::<Vec<_>>(),
        "compacts": r.compacts.iter().map(|k| json!({ "set": k.set.to_string(), "c_hat": k.c_hat })).collect::<Vec<_>>(),
        "failures": r.failures.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
    })
}

pub fn norming_build(c: &Common) -> CmdResult {
    let domain = c.domain_or(DomainKind::QuarterDisk, &[DomainKind::UnitDisk, DomainKind::QuarterDisk, DomainKind::Ball3])?;
    let e = exhaustion(c, domain)?;
    let mut w = build_weight(&e)?;
    let fam = TestFamily::standard(domain)?;
    let report = verify_norming(&w, &fam, &e, &verify_config(c, &e))?;
    w.set_epsilon_schedule(report.epsilon_schedule.clone());
    let body = json!({
        "domain": domain.kind().name(),
        "levels": e.len(),
        "scales": e.scales(),
        "hub_radius": w.hub_radius(),
        "log_c_j": w.log_c(),
        "log_b_j": w.log_b(),
        "log_d_j": w.log_d(),
        "c_j": w.log_c().iter().map(|l| l.exp()).collect::<Vec<_>>(),
        "b_j": w.b(),
        "d_j": w.d(),
        "CF_table": w.certified().iter().map(|(f, l)| json!({ "set": f.to_string(), "log_c": l })).collect::<Vec<_>>(),
        "epsilon_schedule": w.epsilon_schedule(),
        "family_results": family_results(&report),
        "pass": report.pass(),
    });
    let n = c.nodes.unwrap_or(10_000);
    let disc = Discretization::new(domain, n, c.seed, Strategy::BoundaryStratified)?.with_weight(&w.label(), |p| w.value(p))?;
    let table = table_of(|buf| io::write_weight(buf, &disc))?;
    Ok(Outcome { checks: norming_checks(&report), body, table })
}

pub fn norming_verify(c: &Common, weight: &str) -> CmdResult {
    let domain = c.domain_or(DomainKind::QuarterDisk, &[DomainKind::UnitDisk, DomainKind::QuarterDisk, DomainKind::Ball3])?;
    let e = exhaustion(c, domain)?;
    let fam = TestFamily::standard(domain)?;
    let cfg = verify_config(c, &e);
    let report = match weight {
        "uniform" => verify_norming(&ConstantWeight(1.0), &fam, &e, &cfg)?,
        "built" => verify_norming(&build_weight(&e)?, &fam, &e, &cfg)?,
        other => return Err(CommandError::Usage(format!("unknown weight `{other}` (expected uniform or built)"))),
    };
    Ok(Outcome {
        checks: norming_checks(&report),
        body: json!({
            "domain": domain.kind().name(),
            "levels": e.len(),
            "epsilon_schedule": report.epsilon_schedule,
            "family_results": family_results(&report),
        }),
        table: None,
    })
}

fn pluri_disc(c: &Common, domain: Domain) -> Result<Discretization, CommandError> {
    Ok(Discretization::new(domain, c.nodes.unwrap_or(acceptance::LIMIT_NODES), c.seed, Strategy::Uniform)?)
}

pub fn embed_cmd(c: &Common, w: &str, normalizer: &str) -> CmdResult {
    let domain = c.domain_or(DomainKind::CBall2, &[DomainKind::CBall2, DomainKind::Bidisk])?;
    let e = PluriGreenEvaluator::new(domain)?;
    let disc = pluri_disc(c, domain)?;
    let w = parse_point(w)?;
    let k: NormalizedKernel<'_> = match normalizer {
        "norm-v" => embed(&e, &disc, &w)?,
        "alpha" => embed_alpha(&e, &disc, &w)?,
        other => return Err(CommandError::Usage(format!("unknown normalizer `{other}` (expected norm-v or alpha)"))),
    };
    let norm = k.norm();
    let mut body = disc_body(&disc);
    body["w"] = coords(&w);
    body["normalizer"] = json!(normalizer);
    body["c_v"] = json!(c_v(&e, &disc, &w)?);
    body["norm"] = json!(norm);
    body["omitted_node"] = json!(k.sample().omitted());
    let table = table_of(|buf| io::write_sample(buf, k.sample()))?;
    Ok(Outcome {
        checks: vec![Check::new(
            "unit norm",
            (norm - 1.0).abs() <= UNIT_NORM_TOL,
            format!("{norm:.15}"),
        )],
        body,
        table,
    })
}

/// Approach parameters for `limit` and `classify`.
#[derive(Clone, Debug)]
pub struct Approach {
    pub direction: Option<String>,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub triadic: bool,
}

pub fn limit(c: &Common, a: &Approach) -> CmdResult {
    let domain = c.domain_or(DomainKind::CBall2, &[DomainKind::CBall2, DomainKind::UnitDisk, DomainKind::Bidisk])?;
    let schedule = if a.triadic { Schedule::TRIADIC } else { Schedule::DYADIC };
    let tol = c.tol();
    let disc = match domain.kind() {
        DomainKind::UnitDisk => Discretization::new(domain, c.nodes.unwrap_or(100_000), c.seed, Strategy::Uniform)?,
        _ => pluri_disc(c, domain)?,
    };
    let (detection, kernel) = match domain.kind() {
        DomainKind::CBall2 => {
            let dir = parse_point(a.direction.as_deref().unwrap_or("1,0,0,0"))?;
            let seq = ApproachSequence::ball_radial(dir, schedule, c.levels.unwrap_or(acceptance::SEQUENCE_LEN))?;
            (detect_limit(&PluriGreenEvaluator::ball(), &disc, &seq, tol)?, LimitKernel::ball(dir)?)
        }
        DomainKind::UnitDisk => {
            let zeta = parse_point(a.direction.as_deref().unwrap_or("1,0"))?;
            let seq = ApproachSequence::disk_radial(zeta, schedule, c.levels.unwrap_or(acceptance::SEQUENCE_LEN))?;
            let g = GreenEvaluator::new(domain)?;
            (detect_martin_limit(&g, &disc, &seq, &Point::origin(2), tol)?, LimitKernel::martin_disk(zeta)?)
        }
        _ => {
            let seq = ApproachSequence::bidisk_for_c(a.alpha, a.beta, a.c, c.levels.unwrap_or(acceptance::BIDISK_LEN))?;
            let kernel = LimitKernel::bidisk_for_c(Complex64::from_polar(1.0, a.alpha), Complex64::from_polar(1.0, a.beta), a.c)?;
            (detect_limit(&PluriGreenEvaluator::bidisk(), &disc, &seq, tol)?, kernel)
        }
    };
    let distance = l1_distance(&detection.limit, kernel.normalized(&disc)?.sample())?;
    let mut body = disc_body(&disc);
    body["kernel"] = json!(kernel.name());
    body["successive_distances"] = json!(detection.successive);
    body["converged"] = json!(detection.converged);
    body["kernel_distance"] = json!(distance);
    let table = table_of(|buf| io::write_sample(buf, &detection.limit))?;
    Ok(Outcome {
        checks: vec![
            Check::new(
                "Cauchy run",
                detection.converged,
                format!("last successive distance {:.3e}", detection.successive.last().copied().unwrap_or(f64::NAN)),
            ),
            Check::below("distance to closed form", distance, KERNEL_MATCH),
        ],
        body,
        table,
    })
}

pub fn classify(c: &Common, a: &Approach) -> CmdResult {
    c.domain_or(DomainKind::Bidisk, &[DomainKind::Bidisk])?;
    let disc = pluri_disc(c, Domain::bidisk())?;
    let seq = ApproachSequence::bidisk_for_c(a.alpha, a.beta, a.c, c.levels.unwrap_or(acceptance::BIDISK_LEN))?;
    let cl = classify_bidisk(&seq, &disc, c.tol())?;
    let mut body = disc_body(&disc);
    body["c"] = json!(if a.c.is_finite() { json!(a.c) } else { json!("inf") });
    body["c_hat"] = json!(cl.c_hat);
    body["kernel"] = json!(cl.kernel.name());
    body["kernel_distance"] = json!(cl.distance);
    body["successive_distances"] = json!(cl.detection.successive);
    Ok(Outcome {
        checks: vec![Check::below(format!("match with {}", cl.kernel.name()), cl.distance, KERNEL_MATCH)],
        body,
        table: None,
    })
}

pub fn atlas(c: &Common, res: usize) -> CmdResult {
    let domain = c.domain_or(DomainKind::CBall2, &[DomainKind::CBall2, DomainKind::Bidisk])?;
    let disc = pluri_disc(c, domain)?;
    let len = c.levels.unwrap_or(match domain.kind() {
        DomainKind::Bidisk => acceptance::BIDISK_LEN,
        _ => acceptance::SEQUENCE_LEN,
    });
    let report = boundary_atlas_report(domain, res, &disc, len, c.tol())?;
    let mut body = disc_body(&disc);
    match &report {
        AtlasReport::Ball { entries, min_limit_separation, min_direction_separation, .. } => {
            body["min_limit_separation"] = json!(min_limit_separation);
            body["min_direction_separation"] = json!(min_direction_separation);
            body["entries"] = entries
                .iter()
                .map(|e| json!({ "direction": coords(&e.direction), "converged": e.converged, "kernel_distance": e.kernel_distance }))
                .collect();
        }
        AtlasReport::Bidisk { entries, min_separation, max_neighbor_distance, extreme_distance, face1_beta_drift, .. } => {
            body["min_separation"] = json!(min_separation);
            body["max_neighbor_distance"] = json!(max_neighbor_distance);
            body["extreme_distance"] = json!(extreme_distance);
            body["face1_beta_drift"] = json!(face1_beta_drift);
            body["entries"] = entries
                .iter()
                .map(|e| {
                    json!({
                        "c": if e.c.is_finite() { json!(e.c) } else { json!("inf") },
                        "c_hat": e.c_hat,
                        "kernel": e.kernel,
                        "converged": e.converged,
                        "match_distance": e.match_distance,
                        "to_face1": e.to_face1,
                        "to_face2": e.to_face2,
                    })
                })
                .collect();
        }
    }
    let check = match report.failure() {
        None => Check::new("atlas structure", true, ""),
        Some(f) => Check::new("atlas structure", false, f),
    };
    Ok(Outcome { checks: vec![check], body, table: None })
}

pub fn verify_all(c: &Common) -> CmdResult {
    let criteria = acceptance::run_all(c.seed);
    let checks = criteria
        .iter()
        .map(|k| {
            let failing: Vec<String> = k.checks.iter().filter(|x| !x.pass).map(|x| format!("{}: {}", x.name, x.detail)).collect();
            Check::new(format!("criterion {}: {}", k.number, k.title), k.pass(), failing.join("; "))
        })
        .collect();
    let body = json!({
        "criteria": criteria.iter().map(|k| json!({
            "number": k.number,
            "title": k.title,
            "pass": k.pass(),
            "checks": k.checks,
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome { checks, body, table: None })
}

/// Angles accepted by `--alpha` and `--beta` are in radians; `pi/4`-style
/// fractions are accepted for convenience.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    if let Some(rest) = s.strip_prefix("pi") {
        if rest.is_empty() {
            return Ok(PI);
        }
        if let Some(d) = rest.strip_prefix('/') {
            return d.parse::<f64>().map(|d| PI / d).map_err(|_| format!("bad angle `{s}`"));
        }
    }
    s.parse::<f64>().map_err(|_| format!("bad angle `{s}`"))
}
