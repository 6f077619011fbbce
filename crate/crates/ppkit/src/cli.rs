//! Argument parsing, dispatch, report output and exit codes.
//!
//! Exit status is 0 when every check passes, 1 when a check fails (the
//! failing checks are named on stderr) and 2 for usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use ppkit_core::domain::DomainKind;

use crate::commands::{self, parse_angle, parse_exponent, Approach, CommandError, Common, Outcome};
use crate::report::{Check, Report, RunConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_VAR: &str = "PPKIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ppkit", version, about = "Seeded experiments in classical and pluricomplex potential theory")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// unit-disk (disk), quarter-disk, ball3, cball2 (ball) or bidisk
    #[arg(long, global = true, value_parser = parse_domain)]
    pub domain: Option<DomainKind>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Node or sample-pair count, depending on the command
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Exhaustion levels, or sequence length for limit commands
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Classical Green function (and optionally the Poisson kernel)
    Green {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        /// Boundary point for the Poisson kernel
        #[arg(long, allow_hyphen_values = true)]
        zeta: Option<String>,
    },
    /// Pluricomplex Green function on the ball or bidisk
    PluriGreen {
        /// Real coordinates (Re z1, Im z1, Re z2, Im z2)
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
    },
    /// Two-sided Green and Poisson bounds
    Bounds {
        /// Green constant to certify (4 on the disk)
        #[arg(long = "green-constant")]
        #[serde(rename = "green_constant")]
        a: Option<f64>,
        /// Poisson constant to certify (2 on the disk)
        #[arg(long = "poisson-constant")]
        #[serde(rename = "poisson_constant")]
        b: Option<f64>,
    },
    /// Poisson-Jensen reproduction of a closed-form function
    PoissonJensen {
        /// quadratic, log or neg-poisson
        #[arg(long, default_value = "quadratic")]
        function: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
        x: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1,0")]
        zeta: String,
    },
    /// Build and certify a norming weight
    NormingBuild,
    /// Check the norming properties of a weight on the test family
    NormingVerify {
        /// uniform or built
        #[arg(long, default_value = "built")]
        weight: String,
    },
    /// Embed a normalized Green function into L1
    Embed {
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        /// norm-v or alpha
        #[arg(long, default_value = "norm-v")]
        normalizer: String,
    },
    /// Detect the boundary limit of a seeded approach sequence
    Limit(ApproachArgs),
    /// Classify a bidisk approach by its exponent
    Classify(ApproachArgs),
    /// Boundary limit atlas
    Atlas {
        /// Direction grid resolution on the ball
        #[arg(long, default_value_t = 8)]
        res: usize,
    },
    /// Run the acceptance suite
    VerifyAll,
}

#[derive(Debug, Args, Serialize)]
pub struct ApproachArgs {
    /// Boundary direction (ball) or boundary point (disk)
    #[arg(long, allow_hyphen_values = true)]
    pub direction: Option<String>,
    /// Angle of the first coordinate on the bidisk, e.g. pi/4
    #[arg(long, value_parser = parse_angle, default_value = "0", allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, value_parser = parse_angle, default_value = "0", allow_hyphen_values = true)]
    pub beta: f64,
    /// Exponent ratio; `inf` pins the first coordinate
    #[arg(long, value_parser = parse_exponent, default_value = "1")]
    #[serde(serialize_with = "exponent")]
    pub c: f64,
    #[arg(long)]
    pub triadic: bool,
}

fn exponent<S: serde::Serializer>(c: &f64, s: S) -> Result<S::Ok, S::Error> {
    if c.is_finite() {
        s.serialize_f64(*c)
    } else {
        s.serialize_str("inf")
    }
}

fn parse_domain(s: &str) -> Result<DomainKind, String> {
    s.parse::<DomainKind>().map_err(|e| e.to_string())
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Green { .. } => "green",
            Command::PluriGreen { .. } => "pluri-green",
            Command::Bounds { .. } => "bounds",
            Command::PoissonJensen { .. } => "poisson-jensen",
            Command::NormingBuild => "norming-build",
            Command::NormingVerify { .. } => "norming-verify",
            Command::Embed { .. } => "embed",
            Command::Limit(_) => "limit",
            Command::Classify(_) => "classify",
            Command::Atlas { .. } => "atlas",
            Command::VerifyAll => "verify-all",
        }
    }

    fn execute(&self, c: &Common) -> Result<Outcome, CommandError> {
        let approach = |a: &ApproachArgs| Approach {
            direction: a.direction.clone(),
            alpha: a.alpha,
            beta: a.beta,
            c: a.c,
            triadic: a.triadic,
        };
        match self {
            Command::Green { x, y, zeta } => commands::green(c, x, y, zeta.as_deref()),
            Command::PluriGreen { z, w } => commands::pluri_green(c, z, w),
            Command::Bounds { a, b } => commands::bounds(c, *a, *b),
            Command::PoissonJensen { function, x, zeta } => commands::poisson_jensen(c, function, x, zeta),
            Command::NormingBuild => commands::norming_build(c),
            Command::NormingVerify { weight } => commands::norming_verify(c, weight),
            Command::Embed { w, normalizer } => commands::embed_cmd(c, w, normalizer),
            Command::Limit(a) => commands::limit(c, &approach(a)),
            Command::Classify(a) => commands::classify(c, &approach(a)),
            Command::Atlas { res } => commands::atlas(c, *res),
            Command::VerifyAll => commands::verify_all(c),
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got `{v}`"))?;
    // a pool that already exists (e.g. in tests) keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn run_config(cli: &Cli) -> RunConfig {
    let g = &cli.global;
    let extra = match serde_json::to_value(&cli.command) {
        Ok(Value::Object(m)) => m,
        _ => serde_json::Map::new(),
    };
    RunConfig {
        command: cli.command.name().to_string(),
        domain: g.domain.map(|d| d.name().to_string()),
        seed: g.seed,
        nodes: g.nodes,
        tol: g.tol,
        levels: g.levels,
        out: g.out.as_ref().map(|p| p.display().to_string()),
        format: match g.format {
            Format::Json => "json".into(),
            Format::Csv => "csv".into(),
        },
        extra,
    }
}

fn checks_csv(checks: &[Check]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for c in checks {
        w.serialize(c)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn emit(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    let g = &cli.global;
    let common = Common {
        domain: g.domain,
        seed: g.seed,
        nodes: g.nodes,
        tol: g.tol,
        levels: g.levels,
    };
    let outcome = match cli.command.execute(&common) {
        Ok(o) => o,
        Err(CommandError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
        Err(CommandError::Failed(msg)) => Outcome {
            checks: vec![Check::new(cli.command.name(), false, msg)],
            body: Value::Null,
            table: None,
        },
        Err(CommandError::Io(e)) => {
            eprintln!("error: {e}");
            return EXIT_FAIL;
        }
    };
    let report = Report::new(run_config(&cli), outcome.checks, outcome.body);
    let text = match g.format {
        Format::Json => report.to_json(),
        Format::Csv => match outcome.table {
            Some(t) => t,
            None => match checks_csv(&report.checks) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_FAIL;
                }
            },
        },
    };
    if let Err(e) = emit(g.out.as_ref(), &text) {
        eprintln!("error: cannot write output: {e}");
        return EXIT_FAIL;
    }
    if report.pass {
        EXIT_PASS
    } else {
        for c in report.failures() {
            eprintln!("FAIL {}: {}", c.name, c.detail);
        }
        EXIT_FAIL
    }
}
