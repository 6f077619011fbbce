//! CSV files for node sets, weight tables and kernel samples.
//!
//! Each file starts with one `#` line naming its kind and version, followed
//! by headerless CSV rows. Floats are written with 17 significant digits so
//! that reading a file back reproduces every value bit for bit.

use std::io::{BufRead, BufReader, Read, Write};

use ppkit_core::domain::{Domain, DomainKind};
use ppkit_core::l1::{Discretization, KernelSample};
use ppkit_core::sampling::{Node, Strategy};
use ppkit_core::Point;

pub const NODES_MAGIC: &str = "# ppkit-nodes v1";
pub const WEIGHT_MAGIC: &str = "# ppkit-weight v1";
pub const SAMPLE_MAGIC: &str = "# ppkit-sample v1";

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] ppkit_core::Error),
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str) -> Result<f64, IoError> {
    s.trim()
        .parse()
        .map_err(|_| IoError::Format(format!("not a number: `{s}`")))
}

fn header_line(r: &mut impl BufRead, magic: &str) -> Result<String, IoError> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let line = line.trim_end();
    line.strip_prefix(magic)
        .map(|rest| rest.trim().to_string())
        .ok_or_else(|| IoError::Format(format!("expected header `{magic}`, found `{line}`")))
}

fn rows(r: impl Read) -> csv::StringRecordsIntoIter<impl Read> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_reader(r)
        .into_records()
}

fn writer(w: impl Write) -> csv::Writer<impl Write> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

fn node_fields(n: &Node) -> Vec<String> {
    n.point
        .coords()
        .iter()
        .map(|c| fmt_f64(*c))
        .chain(std::iter::once(fmt_f64(n.weight)))
        .collect()
}

/// `# ppkit-nodes v1 <domain> <seed> <strategy>`, then `coords…, weight`.
pub fn write_nodes(mut w: impl Write, domain: Domain, seed: u64, strategy: &Strategy, nodes: &[Node]) -> Result<(), IoError> {
    writeln!(w, "{NODES_MAGIC} {} {seed} {strategy}", domain.kind())?;
    let mut out = writer(w);
    for n in nodes {
        out.write_record(node_fields(n))?;
    }
    out.flush()?;
    Ok(())
}

/// Contents of a node file.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeFile {
    pub domain: Domain,
    pub seed: u64,
    pub strategy: Strategy,
    pub nodes: Vec<Node>,
}

fn parse_tags(tags: &str, want: usize) -> Result<Vec<String>, IoError> {
    let parts: Vec<String> = tags.splitn(want, ' ').map(str::to_string).collect();
    if parts.len() < want {
        return Err(IoError::Format(format!("header needs {want} fields, found `{tags}`")));
    }
    Ok(parts)
}

fn parse_domain(s: &str) -> Result<Domain, IoError> {
    Ok(Domain::new(s.parse::<DomainKind>()?))
}

fn parse_seed(s: &str) -> Result<u64, IoError> {
    s.parse().map_err(|_| IoError::Format(format!("bad seed `{s}`")))
}

/// Reads rows of `coords…, weight[, φ]`.
fn read_node_rows(r: impl Read, dim: usize, with_phi: bool) -> Result<(Vec<Node>, Vec<f64>), IoError> {
    let width = dim + 1 + usize::from(with_phi);
    let mut nodes = Vec::new();
    let mut phi = Vec::new();
    for rec in rows(r) {
        let rec = rec?;
        if rec.len() != width {
            return Err(IoError::Format(format!("expected {width} columns, found {}", rec.len())));
        }
        let vals = rec.iter().map(parse_f64).collect::<Result<Vec<_>, _>>()?;
        nodes.push(Node {
            point: Point::new(&vals[..dim])?,
            weight: vals[dim],
        });
        if with_phi {
            phi.push(vals[dim + 1]);
        }
    }
    Ok((nodes, phi))
}

pub fn read_nodes(r: impl Read) -> Result<NodeFile, IoError> {
    let mut r = BufReader::new(r);
    let tags = parse_tags(&header_line(&mut r, NODES_MAGIC)?, 3)?;
    let domain = parse_domain(&tags[0])?;
    let seed = parse_seed(&tags[1])?;
    let strategy: Strategy = tags[2].trim().parse()?;
    let (nodes, _) = read_node_rows(r, domain.ambient_dim(), false)?;
    Ok(NodeFile {
        domain,
        seed,
        strategy,
        nodes,
    })
}

/// `# ppkit-weight v1 <domain> <seed> <strategy> <weight label>`, then
/// `coords…, quadrature weight, φ`.
pub fn write_weight(mut w: impl Write, disc: &Discretization) -> Result<(), IoError> {
    writeln!(
        w,
        "{WEIGHT_MAGIC} {} {} {} {}",
        disc.domain().kind(),
        disc.seed(),
        disc.strategy(),
        disc.weight_tag().unwrap_or("lebesgue")
    )?;
    let mut out = writer(w);
    for (n, phi) in disc.nodes().iter().zip(disc.weight_values()) {
        let mut f = node_fields(n);
        f.push(fmt_f64(*phi));
        out.write_record(f)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_weight(r: impl Read) -> Result<Discretization, IoError> {
    let mut r = BufReader::new(r);
    let tags = parse_tags(&header_line(&mut r, WEIGHT_MAGIC)?, 4)?;
    let domain = parse_domain(&tags[0])?;
    let seed = parse_seed(&tags[1])?;
    let strategy: Strategy = tags[2].parse()?;
    let label = tags[3].trim().to_string();
    let (nodes, phi) = read_node_rows(r, domain.ambient_dim(), true)?;
    let tag = (label != "lebesgue").then_some(label);
    Ok(Discretization::from_parts(domain, nodes, phi, seed, strategy, tag)?)
}

/// `# ppkit-sample v1 <discretization id>`, then `index, value`.
pub fn write_sample(mut w: impl Write, s: &KernelSample<'_>) -> Result<(), IoError> {
    writeln!(w, "{SAMPLE_MAGIC} {:016x}", s.discretization().id())?;
    let mut out = writer(w);
    for (i, v) in s.values().iter().enumerate() {
        out.write_record([i.to_string(), fmt_f64(*v)])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a sample and binds it to `disc`, whose id must match the header.
pub fn read_sample<'d>(r: impl Read, disc: &'d Discretization) -> Result<KernelSample<'d>, IoError> {
    let mut r = BufReader::new(r);
    let id = header_line(&mut r, SAMPLE_MAGIC)?;
    if id != format!("{:016x}", disc.id()) {
        return Err(ppkit_core::Error::DiscretizationMismatch.into());
    }
    let mut values = vec![f64::NAN; disc.len()];
    let mut seen = 0usize;
    for rec in rows(r) {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(IoError::Format("sample rows are `index, value`".into()));
        }
        let i: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| IoError::Format(format!("bad index `{}`", &rec[0])))?;
        let slot = values
            .get_mut(i)
            .ok_or_else(|| IoError::Format(format!("index {i} out of range")))?;
        *slot = parse_f64(&rec[1])?;
        seen += 1;
    }
    if seen != disc.len() {
        return Err(IoError::Format(format!("expected {} rows, found {seen}", disc.len())));
    }
    Ok(KernelSample::new(disc, values)?)
}
