//! Command line front end: group constructors, the group file format,
//! the benchmark harness and the clap-based argument handling.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::{
    compute_bsgs_deterministic, compute_bsgs_naive, ChainConfig, RebuildPolicy, StabilizerChain,
};
use crate::gf::{field_make, Field, FieldElement, ONE, ZERO};
use crate::heuristics::BaseStrategy;
use crate::matrix::{random_invertible, GroupMatrix};
use crate::randomized::{random_schreier_sims, RandomParams};
use crate::schreier::LabelMode;
use crate::stcs::verify_chain_stcs;
use crate::{Error, Result};

/// |GL(d, q)| = prod_{i=0}^{d-1} (q^d - q^i).
pub fn gl_order(d: usize, q: u64) -> BigUint {
    let q = BigUint::from(q);
    let qd = q.pow(d as u32);
    (0..d).map(|i| &qd - q.pow(i as u32)).product()
}

/// |SL(d, q)| = |GL(d, q)| / (q - 1).
pub fn sl_order(d: usize, q: u64) -> BigUint {
    gl_order(d, q) / BigUint::from(q - 1)
}

/// Standard two-generator set for GL(d, q): a diagonal torus generator and
/// a signed cycle. For q = 2 the determinant is forced, so GL = SL.
pub fn make_gl(d: usize, field: &Field) -> Result<Vec<GroupMatrix>> {
    if d == 0 {
        return Err(Error::BadDimension(0));
    }
    if field.q() == 2 {
        return make_sl(d, field);
    }
    let z = field.primitive_element();
    if d == 1 {
        let mut m = GroupMatrix::identity(field.clone(), 1);
        m.set(0, 0, z);
        return Ok(vec![m]);
    }
    let mut mat1 = GroupMatrix::identity(field.clone(), d);
    mat1.set(0, 0, z);
    let mut mat2 = GroupMatrix::identity(field.clone(), d);
    for i in 0..d {
        mat2.set(i, i, ZERO);
    }
    let neg1 = field.neg(ONE);
    mat2.set(0, 0, neg1);
    mat2.set(0, d - 1, ONE);
    for i in 1..d {
        mat2.set(i, i - 1, neg1);
    }
    Ok(vec![mat1, mat2])
}

/// Standard two-generator set for SL(d, q): for q > 3 a torus element
/// diag(z, z^-1, 1, ...), for q <= 3 the elementary transvection I + E_12,
/// paired with a determinant-one cycle.
pub fn make_sl(d: usize, field: &Field) -> Result<Vec<GroupMatrix>> {
    if d == 0 {
        return Err(Error::BadDimension(0));
    }
    if d == 1 {
        return Ok(vec![GroupMatrix::identity(field.clone(), 1)]);
    }
    let mut mat1 = GroupMatrix::identity(field.clone(), d);
    let mut mat2 = GroupMatrix::identity(field.clone(), d);
    for i in 0..d {
        mat2.set(i, i, ZERO);
    }
    let neg1 = field.neg(ONE);
    if field.q() > 3 {
        let z = field.primitive_element();
        mat1.set(0, 0, z);
        mat1.set(1, 1, field.inv(z)?);
        // without this corner entry the d = 2 pair only normalizes the torus
        mat2.set(0, 0, neg1);
    } else {
        mat1.set(0, 1, ONE);
    }
    mat2.set(0, d - 1, ONE);
    for i in 1..d {
        mat2.set(i, i - 1, neg1);
    }
    Ok(vec![mat1, mat2])
}

/// Parsed group input: a field, a dimension and a generator list.
#[derive(Clone)]
pub struct GroupFile {
    pub name: String,
    pub field: Field,
    pub d: usize,
    pub gens: Vec<GroupMatrix>,
}

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Parse the line-oriented group format:
///
/// ```text
/// matgroup v1
/// q=3^1 d=2
/// gen
/// 2 0
/// 0 1
/// ```
///
/// `poly=c0,c1,...` is required in the header exactly when r > 1 and must
/// match the reduction polynomial this crate uses for that field. Blank
/// lines and `#` comments are ignored. Every matrix must be invertible.
pub fn parse_group_file(name: &str, text: &str) -> Result<GroupFile> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| perr("empty group file"))?;
    if header != "matgroup v1" {
        return Err(perr(format!("bad header line '{header}'")));
    }
    let params = lines.next().ok_or_else(|| perr("missing parameter line"))?;
    let mut p: Option<u64> = None;
    let mut r: u32 = 1;
    let mut d: Option<usize> = None;
    let mut poly: Option<Vec<u32>> = None;
    for tok in params.split_whitespace() {
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| perr(format!("bad parameter token '{tok}'")))?;
        match key {
            "q" => {
                let (pp, rr) = match val.split_once('^') {
                    Some((a, b)) => (
                        a.parse().map_err(|_| perr(format!("bad q '{val}'")))?,
                        b.parse().map_err(|_| perr(format!("bad q '{val}'")))?,
                    ),
                    None => (val.parse().map_err(|_| perr(format!("bad q '{val}'")))?, 1),
                };
                p = Some(pp);
                r = rr;
            }
            "d" => d = Some(val.parse().map_err(|_| perr(format!("bad d '{val}'")))?),
            "poly" => {
                let coeffs: std::result::Result<Vec<u32>, _> =
                    val.split(',').map(str::parse).collect();
                poly = Some(coeffs.map_err(|_| perr(format!("bad poly '{val}'")))?);
            }
            _ => return Err(perr(format!("unknown parameter '{key}'"))),
        }
    }
    let p = p.ok_or_else(|| perr("missing q parameter"))?;
    let d = d.ok_or_else(|| perr("missing d parameter"))?;
    if d == 0 {
        return Err(perr("dimension must be positive"));
    }
    let field = field_make(p, r)?;
    match (&poly, r) {
        (None, 1) => {}
        (None, _) => return Err(perr("poly parameter is required when r > 1")),
        (Some(_), 1) => return Err(perr("poly parameter is only allowed when r > 1")),
        (Some(c), _) if c.as_slice() != field.primitive_poly() => {
            return Err(perr(format!(
                "unsupported reduction polynomial; this build uses poly={}",
                field
                    .primitive_poly()
                    .iter()
                    .map(u32::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            )));
        }
        _ => {}
    }
    let mut gens = Vec::new();
    let mut lines = lines.peekable();
    while let Some(line) = lines.next() {
        if line != "gen" {
            return Err(perr(format!("expected 'gen', found '{line}'")));
        }
        let mut rows = Vec::with_capacity(d);
        for _ in 0..d {
            let row_line = lines.next().ok_or_else(|| perr("truncated matrix"))?;
            let row: std::result::Result<Vec<u64>, _> =
                row_line.split_whitespace().map(str::parse).collect();
            let row = row.map_err(|_| perr(format!("bad matrix row '{row_line}'")))?;
            if row.len() != d {
                return Err(perr(format!(
                    "matrix row has {} entries, need {d}",
                    row.len()
                )));
            }
            let mut out = Vec::with_capacity(d);
            for v in row {
                if v >= u64::from(field.q()) {
                    return Err(perr(format!("entry {v} is outside GF({})", field.q())));
                }
                out.push(FieldElement(v as u32));
            }
            rows.push(out);
        }
        let m = GroupMatrix::from_rows(field.clone(), rows);
        if m.determinant() == ZERO {
            return Err(perr(format!("generator {} is singular", gens.len() + 1)));
        }
        gens.push(m);
    }
    if gens.is_empty() {
        return Err(perr("group file contains no generators"));
    }
    Ok(GroupFile {
        name: name.to_string(),
        field,
        d,
        gens,
    })
}

/// Inverse of `parse_group_file`; the round trip is byte-exact.
pub fn serialize_group_file(gf: &GroupFile) -> String {
    let mut out = String::from("matgroup v1\n");
    let f = &gf.field;
    write!(out, "q={}^{} d={}", f.p(), f.r(), gf.d).unwrap();
    if f.r() > 1 {
        let poly = f
            .primitive_poly()
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",");
        write!(out, " poly={poly}").unwrap();
    }
    out.push('\n');
    for g in &gf.gens {
        out.push_str("gen\n");
        for i in 0..gf.d {
            let row = (0..gf.d)
                .map(|j| g.get(i, j).0.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            out.push_str(&row);
            out.push('\n');
        }
    }
    out
}

fn factor_prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(perr(format!("{q} is not a prime power")));
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if p * p > q {
        return Ok((q, 1));
    }
    let mut rest = q;
    let mut r = 0;
    while rest > 1 {
        if !rest.is_multiple_of(p) {
            return Err(perr(format!("{q} is not a prime power")));
        }
        rest /= p;
        r += 1;
    }
    Ok((p, r))
}

/// Resolve `builtin:GL(d,q)` and `builtin:SL(d,q)` names.
pub fn make_builtin(name: &str) -> Result<GroupFile> {
    let inner = name.trim();
    let (kind, rest) = inner.split_at(inner.len().min(2));
    let rest = rest
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| perr(format!("bad builtin group '{inner}'")))?;
    let (ds, qs) = rest
        .split_once(',')
        .ok_or_else(|| perr(format!("bad builtin group '{inner}'")))?;
    let d: usize = ds
        .trim()
        .parse()
        .map_err(|_| perr(format!("bad dimension '{ds}'")))?;
    let q: u64 = qs
        .trim()
        .parse()
        .map_err(|_| perr(format!("bad field size '{qs}'")))?;
    let (p, r) = factor_prime_power(q)?;
    let field = field_make(p, r)?;
    let gens = match kind {
        "GL" => make_gl(d, &field)?,
        "SL" => make_sl(d, &field)?,
        other => return Err(perr(format!("unknown builtin family '{other}'"))),
    };
    Ok(GroupFile {
        name: format!("{kind}({d},{q})"),
        field,
        d,
        gens,
    })
}

/// Load a group from a `builtin:` name or from a file path.
pub fn load_group(spec: &str) -> Result<GroupFile> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return make_builtin(name);
    }
    let text = std::fs::read_to_string(spec)?;
    parse_group_file(spec, &text)
}

/// Chain construction method selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Deterministic,
    Naive,
    Random,
    Stcs,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Deterministic => "det",
            Method::Naive => "naive",
            Method::Random => "random",
            Method::Stcs => "stcs",
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "det" => Ok(Method::Deterministic),
            "naive" => Ok(Method::Naive),
            "random" => Ok(Method::Random),
            "stcs" => Ok(Method::Stcs),
            other => Err(perr(format!("unknown method '{other}'"))),
        }
    }
}

/// Parse a ratio argument like "6/5" or "2".
pub fn parse_ratio(s: &str) -> Result<(u64, u64)> {
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (
            a.parse().map_err(|_| perr(format!("bad ratio '{s}'")))?,
            b.parse().map_err(|_| perr(format!("bad ratio '{s}'")))?,
        ),
        None => (s.parse().map_err(|_| perr(format!("bad ratio '{s}'")))?, 1),
    };
    if den == 0 || num < den {
        return Err(perr(format!("ratio '{s}' must be at least 1")));
    }
    Ok((num, den))
}

/// Everything the construction methods need beyond the generators.
#[derive(Clone)]
pub struct RunOptions {
    pub method: Method,
    pub config: ChainConfig,
    pub sift_threshold: usize,
    pub stcs_ratio: (u64, u64),
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            method: Method::Deterministic,
            config: ChainConfig::default(),
            sift_threshold: 20,
            stcs_ratio: crate::stcs::DEFAULT_RATIO,
            seed: 1,
        }
    }
}

/// Build a complete stabilizer chain with the selected method. The random
/// method always runs a deterministic verification pass, so every returned
/// chain has its complete flag set.
pub fn build_chain(gf: &GroupFile, opts: &RunOptions) -> Result<StabilizerChain> {
    match opts.method {
        Method::Deterministic => {
            compute_bsgs_deterministic(gf.field.clone(), gf.d, &gf.gens, opts.config.clone())
        }
        Method::Naive => compute_bsgs_naive(gf.field.clone(), gf.d, &gf.gens, opts.config.clone()),
        Method::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let params = RandomParams {
                stop_after: opts.sift_threshold,
                ..RandomParams::default()
            };
            let mut chain = random_schreier_sims(
                gf.field.clone(),
                gf.d,
                &gf.gens,
                opts.config.clone(),
                params,
                &mut rng,
            )?;
            chain.schreier_sims()?;
            Ok(chain)
        }
        Method::Stcs => {
            let mut chain = StabilizerChain::from_generators(
                gf.field.clone(),
                gf.d,
                &gf.gens,
                &[],
                opts.config.clone(),
            )?;
            verify_chain_stcs(&mut chain, opts.stcs_ratio)?;
            Ok(chain)
        }
    }
}

/// One benchmark measurement.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRecord {
    pub group: String,
    pub method: String,
    pub strategy: String,
    pub ms: u64,
    pub order: String,
    pub baselen: usize,
    pub orbits: Vec<usize>,
}

fn strategy_label(s: BaseStrategy) -> &'static str {
    match s {
        BaseStrategy::Natural => "natural",
        BaseStrategy::AlternatingProjective => "projective",
        BaseStrategy::Eigenvector => "eigen",
    }
}

fn measure(gf: &GroupFile, opts: &RunOptions) -> Result<(BenchRecord, StabilizerChain)> {
    let start = Instant::now();
    let chain = build_chain(gf, opts)?;
    let ms = start.elapsed().as_millis() as u64;
    let record = BenchRecord {
        group: gf.name.clone(),
        method: opts.method.label().to_string(),
        strategy: strategy_label(opts.config.base_strategy).to_string(),
        ms,
        order: chain.group_order()?.to_string(),
        baselen: chain.base.len(),
        orbits: chain.orbit_sizes(),
    };
    Ok((record, chain))
}

/// The (d, q) grid exercised by the classical benchmark suite.
pub const CLASSICAL_SUITE: [(usize, u64); 9] = [
    (2, 2),
    (2, 3),
    (2, 4),
    (2, 5),
    (3, 2),
    (3, 3),
    (3, 4),
    (4, 2),
    (4, 3),
];

/// Benchmark GL and SL over the classical grid with the given method and
/// cross-check every order against the closed-form count. A mismatch is
/// reported through the Err side with the offending group's name.
pub fn bench_classical_suite(
    opts: &RunOptions,
) -> Result<std::result::Result<Vec<BenchRecord>, String>> {
    let mut records = Vec::new();
    for &(d, q) in &CLASSICAL_SUITE {
        for kind in ["GL", "SL"] {
            let gf = make_builtin(&format!("{kind}({d},{q})"))?;
            let expected = if kind == "GL" {
                gl_order(d, q)
            } else {
                sl_order(d, q)
            };
            let (record, _) = measure(&gf, opts)?;
            if record.order != expected.to_string() {
                return Ok(Err(format!(
                    "{}: computed order {} but the closed form gives {}",
                    gf.name, record.order, expected
                )));
            }
            records.push(record);
        }
    }
    Ok(Ok(records))
}

/// Benchmark random generator sets: per trial, draw `setsize` invertible
/// matrices from a trial-indexed stream and time the chain construction.
/// The chains are returned alongside the records so callers can compare
/// runs structurally.
pub fn bench_random_trials(
    field: &Field,
    d: usize,
    setsize: usize,
    trials: usize,
    opts: &RunOptions,
) -> Result<Vec<(BenchRecord, StabilizerChain)>> {
    let mut out = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(t as u64));
        let gens: Vec<GroupMatrix> = (0..setsize.max(1))
            .map(|_| random_invertible(field, d, &mut rng))
            .collect();
        let gf = GroupFile {
            name: format!("rand(d={d},q={})#{t}", field.q()),
            field: field.clone(),
            d,
            gens,
        };
        out.push(measure(&gf, opts)?);
    }
    Ok(out)
}

pub fn bench_random_suite(
    field: &Field,
    d: usize,
    setsize: usize,
    trials: usize,
    opts: &RunOptions,
) -> Result<Vec<BenchRecord>> {
    Ok(bench_random_trials(field, d, setsize, trials, opts)?
        .into_iter()
        .map(|(r, _)| r)
        .collect())
}

/// Output format for the subcommands.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(perr(format!("unknown output format '{other}'"))),
        }
    }
}

fn orbits_x(orbits: &[usize]) -> String {
    orbits
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join("x")
}

/// Render benchmark records; the numeric content is identical across the
/// three formats.
pub fn render_records(records: &[BenchRecord], format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => {
            let mut out = String::new();
            for r in records {
                writeln!(
                    out,
                    "{} method={} strategy={} ms={} order={} baselen={} orbits={}",
                    r.group,
                    r.method,
                    r.strategy,
                    r.ms,
                    r.order,
                    r.baselen,
                    orbits_x(&r.orbits)
                )
                .unwrap();
            }
            if !records.is_empty() {
                let total: u64 = records.iter().map(|r| r.ms).sum();
                writeln!(out, "mean_ms={:.2}", total as f64 / records.len() as f64).unwrap();
            }
            out
        }
        OutputFormat::Csv => {
            let mut out = String::from("group,method,strategy,ms,order,baselen,orbits\n");
            for r in records {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.group,
                    r.method,
                    r.strategy,
                    r.ms,
                    r.order,
                    r.baselen,
                    orbits_x(&r.orbits)
                )
                .unwrap();
            }
            out
        }
        OutputFormat::Json => {
            let mut out = serde_json::to_string_pretty(records).expect("records serialize");
            out.push('\n');
            out
        }
    }
}

#[derive(Parser)]
#[command(
    name = "matgroup",
    about = "Stabilizer chains for matrix groups over small finite fields",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Chain construction method: det, naive, random or stcs.
    #[arg(long, global = true, default_value = "det")]
    method: String,
    /// Initial base point selection: natural, projective or eigen.
    #[arg(long = "base-strategy", global = true, default_value = "natural")]
    base_strategy: String,
    /// Orbit tree labels: generators or transversal.
    #[arg(long, global = true, default_value = "transversal")]
    tree: String,
    /// Tree maintenance when generators arrive: always or extend.
    #[arg(long, global = true, default_value = "always")]
    rebuild: String,
    /// Consecutive trivial sifts before the random method stops.
    #[arg(long = "sift-threshold", global = true, default_value_t = 20)]
    sift_threshold: usize,
    /// Coset cutoff multiplier for the stcs method, e.g. 6/5.
    #[arg(long = "stcs-ratio", global = true, default_value = "6/5")]
    stcs_ratio: String,
    /// Random seed for the random method and the bench harness.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Abort when any basic orbit exceeds this many points.
    #[arg(long = "orbit-limit", global = true, default_value_t = 1_000_000)]
    orbit_limit: usize,
    /// Output format: text, csv or json.
    #[arg(long, global = true, default_value = "text")]
    output: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the order of the group.
    Order {
        /// Group file path or builtin:GL(d,q) / builtin:SL(d,q).
        group: String,
    },
    /// Test whether a matrix belongs to the group.
    Member {
        group: String,
        /// Group file whose first generator is the candidate matrix.
        matrix: String,
    },
    /// Print the base, the basic orbit sizes and the strong generators.
    Chain { group: String },
    /// Run a benchmark suite.
    Bench {
        /// classical or random.
        #[arg(long, default_value = "classical")]
        suite: String,
        /// Field size p or p^r for the random suite.
        #[arg(long, default_value = "2")]
        field: String,
        /// Matrix dimension for the random suite.
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Generators drawn per random trial.
        #[arg(long, default_value_t = 2)]
        setsize: usize,
        /// Number of random trials.
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
}

fn options_from(cli: &Cli) -> Result<(RunOptions, OutputFormat)> {
    let config = ChainConfig {
        label_mode: cli.tree.parse::<LabelMode>()?,
        rebuild: cli.rebuild.parse::<RebuildPolicy>()?,
        base_strategy: cli.base_strategy.parse::<BaseStrategy>()?,
        orbit_limit: cli.orbit_limit,
        ..ChainConfig::default()
    };
    let opts = RunOptions {
        method: cli.method.parse()?,
        config,
        sift_threshold: cli.sift_threshold,
        stcs_ratio: parse_ratio(&cli.stcs_ratio)?,
        seed: cli.seed,
    };
    Ok((opts, cli.output.parse()?))
}

fn parse_field_arg(s: &str) -> Result<Field> {
    let (p, r) = match s.split_once('^') {
        Some((a, b)) => (
            a.parse().map_err(|_| perr(format!("bad field '{s}'")))?,
            b.parse().map_err(|_| perr(format!("bad field '{s}'")))?,
        ),
        None => (s.parse().map_err(|_| perr(format!("bad field '{s}'")))?, 1),
    };
    field_make(p, r)
}

const EXIT_OK: i32 = 0;
const EXIT_PARSE: i32 = 1;
const EXIT_COMPUTE: i32 = 2;
const EXIT_VERIFY: i32 = 3;

fn classify(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Io(_) => EXIT_PARSE,
        _ => EXIT_COMPUTE,
    }
}

fn run(cli: &Cli) -> Result<i32> {
    let (opts, format) = options_from(cli)?;
    match &cli.cmd {
        Cmd::Order { group } => {
            let gf = load_group(group)?;
            let chain = build_chain(&gf, &opts)?;
            let order = chain.group_order()?;
            match format {
                OutputFormat::Text => println!("{order}"),
                OutputFormat::Csv => {
                    println!("group,order");
                    println!("{},{order}", gf.name);
                }
                OutputFormat::Json => println!(
                    "{}",
                    serde_json::json!({ "group": gf.name, "order": order.to_string() })
                ),
            }
            Ok(EXIT_OK)
        }
        Cmd::Member { group, matrix } => {
            let gf = load_group(group)?;
            let mf = load_group(matrix)?;
            if mf.d != gf.d || mf.field != gf.field {
                return Err(perr(
                    "candidate matrix does not match the group's field or dimension",
                ));
            }
            let candidate = mf.gens[0].clone();
            let chain = build_chain(&gf, &opts)?;
            let sift = chain.sift(&candidate)?;
            let answer = sift.residue.is_identity();
            match format {
                OutputFormat::Text => {
                    println!(
                        "{} dropout={}",
                        if answer { "yes" } else { "no" },
                        sift.dropout
                    )
                }
                OutputFormat::Csv => {
                    println!("group,member,dropout");
                    println!("{},{},{}", gf.name, answer, sift.dropout);
                }
                OutputFormat::Json => println!(
                    "{}",
                    serde_json::json!({ "group": gf.name, "member": answer, "dropout": sift.dropout })
                ),
            }
            Ok(EXIT_OK)
        }
        Cmd::Chain { group } => {
            let gf = load_group(group)?;
            let chain = build_chain(&gf, &opts)?;
            let order = chain.group_order()?;
            let base: Vec<String> = chain.base.iter().map(|p| format!("{p:?}")).collect();
            let orbits = chain.orbit_sizes();
            match format {
                OutputFormat::Text => {
                    println!("group: {}", gf.name);
                    println!("order: {order}");
                    println!("base length: {}", chain.base.len());
                    for (i, (p, o)) in base.iter().zip(&orbits).enumerate() {
                        println!("  level {i}: point {p} orbit {o}");
                    }
                    println!("strong generators: {}", chain.sgs.len());
                }
                OutputFormat::Csv => {
                    println!("group,order,baselen,orbits,sgs");
                    println!(
                        "{},{order},{},{},{}",
                        gf.name,
                        chain.base.len(),
                        orbits_x(&orbits),
                        chain.sgs.len()
                    );
                }
                OutputFormat::Json => println!(
                    "{}",
                    serde_json::json!({
                        "group": gf.name,
                        "order": order.to_string(),
                        "base": base,
                        "orbits": orbits,
                        "sgs": chain.sgs.len(),
                    })
                ),
            }
            Ok(EXIT_OK)
        }
        Cmd::Bench {
            suite,
            field,
            dim,
            setsize,
            trials,
        } => {
            let records = match suite.as_str() {
                "classical" => match bench_classical_suite(&opts)? {
                    Ok(records) => records,
                    Err(msg) => {
                        eprintln!("verification mismatch: {msg}");
                        return Ok(EXIT_VERIFY);
                    }
                },
                "random" => {
                    let f = parse_field_arg(field)?;
                    bench_random_suite(&f, *dim, *setsize, *trials, &opts)?
                }
                other => return Err(perr(format!("unknown suite '{other}'"))),
            };
            print!("{}", render_records(&records, format));
            Ok(EXIT_OK)
        }
    }
}

/// Entry point shared by the binary and the tests; returns the process
/// exit code (0 ok, 1 parse, 2 computation, 3 verification mismatch).
pub fn cli_main<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_PARSE,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            classify(&e)
        }
    }
}
