mod xexpr;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cyclelab_core::cartan_leray::{
    assemble_e1, certify_stable, check_against_sseq, family_star, quotient_by_orbit, verify_corner_lemma, Cover,
    EquivariantCellData, OrbitPattern, VanishingRegion,
};
use cyclelab_core::cycle_complex::{build_cell, check_membership, enumerate_basic_cycles, standard_cube};
use cyclelab_core::homalg::chain::{chain_homology, free_ranks};
use cyclelab_core::homalg::double::{cubical_space, tensor_over_group, FixedFactor, PermComplex};
use cyclelab_core::homalg::ring::CubeModel;
use cyclelab_core::homalg::sseq::{run_spectral_sequence, Limits};
use cyclelab_core::multicurve::{build_standard, check_conditions, DecompGraph, FamilyTag};
use cyclelab_core::report::Report;
use cyclelab_core::symplectic::{Family, Splitting};
use cyclelab_core::torelli_classes::{independence_certificate, make_symbol, sample, signs_table};
use cyclelab_core::Error as CoreError;

const MAX_RANK_VAR: &str = "CYCLELAB_MAX_RANK";

#[derive(Parser, Debug)]
#[command(name = "cyclelab", version, about = "Exact computations with cycles, cells and spectral sequences on surfaces")]
struct Cli {
    /// Directory for artifacts and the manifest; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    Cubical,
    Koszul,
}

impl From<Model> for CubeModel {
    fn from(m: Model) -> Self {
        match m {
            Model::Cubical => CubeModel::Cubical,
            Model::Koszul => CubeModel::KoszulExterior,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Basic 1-cycles of a multicurve.
    Cycles {
        #[command(subcommand)]
        op: CyclesOp,
    },
    /// The cell of a multicurve with its faces.
    Cell {
        #[command(subcommand)]
        op: CellOp,
    },
    /// The two conditions for a multicurve to define a cell.
    Membership {
        #[command(subcommand)]
        op: MembershipOp,
    },
    /// Standard configurations built from a splitting.
    Family {
        #[command(subcommand)]
        op: FamilyOp,
    },
    /// Spectral sequence of a lattice acting on a cell complex.
    Sseq {
        #[command(subcommand)]
        op: SseqOp,
    },
    /// Closed-form E1 pages and stability certificates.
    Cl {
        #[command(subcommand)]
        op: ClOp,
    },
    /// The corner-entry lemma for lattices acting on cubical space.
    Lemma41 {
        #[command(subcommand)]
        op: LemmaOp,
    },
    /// Abelian cycles and their independence certificates.
    Classes {
        #[command(subcommand)]
        op: ClassesOp,
    },
    /// Involution and orientation signs.
    Signs {
        #[command(subcommand)]
        op: SignsOp,
    },
}

#[derive(Args, Debug)]
struct McInput {
    /// Multicurve JSON file.
    #[arg(long)]
    multicurve: PathBuf,
    /// Class of the cycle, e.g. "a1+a2+2a3" or "[1,0,1,0,2,0]".
    #[arg(long)]
    x: String,
}

impl McInput {
    fn load(&self) -> Result<(DecompGraph, Vec<num_bigint::BigInt>)> {
        let text = read(&self.multicurve)?;
        let m = DecompGraph::from_json(&text)?;
        check_genus(m.genus)?;
        let x = xexpr::parse_class(&self.x, m.genus)?;
        Ok((m, x))
    }
}

#[derive(Subcommand, Debug)]
enum CyclesOp {
    Enum(McInput),
}

#[derive(Subcommand, Debug)]
enum CellOp {
    Build {
        #[command(flatten)]
        input: McInput,
        /// Refuse (exit 2) when the multicurve fails membership.
        #[arg(long)]
        require_membership: bool,
    },
}

#[derive(Subcommand, Debug)]
enum MembershipOp {
    Check(McInput),
}

#[derive(Args, Debug)]
struct SplitInput {
    /// N, Nn:<n>, Gamma or GammaN:<n>.
    #[arg(long)]
    tag: String,
    /// Splitting JSON; otherwise the standard splitting of `--genus` and `--x`.
    #[arg(long)]
    splitting: Option<PathBuf>,
    #[arg(long)]
    genus: Option<usize>,
    #[arg(long)]
    x: Option<String>,
}

fn family_of(tag: FamilyTag) -> Family {
    match tag {
        FamilyTag::N | FamilyTag::Gamma => Family::Full,
        FamilyTag::Nn(n) | FamilyTag::GammaN(n) => Family::Truncated(n),
    }
}

impl SplitInput {
    fn load(&self) -> Result<(FamilyTag, Splitting)> {
        let tag: FamilyTag = self.tag.parse()?;
        let s = match (&self.splitting, self.genus, &self.x) {
            (Some(p), _, _) => Splitting::from_json(&read(p)?)?,
            (None, Some(g), Some(x)) => {
                check_genus(g)?;
                Splitting::standard(g, family_of(tag), xexpr::parse_class(x, g)?)?
            }
            _ => bail!("give --splitting, or both --genus and --x"),
        };
        Ok((tag, s))
    }
}

#[derive(Subcommand, Debug)]
enum FamilyOp {
    Build(SplitInput),
    Check(SplitInput),
}

#[derive(Subcommand, Debug)]
enum SseqOp {
    Run {
        /// Equivariant complex JSON (acting rank, fixed factor, orbit cells).
        #[arg(long, conflicts_with = "torus")]
        complex: Option<PathBuf>,
        /// ℤⁿ acting on cubical ℝⁿ.
        #[arg(long)]
        torus: Option<usize>,
        #[arg(long, value_enum, default_value_t = Model::Cubical)]
        model: Model,
    },
}

#[derive(Subcommand, Debug)]
enum ClOp {
    E1 {
        /// Equivariant cell data JSON; otherwise the star of the standard chain.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, requires = "genus")]
        star: Option<String>,
        #[arg(long)]
        genus: Option<usize>,
        /// Truncation for infinitely generated free factors.
        #[arg(long, default_value_t = 2)]
        t: u64,
        /// Add the ε-curves and pass to the quotient by the orbit of the chain.
        #[arg(long, requires = "star")]
        quotient: bool,
        /// Also expand lattice data and compare with the spectral sequence.
        #[arg(long)]
        check: bool,
    },
    Certify {
        /// Disjunction of half-planes, e.g. "p<1|p+q>6".
        #[arg(long)]
        region: String,
        /// Entry "p,q".
        #[arg(long)]
        entry: String,
    },
}

#[derive(Subcommand, Debug)]
enum LemmaOp {
    Verify {
        #[arg(long, requires_all = ["j", "q"])]
        n: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        /// Sweep all (n, j, q) with n + j <= this bound instead.
        #[arg(long, default_value_t = 4)]
        max: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ClassesOp {
    Certify {
        #[arg(long)]
        genus: usize,
        /// Truncation parameter; the full family when omitted.
        #[arg(long)]
        n: Option<usize>,
        /// Number of splittings with distinct orbit keys.
        #[arg(long, default_value_t = 3)]
        count: usize,
        /// Payload indices per splitting (truncated family).
        #[arg(long, default_value_t = 1)]
        lambdas: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum SignsOp {
    Table {
        #[arg(long, default_value_t = 6)]
        gmax: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Refused,
}

/// A command result in all three renderings.
struct Output {
    name: &'static str,
    value: Value,
    headers: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    summary: String,
    status: Status,
}

impl Output {
    fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(&self.value)? + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.headers)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                String::from_utf8(w.into_inner()?)?
            }
            Format::Text => {
                let widths: Vec<usize> = (0..self.headers.len())
                    .map(|i| {
                        self.rows
                            .iter()
                            .map(|r| r[i].chars().count())
                            .chain([self.headers[i].len()])
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let line = |cells: Vec<&str>| {
                    let padded: Vec<String> = cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect();
                    padded.join("  ").trim_end().to_string() + "\n"
                };
                let mut out = format!("{}\n\n", self.summary);
                out += &line(self.headers.clone());
                for r in &self.rows {
                    out += &line(r.iter().map(String::as_str).collect());
                }
                out
            }
        })
    }
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn check_genus(g: usize) -> Result<()> {
    if g < 2 {
        bail!(CoreError::Invalid(format!("genus must be at least 2, got {g}")));
    }
    Ok(())
}

fn limits() -> Result<Limits> {
    let mut l = Limits::default();
    if let Ok(v) = std::env::var(MAX_RANK_VAR) {
        let cap: usize = v.trim().parse().map_err(|_| anyhow!("{MAX_RANK_VAR}={v:?} is not a positive integer"))?;
        if cap == 0 {
            bail!("{MAX_RANK_VAR} must be positive");
        }
        l.max_total_rank = cap;
    }
    Ok(l)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn report_rows(r: &Report) -> Vec<Vec<String>> {
    r.checks
        .iter()
        .map(|c| vec![c.name.clone(), if c.pass { "pass" } else { "FAIL" }.into(), c.detail.clone()])
        .collect()
}

fn status_of(pass: bool) -> Status {
    if pass {
        Status::Ok
    } else {
        Status::Refused
    }
}

fn cycles_enum(input: &McInput) -> Result<Output> {
    let (m, x) = input.load()?;
    let cycles = enumerate_basic_cycles(&m, &x)?;
    Ok(Output {
        name: "cycles",
        value: json!({ "cycles": cycles, "count": cycles.len() }),
        headers: vec!["cycle", "integral"],
        rows: cycles.iter().map(|c| vec![c.to_string(), c.integral.to_string()]).collect(),
        summary: format!("{} basic cycles", cycles.len()),
        status: Status::Ok,
    })
}

fn cell_build(input: &McInput, require: bool) -> Result<Output> {
    let (m, x) = input.load()?;
    let mem = check_membership(&m, &x)?;
    if require && !mem.passes() {
        return Ok(Output {
            name: "cell",
            value: json!({ "membership": mem }),
            headers: vec!["check", "result", "detail"],
            rows: report_rows(&mem.report()),
            summary: "membership fails; no cell".into(),
            status: Status::Refused,
        });
    }
    let cell = build_cell(&m, &x)?;
    let vertices: Vec<String> = cell.vertices.iter().map(|v| v.to_string()).collect();
    Ok(Output {
        name: "cell",
        value: json!({ "vertices": cell.vertices, "dimension": cell.dimension, "faces": cell.faces }),
        headers: vec!["dimension", "curves", "vertices"],
        rows: cell
            .faces
            .iter()
            .map(|f| {
                let vs: Vec<&str> = f.vertices.iter().map(|&i| vertices[i].as_str()).collect();
                vec![f.dimension.to_string(), f.curves.join(" "), vs.join(" ; ")]
            })
            .collect(),
        summary: format!("cell of dimension {} with {} vertices", cell.dimension, cell.vertices.len()),
        status: Status::Ok,
    })
}

fn membership_check(input: &McInput) -> Result<Output> {
    let (m, x) = input.load()?;
    let mem = check_membership(&m, &x)?;
    let pass = mem.passes();
    Ok(Output {
        name: "membership",
        value: to_value(&mem)?,
        headers: vec!["check", "result", "detail"],
        rows: report_rows(&mem.report()),
        summary: if pass { "both conditions hold" } else { "membership fails" }.into(),
        status: status_of(pass),
    })
}

fn family_build(input: &SplitInput) -> Result<Output> {
    let (tag, s) = input.load()?;
    let gr = build_standard(tag, &s, None)?;
    Ok(Output {
        name: "family",
        value: to_value(&gr)?,
        headers: vec!["curve", "class", "left", "right"],
        rows: gr
            .curves
            .iter()
            .map(|c| {
                let cls: Vec<String> = c.class.iter().map(|v| v.to_string()).collect();
                vec![c.id.clone(), cls.join(" "), c.left.clone(), c.right.clone()]
            })
            .collect(),
        summary: format!("{} curves, {} components", gr.curves.len(), gr.components.len()),
        status: Status::Ok,
    })
}

fn family_check(input: &SplitInput) -> Result<Output> {
    let (tag, s) = input.load()?;
    let gr = build_standard(tag, &s, None)?;
    let mut r = check_conditions(&gr, tag, &s);
    if matches!(tag, FamilyTag::N | FamilyTag::Nn(_)) {
        let (_, chart) = standard_cube(&s)?;
        r.checks.extend(chart.checks.checks);
    }
    let pass = r.is_pass();
    Ok(Output {
        name: "family-check",
        value: json!({ "tag": tag, "pass": pass, "checks": r.checks }),
        headers: vec!["check", "result", "detail"],
        rows: report_rows(&r),
        summary: format!("{} of {} checks pass", r.checks.len() - r.failures().len(), r.checks.len()),
        status: status_of(pass),
    })
}

fn sseq_run(complex: &Option<PathBuf>, torus: Option<usize>, model: Model) -> Result<Output> {
    let c: PermComplex = match (complex, torus) {
        (Some(p), _) => serde_json::from_str(&read(p)?).map_err(|e| CoreError::Parse(e.to_string()))?,
        (None, Some(n)) => cubical_space(n, FixedFactor::Trivial),
        (None, None) => bail!("give --complex or --torus"),
    };
    c.validate()?;
    let lim = limits()?;
    let b = tensor_over_group(&c, model.into())?;
    lim.check_rank(b.total_rank())?;
    let run = run_spectral_sequence(&b, &lim)?;
    let direct = chain_homology(&b.total_complex())?;
    let consistent = free_ranks(&direct) == free_ranks(&run.total);
    let pages: Vec<Value> = run
        .pages
        .iter()
        .map(|pg| {
            let entries: Vec<Value> = pg
                .entries
                .iter()
                .filter(|(_, g)| !g.is_zero())
                .map(|(&(p, q), g)| json!({ "p": p, "q": q, "group": g.to_string() }))
                .collect();
            json!({ "r": pg.r, "entries": entries, "is_infinity": pg.is_infinity,
                    "all_differentials_zero": pg.all_differentials_zero() })
        })
        .collect();
    let last = run.pages.last().ok_or_else(|| anyhow!("no pages"))?;
    let rows = last
        .entries
        .iter()
        .filter(|(_, g)| !g.is_zero())
        .map(|(&(p, q), g)| vec![p.to_string(), q.to_string(), g.to_string()])
        .collect();
    let total: Vec<String> = run.total.iter().map(|g| g.to_string()).collect();
    Ok(Output {
        name: "sseq",
        value: json!({
            "pages": pages,
            "total_homology": total,
            "stable_from": run.stable_from,
            "filtration": run.filtration.iter().map(|f| f.iter().map(|g| g.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "matches_direct_homology": consistent,
        }),
        headers: vec!["p", "q", "E_infinity"],
        rows,
        summary: format!("H_*(Tot) = [{}], stable from r = {}", total.join(", "), run.stable_from),
        status: if consistent { Status::Ok } else { bail!(CoreError::Inconsistent("abutment differs from direct homology".into())) },
    })
}

fn cl_e1(
    data: &Option<PathBuf>,
    star: &Option<String>,
    genus: Option<usize>,
    t: u64,
    quotient: bool,
    check: bool,
) -> Result<Output> {
    let d = match (data, star) {
        (Some(p), _) => EquivariantCellData::from_json(&read(p)?)?,
        (None, Some(tag)) => {
            let tag: FamilyTag = tag.parse()?;
            let g = genus.ok_or_else(|| anyhow!("--star needs --genus"))?;
            check_genus(g)?;
            let s = sample::standard(g, family_of(tag));
            if quotient {
                let extra: Vec<usize> = match tag {
                    FamilyTag::N => (1..g).collect(),
                    FamilyTag::Nn(n) => (1..=n).collect(),
                    _ => bail!(CoreError::Invalid("stars are built for N and Nn:<n>".into())),
                };
                let (m, data) = family_star(tag, &s, &extra)?;
                let n = build_standard(tag, &s, None)?;
                let pattern = OrbitPattern {
                    tag,
                    x: s.x.clone(),
                    n_curves: n.curves.iter().map(|c| c.id.clone()).collect(),
                };
                quotient_by_orbit(&data, &m, &pattern)?
            } else {
                family_star(tag, &s, &[])?.1
            }
        }
        (None, None) => bail!("give --data or --star"),
    };
    d.validate()?;
    let grid = assemble_e1(&d, t);
    let mut value = to_value(&grid)?;
    let mut pass = true;
    if check {
        let r = check_against_sseq(&d, CubeModel::Cubical)?;
        pass = r.is_pass();
        value["sseq_check"] = to_value(&r)?;
    }
    Ok(Output {
        name: "e1",
        value,
        headers: vec!["p", "q", "poly", "rank", "bounded"],
        rows: grid
            .entries
            .iter()
            .filter(|e| !e.is_zero())
            .map(|e| vec![e.p.to_string(), e.q.to_string(), e.poly.to_string(), e.rank.to_string(), e.bounded.to_string()])
            .collect(),
        summary: format!("E1 at t = {t}\n{}", grid.to_table().trim_end()),
        status: status_of(pass),
    })
}

fn parse_entry(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [p, q] => Ok((p.parse()?, q.parse()?)),
        _ => bail!(CoreError::Parse(format!("entry {s:?} is not \"p,q\""))),
    }
}

fn cl_certify(region: &str, entry: &str) -> Result<Output> {
    let region: VanishingRegion = region.parse()?;
    let entry = parse_entry(entry)?;
    let cert = certify_stable(&region, entry);
    Ok(Output {
        name: "certificate",
        value: to_value(&cert)?,
        headers: vec!["r", "direction", "target", "cover"],
        rows: cert
            .steps
            .iter()
            .flat_map(|s| {
                let cover = |c: &Cover| match c {
                    Cover::NegativeP => "p < 0".to_string(),
                    Cover::NegativeQ => "q < 0".to_string(),
                    Cover::Region { clause } => region.clauses[*clause].to_string(),
                    Cover::Uncovered => "uncovered".to_string(),
                };
                [
                    vec![s.r.to_string(), "out".into(), format!("{:?}", s.out_target), cover(&s.out_cover)],
                    vec![s.r.to_string(), "in".into(), format!("{:?}", s.in_source), cover(&s.in_cover)],
                ]
            })
            .collect(),
        summary: format!(
            "E{:?} {} against {region}",
            entry,
            if cert.certified { "certified stable" } else { "not certified" }
        ),
        status: status_of(cert.certified),
    })
}

fn lemma_verify(n: Option<usize>, j: Option<usize>, q: Option<usize>, max: usize) -> Result<Output> {
    let cases: Vec<(usize, usize, usize)> = match (n, j, q) {
        (Some(n), Some(j), Some(q)) => vec![(n, j, q)],
        _ => (1..=max)
            .flat_map(|n| (0..=max - n).flat_map(move |j| (0..=j).map(move |q| (n, j, q))))
            .collect(),
    };
    let mut reports = Vec::new();
    for (n, j, q) in cases {
        reports.push(verify_corner_lemma(n, j, q)?);
    }
    let pass = reports.iter().all(|r| r.passes());
    Ok(Output {
        name: "lemma",
        value: to_value(&reports)?,
        headers: vec!["n", "j", "q", "e1", "e_infinity", "expected", "pass"],
        rows: reports
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    r.j.to_string(),
                    r.q.to_string(),
                    r.e1_rank.to_string(),
                    r.e_infinity_rank.to_string(),
                    r.expected_rank.to_string(),
                    r.passes().to_string(),
                ]
            })
            .collect(),
        summary: format!("{} of {} cases pass", reports.iter().filter(|r| r.passes()).count(), reports.len()),
        status: status_of(pass),
    })
}

fn classes_certify(g: usize, n: Option<usize>, count: usize, lambdas: u64, seed: u64) -> Result<Output> {
    use rand::SeedableRng;
    check_genus(g)?;
    if g < 3 {
        bail!(CoreError::Invalid("abelian cycles need genus at least 3".into()));
    }
    let family = match n {
        None => Family::Full,
        Some(n) if n >= 1 && n + 3 <= g => Family::Truncated(n),
        Some(n) => bail!(CoreError::Invalid(format!("n = {n} out of range 1..=g-3"))),
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let splittings = sample::distinct_splittings(&mut rng, g, family, count);
    if splittings.len() < count {
        bail!(CoreError::Refused(format!("found only {} distinct orbit keys", splittings.len())));
    }
    let mut symbols = Vec::new();
    for s in &splittings {
        match family {
            Family::Full => symbols.push(make_symbol(s, None, None)?),
            Family::Truncated(_) => {
                for l in 0..lambdas {
                    symbols.push(make_symbol(s, None, Some(l))?);
                }
            }
        }
    }
    let cert = independence_certificate(&symbols)?;
    let mut value = to_value(&cert)?;
    value["seed"] = json!(seed);
    Ok(Output {
        name: "classes",
        value,
        headers: vec!["check", "result", "detail"],
        rows: report_rows(&cert.verify()),
        summary: format!(
            "{} symbols, rank {}, {}",
            cert.symbols.len(),
            cert.rank,
            if cert.certified { "certified" } else { "not certified" }
        ),
        status: status_of(cert.certified),
    })
}

fn signs(gmax: usize) -> Result<Output> {
    if gmax < 3 {
        bail!(CoreError::Invalid("--gmax must be at least 3".into()));
    }
    let table = signs_table(gmax)?;
    Ok(Output {
        name: "signs",
        value: to_value(&table)?,
        headers: vec!["g", "involution_full", "involution_truncated", "class_sign", "orientation_sign", "product"],
        rows: table
            .iter()
            .map(|r| {
                let tr: Vec<String> = r.involution_truncated.iter().map(|(n, s)| format!("n={n}:{s:+}")).collect();
                vec![
                    r.genus.to_string(),
                    format!("{:+}", r.involution_full),
                    tr.join(" "),
                    format!("{:+}", r.theta.class_sign),
                    format!("{:+}", r.theta.orientation_sign),
                    format!("{:+}", r.theta.product),
                ]
            })
            .collect(),
        summary: format!("signs for 3 <= g <= {gmax}"),
        status: Status::Ok,
    })
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Cycles { op: CyclesOp::Enum(i) } => cycles_enum(i),
        Command::Cell { op: CellOp::Build { input, require_membership } } => cell_build(input, *require_membership),
        Command::Membership { op: MembershipOp::Check(i) } => membership_check(i),
        Command::Family { op: FamilyOp::Build(i) } => family_build(i),
        Command::Family { op: FamilyOp::Check(i) } => family_check(i),
        Command::Sseq { op: SseqOp::Run { complex, torus, model } } => sseq_run(complex, *torus, *model),
        Command::Cl { op: ClOp::E1 { data, star, genus, t, quotient, check } } => {
            cl_e1(data, star, *genus, *t, *quotient, *check)
        }
        Command::Cl { op: ClOp::Certify { region, entry } } => cl_certify(region, entry),
        Command::Lemma41 { op: LemmaOp::Verify { n, j, q, max } } => lemma_verify(*n, *j, *q, *max),
        Command::Classes { op: ClassesOp::Certify { genus, n, count, lambdas, seed } } => {
            classes_certify(*genus, *n, *count, *lambdas, *seed)
        }
        Command::Signs { op: SignsOp::Table { gmax } } => signs(*gmax),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::Refused(_) | CoreError::Unsupported(_)) => 2,
        _ => 1,
    }
}

fn write_artifacts(dir: &Path, cli: &Cli, out: &Output, code: u8) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let file = format!("{}.{}", out.name, cli.format.ext());
    let body = out.render(cli.format)?;
    fs::write(dir.join(&file), &body)?;
    let args: Vec<String> = std::env::args().skip(1).collect();
    let manifest = json!({
        "tool": "cyclelab",
        "version": env!("CARGO_PKG_VERSION"),
        "arguments": args,
        "format": cli.format.ext(),
        "exit_code": code,
        "summary": out.summary,
        "artifacts": [{ "path": file, "bytes": body.len() }],
    });
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let code = match out.status {
        Status::Ok => 0,
        Status::Refused => 2,
    };
    let result = match &cli.out {
        Some(dir) => write_artifacts(dir, &cli, &out, code).map(|_| println!("{}", out.summary)),
        None => out.render(cli.format).map(|s| print!("{s}")),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
