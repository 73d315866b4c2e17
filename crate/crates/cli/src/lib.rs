//! The `lpflat` command line: argument parsing, input loading and JSON, CSV
//! or text reports. [`run`] does everything except touching stdout, so tests
//! can call it directly.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use lpflat::cayley::{cayley_scan_1, DEFAULT_GRID_POINTS};
use lpflat::cone::{cone_membership, cut_cone_membership, edm_membership, stratum_membership, Membership};
use lpflat::flatten::{
    flatten_l1_d2, flatten_l1_d2_audited, flatten_l2, flattenability_necessary_conditions, FlattenStatus,
};
use lpflat::format::{write_framework, Document};
use lpflat::graph::{edge, presets};
use lpflat::lp::Rational;
use lpflat::minor::{has_minor_capped, MinorSearchCap};
use lpflat::realize::{realize, verify_framework, RealizeConfig, RealizeStatus};
use lpflat::rigidity::{generic_rank, projection_dimension};
use lpflat::{DistanceVector, Error, Framework, NormParam};

/// Exit code for bad arguments and unreadable or malformed input.
pub const EXIT_USAGE: i32 = 64;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "lpflat", version, about = "Realizability, rigidity and flattenability of l_p linkages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Realize a linkage; exit 0 feasible, 1 exactly infeasible, 2 unknown.
    Realize(Common),
    /// Scan the Cayley configuration space of one non-edge.
    Cayley {
        #[command(flatten)]
        common: Common,
        #[arg(long, num_args = 2, value_names = ["U", "W"], required = true)]
        nonedge: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid: usize,
    },
    /// Generic rigidity rank and projection dimension of a graph.
    Rank {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Cone or stratum membership of a distance vector (`dv` block or points).
    Cone {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = ConeTest::Cone)]
        test: ConeTest,
    },
    /// Flattenability verdict; exit 0 yes, 1 no, 3 unknown.
    Flatten {
        #[command(flatten)]
        common: Common,
        /// Run the Cayley audit with this many trials on non-YES verdicts.
        #[arg(long)]
        audit: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid: usize,
    },
    /// Minor containment with a witness; exit 0 found, 1 absent.
    Minor {
        #[command(flatten)]
        common: Common,
        /// Preset name, or a path to a graph file.
        #[arg(long)]
        minor: String,
    },
    /// Check a framework against its linkage; exit 0 within tolerance.
    Verify {
        #[command(flatten)]
        common: Common,
        /// File with `p` lines; defaults to the input file itself.
        #[arg(long)]
        framework: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Graph or linkage file (text format, or JSON starting with `{`).
    input: PathBuf,
    #[arg(long, default_value = "2")]
    norm: NormParam,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ConeTest {
    /// The whole l_p^p cone.
    Cone,
    Edm,
    Cut,
    /// The stratum of dimension `--dim`.
    Stratum,
}

impl Common {
    fn config(&self) -> Result<RealizeConfig, CliError> {
        let mut cfg = RealizeConfig {
            seed: self.seed,
            ..RealizeConfig::default()
        };
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
            }
            cfg.residual_tol = tol;
        }
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        Ok(cfg)
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Input { path: String, source: Error },
    #[error(transparent)]
    Core(#[from] Error),
}

/// Exit code plus whatever would go to stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(message: String) -> Self {
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: message,
        }
    }
}

/// JSON input: `{"vertices": n, "edges": [[u, w, len?], ...], "points": [...], "distances": [...]}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonInput {
    #[serde(default)]
    vertices: Option<usize>,
    #[serde(default)]
    edges: Vec<Vec<f64>>,
    #[serde(default)]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    distances: Option<Vec<f64>>,
}

fn json_document(text: &str) -> Result<Document, Error> {
    let parse = |message: String| Error::Parse { line: 1, message };
    let input: JsonInput = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let mut doc = Document::default();
    if let Some(values) = input.distances {
        let m = values.len();
        // m = n (n - 1) / 2
        let n = (1..=m + 1).find(|n| n * (n - 1) / 2 >= m).unwrap_or(1);
        doc.distances = Some(DistanceVector::new(n, values).map_err(|e| parse(e.to_string()))?);
        doc.vertex_count = n;
    }
    if let Some(n) = input.vertices {
        doc.vertex_count = n;
    } else if doc.distances.is_none() {
        return Err(parse("missing \"vertices\"".into()));
    }
    for e in &input.edges {
        let as_vertex = |x: f64| {
            (x.fract() == 0.0 && x >= 0.0 && (x as usize) < doc.vertex_count)
                .then_some(x as usize)
                .ok_or_else(|| parse(format!("bad vertex {x}")))
        };
        if !(2..=3).contains(&e.len()) {
            return Err(parse("edges are [u, w] or [u, w, length]".into()));
        }
        let (u, w) = (as_vertex(e[0])?, as_vertex(e[1])?);
        let key = edge(u, w);
        if u == w || doc.edges.contains(&key) {
            return Err(parse(format!("bad edge [{u}, {w}]")));
        }
        doc.edges.push(key);
        if let Some(&len) = e.get(2) {
            doc.lengths.insert(key, len);
        }
    }
    if let Some(points) = input.points {
        doc.points = points.into_iter().enumerate().collect();
    }
    Ok(doc)
}

fn load(path: &Path) -> Result<Document, CliError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{shown}: {e}")))?;
    let doc = if text.trim_start().starts_with('{') {
        json_document(&text)
    } else {
        Document::parse(&text)
    };
    doc.map_err(|source| CliError::Input { path: shown, source })
}

fn input_err(path: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |source| CliError::Input {
        path: path.display().to_string(),
        source,
    }
}

fn rational_strings(points: &[Vec<Rational>]) -> Value {
    points
        .iter()
        .map(|q| q.iter().map(|x| x.to_string()).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .into()
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// A report: JSON fields in emission order plus its CSV and text renderings.
struct Report {
    code: i32,
    json: Map<String, Value>,
    csv: String,
    text: String,
}

impl Report {
    fn new(command: &str, common: &Common) -> Self {
        let mut json = Map::new();
        json.insert("schema".into(), json!(SCHEMA_VERSION));
        json.insert("command".into(), json!(command));
        json.insert("norm".into(), json!(common.norm.to_string()));
        json.insert("dim".into(), json!(common.dim));
        Report {
            code: 0,
            json,
            csv: String::new(),
            text: String::new(),
        }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.json.insert(key.into(), value);
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
            Format::Text => self.text.clone(),
        }
    }
}

fn cmd_realize(common: &Common) -> Result<Report, CliError> {
    let doc = load(&common.input)?;
    let l = doc.linkage().map_err(input_err(&common.input))?;
    let cfg = common.config()?;
    let r = realize(&l, common.dim, common.norm, &cfg)?;
    let mut rep = Report::new("realize", common);
    rep.code = match r.status {
        RealizeStatus::Feasible => 0,
        RealizeStatus::InfeasibleExact => 1,
        RealizeStatus::UnknownNumeric => 2,
    };
    rep.set("status", json!(r.status.as_str()));
    rep.set("mode", to_value(&r.mode));
    rep.set("residual", json!(r.residual));
    rep.set("tolerance", json!(cfg.residual_tol));
    rep.set("certificate", json!(r.certificate));
    let points = r.framework.as_ref().map(|f| f.points().to_vec());
    rep.set("points", to_value(&points));
    rep.set("exact_points", r.exact_points.as_deref().map_or(Value::Null, rational_strings));
    rep.csv = String::from("vertex");
    for k in 0..common.dim {
        rep.csv.push_str(&format!(",x{k}"));
    }
    rep.csv.push('\n');
    for (v, q) in points.iter().flatten().enumerate() {
        let coords: Vec<String> = q.iter().map(|x| format!("{x:?}")).collect();
        rep.csv.push_str(&format!("{v},{}\n", coords.join(",")));
    }
    rep.text = format!("# {} residual {:?}\n", r.status.as_str(), r.residual);
    if let Some(f) = &r.framework {
        rep.text.push_str(&write_framework(f, &l));
    }
    Ok(rep)
}

fn cmd_cayley(common: &Common, nonedge: &[usize], grid: usize) -> Result<Report, CliError> {
    let doc = load(&common.input)?;
    let l = doc.linkage().map_err(input_err(&common.input))?;
    let cfg = common.config()?;
    let f = (nonedge[0], nonedge[1]);
    let scan = cayley_scan_1(&l, f, common.dim, common.norm, grid, &cfg)?;
    let mut rep = Report::new("cayley", common);
    let intervals: Vec<[f64; 2]> = scan.space.intervals().iter().map(|i| [i.lo, i.hi]).collect();
    let gaps: Vec<[f64; 2]> = scan.space.gaps().into_iter().map(|(a, b)| [a, b]).collect();
    rep.set("nonedge", json!([scan.nonedge.0, scan.nonedge.1]));
    rep.set("upper", json!(scan.upper));
    rep.set("intervals", json!(intervals));
    rep.set("gaps", json!(gaps));
    rep.set("convex", json!(scan.convex));
    rep.set("verdict", to_value(&scan.verdict));
    rep.set("mode", to_value(&scan.mode));
    rep.set("grid", to_value(&scan.grid));
    rep.set("refinements", to_value(&scan.refinements));
    rep.csv = scan.to_csv();
    let shown: Vec<String> = intervals.iter().map(|[a, b]| format!("[{a}, {b}]")).collect();
    rep.text = format!("{} {:?}\n", shown.join(" u "), scan.verdict);
    Ok(rep)
}

fn cmd_rank(common: &Common, samples: usize) -> Result<Report, CliError> {
    let g = load(&common.input)?.graph();
    let r = generic_rank(&g, common.dim, common.norm, samples, common.seed)?;
    let proj = projection_dimension(&g, common.dim, common.norm, samples, common.seed)?;
    let mut rep = Report::new("rank", common);
    rep.set("rank", json!(r.rank));
    rep.set("projection_dimension", json!(proj));
    rep.set("edges", json!(g.edge_count()));
    rep.set("max_possible", json!(r.max_possible));
    rep.set("classification", to_value(&r.classification));
    rep.set("independent", json!(r.is_independent()));
    rep.set("samples_used", json!(r.samples_used));
    rep.set("sample_ranks", json!(r.sample_ranks));
    rep.csv = format!("rank,projection_dimension,max_possible\n{},{proj},{}\n", r.rank, r.max_possible);
    rep.text = format!("rank {} of {} ({:?})\n", r.rank, r.max_possible, r.classification);
    Ok(rep)
}

fn cmd_cone(common: &Common, test: ConeTest) -> Result<Report, CliError> {
    let doc = load(&common.input)?;
    let dv = match &doc.distances {
        Some(dv) => dv.clone(),
        None => doc
            .framework(common.norm)
            .and_then(|f| DistanceVector::from_points(f.points(), common.norm))
            .map_err(input_err(&common.input))?,
    };
    let cfg = common.config()?;
    let report = match test {
        ConeTest::Cone => cone_membership(&dv, common.norm, &cfg)?,
        ConeTest::Edm => edm_membership(&dv)?,
        ConeTest::Cut => cut_cone_membership(&dv)?,
        ConeTest::Stratum => stratum_membership(&dv, common.dim, common.norm, &cfg)?,
    };
    let mut rep = Report::new("cone", common);
    rep.code = match report.member {
        Membership::Member => 0,
        Membership::NonMember => 1,
        Membership::UnknownNumeric => 2,
    };
    let test_name = to_value(&test_label(test));
    rep.set("test", test_name);
    rep.set("vector", json!(dv.entries()));
    rep.set("member", to_value(&report.member));
    rep.set("embedding_dim", to_value(&report.embedding_dim));
    rep.set("witness", to_value(&report.witness));
    rep.csv = format!("test,member\n{},{:?}\n", test_label(test), report.member);
    rep.text = format!("{:?}\n", report.member);
    Ok(rep)
}

fn test_label(test: ConeTest) -> &'static str {
    match test {
        ConeTest::Cone => "cone",
        ConeTest::Edm => "edm",
        ConeTest::Cut => "cut",
        ConeTest::Stratum => "stratum",
    }
}

fn cmd_flatten(common: &Common, audit: Option<usize>, grid: usize) -> Result<Report, CliError> {
    let g = load(&common.input)?.graph();
    let polyhedral = common.norm.is_polyhedral();
    let verdict = if polyhedral && common.dim == 2 {
        match audit {
            Some(trials) => flatten_l1_d2_audited(&g, trials, grid, &common.config()?)?,
            None => flatten_l1_d2(&g)?,
        }
    } else if common.norm.is_euclidean() {
        flatten_l2(&g, common.dim)?
    } else {
        return Err(CliError::Core(Error::Unsupported(format!(
            "flattenability for l_{} in dimension {}",
            common.norm, common.dim
        ))));
    };
    let necessary = flattenability_necessary_conditions(&g, common.dim, common.norm, 8, common.seed)?;
    let mut rep = Report::new("flatten", common);
    rep.code = match verdict.status {
        FlattenStatus::Yes => 0,
        FlattenStatus::No => 1,
        FlattenStatus::Unknown => 3,
    };
    rep.set("status", to_value(&verdict.status));
    rep.set("certificate", to_value(&verdict.certificate));
    rep.set("cayley", to_value(&verdict.cayley));
    rep.set("necessary_independent", json!(necessary.independent));
    rep.set("necessary_rank", json!(necessary.rank.rank));
    let status = to_value(&verdict.status);
    let status = status.as_str().unwrap_or_default();
    rep.csv = format!("status,necessary_independent\n{status},{}\n", necessary.independent);
    rep.text = format!("{status}\n");
    Ok(rep)
}

fn cmd_minor(common: &Common, minor: &str) -> Result<Report, CliError> {
    let g = load(&common.input)?.graph();
    let h = match presets::by_name(minor) {
        Some(h) => h,
        None if Path::new(minor).exists() => load(Path::new(minor))?.graph(),
        None => {
            return Err(CliError::Usage(format!(
                "unknown minor `{minor}`; presets: {}",
                presets::NAMES.join(", ")
            )))
        }
    };
    let cap = MinorSearchCap {
        max_vertices: 12,
        max_edges: 66,
    };
    let witness = has_minor_capped(&g, &h, cap)?;
    let mut rep = Report::new("minor", common);
    rep.code = if witness.is_some() { 0 } else { 1 };
    rep.set("minor", json!(minor));
    rep.set("found", json!(witness.is_some()));
    rep.set("witness", to_value(&witness));
    rep.csv = format!("minor,found\n{minor},{}\n", witness.is_some());
    rep.text = format!("{}\n", if witness.is_some() { "found" } else { "absent" });
    Ok(rep)
}

fn cmd_verify(common: &Common, framework: Option<&Path>) -> Result<Report, CliError> {
    let doc = load(&common.input)?;
    let l = doc.linkage().map_err(input_err(&common.input))?;
    let path = framework.unwrap_or(&common.input);
    let pdoc = if framework.is_some() { load(path)? } else { doc };
    let f = pdoc.framework(common.norm).map_err(input_err(path))?;
    let f = Framework::new(l.graph().clone(), f.points().to_vec(), f.dim(), common.norm)?;
    let r = verify_framework(&f, &l)?;
    let tol = common.config()?.residual_tol;
    let mut rep = Report::new("verify", common);
    rep.set("dim", json!(f.dim()));
    let pass = r.relative_residual <= tol;
    rep.code = if pass { 0 } else { 1 };
    rep.set("pass", json!(pass));
    rep.set("tolerance", json!(tol));
    rep.set("relative_residual", json!(r.relative_residual));
    rep.set("max_abs_error", json!(r.max_abs_error));
    rep.set("mean_abs_error", json!(r.mean_abs_error));
    rep.set("worst_edge", to_value(&r.worst_edge));
    rep.csv = format!(
        "pass,relative_residual,max_abs_error\n{pass},{:?},{:?}\n",
        r.relative_residual, r.max_abs_error
    );
    rep.text = format!("{} {:?}\n", if pass { "PASS" } else { "FAIL" }, r.relative_residual);
    Ok(rep)
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome::usage(text)
            };
        }
    };
    let (common, result) = match &cli.command {
        Command::Realize(c) => (c, cmd_realize(c)),
        Command::Cayley { common, nonedge, grid } => (common, cmd_cayley(common, nonedge, *grid)),
        Command::Rank { common, samples } => (common, cmd_rank(common, *samples)),
        Command::Cone { common, test } => (common, cmd_cone(common, *test)),
        Command::Flatten { common, audit, grid } => (common, cmd_flatten(common, *audit, *grid)),
        Command::Minor { common, minor } => (common, cmd_minor(common, minor)),
        Command::Verify { common, framework } => (common, cmd_verify(common, framework.as_deref())),
    };
    let rep = match result {
        Ok(rep) => rep,
        Err(e) => return Outcome::usage(format!("error: {e}\n")),
    };
    let body = rep.render(common.format);
    match &common.out {
        Some(path) => match fs::write(path, &body) {
            Ok(()) => Outcome {
                code: rep.code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome::usage(format!("error: {}: {e}\n", path.display())),
        },
        None => Outcome {
            code: rep.code,
            stdout: body,
            stderr: String::new(),
        },
    }
}
