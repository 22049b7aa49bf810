//! Command-line front end for `accs`: model files, analysis, closures,
//! bracket evaluation and Monte Carlo reachability.

pub mod modelfile;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use accs::analysis::{
    analyze_with, closures, velocity_in_span, AccessReport, AnalysisOptions, Answer, Closures, SystemModel,
};
use accs::distributions::{
    lie_closure, sym_closure, Closure, ClosureOptions, Provenance, RankProfile, DEFAULT_SAMPLE_SEED,
};
use accs::models::{by_name, catalog};
use accs::numeric::DEFAULT_RANK_TOL;
use accs::reachability::{reachable_dimension, write_csv, ReachOptions, DEFAULT_DIM_THRESHOLD};
use accs::tangent::{BracketWord, Caps, SplitCalculus, TangentPoint, WordEvaluator};
use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

pub use modelfile::{ModelFile, ModelFileError};

pub const SCHEMA: u32 = 1;

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "accs",
    version,
    about = "Accessibility analysis for affine connection control systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Accessibility verdicts at a point of the tangent bundle.
    Analyze(AnalyzeArgs),
    /// Generators and rank profile of a closure.
    Closure(ClosureArgs),
    /// Evaluate a bracket word at a point and print its horizontal/vertical split.
    Bracket(BracketArgs),
    /// Monte Carlo estimate of the reachable-set dimension.
    Reach(ReachArgs),
    /// Built-in models.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModelsAction {
    List,
    /// Print a built-in model as a model file.
    Export {
        name: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Sym,
    Lie,
    LieOfSym,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Built-in model name or path to a model file.
    #[arg(long)]
    pub model: String,
    /// Comma-separated subset of the input labels.
    #[arg(long, value_delimiter = ',')]
    pub inputs: Option<Vec<String>>,
    /// Parameter override `name=value`; repeatable.
    #[arg(long = "param", value_parser = parse_assignment)]
    pub params: Vec<(String, f64)>,
    /// Seed for sample points and default base points.
    #[arg(long, env = "ACCS_SEED", default_value_t = DEFAULT_SAMPLE_SEED)]
    pub seed: u64,
    /// Relative singular-value cutoff for ranks.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Base point coordinates; defaults to a seeded random point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Option<Vec<f64>>,
    /// Velocity components.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["zero_velocity", "velocity_in"])]
    pub v: Option<Vec<f64>>,
    /// Start at rest
    #[arg(long, conflicts_with = "velocity_in")]
    pub zero_velocity: bool,
    /// `span:c1,c2,...`, coefficients on the symmetric closure generators.
    #[arg(long, allow_hyphen_values = true)]
    pub velocity_in: Option<String>,
    /// Named point from the model file.
    #[arg(long, conflicts_with_all = ["q", "v", "zero_velocity", "velocity_in"])]
    pub point: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct CapArgs {
    /// Largest spray power in primitive brackets (default 2n).
    #[arg(long)]
    pub adz_cap: Option<usize>,
    /// Largest bracket depth in primitive brackets (default 2n).
    #[arg(long)]
    pub bracket_cap: Option<usize>,
    /// Closure depth cap (default 2n + 2).
    #[arg(long)]
    pub closure_cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub caps: CapArgs,
}

#[derive(Debug, Args)]
pub struct ClosureArgs {
    #[arg(value_enum)]
    pub which: Which,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub caps: CapArgs,
}

#[derive(Debug, Args)]
pub struct BracketArgs {
    /// Word over `Z` and symmetric closure labels, e.g. `[Z,[Z,Y1^V]]`.
    pub word: String,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub point: PointArgs,
    /// Also print the symbolic components.
    #[arg(long)]
    pub symbolic: bool,
}

#[derive(Debug, Args)]
pub struct ReachArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.5)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = DEFAULT_DIM_THRESHOLD)]
    pub threshold: f64,
    /// Write the endpoint cloud here as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn parse_assignment(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("`{v}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// What a command produced.
#[derive(Debug, Default, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => {
            let code = if e.downcast_ref::<ModelFileError>().is_some() || e.downcast_ref::<InputError>().is_some() {
                EXIT_PARSE
            } else {
                EXIT_FAILURE
            };
            Outcome {
                code,
                stdout: String::new(),
                stderr: format!("error: {}\n", error_chain(&e)),
            }
        }
    }
}

/// The error and its causes, skipping causes already quoted by their parent.
fn error_chain(e: &anyhow::Error) -> String {
    let mut parts: Vec<String> = Vec::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if !parts.last().is_some_and(|p| p.contains(&msg)) {
            parts.push(msg);
        }
    }
    parts.join(": ")
}

/// Malformed user input: point specs, words, unknown names.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct InputError(pub String);

fn input_err(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

fn execute(cmd: &Command) -> anyhow::Result<(i32, String)> {
    match cmd {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Closure(a) => cmd_closure(a),
        Command::Bracket(a) => cmd_bracket(a),
        Command::Reach(a) => cmd_reach(a),
        Command::Models { action } => cmd_models(action),
    }
}

/// A loaded system plus the file it came from, if any.
pub struct Loaded {
    pub system: SystemModel,
    pub file: Option<ModelFile>,
}

/// Resolves `--model`, `--param` and `--inputs`.
pub fn load(m: &ModelArgs) -> anyhow::Result<Loaded> {
    let (system, file) = match by_name(&m.model) {
        Ok(desc) => {
            let mut values: Vec<f64> = desc.params.iter().map(|(_, v)| *v).collect();
            for (k, v) in &m.params {
                let i = desc
                    .params
                    .iter()
                    .position(|(n, _)| n == k)
                    .ok_or_else(|| input_err(format!("model `{}` has no parameter `{k}`", desc.name)))?;
                values[i] = *v;
            }
            (desc.build(&values)?, None)
        }
        Err(_) => {
            let text = std::fs::read_to_string(&m.model)
                .with_context(|| format!("`{}` is neither a built-in model nor a readable file", m.model))?;
            let file = ModelFile::parse(&text)?;
            let system = file.build()?;
            let known: Vec<&str> = system.chart().params().iter().map(|s| s.name()).collect();
            let mut values = BTreeMap::new();
            for (k, v) in &m.params {
                if !known.contains(&k.as_str()) {
                    return Err(input_err(format!("model `{}` has no parameter `{k}`", system.name())));
                }
                values.insert(k.clone(), *v);
            }
            (system.with_params(&values), Some(file))
        }
    };
    let system = match &m.inputs {
        Some(labels) => {
            let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
            system.with_inputs(&labels).map_err(|e| input_err(e.to_string()))?
        }
        None => system,
    };
    Ok(Loaded { system, file })
}

fn analysis_options(m: &ModelArgs, caps: &CapArgs, n: usize) -> AnalysisOptions {
    let default = Caps::for_dim(n);
    AnalysisOptions {
        caps: Some(Caps {
            adz_power: caps.adz_cap.unwrap_or(default.adz_power),
            bracket_depth: caps.bracket_cap.unwrap_or(default.bracket_depth),
        }),
        closure_depth_cap: Some(caps.closure_cap.unwrap_or(2 * n + 2)),
        tol: m.tol,
        sample_seed: m.seed,
    }
}

fn parse_velocity_in(spec: &str) -> anyhow::Result<Vec<f64>> {
    let body = spec
        .strip_prefix("span:")
        .ok_or_else(|| input_err(format!("--velocity-in expects `span:c1,c2,...`, got `{spec}`")))?;
    body.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|e| input_err(format!("--velocity-in coefficient `{c}`: {e}")))
        })
        .collect()
}

/// Builds the tangent point from the point flags. `closures` is needed only
/// for `--velocity-in`.
pub fn resolve_point(
    loaded: &Loaded,
    p: &PointArgs,
    seed: u64,
    closures: impl FnOnce() -> anyhow::Result<Closures>,
) -> anyhow::Result<TangentPoint> {
    let system = &loaded.system;
    let chart = system.chart();
    let n = chart.dim();
    if let Some(name) = &p.point {
        let decl = loaded
            .file
            .as_ref()
            .and_then(|f| f.point(name))
            .ok_or_else(|| input_err(format!("no point named `{name}`")))?;
        return Ok(system.point(&decl.q, &decl.v));
    }
    let q = match &p.q {
        Some(q) if q.len() != n => return Err(input_err(format!("--q needs {n} values, got {}", q.len()))),
        Some(q) => q.clone(),
        None => {
            let b = &chart.sample_bindings(1, seed.wrapping_add(1), Some(system.params()))[0];
            chart.coords().iter().map(|s| b.get(s).unwrap_or(0.0)).collect()
        }
    };
    let at_rest = system.point(&q, &vec![0.0; n]);
    let v = if let Some(v) = &p.v {
        if v.len() != n {
            return Err(input_err(format!("--v needs {n} values, got {}", v.len())));
        }
        v.clone()
    } else if let Some(spec) = &p.velocity_in {
        let coeffs = parse_velocity_in(spec)?;
        let c = closures()?;
        let gens = c.sym.distribution.len();
        if coeffs.len() > gens {
            return Err(input_err(format!(
                "--velocity-in has {} coefficients, the symmetric closure has {gens} generators",
                coeffs.len()
            )));
        }
        velocity_in_span(&c.sym.distribution, &at_rest.base, &coeffs)?
    } else {
        vec![0.0; n]
    };
    Ok(TangentPoint::new(at_rest.base, v))
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Settings {
    seed: u64,
    tol: f64,
    sample_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    caps: Option<Caps>,
    closure_depth_cap: usize,
    inputs: Vec<String>,
}

fn settings(system: &SystemModel, opts: &AnalysisOptions, with_caps: bool) -> Settings {
    Settings {
        seed: opts.sample_seed,
        tol: opts.tol,
        sample_count: accs::distributions::DEFAULT_SAMPLE_COUNT,
        caps: if with_caps { opts.caps } else { None },
        closure_depth_cap: opts.closure_depth_cap.unwrap_or(2 * system.chart().dim() + 2),
        inputs: system.inputs().generators().iter().map(|g| g.label.clone()).collect(),
    }
}

#[derive(Serialize)]
struct AnalyzeDoc<'a> {
    schema: u32,
    command: &'static str,
    settings: Settings,
    report: &'a AccessReport,
}

fn cmd_analyze(a: &AnalyzeArgs) -> anyhow::Result<(i32, String)> {
    let loaded = load(&a.model)?;
    let system = &loaded.system;
    let opts = analysis_options(&a.model, &a.caps, system.chart().dim());
    let c = closures(system, &opts)?;
    let p = resolve_point(&loaded, &a.point, a.model.seed, || Ok(c.clone()))?;
    let report = analyze_with(system, &c, &p, &opts)?;
    let inconclusive = report.verdicts.accessible == Answer::Inconclusive
        && report.verdicts.configuration_accessible == Answer::Inconclusive;
    let code = if inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK };
    let out = match a.model.format {
        Format::Json => to_json(&AnalyzeDoc {
            schema: SCHEMA,
            command: "analyze",
            settings: settings(system, &opts, true),
            report: &report,
        }),
        Format::Text => analyze_text(&report, &opts),
    };
    Ok((code, out))
}

fn analyze_text(r: &AccessReport, opts: &AnalysisOptions) -> String {
    let mut s = String::new();
    let q: Vec<String> = r.point.q.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let _ = writeln!(s, "system: {}", r.system);
    let _ = writeln!(s, "point: q = ({}), v = {:?}", q.join(", "), r.point.v);
    if !r.parameters.is_empty() {
        let p: Vec<String> = r.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "parameters: {}", p.join(", "));
    }
    let _ = writeln!(s, "seed: {}  tol: {:e}", opts.sample_seed, opts.tol);
    let _ = writeln!(s, "hypotheses:");
    let _ = writeln!(s, "  velocity in Sym: {}", r.hypotheses.velocity_in_sym);
    let _ = writeln!(
        s,
        "  connection restricts to Sym: {}",
        r.hypotheses.connection_restricts
    );
    let k = &r.ranks;
    let _ = writeln!(s, "ranks:");
    let _ = writeln!(s, "  n = {}", k.n);
    if let Some(c) = k.constraint {
        let _ = writeln!(s, "  constraint = {c}");
    }
    let _ = writeln!(s, "  sym = {}  lie_of_sym = {}", k.sym, k.lie_of_sym);
    let _ = writeln!(
        s,
        "  accessibility: total {}  horizontal {}  vertical {}",
        k.acc_total, k.acc_horizontal, k.acc_vertical
    );
    let method = serde_json::to_value(r.method).expect("method serializes");
    let _ = writeln!(s, "method: {}", method.as_str().unwrap_or_default());
    let _ = writeln!(s, "accessible: {}", r.verdicts.accessible);
    let _ = writeln!(s, "configuration accessible: {}", r.verdicts.configuration_accessible);
    if r.caps.any() {
        let _ = writeln!(s, "caps hit: {:?}", r.caps);
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

#[derive(Serialize)]
struct GeneratorDoc {
    index: usize,
    label: String,
    provenance: Provenance,
    depth: usize,
    components: Vec<String>,
}

#[derive(Serialize)]
struct ClosureDoc {
    schema: u32,
    command: &'static str,
    which: &'static str,
    system: String,
    settings: Settings,
    rank: usize,
    saturated: bool,
    cap_hit: bool,
    conclusive: bool,
    profile: RankProfile,
    generators: Vec<GeneratorDoc>,
}

fn cmd_closure(a: &ClosureArgs) -> anyhow::Result<(i32, String)> {
    let loaded = load(&a.model)?;
    let system = &loaded.system;
    let opts = analysis_options(&a.model, &a.caps, system.chart().dim());
    let samples = system.samples(opts.sample_seed);
    let copts = ClosureOptions {
        depth_cap: opts.closure_depth_cap,
        tol: opts.tol,
    };
    let (name, cl): (&'static str, Closure) = match a.which {
        Which::Sym => (
            "sym",
            sym_closure(system.connection(), system.inputs(), &samples, &copts)?,
        ),
        Which::Lie => ("lie", lie_closure(system.inputs(), &samples, &copts)?),
        Which::LieOfSym => ("lie-of-sym", closures(system, &opts)?.lie_of_sym),
    };
    let generators: Vec<GeneratorDoc> = cl
        .distribution
        .generators()
        .iter()
        .enumerate()
        .map(|(index, g)| GeneratorDoc {
            index,
            label: g.label.clone(),
            provenance: g.provenance.clone(),
            depth: g.depth,
            components: g.field.components().iter().map(ToString::to_string).collect(),
        })
        .collect();
    let code = if cl.conclusive() { EXIT_OK } else { EXIT_INCONCLUSIVE };
    let doc = ClosureDoc {
        schema: SCHEMA,
        command: "closure",
        which: name,
        system: system.name().into(),
        settings: settings(system, &opts, false),
        rank: cl.rank(),
        saturated: cl.saturated,
        cap_hit: cl.cap_hit,
        conclusive: cl.conclusive(),
        profile: cl.profile.clone(),
        generators,
    };
    let out = match a.model.format {
        Format::Json => to_json(&doc),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "{} closure of {}: rank {}", doc.which, doc.system, doc.rank);
            for g in &doc.generators {
                let _ = writeln!(
                    s,
                    "  {:>2} {:<20} depth {}  ({})",
                    g.index,
                    g.label,
                    g.depth,
                    g.components.join(", ")
                );
            }
            let _ = writeln!(s, "pointwise ranks: {:?}", doc.profile.ranks);
            let _ = writeln!(s, "saturated: {}  cap hit: {}", doc.saturated, doc.cap_hit);
            s
        }
    };
    Ok((code, out))
}

#[derive(Serialize)]
struct SymbolicSplit {
    horizontal: Vec<String>,
    vertical: Vec<String>,
}

#[derive(Serialize)]
struct BracketDoc {
    schema: u32,
    command: &'static str,
    system: String,
    word: String,
    settings: Settings,
    q: BTreeMap<String, f64>,
    v: Vec<f64>,
    horizontal: Vec<f64>,
    vertical: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    symbolic: Option<SymbolicSplit>,
}

fn cmd_bracket(a: &BracketArgs) -> anyhow::Result<(i32, String)> {
    let loaded = load(&a.model)?;
    let system = &loaded.system;
    let n = system.chart().dim();
    let opts = analysis_options(&a.model, &CapArgs::default(), n);
    let c = closures(system, &opts)?;
    let p = resolve_point(&loaded, &a.point, a.model.seed, || Ok(c.clone()))?;
    let labels: Vec<String> = c
        .sym
        .distribution
        .generators()
        .iter()
        .map(|g| g.label.clone())
        .collect();
    let word = BracketWord::parse(&a.word, &labels).map_err(|e| input_err(format!("word `{}`: {e}", a.word)))?;
    let calc = SplitCalculus::new(system.connection());
    let alphabet = c.sym.distribution.fields();
    let field = WordEvaluator::new(&calc, &alphabet).eval(&word);
    let values = field.evaluate(&p.binding(&calc)?)?;
    let (hor, ver) = values.split_at(n);
    let doc = BracketDoc {
        schema: SCHEMA,
        command: "bracket",
        system: system.name().into(),
        word: word.render(&labels),
        settings: settings(system, &opts, false),
        q: system
            .chart()
            .coords()
            .iter()
            .map(|s| (s.name().to_string(), p.base.get(s).unwrap_or(f64::NAN)))
            .collect(),
        v: p.velocity.clone(),
        horizontal: hor.to_vec(),
        vertical: ver.to_vec(),
        symbolic: a.symbolic.then(|| SymbolicSplit {
            horizontal: field.hor.iter().map(ToString::to_string).collect(),
            vertical: field.ver.iter().map(ToString::to_string).collect(),
        }),
    };
    let out = match a.model.format {
        Format::Json => to_json(&doc),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "{} at v = {:?}", doc.word, doc.v);
            let _ = writeln!(s, "horizontal: {:?}", doc.horizontal);
            let _ = writeln!(s, "vertical:   {:?}", doc.vertical);
            if let Some(sym) = &doc.symbolic {
                let _ = writeln!(s, "horizontal (symbolic): ({})", sym.horizontal.join(", "));
                let _ = writeln!(s, "vertical (symbolic):   ({})", sym.vertical.join(", "));
            }
            s
        }
    };
    Ok((EXIT_OK, out))
}

#[derive(Serialize)]
struct ReachDoc {
    schema: u32,
    command: &'static str,
    system: String,
    options: ReachOptions,
    inputs: Vec<String>,
    q: BTreeMap<String, f64>,
    v: Vec<f64>,
    dim_tq: usize,
    dim_q: usize,
    dropped: usize,
}

fn cmd_reach(a: &ReachArgs) -> anyhow::Result<(i32, String)> {
    let loaded = load(&a.model)?;
    let system = &loaded.system;
    let opts = analysis_options(&a.model, &CapArgs::default(), system.chart().dim());
    let p = resolve_point(&loaded, &a.point, a.model.seed, || Ok(closures(system, &opts)?))?;
    let mut ro = ReachOptions::new(a.samples, a.horizon, a.dt, a.model.seed);
    ro.threshold = a.threshold;
    let est = reachable_dimension(system, &p, &ro)?;
    if let Some(path) = &a.csv {
        let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(system, &est.endpoints, std::io::BufWriter::new(f))?;
    }
    let doc = ReachDoc {
        schema: SCHEMA,
        command: "reach",
        system: system.name().into(),
        options: ro,
        inputs: system.inputs().generators().iter().map(|g| g.label.clone()).collect(),
        q: system
            .chart()
            .coords()
            .iter()
            .map(|s| (s.name().to_string(), p.base.get(s).unwrap_or(f64::NAN)))
            .collect(),
        v: p.velocity.clone(),
        dim_tq: est.dim_tq,
        dim_q: est.dim_q,
        dropped: est.dropped,
    };
    let out = match a.model.format {
        Format::Json => to_json(&doc),
        Format::Text => format!(
            "{}: reachable set dimension {} in TQ, {} in Q ({} samples, {} dropped)\n",
            doc.system, doc.dim_tq, doc.dim_q, ro.samples, doc.dropped
        ),
    };
    Ok((EXIT_OK, out))
}

fn cmd_models(action: &ModelsAction) -> anyhow::Result<(i32, String)> {
    match action {
        ModelsAction::List => {
            let mut s = String::new();
            for d in catalog() {
                let p: Vec<String> = d.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(s, "{:<14} {} [{}]", d.name, d.summary, p.join(", "));
            }
            Ok((EXIT_OK, s))
        }
        ModelsAction::Export { name } => {
            let d = by_name(name).map_err(|e| input_err(e.to_string()))?;
            let system = d.build_default()?;
            Ok((EXIT_OK, ModelFile::export(&system).to_toml()))
        }
    }
}
