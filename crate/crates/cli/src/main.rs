//! `ihara`: zeta series, entropy and formal group law of a graph from the
//! command line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ihara_core::entropy::{
    entropy_measures, ihara_entropy, maximizer, shannon_entropy, tsallis_entropy, EntropyParams, FormalGroup,
    MeasureContext, ProbabilityDistribution, Scale,
};
use ihara_core::graph::{parse_edge_list_raw, validate_raw, Graph, RawEdgeList};
use ihara_core::line_graph::PowerIteration;
use ihara_core::primes::{enumerate_primes, euler_product_series, DEFAULT_DFS_BUDGET};
use ihara_core::zeta::{zeta_evaluators, ZetaModel, DEFAULT_EVALUATOR, DEFAULT_ORDER};
use ihara_core::Error;

const DFS_BUDGET_VAR: &str = "IHARA_MAX_DFS_STEPS";

/// Largest oriented-edge count for which `zeta` cross-checks against the
/// prime enumeration.
const EULER_CHECK_MAX_DIM: usize = 64;
const EULER_CHECK_MAX_ORDER: usize = 8;

const DEFAULT_LAW_DEGREE: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "ihara", version, about = "Ihara zeta function and Ihara entropy of a graph")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Edge-list file: one `u v` pair per line, `#` comments.
    #[arg(long, global = true)]
    graph: Option<PathBuf>,

    /// Truncation order N of the zeta series.
    #[arg(long, global = true, default_value_t = DEFAULT_ORDER)]
    order: usize,

    /// Absolute scale a, 0 < a < 1/lambda.
    #[arg(long, global = true, conflicts_with = "a_frac")]
    a: Option<f64>,

    /// Scale as a fraction of 1/lambda (default 0.5).
    #[arg(long = "a-frac", global = true)]
    a_frac: Option<f64>,

    /// Tolerance for the Perron root and the maximizer.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,

    /// How zeta and zeta' are evaluated on the real axis.
    #[arg(long, global = true, default_value = DEFAULT_EVALUATOR)]
    evaluator: String,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that the graph is admissible; exit 1 if it is not.
    Validate,
    /// Zeta coefficients c_0..c_N, lambda and a tail bound at the scale a.
    Zeta,
    /// Ihara entropy of a distribution with Shannon and Tsallis comparators.
    Entropy {
        #[arg(long)]
        dist: PathBuf,
        /// Tsallis index for the comparator.
        #[arg(long, default_value_t = 2.0)]
        q: f64,
    },
    /// Maximizer c of the entropy term s(p) = p G(log 1/p).
    Max,
    /// Prime cycles up to a length bound.
    Primes {
        #[arg(long = "max-length", default_value_t = 8)]
        max_length: usize,
    },
    /// Formal group logarithm, its inverse and the law Phi with axiom checks.
    GroupLaw {
        /// Total degree for Phi and its axiom checks (default: the smaller of
        /// N and 16; the exact associativity check grows quickly with degree).
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Every registered entropy measure on one distribution.
    Compare {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
    },
    /// List the registered zeta evaluators and entropy measures.
    Strategies,
}

/// Exit status classes.
enum Failure {
    /// Inadmissible graph or parameters outside the domain.
    Domain(anyhow::Error),
    /// Unreadable or malformed input.
    Input(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_domain_rejection() {
            Failure::Domain(e.into())
        } else {
            Failure::Input(e.into())
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<Error>() {
            Ok(core) => core.into(),
            Err(other) => Failure::Input(other),
        }
    }
}

type CmdResult = Result<Outcome, Failure>;

/// What a command prints and whether it counts as success.
struct Outcome {
    body: Value,
    /// Preformatted text output, when it differs from the generic rendering.
    text: Option<String>,
    ok: bool,
}

impl Outcome {
    fn ok(body: Value) -> Self {
        Self {
            body,
            text: None,
            ok: true,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli);
    match result {
        Ok(out) => {
            match (cli.run.format, out.text) {
                (Format::Text, Some(text)) => print!("{text}"),
                (Format::Text, None) => print!("{}", render_text(&out.body)),
                (Format::Json, _) => println!("{}", to_json(&out.body)),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    let cfg = &cli.run;
    match &cli.command {
        Command::Validate => cmd_validate(cfg),
        Command::Zeta => cmd_zeta(cfg),
        Command::Entropy { dist, q } => cmd_entropy(cfg, dist, *q),
        Command::Max => cmd_max(cfg),
        Command::Primes { max_length } => cmd_primes(cfg, *max_length),
        Command::GroupLaw { degree } => cmd_group_law(cfg, *degree),
        Command::Compare { dist, q } => cmd_compare(cfg, dist, *q),
        Command::Strategies => Ok(cmd_strategies()),
    }
}

fn read_file(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_raw_graph(cfg: &RunConfig) -> Result<RawEdgeList, Failure> {
    let path = cfg
        .graph
        .as_deref()
        .ok_or_else(|| Failure::Input(anyhow::anyhow!("--graph is required")))?;
    let text = read_file(path)?;
    let raw = parse_edge_list_raw(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(raw)
}

/// Reads the graph file and rejects anything inadmissible, including loops
/// and repeated edges.
fn load_graph(cfg: &RunConfig) -> Result<Graph, Failure> {
    let raw = read_raw_graph(cfg)?;
    let pairs = raw.pairs();
    let report = validate_raw(raw.vertex_count, &pairs)?;
    if !report.admissible {
        return Err(Error::NotAdmissible(report.violations).into());
    }
    Ok(Graph::new(raw.vertex_count, pairs)?)
}

fn power_iteration(cfg: &RunConfig) -> PowerIteration {
    PowerIteration {
        tol: cfg.tol,
        ..PowerIteration::default()
    }
}

fn load_model(cfg: &RunConfig) -> Result<Arc<ZetaModel>, Failure> {
    let graph = load_graph(cfg)?;
    if cfg.order == 0 {
        return Err(Error::InvalidParams("--order must be at least 1".into()).into());
    }
    Ok(Arc::new(ZetaModel::build(&graph, cfg.order, &power_iteration(cfg))?))
}

fn scale(cfg: &RunConfig) -> Scale {
    match (cfg.a, cfg.a_frac) {
        (Some(a), _) => Scale::Absolute(a),
        (None, Some(f)) => Scale::Fraction(f),
        (None, None) => Scale::default(),
    }
}

fn load_params(cfg: &RunConfig) -> Result<EntropyParams, Failure> {
    let model = load_model(cfg)?;
    Ok(EntropyParams::with_evaluator(model, scale(cfg), &cfg.evaluator)?)
}

fn load_distribution(path: &Path) -> Result<ProbabilityDistribution, Failure> {
    let text = read_file(path)?;
    ProbabilityDistribution::parse(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::Input)
}

fn dfs_budget() -> Result<u64, Failure> {
    match std::env::var(DFS_BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(anyhow::anyhow!("{DFS_BUDGET_VAR}={v:?} is not a nonnegative integer"))),
        Err(_) => Ok(DEFAULT_DFS_BUDGET),
    }
}

/// Rounds to 15 significant digits.
fn sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn cmd_validate(cfg: &RunConfig) -> CmdResult {
    let raw = read_raw_graph(cfg)?;
    let pairs = raw.pairs();
    let report = validate_raw(raw.vertex_count, &pairs)?;
    let ok = report.admissible;
    let mut body = serde_json::to_value(&report).expect("report serializes");
    body["vertices"] = json!(raw.vertex_count);
    body["edges"] = json!(pairs.len());
    Ok(Outcome { body, text: None, ok })
}

fn cmd_zeta(cfg: &RunConfig) -> CmdResult {
    let params = load_params(cfg)?;
    let model = params.model();
    let series = &model.series;
    let n = series.order();

    let euler = if n <= EULER_CHECK_MAX_ORDER && model.olg.dimension() <= EULER_CHECK_MAX_DIM {
        let primes = enumerate_primes(&model.olg, n, dfs_budget()?)?;
        let product = euler_product_series(&primes, n)?;
        if product == *series.coefficients() {
            "match"
        } else {
            "mismatch"
        }
    } else {
        "skipped"
    };

    let x = params.a();
    let at = series.eval(x)?;
    let body = json!({
        "lambda": sig15(series.lambda()),
        "N": n,
        "coefficients": series.coefficients().to_strings(),
        "checks": { "euler_product": euler },
        "tail_bound_at": {
            "x": sig15(x),
            "value": at.value,
            "tail_bound": at.truncation_bound,
            "error_bound": at.error_bound,
        },
    });
    let ok = euler != "mismatch";
    Ok(Outcome { body, text: None, ok })
}

fn cmd_entropy(cfg: &RunConfig, dist_path: &Path, q: f64) -> CmdResult {
    let params = load_params(cfg)?;
    let dist = load_distribution(dist_path)?;
    let report = ihara_entropy(&dist, &params)?;
    let max = maximizer(&params, cfg.tol)?;
    let tsallis = tsallis_entropy(&dist, q)?;
    Ok(Outcome::ok(json!({
        "S": report.entropy,
        "terms": report.terms,
        "a": sig15(report.a),
        "N": report.order,
        "lambda": sig15(report.lambda),
        "evaluator": report.evaluator,
        "maximizer_c": max.c,
        "comparators": {
            "shannon": shannon_entropy(&dist),
            "q": q,
            "tsallis_q": tsallis,
        },
    })))
}

fn cmd_max(cfg: &RunConfig) -> CmdResult {
    let params = load_params(cfg)?;
    let max = maximizer(&params, cfg.tol)?;
    let certified = max.h_at_c.abs() <= cfg.tol;
    let body = json!({
        "c": max.c,
        "h_at_c": max.h_at_c,
        "s_at_c": max.s_at_c,
        "h_at_0": max.h_at_0,
        "h_at_1": max.h_at_1,
        "iterations": max.iterations,
        "tol": cfg.tol,
        "certified": certified,
        "a": sig15(params.a()),
        "N": params.order(),
        "lambda": sig15(params.lambda()),
    });
    Ok(Outcome {
        body,
        text: None,
        ok: certified,
    })
}

#[derive(Serialize)]
struct PrimesBody {
    max_length: usize,
    count: usize,
    histogram: std::collections::BTreeMap<usize, usize>,
}

fn cmd_primes(cfg: &RunConfig, max_length: usize) -> CmdResult {
    let graph = load_graph(cfg)?;
    let olg = ihara_core::line_graph::OrientedLineGraph::build(ihara_core::graph::orientations(&graph)?);
    let primes = enumerate_primes(&olg, max_length, dfs_budget()?)?;
    let summary = PrimesBody {
        max_length,
        count: primes.cycles.len(),
        histogram: primes.histogram(),
    };
    let mut text = String::new();
    for p in &primes.cycles {
        let line: Vec<String> = p.edges().iter().map(usize::to_string).collect();
        writeln!(text, "{}", line.join(" ")).expect("write to string");
    }
    writeln!(text, "{}", serde_json::to_string(&summary).expect("summary serializes")).expect("write to string");

    let mut body = serde_json::to_value(&summary).expect("summary serializes");
    body["cycles"] = json!(primes.cycles.iter().map(|p| p.edges()).collect::<Vec<_>>());
    Ok(Outcome {
        body,
        text: Some(text),
        ok: true,
    })
}

fn cmd_group_law(cfg: &RunConfig, degree: Option<usize>) -> CmdResult {
    let params = load_params(cfg)?;
    let n = params.order();
    let degree = degree.unwrap_or(n.min(DEFAULT_LAW_DEGREE));
    if degree > n {
        return Err(Error::InvalidParams(format!("--degree {degree} exceeds --order {n}")).into());
    }
    let group = FormalGroup::new(&params, n)?;
    let inverse = group.log.compose(&group.exp)?.is_identity() && group.exp.compose(&group.log)?.is_identity();
    let law = group.law(degree)?;
    let checks = law.check_group_law(0.0);
    let phi: Vec<Vec<String>> = (0..=degree)
        .map(|i| (0..=degree - i).map(|j| law.coeff(i, j).to_string()).collect())
        .collect();
    let all = inverse && checks.all_pass();
    Ok(Outcome {
        body: json!({
            "a": sig15(params.a()),
            "a_exact": params.a_exact().to_string(),
            "N": n,
            "lambda": sig15(params.lambda()),
            "log": group.log.to_strings(),
            "exp": group.exp.to_strings(),
            "degree": degree,
            "phi": phi,
            "checks": {
                "inverse": verdict(inverse),
                "leading_linear": verdict(checks.leading_linear),
                "unit": verdict(checks.unit),
                "commutativity": verdict(checks.commutative),
                "associativity": verdict(checks.associative),
            },
        }),
        text: None,
        ok: all,
    })
}

fn cmd_compare(cfg: &RunConfig, dist_path: &Path, q: f64) -> CmdResult {
    let params = load_params(cfg)?;
    let dist = load_distribution(dist_path)?;
    let ctx = MeasureContext {
        params: Some(params),
        tsallis_q: q,
    };
    let registry = entropy_measures();
    let mut body = serde_json::Map::new();
    for name in registry.names() {
        let value = registry.create(name, &ctx)?.value(&dist)?;
        body.insert(name.to_string(), json!(value));
    }
    body.insert("q".into(), json!(q));
    Ok(Outcome::ok(Value::Object(body)))
}

fn cmd_strategies() -> Outcome {
    let describe = |items: Vec<(&str, &str)>| {
        items
            .into_iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect::<serde_json::Map<_, _>>()
    };
    Outcome::ok(json!({
        "zeta_evaluators": describe(zeta_evaluators().describe().collect()),
        "entropy_measures": describe(entropy_measures().describe().collect()),
    }))
}

fn to_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

/// `key: value` lines, nested objects flattened with dotted keys.
fn render_text(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, child, out);
                }
            }
            Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
                let parts: Vec<String> = items.iter().map(scalar).collect();
                writeln!(out, "{prefix}: {}", parts.join(" ")).expect("write to string");
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), child, out);
                }
            }
            other => writeln!(out, "{prefix}: {}", scalar(other)).expect("write to string"),
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}
