//! The `powerdex` command line.
//!
//! Each `cmd_*` function loads its inputs, calls the library and returns the
//! JSON report text; `main` only parses arguments, writes the output and
//! maps [`CliError`] to the process exit code.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use powerdex::converse::{ConverseSystem, EngineOracle};
use powerdex::interaction::{interact, InteractionScheme};
use powerdex::io::{self, ModelSpec};
use powerdex::oracle::{brute_expectation, CoalitionTable, OracleBudget};
use powerdex::{
    attribute_all, Coalition, Error, FeatureSpace, Instance, Model, ProductDistribution, Rational, Scheme,
    SimpleWeights,
};
use serde_json::{json, Value};

pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_SCHEME: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Where an error surfaced; decides its exit code.
#[derive(Debug, Clone, Copy)]
enum Stage {
    Input,
    Scheme,
    Compute,
}

fn fail(stage: Stage, what: &str) -> impl Fn(Error) -> CliError + '_ {
    move |err| {
        let code = match (&err, stage) {
            (Error::BudgetExceeded(_), _) => EXIT_BUDGET,
            (Error::Schema(_) | Error::ParseRational(_), _) => EXIT_SCHEMA,
            (_, Stage::Input) => EXIT_SCHEMA,
            (Error::UnknownFeature(_), _) => EXIT_SCHEMA,
            (_, Stage::Scheme | Stage::Compute) => EXIT_SCHEME,
        };
        CliError::new(code, format!("{what}: {err}"))
    }
}

/// Inputs shared by the subcommands. Scheme and instance accept either
/// inline JSON or a path to a JSON file.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub model: PathBuf,
    pub dist: Option<PathBuf>,
    pub from_csv: Option<PathBuf>,
    pub instance: Option<String>,
    pub scheme: Option<String>,
    pub set: Vec<String>,
    pub diag: bool,
}

fn read(path: &Path, what: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new(EXIT_SCHEMA, format!("{what} `{}`: {e}", path.display())))
}

fn inline_or_file(arg: &str, what: &str) -> Result<String, CliError> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        read(Path::new(arg), what)
    }
}

fn load_model(cfg: &RunConfig) -> Result<ModelSpec, CliError> {
    let text = read(&cfg.model, "model")?;
    io::parse_model(&text).map_err(fail(Stage::Input, "model"))
}

fn load_distribution(cfg: &RunConfig, space: &Arc<FeatureSpace>) -> Result<ProductDistribution, CliError> {
    match (&cfg.dist, &cfg.from_csv) {
        (Some(path), None) => {
            io::parse_distribution(&read(path, "distribution")?, space).map_err(fail(Stage::Input, "distribution"))
        }
        (None, Some(path)) => {
            let file = fs::File::open(path)
                .map_err(|e| CliError::new(EXIT_SCHEMA, format!("csv `{}`: {e}", path.display())))?;
            io::ingest_csv(file, space).map_err(fail(Stage::Input, "csv"))
        }
        _ => Err(CliError::new(EXIT_SCHEMA, "give exactly one of --dist and --from-csv")),
    }
}

fn load_instance(cfg: &RunConfig, space: &Arc<FeatureSpace>) -> Result<Instance, CliError> {
    let arg = cfg
        .instance
        .as_deref()
        .ok_or_else(|| CliError::new(EXIT_SCHEMA, "--instance is required"))?;
    io::parse_instance(&inline_or_file(arg, "instance")?, space).map_err(fail(Stage::Input, "instance"))
}

fn scheme_text(cfg: &RunConfig) -> Result<String, CliError> {
    let arg = cfg
        .scheme
        .as_deref()
        .ok_or_else(|| CliError::new(EXIT_SCHEMA, "--scheme is required"))?;
    inline_or_file(arg, "scheme")
}

fn load_scheme(cfg: &RunConfig, n: usize) -> Result<Scheme, CliError> {
    io::parse_scheme(&scheme_text(cfg)?, n).map_err(fail(Stage::Scheme, "scheme"))
}

fn load_set(cfg: &RunConfig, space: &FeatureSpace) -> Result<Coalition, CliError> {
    if cfg.set.is_empty() {
        return Err(CliError::new(EXIT_SCHEMA, "--set needs at least one feature name"));
    }
    let mut set = Coalition::empty();
    for name in &cfg.set {
        let i = space.index_of(name.trim()).map_err(fail(Stage::Input, "set"))?;
        if set.contains(i) {
            return Err(CliError::new(
                EXIT_SCHEMA,
                format!("set: feature `{name}` listed twice"),
            ));
        }
        set.insert(i);
    }
    Ok(set)
}

fn render(v: &Value) -> String {
    io::to_pretty(v)
}

fn simple_weights(scheme: &Scheme, n: usize) -> Option<SimpleWeights> {
    match scheme {
        Scheme::Preset(p) => p.weights(n).ok(),
        Scheme::Simple(w) => Some(w.clone()),
        Scheme::Bernoulli(_) => None,
    }
}

/// Index values for every feature.
pub fn cmd_attribute(cfg: &RunConfig) -> Result<String, CliError> {
    let model = load_model(cfg)?;
    let space = model.space().clone();
    let dist = load_distribution(cfg, &space)?;
    let e = load_instance(cfg, &space)?;
    let scheme = load_scheme(cfg, space.n())?;
    let report = attribute_all(&model, &dist, &e, &scheme).map_err(fail(Stage::Compute, "attribute"))?;
    Ok(render(&io::attribution_json(&report, &space, cfg.diag)))
}

/// The interaction index of the set given by `--set`.
pub fn cmd_interact(cfg: &RunConfig) -> Result<String, CliError> {
    let model = load_model(cfg)?;
    let space = model.space().clone();
    let dist = load_distribution(cfg, &space)?;
    let e = load_instance(cfg, &space)?;
    let set = load_set(cfg, &space)?;
    let scheme = io::parse_interaction_scheme(&scheme_text(cfg)?, space.n()).map_err(fail(Stage::Scheme, "scheme"))?;
    let report = interact(&model, &dist, &e, &set, &scheme).map_err(fail(Stage::Compute, "interact"))?;
    let members: Vec<usize> = set.iter().collect();
    Ok(render(&io::interaction_json(&report, &space, &members, cfg.diag)))
}

/// Outcome of an oracle comparison: the report, and whether everything matched.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub report: String,
    pub pass: bool,
}

fn check_entry(quantity: String, fast: &Rational, oracle: &Rational) -> Value {
    json!({
        "quantity": quantity,
        "fast": io::rational_json(fast),
        "oracle": io::rational_json(oracle),
        "equal": fast == oracle,
    })
}

/// Fast paths against brute-force enumeration on one input.
pub fn cmd_oracle_check(cfg: &RunConfig) -> Result<CheckOutcome, CliError> {
    let model = load_model(cfg)?;
    let space = model.space().clone();
    let dist = load_distribution(cfg, &space)?;
    let e = load_instance(cfg, &space)?;
    let n = space.n();
    let text = scheme_text(cfg)?;
    let set = if cfg.set.is_empty() {
        None
    } else {
        Some(load_set(cfg, &space)?)
    };
    let scheme = io::parse_scheme(&text, n).map_err(fail(Stage::Scheme, "scheme"));
    let interaction = io::parse_interaction_scheme(&text, n).map_err(fail(Stage::Scheme, "scheme"));
    let scheme = match (&set, scheme, interaction) {
        (_, Ok(s), _) => Some(s),
        (Some(_), Err(_), Ok(_)) => None,
        (_, Err(err), _) => return Err(err),
    };
    OracleBudget::default()
        .check(&space)
        .map_err(fail(Stage::Compute, "oracle-check"))?;

    let table = CoalitionTable::enumerate(&model, &dist, &e).map_err(fail(Stage::Compute, "oracle"))?;
    let mut checks = Vec::new();
    let direct = model.expected_value(&dist).map_err(fail(Stage::Compute, "expected"))?;
    let brute = brute_expectation(&model, &dist).map_err(fail(Stage::Compute, "oracle"))?;
    checks.push(check_entry("E[F]".into(), &direct, &brute));

    if let Some(scheme) = &scheme {
        let report = attribute_all(&model, &dist, &e, scheme).map_err(fail(Stage::Compute, "attribute"))?;
        for (a, fast) in report.values.iter().enumerate() {
            let oracle = match scheme {
                Scheme::Bernoulli(w) => table.bernoulli_index(a, w),
                _ => table.simple_index(a, &simple_weights(scheme, n).expect("simple scheme")),
            }
            .map_err(fail(Stage::Compute, "oracle"))?;
            checks.push(check_entry(format!("I({})", space.feature(a).name()), fast, &oracle));
        }
    }
    if let Some(set) = &set {
        let ischeme: InteractionScheme =
            io::parse_interaction_scheme(&text, n).map_err(fail(Stage::Scheme, "scheme"))?;
        let fast = interact(&model, &dist, &e, set, &ischeme).map_err(fail(Stage::Compute, "interact"))?;
        let oracle = table
            .interaction_index(set, &ischeme)
            .map_err(fail(Stage::Compute, "oracle"))?;
        let names: Vec<&str> = set.iter().map(|i| space.feature(i).name()).collect();
        checks.push(check_entry(format!("I({{{}}})", names.join(",")), &fast.value, &oracle));
    }

    let pass = checks.iter().all(|c| c["equal"] == Value::Bool(true));
    let report = json!({ "checks": checks, "pass": pass });
    Ok(CheckOutcome {
        report: render(&report),
        pass,
    })
}

/// Recovers `E[F]` from the library's own indices and compares it with the
/// direct expectation.
pub fn cmd_converse(cfg: &RunConfig) -> Result<CheckOutcome, CliError> {
    let model = load_model(cfg)?;
    let space = model.space().clone();
    let dist = load_distribution(cfg, &space)?;
    let e = load_instance(cfg, &space)?;
    let n = space.n();
    let scheme = load_scheme(cfg, n)?;
    let weights = simple_weights(&scheme, n).ok_or_else(|| {
        CliError::new(
            EXIT_SCHEME,
            "scheme: the converse reduction needs cardinality weights, not a Bernoulli scheme",
        )
    })?;
    let top = model.evaluate(&e).map_err(fail(Stage::Compute, "evaluate"))?;
    let oracle = EngineOracle::new(&model, &e, weights.clone());
    let diag = ConverseSystem::new(weights)
        .recover_expectation(&oracle, &dist, &e, &top)
        .map_err(fail(Stage::Compute, "converse"))?;
    let direct = model.expected_value(&dist).map_err(fail(Stage::Compute, "expected"))?;
    let rationals = |xs: &[Rational]| Value::Array(xs.iter().map(io::rational_json).collect());

    let mut pass = diag.expectation == direct;
    let mut report = json!({
        "recovered": io::rational_json(&diag.expectation),
        "recovered_decimal": io::decimal(&diag.expectation),
        "direct": io::rational_json(&direct),
        "equal": diag.expectation == direct,
        "model_at_instance": io::rational_json(&diag.top),
        "nodes": rationals(&diag.nodes),
        "theta_samples": rationals(&diag.theta),
        "coalition_sums": rationals(&diag.coefficients),
    });
    if OracleBudget::default().check(&space).is_ok() {
        let table = CoalitionTable::enumerate(&model, &dist, &e).map_err(fail(Stage::Compute, "oracle"))?;
        let brute = table.coalition_sums();
        let matches = brute[..n] == diag.coefficients[..];
        pass &= matches;
        report["brute_coalition_sums"] = rationals(&brute);
        report["coalition_sums_match"] = Value::Bool(matches);
    }
    Ok(CheckOutcome {
        report: render(&report),
        pass,
    })
}

/// `E[F]` under the given distribution.
pub fn cmd_expected(cfg: &RunConfig) -> Result<String, CliError> {
    let model = load_model(cfg)?;
    let space = model.space().clone();
    let dist = load_distribution(cfg, &space)?;
    let value = model.expected_value(&dist).map_err(fail(Stage::Compute, "expected"))?;
    Ok(render(
        &json!({ "expected_value": io::rational_json(&value), "decimal": io::decimal(&value) }),
    ))
}

/// Empirical marginals from `--from-csv`, as a distribution file.
pub fn cmd_ingest(cfg: &RunConfig) -> Result<String, CliError> {
    let model = load_model(cfg)?;
    let space = model.space().clone();
    if cfg.dist.is_some() || cfg.from_csv.is_none() {
        return Err(CliError::new(EXIT_SCHEMA, "ingest reads --from-csv only"));
    }
    let dist = load_distribution(cfg, &space)?;
    Ok(render(&io::distribution_json(&dist)))
}

/// Applies `POWERDEX_THREADS` if set to a positive integer.
pub fn apply_thread_limit() -> Result<(), CliError> {
    match std::env::var("POWERDEX_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => {
                powerdex::exec::set_thread_limit(t);
                Ok(())
            }
            _ => Err(CliError::new(
                EXIT_SCHEMA,
                format!("POWERDEX_THREADS must be a positive integer, got `{v}`"),
            )),
        },
        Err(_) => Ok(()),
    }
}
