//! JSON and CSV formats.
//!
//! Rationals travel as strings in the literal grammar of [`Rational`]; JSON
//! integers are also accepted on input, JSON floats never. Output objects
//! have sorted keys, and anything ordered by feature is an array in feature
//! index order.

use std::io::Read;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::distribution::ProductDistribution;
use crate::error::{Error, Result};
use crate::indices::{AttributionReport, BernoulliWeights, IndexPreset, Scheme, SimpleWeights};
use crate::interaction::{BernoulliInteractionWeights, InteractionReport, InteractionScheme, InteractionWeights};
use crate::models::{AdditiveModel, EnsembleModel, Model, TableModel, TreeModel, TreeNode};
use crate::rational::Rational;
use crate::space::{Feature, FeatureSpace, Instance};

/// Significant digits of the advisory decimal renderings.
pub const DECIMAL_DIGITS: usize = 12;

fn schema(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Schema(format!("{path}: {msg}"))
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Schema(format!("invalid JSON: {e}")))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(path, "expected a string"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(path, format!("missing field `{key}`")))
}

fn only_fields(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(path, format!("unexpected field `{k}`"))),
        None => Ok(()),
    }
}

pub fn rational_from_json(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::String(s) => s
            .parse()
            .map_err(|_| schema(path, format!("`{s}` is not a rational literal"))),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse()?),
        Value::Number(_) => Err(schema(
            path,
            "fractional JSON numbers are inexact; quote the value as a string",
        )),
        _ => Err(schema(path, "expected a rational string")),
    }
}

fn rationals(v: &Value, path: &str) -> Result<Vec<Rational>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| rational_from_json(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn rational_json(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn decimal(r: &Rational) -> String {
    r.to_decimal(DECIMAL_DIGITS)
}

fn rationals_json(rs: &[Rational]) -> Value {
    Value::Array(rs.iter().map(rational_json).collect())
}

fn decimals_json(rs: &[Rational]) -> Value {
    Value::Array(rs.iter().map(|r| Value::String(decimal(r))).collect())
}

/// A model as loaded from a file, kept in a form that can be written back.
#[derive(Debug, Clone)]
pub enum ModelSpec {
    Table(TableModel),
    Additive(AdditiveModel),
    Tree(TreeModel),
    Ensemble {
        parts: Vec<(Rational, Arc<ModelSpec>)>,
        model: EnsembleModel,
    },
}

impl ModelSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::Table(_) => "table",
            ModelSpec::Additive(_) => "additive",
            ModelSpec::Tree(_) => "tree",
            ModelSpec::Ensemble { .. } => "ensemble",
        }
    }

    fn inner(&self) -> &dyn Model {
        match self {
            ModelSpec::Table(m) => m,
            ModelSpec::Additive(m) => m,
            ModelSpec::Tree(m) => m,
            ModelSpec::Ensemble { model, .. } => model,
        }
    }

    pub fn ensemble(space: Arc<FeatureSpace>, parts: Vec<(Rational, Arc<ModelSpec>)>) -> Result<Self> {
        let components = parts
            .iter()
            .map(|(w, m)| (w.clone(), m.clone() as Arc<dyn Model>))
            .collect();
        let model = EnsembleModel::new(space, components)?;
        Ok(ModelSpec::Ensemble { parts, model })
    }
}

impl Model for ModelSpec {
    fn space(&self) -> &Arc<FeatureSpace> {
        self.inner().space()
    }

    fn evaluate(&self, point: &Instance) -> Result<Rational> {
        self.inner().evaluate(point)
    }

    fn expected_value(&self, dist: &ProductDistribution) -> Result<Rational> {
        self.inner().expected_value(dist)
    }
}

fn parse_space(v: &Value) -> Result<Arc<FeatureSpace>> {
    let obj = object(v, "space")?;
    only_fields(obj, &["features"], "space")?;
    let list = array(field(obj, "features", "space")?, "space.features")?;
    let mut features = Vec::with_capacity(list.len());
    for (i, f) in list.iter().enumerate() {
        let path = format!("space.features[{i}]");
        let fo = object(f, &path)?;
        only_fields(fo, &["name", "values"], &path)?;
        let name = string(field(fo, "name", &path)?, &format!("{path}.name"))?;
        let values = array(field(fo, "values", &path)?, &format!("{path}.values"))?
            .iter()
            .enumerate()
            .map(|(j, x)| match x {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
                _ => Err(schema(&format!("{path}.values[{j}]"), "expected a string")),
            })
            .collect::<Result<Vec<_>>>()?;
        features.push(Feature::new(name, values));
    }
    Ok(Arc::new(FeatureSpace::new(features)?))
}

fn space_json(space: &FeatureSpace) -> Value {
    let features: Vec<Value> = space
        .features()
        .iter()
        .map(|f| json!({"name": f.name(), "values": f.values()}))
        .collect();
    json!({ "features": features })
}

fn parse_model_body(v: &Value, space: &Arc<FeatureSpace>, path: &str) -> Result<ModelSpec> {
    let obj = object(v, path)?;
    let kind = string(field(obj, "type", path)?, &format!("{path}.type"))?;
    match kind {
        "table" => {
            only_fields(obj, &["type", "outputs"], path)?;
            let outputs = rationals(field(obj, "outputs", path)?, &format!("{path}.outputs"))?;
            Ok(ModelSpec::Table(TableModel::new(space.clone(), outputs)?))
        }
        "additive" => {
            only_fields(obj, &["type", "bias", "terms"], path)?;
            let bias = match obj.get("bias") {
                Some(b) => rational_from_json(b, &format!("{path}.bias"))?,
                None => Rational::zero(),
            };
            let mut terms: Vec<Vec<Rational>> = (0..space.n())
                .map(|i| vec![Rational::zero(); space.domain_size(i)])
                .collect();
            if let Some(t) = obj.get("terms") {
                let tpath = format!("{path}.terms");
                for (name, values) in object(t, &tpath)? {
                    let i = space.index_of(name)?;
                    let vpath = format!("{tpath}.{name}");
                    let vo = object(values, &vpath)?;
                    let feature = space.feature(i);
                    if vo.len() != feature.domain_size() {
                        return Err(schema(
                            &vpath,
                            "give a term for every domain value, or omit the feature",
                        ));
                    }
                    for (token, x) in vo {
                        let v = feature.value_index(token).ok_or_else(|| Error::UnknownValue {
                            feature: name.clone(),
                            value: token.clone(),
                        })?;
                        terms[i][v] = rational_from_json(x, &format!("{vpath}.{token}"))?;
                    }
                }
            }
            Ok(ModelSpec::Additive(AdditiveModel::new(space.clone(), bias, terms)?))
        }
        "tree" => {
            only_fields(obj, &["type", "root"], path)?;
            let root = parse_tree_node(field(obj, "root", path)?, space, &format!("{path}.root"))?;
            Ok(ModelSpec::Tree(TreeModel::new(space.clone(), root)?))
        }
        "ensemble" => {
            only_fields(obj, &["type", "components"], path)?;
            let cpath = format!("{path}.components");
            let mut parts = Vec::new();
            for (i, c) in array(field(obj, "components", path)?, &cpath)?.iter().enumerate() {
                let p = format!("{cpath}[{i}]");
                let co = object(c, &p)?;
                only_fields(co, &["weight", "model"], &p)?;
                let w = rational_from_json(field(co, "weight", &p)?, &format!("{p}.weight"))?;
                let m = parse_model_body(field(co, "model", &p)?, space, &format!("{p}.model"))?;
                parts.push((w, Arc::new(m)));
            }
            ModelSpec::ensemble(space.clone(), parts)
        }
        other => Err(schema(
            &format!("{path}.type"),
            format!("unknown model type `{other}` (expected table, additive, tree or ensemble)"),
        )),
    }
}

fn parse_tree_node(v: &Value, space: &FeatureSpace, path: &str) -> Result<TreeNode> {
    let obj = object(v, path)?;
    if let Some(leaf) = obj.get("leaf") {
        only_fields(obj, &["leaf"], path)?;
        return Ok(TreeNode::leaf(rational_from_json(leaf, &format!("{path}.leaf"))?));
    }
    only_fields(obj, &["feature", "children"], path)?;
    let name = string(field(obj, "feature", path)?, &format!("{path}.feature"))?;
    let i = space.index_of(name)?;
    let feature = space.feature(i);
    let cpath = format!("{path}.children");
    let children = object(field(obj, "children", path)?, &cpath)?;
    if let Some(token) = children.keys().find(|t| feature.value_index(t).is_none()) {
        return Err(Error::UnknownValue {
            feature: name.to_string(),
            value: token.clone(),
        });
    }
    feature
        .values()
        .iter()
        .map(|token| {
            let child = children
                .get(token)
                .ok_or_else(|| schema(&cpath, format!("no child for value `{token}` of `{name}`")))?;
            parse_tree_node(child, space, &format!("{cpath}.{token}"))
        })
        .collect::<Result<Vec<_>>>()
        .map(|kids| TreeNode::split(i, kids))
}

fn tree_node_json(node: &TreeNode, space: &FeatureSpace) -> Value {
    match node {
        TreeNode::Leaf(v) => json!({ "leaf": rational_json(v) }),
        TreeNode::Split { feature, children } => {
            let f = space.feature(*feature);
            let kids: Map<String, Value> = f
                .values()
                .iter()
                .zip(children)
                .map(|(token, c)| (token.clone(), tree_node_json(c, space)))
                .collect();
            json!({ "feature": f.name(), "children": kids })
        }
    }
}

fn model_body_json(spec: &ModelSpec) -> Value {
    match spec {
        ModelSpec::Table(m) => json!({ "type": "table", "outputs": rationals_json(m.outputs()) }),
        ModelSpec::Additive(m) => {
            let space = m.space();
            let terms: Map<String, Value> = m
                .terms()
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let f = space.feature(i);
                    let values: Map<String, Value> = f
                        .values()
                        .iter()
                        .zip(t)
                        .map(|(tok, x)| (tok.clone(), rational_json(x)))
                        .collect();
                    (f.name().to_string(), Value::Object(values))
                })
                .collect();
            json!({ "type": "additive", "bias": rational_json(m.bias()), "terms": terms })
        }
        ModelSpec::Tree(m) => json!({ "type": "tree", "root": tree_node_json(m.root(), m.space()) }),
        ModelSpec::Ensemble { parts, .. } => {
            let components: Vec<Value> = parts
                .iter()
                .map(|(w, p)| json!({ "weight": rational_json(w), "model": model_body_json(p) }))
                .collect();
            json!({ "type": "ensemble", "components": components })
        }
    }
}

/// `{"space": {...}, "model": {"type": ..., ...}}`.
pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let doc = parse_json(text)?;
    let obj = object(&doc, "document")?;
    only_fields(obj, &["space", "model"], "document")?;
    let space = parse_space(field(obj, "space", "document")?)?;
    parse_model_body(field(obj, "model", "document")?, &space, "model")
}

pub fn model_json(spec: &ModelSpec) -> Value {
    json!({ "space": space_json(spec.space()), "model": model_body_json(spec) })
}

/// `{"marginals": {feature: {value: p}}}`. Every feature must appear;
/// values left out have probability zero.
pub fn parse_distribution(text: &str, space: &Arc<FeatureSpace>) -> Result<ProductDistribution> {
    let doc = parse_json(text)?;
    let obj = object(&doc, "distribution")?;
    only_fields(obj, &["marginals"], "distribution")?;
    let given = object(field(obj, "marginals", "distribution")?, "marginals")?;
    if let Some(name) = given.keys().find(|k| space.index_of(k).is_err()) {
        return Err(Error::UnknownFeature(name.clone()));
    }
    let marginals = space
        .features()
        .iter()
        .map(|f| {
            let path = format!("marginals.{}", f.name());
            let m = object(
                given
                    .get(f.name())
                    .ok_or_else(|| schema("marginals", format!("missing feature `{}`", f.name())))?,
                &path,
            )?;
            let mut probs = vec![Rational::zero(); f.domain_size()];
            for (token, p) in m {
                let v = f.value_index(token).ok_or_else(|| Error::UnknownValue {
                    feature: f.name().to_string(),
                    value: token.clone(),
                })?;
                probs[v] = rational_from_json(p, &format!("{path}.{token}"))?;
            }
            Ok(probs)
        })
        .collect::<Result<Vec<_>>>()?;
    ProductDistribution::new(space.clone(), marginals)
}

pub fn distribution_json(dist: &ProductDistribution) -> Value {
    let space = dist.space();
    let marginals: Map<String, Value> = space
        .features()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let m: Map<String, Value> = f
                .values()
                .iter()
                .zip(dist.marginal(i))
                .map(|(tok, p)| (tok.clone(), rational_json(p)))
                .collect();
            (f.name().to_string(), Value::Object(m))
        })
        .collect();
    json!({ "marginals": marginals })
}

/// `{feature: value}` covering every feature.
pub fn parse_instance(text: &str, space: &Arc<FeatureSpace>) -> Result<Instance> {
    let doc = parse_json(text)?;
    let obj = object(&doc, "instance")?;
    if let Some(name) = obj.keys().find(|k| space.index_of(k).is_err()) {
        return Err(Error::UnknownFeature(name.clone()));
    }
    let tokens = space
        .features()
        .iter()
        .map(|f| {
            let path = format!("instance.{}", f.name());
            match obj.get(f.name()) {
                Some(Value::String(s)) => Ok(s.clone()),
                Some(Value::Number(n)) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
                Some(_) => Err(schema(&path, "expected a domain value")),
                None => Err(schema("instance", format!("missing feature `{}`", f.name()))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::from_tokens(space.clone(), &tokens)
}

pub fn instance_json(e: &Instance) -> Value {
    let obj: Map<String, Value> = e
        .space()
        .features()
        .iter()
        .zip(e.tokens())
        .map(|(f, t)| (f.name().to_string(), Value::String(t.to_string())))
        .collect();
    Value::Object(obj)
}

fn parse_preset(obj: &Map<String, Value>) -> Result<IndexPreset> {
    only_fields(obj, &["preset", "theta"], "scheme")?;
    let name = string(field(obj, "preset", "scheme")?, "scheme.preset")?;
    let theta = obj.get("theta");
    if theta.is_some() && name != "binomial" {
        return Err(schema("scheme.theta", format!("preset `{name}` takes no theta")));
    }
    Ok(match name {
        "shapley" => IndexPreset::Shapley,
        "banzhaf" => IndexPreset::Banzhaf,
        "dictatorial" => IndexPreset::Dictatorial,
        "marginal" => IndexPreset::Marginal,
        "binomial" => {
            let t = theta.ok_or_else(|| schema("scheme", "preset `binomial` needs `theta`"))?;
            IndexPreset::Binomial(rational_from_json(t, "scheme.theta")?)
        }
        other => {
            return Err(schema(
                "scheme.preset",
                format!("unknown preset `{other}` (expected shapley, banzhaf, binomial, dictatorial or marginal)"),
            ))
        }
    })
}

fn parse_theta(v: &Value, n: usize) -> Result<Vec<Rational>> {
    let bo = object(v, "scheme.bernoulli")?;
    only_fields(bo, &["theta"], "scheme.bernoulli")?;
    let t = field(bo, "theta", "scheme.bernoulli")?;
    if t.is_array() {
        rationals(t, "scheme.bernoulli.theta")
    } else {
        Ok(vec![rational_from_json(t, "scheme.bernoulli.theta")?; n])
    }
}

/// Single-feature scheme descriptors:
/// `{"preset": "shapley"}`, `{"preset": "binomial", "theta": "1/3"}`,
/// `{"q": [...]}` and `{"bernoulli": {"theta": [...] | "p"}}`.
/// Presets and weights are validated against `n`.
pub fn parse_scheme(text: &str, n: usize) -> Result<Scheme> {
    let doc = parse_json(text)?;
    scheme_from_value(&doc, n)
}

pub fn scheme_from_value(doc: &Value, n: usize) -> Result<Scheme> {
    let obj = object(doc, "scheme")?;
    if obj.contains_key("preset") {
        let preset = parse_preset(obj)?;
        preset.weights(n)?;
        Ok(Scheme::Preset(preset))
    } else if let Some(q) = obj.get("q") {
        only_fields(obj, &["q"], "scheme")?;
        Ok(Scheme::Simple(SimpleWeights::new(n, rationals(q, "scheme.q")?)?))
    } else if let Some(b) = obj.get("bernoulli") {
        only_fields(obj, &["bernoulli"], "scheme")?;
        let theta = parse_theta(b, n)?;
        if theta.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: theta.len(),
            });
        }
        Ok(Scheme::Bernoulli(BernoulliWeights::new(theta)?))
    } else {
        Err(schema("scheme", "expected one of `preset`, `q`, `bernoulli`"))
    }
}

pub fn scheme_json(scheme: &Scheme) -> Value {
    match scheme {
        Scheme::Preset(IndexPreset::Binomial(t)) => json!({ "preset": "binomial", "theta": rational_json(t) }),
        Scheme::Preset(p) => json!({ "preset": p.name() }),
        Scheme::Simple(w) => json!({ "q": rationals_json(w.q()) }),
        Scheme::Bernoulli(w) => json!({ "bernoulli": { "theta": rationals_json(w.theta()) } }),
    }
}

/// Interaction scheme descriptors: the presets, `{"q": {"m": 2, "values": [...]}}`
/// (a plain `{"q": [...]}` is the `m = 1` row) and `{"bernoulli": ...}`.
pub fn parse_interaction_scheme(text: &str, n: usize) -> Result<InteractionScheme> {
    let doc = parse_json(text)?;
    let obj = object(&doc, "scheme")?;
    if obj.contains_key("preset") {
        Ok(InteractionScheme::Simple(InteractionWeights::preset(
            &parse_preset(obj)?,
            n,
        )?))
    } else if let Some(q) = obj.get("q") {
        only_fields(obj, &["q"], "scheme")?;
        let (m, values) = match q {
            Value::Array(_) => (1, rationals(q, "scheme.q")?),
            _ => {
                let qo = object(q, "scheme.q")?;
                only_fields(qo, &["m", "values"], "scheme.q")?;
                let m = field(qo, "m", "scheme.q")?
                    .as_u64()
                    .ok_or_else(|| schema("scheme.q.m", "expected a positive integer"))?;
                (
                    m as usize,
                    rationals(field(qo, "values", "scheme.q")?, "scheme.q.values")?,
                )
            }
        };
        Ok(InteractionScheme::Simple(
            InteractionWeights::empty(n).with_row(m, values)?,
        ))
    } else if let Some(b) = obj.get("bernoulli") {
        only_fields(obj, &["bernoulli"], "scheme")?;
        let theta = parse_theta(b, n)?;
        if theta.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: theta.len(),
            });
        }
        Ok(InteractionScheme::Bernoulli(BernoulliInteractionWeights::new(theta)?))
    } else {
        Err(schema("scheme", "expected one of `preset`, `q`, `bernoulli`"))
    }
}

/// Empirical marginals from a CSV file with a header row of feature names.
/// Columns not naming a feature are ignored.
pub fn ingest_csv(reader: impl Read, space: &Arc<FeatureSpace>) -> Result<ProductDistribution> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Schema(format!("csv header: {e}")))?
        .clone();
    let columns = space
        .features()
        .iter()
        .map(|f| {
            header
                .iter()
                .position(|h| h == f.name())
                .ok_or_else(|| Error::Schema(format!("csv header has no column `{}`", f.name())))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts: Vec<Vec<u64>> = space.features().iter().map(|f| vec![0; f.domain_size()]).collect();
    let mut rows = 0u64;
    for (r, record) in rdr.records().enumerate() {
        let line = r + 2;
        let record = record.map_err(|e| Error::Schema(format!("csv line {line}: {e}")))?;
        for (i, &col) in columns.iter().enumerate() {
            let f = space.feature(i);
            let cell = record.get(col).unwrap_or("");
            let v = f.value_index(cell).ok_or_else(|| {
                Error::Schema(format!(
                    "csv line {line}, column `{}`: `{cell}` is not a declared value",
                    f.name()
                ))
            })?;
            counts[i][v] += 1;
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Schema("csv file has no data rows".into()));
    }
    let marginals = counts
        .into_iter()
        .map(|c| c.into_iter().map(|k| Rational::new(k, rows)).collect())
        .collect();
    ProductDistribution::new(space.clone(), marginals)
}

fn names(space: &FeatureSpace) -> Value {
    Value::Array(
        space
            .features()
            .iter()
            .map(|f| Value::String(f.name().to_string()))
            .collect(),
    )
}

pub fn attribution_json(report: &AttributionReport, space: &FeatureSpace, diagnostics: bool) -> Value {
    let mut out = json!({
        "features": names(space),
        "scheme": scheme_json(&report.scheme),
        "path": report.path.as_str(),
        "values": rationals_json(&report.values),
        "decimals": decimals_json(&report.values),
        "engine_calls": report.engine_calls,
        "calls_per_feature": report.calls_per_feature,
    });
    if diagnostics {
        if let Some(c) = &report.coefficients {
            let rows: Vec<Value> = c.iter().map(|row| rationals_json(row)).collect();
            out["coalition_size_sums"] = Value::Array(rows);
        }
    }
    out
}

pub fn interaction_json(report: &InteractionReport, space: &FeatureSpace, set: &[usize], diagnostics: bool) -> Value {
    let members: Vec<Value> = set
        .iter()
        .map(|&i| Value::String(space.feature(i).name().to_string()))
        .collect();
    let mut out = json!({
        "set": members,
        "path": report.path.as_str(),
        "value": rational_json(&report.value),
        "decimal": decimal(&report.value),
        "engine_calls": report.engine_calls,
    });
    if diagnostics {
        if let Some(c) = &report.coefficients {
            let rows: Vec<Value> = c.iter().map(|row| rationals_json(row)).collect();
            out["grid_coefficients"] = Value::Array(rows);
        }
    }
    out
}

/// Deterministic pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}
