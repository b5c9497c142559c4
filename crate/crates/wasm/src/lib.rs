//! Browser bindings. Every export takes and returns JSON text in the same
//! formats as the command-line tool; errors come back as plain messages.

use std::sync::Arc;

use powerdex::converse::{ConverseSystem, EngineOracle};
use powerdex::interaction::interact;
use powerdex::io::{self, ModelSpec};
use powerdex::{attribute_all, gen, Coalition, FeatureSpace, Model, Scheme};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest feature count the example generator accepts.
const MAX_EXAMPLE_FEATURES: usize = 8;

struct Inputs {
    model: ModelSpec,
    space: Arc<FeatureSpace>,
    dist: powerdex::ProductDistribution,
    instance: powerdex::Instance,
}

fn err(e: powerdex::Error) -> String {
    e.to_string()
}

fn load(model: &str, dist: &str, instance: &str) -> Result<Inputs, String> {
    let model = io::parse_model(model).map_err(|e| format!("model: {e}"))?;
    let space = model.space().clone();
    let dist = io::parse_distribution(dist, &space).map_err(|e| format!("distribution: {e}"))?;
    let instance = io::parse_instance(instance, &space).map_err(|e| format!("instance: {e}"))?;
    Ok(Inputs {
        model,
        space,
        dist,
        instance,
    })
}

fn render(v: &Value) -> String {
    io::to_pretty(v)
}

/// A random tree with its distribution and instance, as one JSON object
/// with `model`, `distribution` and `instance` members.
pub fn example(seed: u64, features: usize) -> Result<String, String> {
    if !(1..=MAX_EXAMPLE_FEATURES).contains(&features) {
        return Err(format!("feature count must be between 1 and {MAX_EXAMPLE_FEATURES}"));
    }
    let mut rng = gen::rng(seed);
    let fx = gen::fixture(&mut rng, features..=features, 2..=3);
    Ok(render(&json!({
        "model": io::model_json(&ModelSpec::Tree(fx.model)),
        "distribution": io::distribution_json(&fx.dist),
        "instance": io::instance_json(&fx.instance),
    })))
}

/// Index of every feature; same report as `powerdex attribute`.
pub fn attribute(model: &str, dist: &str, instance: &str, scheme: &str) -> Result<String, String> {
    let inp = load(model, dist, instance)?;
    let scheme = io::parse_scheme(scheme, inp.space.n()).map_err(|e| format!("scheme: {e}"))?;
    let report = attribute_all(&inp.model, &inp.dist, &inp.instance, &scheme).map_err(err)?;
    let mut v = io::attribution_json(&report, &inp.space, false);
    v["expected_value"] = io::rational_json(&inp.model.expected_value(&inp.dist).map_err(err)?);
    v["model_at_instance"] = io::rational_json(&inp.model.evaluate(&inp.instance).map_err(err)?);
    Ok(render(&v))
}

/// Interaction index of the comma-separated feature names in `set`.
pub fn interaction(model: &str, dist: &str, instance: &str, scheme: &str, set: &str) -> Result<String, String> {
    let inp = load(model, dist, instance)?;
    let mut members = Vec::new();
    for name in set.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        members.push(inp.space.index_of(name).map_err(|e| format!("set: {e}"))?);
    }
    if members.is_empty() {
        return Err("set: choose at least one feature".into());
    }
    members.sort_unstable();
    members.dedup();
    let coalition = members.iter().fold(Coalition::empty(), |c, &i| c.with(i));
    let scheme = io::parse_interaction_scheme(scheme, inp.space.n()).map_err(|e| format!("scheme: {e}"))?;
    let report = interact(&inp.model, &inp.dist, &inp.instance, &coalition, &scheme).map_err(err)?;
    Ok(render(&io::interaction_json(&report, &inp.space, &members, false)))
}

/// Recovers `E[F]` from index values alone and reports it next to the
/// directly computed value.
pub fn converse(model: &str, dist: &str, instance: &str, scheme: &str) -> Result<String, String> {
    let inp = load(model, dist, instance)?;
    let n = inp.space.n();
    let weights = match io::parse_scheme(scheme, n).map_err(|e| format!("scheme: {e}"))? {
        Scheme::Preset(p) => p.weights(n).map_err(err)?,
        Scheme::Simple(w) => w,
        Scheme::Bernoulli(_) => return Err("scheme: recovery needs cardinality weights".into()),
    };
    let top = inp.model.evaluate(&inp.instance).map_err(err)?;
    let oracle = EngineOracle::new(&inp.model, &inp.instance, weights.clone());
    let diag = ConverseSystem::new(weights)
        .recover_expectation(&oracle, &inp.dist, &inp.instance, &top)
        .map_err(err)?;
    let direct = inp.model.expected_value(&inp.dist).map_err(err)?;
    Ok(render(&json!({
        "recovered": io::rational_json(&diag.expectation),
        "recovered_decimal": io::decimal(&diag.expectation),
        "direct": io::rational_json(&direct),
        "equal": diag.expectation == direct,
        "theta_samples": diag.theta.iter().map(io::rational_json).collect::<Vec<_>>(),
    })))
}

#[wasm_bindgen(js_name = example)]
pub fn example_js(seed: u32, features: u32) -> Result<String, JsValue> {
    example(seed as u64, features as usize).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = attribute)]
pub fn attribute_js(model: &str, dist: &str, instance: &str, scheme: &str) -> Result<String, JsValue> {
    attribute(model, dist, instance, scheme).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = interaction)]
pub fn interaction_js(model: &str, dist: &str, instance: &str, scheme: &str, set: &str) -> Result<String, JsValue> {
    interaction(model, dist, instance, scheme, set).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = converse)]
pub fn converse_js(model: &str, dist: &str, instance: &str, scheme: &str) -> Result<String, JsValue> {
    converse(model, dist, instance, scheme).map_err(|e| JsValue::from_str(&e))
}
