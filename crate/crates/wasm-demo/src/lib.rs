//! Browser bindings for the static demo in `www/`.
//!
//! Every export returns a JSON string; errors become JS exceptions carrying
//! the message. The plain functions are what the native tests exercise.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use contextuality::builtin::{builtin, BUILTINS};
use contextuality::connection::{edge_kernels, phi, ConnectionError, Tolerances};
use contextuality::document::parse_model;
use contextuality::fraction::contextual_fraction;
use contextuality::rational::{parse_rational, to_decimal, to_text};
use contextuality::report::{analyze, KernelSummary};
use contextuality::scenario::VertexId;
use contextuality::Rational;

pub fn builtin_names_json() -> String {
    json!(BUILTINS).to_string()
}

/// Full analysis of a builtin, or of a JSON model document when `name` is empty.
pub fn analyze_json(name: &str, document: &str) -> Result<String, String> {
    let (label, m) = if name.is_empty() {
        ("document", parse_model(document.as_bytes()).map_err(|e| e.to_string())?)
    } else {
        (name, builtin(name).map_err(|e| e.to_string())?)
    };
    Ok(analyze(label, &m, None, &Tolerances::default()).to_json())
}

/// NCF of `(1 - lambda) * first + lambda * second`.
pub fn mixture_json(first: &str, second: &str, lambda: &str) -> Result<String, String> {
    let a = builtin(first).map_err(|e| e.to_string())?;
    let b = builtin(second).map_err(|e| e.to_string())?;
    let lambda: Rational = parse_rational(lambda).map_err(|e| e.to_string())?;
    if lambda < Rational::from_integer(0.into()) || lambda > Rational::from_integer(1.into()) {
        return Err(format!("lambda must lie in [0, 1], got {}", to_text(&lambda)));
    }
    let m = a.mix(&b, &lambda).map_err(|e| e.to_string())?;
    let fr = contextual_fraction(&m).map_err(|e| e.to_string())?;
    Ok(json!({
        "lambda": to_text(&lambda),
        "ncf": to_text(&fr.ncf),
        "ncf_decimal": to_decimal(&fr.ncf, 12),
        "certified": fr.certified,
    })
    .to_string())
}

/// The kernel `K_{target <- source}` of a builtin and its orthogonal part.
pub fn edge_phi_json(name: &str, source: &str, target: &str) -> Result<String, String> {
    let m = builtin(name).map_err(|e| e.to_string())?;
    let s = VertexId::new(source).map_err(|e| e.to_string())?;
    let t = VertexId::new(target).map_err(|e| e.to_string())?;
    let (k, _) = edge_kernels(&m, &s, &t).map_err(|e| e.to_string())?;
    let phi_part: Value = match phi(&k, &Tolerances::default()) {
        Ok(q) => json!({
            "matrix": q.matrix.to_rows(),
            "det_sign": q.det_sign,
            "identity": q.is_identity(),
        }),
        Err(ConnectionError::SingularKernel { min_sigma, .. }) => json!({ "singular": true, "min_sigma": min_sigma }),
        Err(e) => return Err(e.to_string()),
    };
    Ok(json!({ "kernel": KernelSummary::from(&k), "phi": phi_part }).to_string())
}

/// Edges of a builtin's 1-skeleton as `[a, b]` pairs.
pub fn edges_json(name: &str) -> Result<String, String> {
    let m = builtin(name).map_err(|e| e.to_string())?;
    let edges: Vec<[String; 2]> = m
        .scenario()
        .one_skeleton()
        .edges()
        .into_iter()
        .map(|(a, b)| [a.to_string(), b.to_string()])
        .collect();
    Ok(json!(edges).to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn builtin_names() -> String {
    builtin_names_json()
}

#[wasm_bindgen]
pub fn analyze_model(name: &str, document: &str) -> Result<String, JsValue> {
    js(analyze_json(name, document))
}

#[wasm_bindgen]
pub fn mixture_ncf(first: &str, second: &str, lambda: &str) -> Result<String, JsValue> {
    js(mixture_json(first, second, lambda))
}

#[wasm_bindgen]
pub fn edge_phi(name: &str, source: &str, target: &str) -> Result<String, JsValue> {
    js(edge_phi_json(name, source, target))
}

#[wasm_bindgen]
pub fn edges(name: &str) -> Result<String, JsValue> {
    js(edges_json(name))
}
