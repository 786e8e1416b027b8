//! JSON ensemble specs.
//!
//! ```text
//! {"type":"elliptic","mu":0.5,"sigma":1,"phi":0,"x":[0,0]}
//! {"type":"gue"} | {"type":"ginibre"}
//! {"type":"shift","x":[1,0],"of":…}
//! {"type":"scale","alpha":[0,1],"of":…}
//! {"type":"sum","terms":[…]}
//! {"type":"product","a":…,"b":…}
//! ```
//!
//! Complex numbers are `[re, im]` pairs or plain reals. For `elliptic` only
//! `mu` is required; `sigma`, `phi` and `x` default to 1, 0 and 0.

use qfree::ensembles::EnsembleSpec;
use qfree::laws::EllipticLaw;
use qfree::C64;
use serde_json::{Map, Value};

/// A spec error located by a JSON path such as `$.a.of.mu`.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct SpecError {
    pub path: String,
    pub message: String,
}

fn err<T>(path: &str, message: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError { path: path.to_string(), message: message.into() })
}

pub fn parse_spec(text: &str) -> Result<EnsembleSpec, SpecError> {
    let v: Value = serde_json::from_str(text).or_else(|e| err("$", format!("invalid JSON: {e}")))?;
    parse_node(&v, "$")
}

const TYPES: &str = "elliptic, gue, ginibre, shift, scale, sum, product";

pub fn parse_node(v: &Value, path: &str) -> Result<EnsembleSpec, SpecError> {
    let Some(obj) = v.as_object() else {
        return err(path, "expected an object");
    };
    let ty = match obj.get("type") {
        Some(Value::String(s)) => s.as_str(),
        Some(_) => return err(&format!("{path}.type"), "expected a string"),
        None => return err(path, "missing field \"type\""),
    };
    let allowed: &[&str] = match ty {
        "elliptic" => &["type", "mu", "sigma", "phi", "x"],
        "gue" | "ginibre" => &["type"],
        "shift" => &["type", "x", "of"],
        "scale" => &["type", "alpha", "of"],
        "sum" => &["type", "terms"],
        "product" => &["type", "a", "b"],
        other => return err(&format!("{path}.type"), format!("unknown type {other:?} (expected one of {TYPES})")),
    };
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return err(&format!("{path}.{k}"), format!("unknown field for type {ty:?}"));
    }
    let child = |key: &str| -> Result<EnsembleSpec, SpecError> {
        let p = format!("{path}.{key}");
        match obj.get(key) {
            Some(c) => parse_node(c, &p),
            None => err(path, format!("missing field {key:?}")),
        }
    };
    match ty {
        "gue" => Ok(EnsembleSpec::Gue),
        "ginibre" => Ok(EnsembleSpec::Ginibre),
        "elliptic" => {
            let mu = required_real(obj, "mu", path)?;
            if !(-1.0..=1.0).contains(&mu) {
                return err(&format!("{path}.mu"), format!("μ must lie in [-1, 1], got {mu}"));
            }
            let sigma = optional_real(obj, "sigma", path)?.unwrap_or(1.0);
            if !(sigma > 0.0) || !sigma.is_finite() {
                return err(&format!("{path}.sigma"), format!("σ must be positive, got {sigma}"));
            }
            let phi = optional_real(obj, "phi", path)?.unwrap_or(0.0);
            let x = match obj.get("x") {
                Some(x) => complex(x, &format!("{path}.x"))?,
                None => C64::new(0.0, 0.0),
            };
            EllipticLaw::new(x, sigma, mu, phi)
                .map(EnsembleSpec::Elliptic)
                .or_else(|e| err(path, e.to_string()))
        }
        "shift" => {
            let x = complex(obj.get("x").ok_or_else(|| missing(path, "x"))?, &format!("{path}.x"))?;
            Ok(EnsembleSpec::shift(x, child("of")?))
        }
        "scale" => {
            let p = format!("{path}.alpha");
            let alpha = complex(obj.get("alpha").ok_or_else(|| missing(path, "alpha"))?, &p)?;
            if alpha.norm() == 0.0 {
                return err(&p, "scale factor must be nonzero");
            }
            Ok(EnsembleSpec::scale(alpha, child("of")?))
        }
        "sum" => {
            let p = format!("{path}.terms");
            let Some(Value::Array(items)) = obj.get("terms") else {
                return err(&p, "expected an array of specs");
            };
            if items.is_empty() {
                return err(&p, "sum needs at least one term");
            }
            let terms = items
                .iter()
                .enumerate()
                .map(|(i, t)| parse_node(t, &format!("{p}[{i}]")))
                .collect::<Result<_, _>>()?;
            Ok(EnsembleSpec::Sum(terms))
        }
        "product" => Ok(EnsembleSpec::product(child("a")?, child("b")?)),
        _ => unreachable!(),
    }
}

fn missing(path: &str, key: &str) -> SpecError {
    SpecError { path: path.to_string(), message: format!("missing field {key:?}") }
}

fn required_real(obj: &Map<String, Value>, key: &str, path: &str) -> Result<f64, SpecError> {
    optional_real(obj, key, path)?.ok_or_else(|| missing(path, key))
}

fn optional_real(obj: &Map<String, Value>, key: &str, path: &str) -> Result<Option<f64>, SpecError> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => match v.as_f64() {
            Some(x) => Ok(Some(x)),
            None => err(&format!("{path}.{key}"), "expected a number"),
        },
    }
}

fn complex(v: &Value, path: &str) -> Result<C64, SpecError> {
    if let Some(x) = v.as_f64() {
        return Ok(C64::new(x, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => err(path, "expected [re, im] numbers"),
        },
        _ => err(path, "expected [re, im] or a number"),
    }
}

/// Canonical JSON of a spec, as echoed into run manifests.
pub fn spec_to_json(spec: &EnsembleSpec) -> Value {
    use serde_json::json;
    let c = |z: &C64| json!([z.re, z.im]);
    match spec {
        EnsembleSpec::Elliptic(l) => {
            json!({"type": "elliptic", "mu": l.mu, "sigma": l.sigma, "phi": l.phi, "x": c(&l.x)})
        }
        EnsembleSpec::Gue => json!({"type": "gue"}),
        EnsembleSpec::Ginibre => json!({"type": "ginibre"}),
        EnsembleSpec::Shift { x, of } => json!({"type": "shift", "x": c(x), "of": spec_to_json(of)}),
        EnsembleSpec::Scale { alpha, of } => json!({"type": "scale", "alpha": c(alpha), "of": spec_to_json(of)}),
        EnsembleSpec::Sum(t) => json!({"type": "sum", "terms": t.iter().map(spec_to_json).collect::<Vec<_>>()}),
        EnsembleSpec::Product(a, b) => json!({"type": "product", "a": spec_to_json(a), "b": spec_to_json(b)}),
    }
}
