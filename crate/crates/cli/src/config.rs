//! JSON configuration file: every key optional, unknown keys rejected.

use serde_json::{Map, Value};

use evoc_core::WorldConfig;

pub const KEYS: [&str; 11] = [
    "width",
    "height",
    "toroidal",
    "invention_probability",
    "rate_of_change",
    "chaining_enabled",
    "learning_enabled",
    "max_chain_len",
    "p_ext_max",
    "iterations",
    "seed",
];

fn as_count(key: &str, v: &Value) -> Result<usize, String> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| format!("config field `{key}` must be a non-negative integer, got {v}"))
}

fn as_real(key: &str, v: &Value) -> Result<f64, String> {
    v.as_f64()
        .ok_or_else(|| format!("config field `{key}` must be a number, got {v}"))
}

fn as_flag(key: &str, v: &Value) -> Result<bool, String> {
    v.as_bool()
        .ok_or_else(|| format!("config field `{key}` must be true or false, got {v}"))
}

/// Applies a parsed config object on top of `base`, then range-checks the result.
pub fn apply(base: WorldConfig, doc: &Map<String, Value>) -> Result<WorldConfig, String> {
    let mut cfg = base;
    for (key, v) in doc {
        let k = key.as_str();
        match k {
            "width" => cfg.width = as_count(k, v)?,
            "height" => cfg.height = as_count(k, v)?,
            "toroidal" => cfg.toroidal = as_flag(k, v)?,
            "invention_probability" => cfg.invention_probability = as_real(k, v)?,
            "rate_of_change" => cfg.invention_params.rate_of_change = as_real(k, v)?,
            "chaining_enabled" => cfg.invention_params.chaining_enabled = as_flag(k, v)?,
            "learning_enabled" => cfg.invention_params.learning_enabled = as_flag(k, v)?,
            "max_chain_len" => cfg.invention_params.max_chain_len = as_count(k, v)?,
            "p_ext_max" => cfg.invention_params.p_ext_max = as_real(k, v)?,
            "iterations" => cfg.iterations = as_count(k, v)?,
            "seed" => {
                cfg.seed = v
                    .as_u64()
                    .ok_or_else(|| format!("config field `seed` must be a non-negative integer, got {v}"))?
            }
            _ => {
                return Err(format!(
                    "unknown config field `{key}`; allowed: {}",
                    KEYS.join(", ")
                ))
            }
        }
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

pub fn parse(text: &str) -> Result<WorldConfig, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| format!("config is not valid JSON: {e}"))?;
    let Value::Object(doc) = value else {
        return Err("config must be a JSON object".into());
    };
    apply(WorldConfig::default(), &doc)
}
