//! Experiment configuration: a JSON document, optionally patched with
//! `key=value` overrides, read lazily so each subcommand only demands the
//! fields it uses.

use std::path::Path;

use serde_json::{Map, Value as Json};
use sha2::{Digest, Sha256};

use ergopt::dynamics::{Point, SystemDescriptor};
use ergopt::numeric::{parse_rational, Rational};
use ergopt::observables::{Observable, Weight};

use crate::CliError;

pub struct ExperimentConfig {
    raw: Json,
    pub seed: u64,
}

/// Sets `path` (dot-separated) in `root`, creating objects on the way.
fn set_path(root: &mut Json, path: &str, value: Json) -> Result<(), CliError> {
    let mut cur = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, key) in parts.iter().enumerate() {
        if key.is_empty() {
            return Err(CliError::config(path, "empty key segment"));
        }
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| CliError::config(path, "cannot descend into a non-object"))?;
        if i + 1 == parts.len() {
            obj.insert((*key).to_string(), value);
            return Ok(());
        }
        cur = obj.entry(*key).or_insert_with(|| Json::Object(Map::new()));
    }
    unreachable!("split yields at least one segment")
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>, overrides: &[String], seed: Option<u64>) -> Result<Self, CliError> {
        let mut raw = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::config("--config", format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| CliError::config("--config", format!("invalid JSON: {e}")))?
            }
            None => Json::Object(Map::new()),
        };
        if !raw.is_object() {
            return Err(CliError::config("--config", "top level must be an object"));
        }
        for o in overrides {
            let (key, value) = o
                .split_once('=')
                .ok_or_else(|| CliError::config("--set", format!("expected key=value, got {o:?}")))?;
            // JSON literals pass through; anything else is taken as a string.
            let value = serde_json::from_str(value).unwrap_or_else(|_| Json::String(value.to_string()));
            set_path(&mut raw, key, value)?;
        }
        let seed = match seed {
            Some(s) => s,
            None => match raw.get("seed") {
                Some(v) => v.as_u64().ok_or_else(|| CliError::config("seed", "must be a 64-bit unsigned integer"))?,
                None => 0,
            },
        };
        raw.as_object_mut().expect("checked above").insert("seed".into(), Json::from(seed));
        Ok(ExperimentConfig { raw, seed })
    }

    /// The effective configuration, keys sorted.
    pub fn canonical(&self) -> String {
        serde_json::to_string(&sort_keys(&self.raw)).expect("serializes")
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    pub fn json(&self) -> Json {
        sort_keys(&self.raw)
    }

    pub fn get(&self, key: &str) -> Option<&Json> {
        self.raw.get(key)
    }

    fn require(&self, key: &str) -> Result<&Json, CliError> {
        self.get(key).ok_or_else(|| CliError::config(key, "missing required field"))
    }

    pub fn system(&self) -> Result<SystemDescriptor, CliError> {
        SystemDescriptor::from_json(self.require("system")?).map_err(|e| CliError::config("system", e))
    }

    pub fn observable(&self, key: &str, system: &SystemDescriptor) -> Result<Observable, CliError> {
        Observable::from_json(self.require(key)?, system).map_err(|e| CliError::config(key, e))
    }

    pub fn optional_observable(&self, key: &str, system: &SystemDescriptor) -> Result<Option<Observable>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => Observable::from_json(v, system).map(Some).map_err(|e| CliError::config(key, e)),
        }
    }

    pub fn weight(&self, system: &SystemDescriptor) -> Result<Weight, CliError> {
        let psi = self.observable("psi", system)?;
        Weight::new(psi, system, self.alpha()?).map_err(|e| CliError::config("psi", e))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| CliError::config(key, "must be a nonnegative integer")),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| CliError::config(key, "must be a number")),
        }
    }

    pub fn alpha(&self) -> Result<f64, CliError> {
        let a = self.f64_or("alpha", 1.0)?;
        if a > 0.0 && a <= 1.0 {
            Ok(a)
        } else {
            Err(CliError::config("alpha", "must lie in (0, 1]"))
        }
    }

    pub fn rational_or(&self, key: &str, default: &str) -> Result<Rational, CliError> {
        let parse = |s: &str| parse_rational(s).map_err(|e| CliError::config(key, e));
        match self.get(key) {
            None => parse(default),
            Some(Json::String(s)) => parse(s),
            Some(Json::Number(n)) => parse(&n.to_string()),
            Some(_) => Err(CliError::config(key, "must be a rational such as \"1/10\"")),
        }
    }

    pub fn point(&self, key: &str, system: &SystemDescriptor) -> Result<Option<Point>, CliError> {
        self.get(key)
            .map(|v| Point::from_json(v, system).map_err(|e| CliError::config(key, e)))
            .transpose()
    }

    pub fn points(&self, key: &str, system: &SystemDescriptor) -> Result<Option<Vec<Point>>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(Json::Array(items)) => items
                .iter()
                .map(|v| Point::from_json(v, system).map_err(|e| CliError::config(key, e)))
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(_) => Err(CliError::config(key, "must be an array of points")),
        }
    }
}

fn sort_keys(v: &Json) -> Json {
    match v {
        Json::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            Json::Object(keys.into_iter().map(|k| (k.clone(), sort_keys(&m[k]))).collect())
        }
        Json::Array(a) => Json::Array(a.iter().map(sort_keys).collect()),
        other => other.clone(),
    }
}
