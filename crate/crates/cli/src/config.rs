use std::fmt;

use critex_core::bubble::{KSpec, ProblemSpec, RadialProfile};
use critex_core::constants::dimension_constants;
use critex_core::green::BallGeometry;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "config error: {}", self.message)
        } else {
            write!(f, "config error at \"{}\": {}", self.path, self.message)
        }
    }
}

type Parsed<T> = Result<T, ConfigError>;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileConfig {
    Poly { coeffs: Vec<f64> },
    Builtin { name: String },
}

impl ProfileConfig {
    fn profile(&self) -> RadialProfile {
        match self {
            ProfileConfig::Poly { coeffs } => RadialProfile::polynomial(coeffs.clone()),
            ProfileConfig::Builtin { name } => match name.as_str() {
                "neg_t2" => RadialProfile::neg_t2(),
                _ => RadialProfile::zero(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KConfig {
    pub f0: f64,
    pub eta: f64,
    pub f1: ProfileConfig,
}

/// A validated config file with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub n: u32,
    pub y0: Vec<f64>,
    pub mu: f64,
    #[serde(rename = "K")]
    pub k: KConfig,
}

const BUILTINS: &[&str] = &["neg_t2", "zero"];

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Parsed<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| ConfigError::new(path, "expected an object"))
}

fn reject_unknown(obj: &Map<String, Value>, path: &str, known: &[&str]) -> Parsed<()> {
    match obj.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(ConfigError::new(join(path, k), "unknown key")),
        None => Ok(()),
    }
}

fn required<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Parsed<&'a Value> {
    obj.get(key)
        .ok_or_else(|| ConfigError::new(join(path, key), format!("missing required key \"{key}\"")))
}

fn number(v: &Value, path: &str) -> Parsed<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| ConfigError::new(path, "expected a finite number"))
}

fn numbers(v: &Value, path: &str) -> Parsed<Vec<f64>> {
    let arr = v.as_array().ok_or_else(|| ConfigError::new(path, "expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}[{i}]")))
        .collect()
}

fn profile(v: &Value, path: &str) -> Parsed<ProfileConfig> {
    let obj = object(v, path)?;
    let kind_path = join(path, "kind");
    let kind = required(obj, path, "kind")?
        .as_str()
        .ok_or_else(|| ConfigError::new(&kind_path, "expected a string"))?;
    match kind {
        "poly" => {
            reject_unknown(obj, path, &["kind", "coeffs"])?;
            let coeffs = numbers(required(obj, path, "coeffs")?, &join(path, "coeffs"))?;
            Ok(ProfileConfig::Poly { coeffs })
        }
        "builtin" => {
            reject_unknown(obj, path, &["kind", "name"])?;
            let name_path = join(path, "name");
            let name = required(obj, path, "name")?
                .as_str()
                .ok_or_else(|| ConfigError::new(&name_path, "expected a string"))?;
            if !BUILTINS.contains(&name) {
                return Err(ConfigError::new(
                    name_path,
                    format!("unknown builtin \"{name}\" (known: {})", BUILTINS.join(", ")),
                ));
            }
            Ok(ProfileConfig::Builtin { name: name.to_string() })
        }
        other => Err(ConfigError::new(
            kind_path,
            format!("unknown kind \"{other}\" (expected \"poly\" or \"builtin\")"),
        )),
    }
}

impl Config {
    pub fn parse(text: &str) -> Parsed<Self> {
        if text.trim().is_empty() {
            return Err(ConfigError::new("n", "empty config, missing required key \"n\""));
        }
        let root: Value = serde_json::from_str(text)
            .map_err(|e| ConfigError::new("", format!("invalid JSON: {e}")))?;
        Self::from_value(&root)
    }

    pub fn from_value(root: &Value) -> Parsed<Self> {
        let obj = object(root, "")?;
        reject_unknown(obj, "", &["n", "y0", "mu", "K"])?;
        let n = required(obj, "", "n")?
            .as_u64()
            .filter(|&n| n <= u32::MAX as u64)
            .ok_or_else(|| ConfigError::new("n", "expected a non-negative integer"))? as u32;
        dimension_constants(n).map_err(|e| ConfigError::new("n", e.to_string()))?;
        let y0 = match obj.get("y0") {
            Some(v) => numbers(v, "y0")?,
            None => vec![0.0; n as usize],
        };
        if y0.len() != n as usize {
            return Err(ConfigError::new(
                "y0",
                format!("expected {n} coordinates, got {}", y0.len()),
            ));
        }
        let mu = number(required(obj, "", "mu")?, "mu")?;
        if mu < 0.0 {
            return Err(ConfigError::new("mu", format!("must be >= 0, got {mu}")));
        }
        let kv = required(obj, "", "K")?;
        let ko = object(kv, "K")?;
        reject_unknown(ko, "K", &["f0", "eta", "f1"])?;
        let f0 = number(required(ko, "K", "f0")?, "K.f0")?;
        let eta = number(required(ko, "K", "eta")?, "K.eta")?;
        let f1 = profile(required(ko, "K", "f1")?, "K.f1")?;
        let cfg = Self { n, y0, mu, k: KConfig { f0, eta, f1 } };
        cfg.problem()?;
        Ok(cfg)
    }

    pub fn kspec(&self) -> Parsed<KSpec> {
        let k = &self.k;
        KSpec::general(k.f0, k.eta, k.f1.profile(), None)
            .map_err(|e| ConfigError::new("K", e.to_string()))
    }

    pub fn problem(&self) -> Parsed<ProblemSpec> {
        let geom = BallGeometry::new(self.n, self.y0.clone())
            .map_err(|e| ConfigError::new("y0", e.to_string()))?;
        ProblemSpec::new(geom, self.kspec()?, self.mu)
            .map_err(|e| ConfigError::new("K", e.to_string()))
    }
}
