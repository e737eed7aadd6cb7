//! Resolution of command-line flags, the optional `--config` JSON file and
//! built-in defaults into one fully specified job.

use std::path::PathBuf;

use fibint::rational::{format_vector, parse_vector};
use fibint::subalgebra::{Seeding, DEFAULT_CUTOFF, DEFAULT_JACOBIAN_POINTS, DEFAULT_SEED};
use fibint::{Error, Result};
use serde_json::{json, Map, Value};

pub const DEFAULT_K_MAX: u32 = 6;
pub const DEFAULT_THREADS: usize = 0;

/// Optional settings as given by flags or by a config file.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub group: Option<String>,
    pub xi: Option<String>,
    pub eta: Option<String>,
    pub x: Option<String>,
    pub factors: Option<Vec<String>>,
    pub cutoff: Option<u32>,
    pub k_max: Option<u32>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub seeding: Option<String>,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
}

/// Everything a command may need, with defaults filled in.
#[derive(Debug, Clone)]
pub struct Job {
    pub command: String,
    pub group: Option<String>,
    pub xi: Option<String>,
    pub eta: Option<String>,
    pub x: Option<String>,
    pub factors: Vec<String>,
    pub cutoff: u32,
    pub k_max: u32,
    pub samples: usize,
    pub seed: u64,
    pub points: usize,
    pub seeding: Seeding,
    pub threads: usize,
    pub output: Option<PathBuf>,
}

impl Job {
    pub fn require_group(&self) -> Result<&str> {
        self.group
            .as_deref()
            .ok_or_else(|| Error::Config(format!("'{}' needs --group", self.command)))
    }

    pub fn require_vector(&self, field: &str) -> Result<&str> {
        let v = match field {
            "xi" => &self.xi,
            "eta" => &self.eta,
            "X" => &self.x,
            _ => unreachable!("unknown vector field {field}"),
        };
        v.as_deref()
            .ok_or_else(|| Error::Config(format!("'{}' needs --{field}", self.command)))
    }

    /// The resolved configuration as written into the report.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        let mut put = |k: &str, v: Value| {
            m.insert(k.to_string(), v);
        };
        if let Some(g) = &self.group {
            put("group", json!(g));
        }
        if let Some(v) = &self.xi {
            put("xi", json!(v));
        }
        if let Some(v) = &self.eta {
            put("eta", json!(v));
        }
        if let Some(v) = &self.x {
            put("X", json!(v));
        }
        if !self.factors.is_empty() {
            put("factors", json!(self.factors));
        }
        put("cutoff", json!(self.cutoff));
        put("k_max", json!(self.k_max));
        put("samples", json!(self.samples));
        put("seed", json!(self.seed));
        put("points", json!(self.points));
        put("seeding", serde_json::to_value(self.seeding).expect("enum serializes"));
        Value::Object(m)
    }
}

fn normalize_vector(field: &str, s: &str) -> Result<String> {
    parse_vector(s)
        .map(|v| format_vector(&v))
        .map_err(|e| Error::Config(format!("{field}: {e}")))
}

fn parse_seeding(s: &str) -> Result<Seeding> {
    match s.to_ascii_lowercase().as_str() {
        "powers" => Ok(Seeding::Powers),
        "products" => Ok(Seeding::Products),
        _ => Err(Error::Config(format!(
            "seeding: expected 'powers' or 'products', got '{s}'"
        ))),
    }
}

fn json_vector(field: &str, v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Array(items) => items
            .iter()
            .map(|x| match x {
                Value::Number(n) => Ok(n.to_string()),
                Value::String(s) => Ok(s.clone()),
                _ => Err(Error::Config(format!("{field}: entries must be numbers or strings"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(|v| v.join(",")),
        _ => Err(Error::Config(format!("{field}: expected a string or an array"))),
    }
}

fn json_uint(field: &str, v: &Value) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::Config(format!("{field}: expected a non-negative integer")))
}

fn json_string(field: &str, v: &Value) -> Result<String> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::Config(format!("{field}: expected a string")))
}

fn narrow<T: TryFrom<u64>>(field: &str, v: u64) -> Result<T> {
    T::try_from(v).map_err(|_| Error::Config(format!("{field}: {v} is out of range")))
}

/// Reads a config file. Unknown keys are rejected.
pub fn load_config(text: &str, command: &str) -> Result<Settings> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::Config("config: top level must be a JSON object".into()))?;
    let mut s = Settings::default();
    for (key, v) in obj {
        match key.as_str() {
            "command" => {
                let c = json_string(key, v)?;
                if c != command {
                    return Err(Error::Config(format!(
                        "command: config says '{c}' but '{command}' was invoked"
                    )));
                }
            }
            "schema" => {}
            "group" => s.group = Some(json_string(key, v)?),
            "xi" => s.xi = Some(json_vector(key, v)?),
            "eta" => s.eta = Some(json_vector(key, v)?),
            "X" => s.x = Some(json_vector(key, v)?),
            "factors" => {
                let arr = v
                    .as_array()
                    .ok_or_else(|| Error::Config("factors: expected an array of strings".into()))?;
                s.factors = Some(arr.iter().map(|f| json_string(key, f)).collect::<Result<_>>()?);
            }
            "cutoff" => s.cutoff = Some(narrow(key, json_uint(key, v)?)?),
            "k_max" => s.k_max = Some(narrow(key, json_uint(key, v)?)?),
            "samples" => s.samples = Some(narrow(key, json_uint(key, v)?)?),
            "seed" => s.seed = Some(json_uint(key, v)?),
            "points" => s.points = Some(narrow(key, json_uint(key, v)?)?),
            "seeding" => s.seeding = Some(json_string(key, v)?),
            "threads" => s.threads = Some(narrow(key, json_uint(key, v)?)?),
            "output" => s.output = Some(PathBuf::from(json_string(key, v)?)),
            other => return Err(Error::Config(format!("config: unknown key '{other}'"))),
        }
    }
    Ok(s)
}

fn pick<T: PartialEq + std::fmt::Debug>(field: &str, flag: Option<T>, file: Option<T>) -> Result<Option<T>> {
    match (flag, file) {
        (Some(a), Some(b)) if a != b => Err(Error::Config(format!(
            "{field}: flag value {a:?} conflicts with config value {b:?}"
        ))),
        (Some(a), _) => Ok(Some(a)),
        (None, b) => Ok(b),
    }
}

fn pick_vector(field: &str, flag: Option<String>, file: Option<String>) -> Result<Option<String>> {
    let flag = flag.map(|s| normalize_vector(field, &s)).transpose()?;
    let file = file.map(|s| normalize_vector(field, &s)).transpose()?;
    pick(field, flag, file)
}

/// Merges flags and config (a conflict is an error) and fills defaults.
pub fn resolve(command: &str, flags: Settings, file: Settings) -> Result<Job> {
    let seeding = pick("seeding", flags.seeding, file.seeding)?
        .map(|s| parse_seeding(&s))
        .transpose()?
        .unwrap_or(Seeding::Powers);
    Ok(Job {
        command: command.to_string(),
        group: pick("group", flags.group, file.group)?,
        xi: pick_vector("xi", flags.xi, file.xi)?,
        eta: pick_vector("eta", flags.eta, file.eta)?,
        x: pick_vector("X", flags.x, file.x)?,
        factors: pick("factors", flags.factors, file.factors)?.unwrap_or_default(),
        cutoff: pick("cutoff", flags.cutoff, file.cutoff)?.unwrap_or(DEFAULT_CUTOFF),
        k_max: pick("k_max", flags.k_max, file.k_max)?.unwrap_or(DEFAULT_K_MAX),
        samples: pick("samples", flags.samples, file.samples)?.unwrap_or(fibint::haar::DEFAULT_SAMPLES),
        seed: pick("seed", flags.seed, file.seed)?.unwrap_or(DEFAULT_SEED),
        points: pick("points", flags.points, file.points)?.unwrap_or(DEFAULT_JACOBIAN_POINTS),
        seeding,
        threads: pick("threads", flags.threads, file.threads)?.unwrap_or(DEFAULT_THREADS),
        output: pick("output", flags.output, file.output)?,
    })
}
