use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

/// Exit status of a failed run.
#[derive(Debug)]
pub enum RunError {
    UnknownExperiment(String),
    InvalidParams(String),
    Failed(crate::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::UnknownExperiment(_) => 64,
            Self::InvalidParams(_) => 65,
            Self::Failed(_) => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownExperiment(s) => write!(f, "unknown experiment {s:?}"),
            Self::InvalidParams(s) => write!(f, "invalid parameters: {s}"),
            Self::Failed(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<crate::Error> for RunError {
    fn from(e: crate::Error) -> Self {
        use crate::Error as E;
        match e {
            E::InvalidParameter(s) | E::Parse(s) => Self::InvalidParams(s),
            e @ (E::DimensionMismatch { .. } | E::IndexOutOfRange { .. } | E::DegenerateBounds { .. }) => {
                Self::InvalidParams(e.to_string())
            }
            e => Self::Failed(e),
        }
    }
}

pub type RunResult<T> = std::result::Result<T, RunError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    LwRatio,
    Strong,
    Vertex,
    Sharpness,
    EuclidCounterexample,
    RadonNorm,
    SScaling,
    L32l3,
    Pairing,
    Sobolev,
    Isoperimetric,
    LevelsetLemma,
    Search,
    Invariance,
    Acceptance,
}

impl Experiment {
    pub const ALL: [Experiment; 15] = [
        Self::LwRatio,
        Self::Strong,
        Self::Vertex,
        Self::Sharpness,
        Self::EuclidCounterexample,
        Self::RadonNorm,
        Self::SScaling,
        Self::L32l3,
        Self::Pairing,
        Self::Sobolev,
        Self::Isoperimetric,
        Self::LevelsetLemma,
        Self::Search,
        Self::Invariance,
        Self::Acceptance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::LwRatio => "lw-ratio",
            Self::Strong => "strong",
            Self::Vertex => "vertex",
            Self::Sharpness => "sharpness",
            Self::EuclidCounterexample => "euclid-counterexample",
            Self::RadonNorm => "radon-norm",
            Self::SScaling => "s-scaling",
            Self::L32l3 => "l32l3",
            Self::Pairing => "pairing",
            Self::Sobolev => "sobolev",
            Self::Isoperimetric => "isoperimetric",
            Self::LevelsetLemma => "levelset-lemma",
            Self::Search => "search",
            Self::Invariance => "invariance",
            Self::Acceptance => "acceptance",
        }
    }

    pub fn parse(s: &str) -> RunResult<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| RunError::UnknownExperiment(s.into()))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn default_output() -> PathBuf {
    PathBuf::from("hlw-out")
}

/// A reproducible experiment description, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    /// Kept as text so an unknown name maps to its own exit status.
    pub experiment: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub resolution: Option<usize>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub deterministic: bool,
}

impl Manifest {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment: experiment.name().into(),
            params: BTreeMap::new(),
            seed: 0,
            resolution: None,
            output: default_output(),
            deterministic: false,
        }
    }

    pub fn from_json(text: &str) -> RunResult<Self> {
        serde_json::from_str(text).map_err(|e| RunError::InvalidParams(format!("manifest: {e}")))
    }

    pub fn experiment(&self) -> RunResult<Experiment> {
        Experiment::parse(&self.experiment)
    }

    pub fn with_param(mut self, key: &str, value: Value) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    pub fn params(&self) -> Params<'_> {
        Params(&self.params)
    }
}

/// Typed access to manifest parameters.
#[derive(Debug, Clone, Copy)]
pub struct Params<'a>(pub &'a BTreeMap<String, Value>);

fn bad(key: &str, want: &str, v: &Value) -> RunError {
    RunError::InvalidParams(format!("{key}: expected {want}, got {v}"))
}

impl Params<'_> {
    pub fn f64(&self, key: &str, default: f64) -> RunResult<f64> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| bad(key, "a number", v)),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> RunResult<usize> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().map(|x| x as usize).ok_or_else(|| bad(key, "a nonnegative integer", v)),
        }
    }

    pub fn opt_usize(&self, key: &str) -> RunResult<Option<usize>> {
        self.0.get(key).map(|_| self.usize(key, 0)).transpose()
    }

    pub fn str<'b>(&'b self, key: &str, default: &'b str) -> RunResult<&'b str> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.as_str().ok_or_else(|| bad(key, "a string", v)),
        }
    }

    /// A list of numbers; a single number is a one-element list.
    pub fn f64_list(&self, key: &str, default: &[f64]) -> RunResult<Vec<f64>> {
        match self.0.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| bad(key, "a list of numbers", v)))
                .collect(),
            Some(v) => v.as_f64().map(|x| vec![x]).ok_or_else(|| bad(key, "a list of numbers", v)),
        }
    }
}

/// Parse a command-line `key=value`; the value is JSON when it parses as JSON.
pub fn parse_param(kv: &str) -> RunResult<(String, Value)> {
    let (k, v) = kv
        .split_once('=')
        .ok_or_else(|| RunError::InvalidParams(format!("expected key=value, got {kv:?}")))?;
    if k.is_empty() {
        return Err(RunError::InvalidParams(format!("empty key in {kv:?}")));
    }
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.into()));
    Ok((k.into(), value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(Experiment::parse(e.name()).unwrap(), e);
            assert_eq!(serde_json::to_value(e).unwrap(), json!(e.name()));
        }
        assert_eq!(Experiment::parse("nope").unwrap_err().exit_code(), 64);
    }

    #[test]
    fn manifest_defaults() {
        let m = Manifest::from_json(r#"{"experiment": "sharpness", "params": {"n": 1, "r": [0.5, 1, 2]}}"#).unwrap();
        assert_eq!(m.experiment().unwrap(), Experiment::Sharpness);
        assert_eq!(m.seed, 0);
        assert!(!m.deterministic);
        assert_eq!(m.params().f64_list("r", &[]).unwrap(), vec![0.5, 1.0, 2.0]);
        assert_eq!(m.params().usize("n", 9).unwrap(), 1);
        assert_eq!(m.params().usize("missing", 9).unwrap(), 9);
    }

    #[test]
    fn malformed_input_is_invalid_params() {
        assert_eq!(Manifest::from_json("{").unwrap_err().exit_code(), 65);
        assert_eq!(Manifest::from_json(r#"{"experiment": "pairing", "bogus": 1}"#).unwrap_err().exit_code(), 65);
        let m = Manifest::new(Experiment::Pairing).with_param("n", json!("two"));
        assert_eq!(m.params().usize("n", 1).unwrap_err().exit_code(), 65);
    }

    #[test]
    fn command_line_params() {
        assert_eq!(parse_param("r=[1,2]").unwrap(), ("r".into(), json!([1, 2])));
        assert_eq!(parse_param("family=boxes").unwrap(), ("family".into(), json!("boxes")));
        assert_eq!(parse_param("delta=0.01").unwrap(), ("delta".into(), json!(0.01)));
        assert!(parse_param("novalue").is_err());
    }
}
