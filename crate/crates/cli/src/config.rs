//! Declarative experiment configuration.
//!
//! A config is one JSON document; command-line flags override its fields.
//! Every field has a default, and the fully resolved config is echoed into
//! the CSV header.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use qwalk::{Engine, Vertex, MAX_DIRECT_N};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid n-range {0:?}: expected e.g. \"4..12\", \"16..512:x2\", \"6,8,10\"")]
    NRange(String),
    #[error("n-range is empty")]
    EmptyRange,
    #[error("n must be at least 1")]
    ZeroN,
    #[error("invalid horizon rule {0:?}: expected \"half-period\", \"scaled:F\" or \"fixed:T\"")]
    Horizon(String),
    #[error("window exponent must lie in [0, 1/2), got {0}")]
    WindowExponent(f64),
    #[error("direct engine supports n <= {max}, got n = {n}")]
    DirectTooLarge { n: usize, max: usize },
    #[error("analytic engine covers only the clean corner-to-corner walk: {0}")]
    AnalyticUnsupported(&'static str),
    #[error("{kind} requires n <= {max}, got n = {n}")]
    TooLarge { kind: &'static str, n: usize, max: usize },
    #[error("unknown engine {0:?}: expected direct or analytic")]
    Engine(String),
    #[error("routing: {0}")]
    Routing(String),
    #[error("bad vertex {0:?}")]
    Vertex(String),
    #[error("trials must be positive")]
    Trials,
    #[error("unsupported format {0:?}: only csv is available")]
    Format(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Oneshot,
    OneshotWindow,
    Concurrent,
    Continuous,
    Classical,
    Neighborhood,
    Routing,
    Verify,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Oneshot => "oneshot",
            Self::OneshotWindow => "oneshot-window",
            Self::Concurrent => "concurrent",
            Self::Continuous => "continuous",
            Self::Classical => "classical",
            Self::Neighborhood => "neighborhood",
            Self::Routing => "routing",
            Self::Verify => "verify",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inclusive list of cube dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NRangeRepr", into = "String")]
pub struct NRange {
    text: String,
    values: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NRangeRepr {
    Text(String),
    Single(usize),
    List(Vec<usize>),
}

impl TryFrom<NRangeRepr> for NRange {
    type Error = ConfigError;
    fn try_from(r: NRangeRepr) -> Result<Self, ConfigError> {
        match r {
            NRangeRepr::Text(s) => s.parse(),
            NRangeRepr::Single(n) => NRange::from_values(vec![n]),
            NRangeRepr::List(v) => NRange::from_values(v),
        }
    }
}

impl From<NRange> for String {
    fn from(r: NRange) -> String {
        r.text
    }
}

impl NRange {
    pub fn from_values(values: Vec<usize>) -> Result<Self, ConfigError> {
        if values.is_empty() {
            return Err(ConfigError::EmptyRange);
        }
        if values.contains(&0) {
            return Err(ConfigError::ZeroN);
        }
        let text = values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        Ok(Self { text, values })
    }

    pub fn single(n: usize) -> Self {
        Self {
            text: n.to_string(),
            values: vec![n],
        }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn max(&self) -> usize {
        self.values.iter().copied().max().unwrap_or(0)
    }
}

impl FromStr for NRange {
    type Err = ConfigError;

    /// `a..b` (inclusive), `a..b:k` (step k), `a..b:xk` (multiply by k),
    /// or a comma-separated list.
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let bad = || ConfigError::NRange(s.to_string());
        let t = s.trim();
        let values: Vec<usize> = if let Some((lo, rest)) = t.split_once("..") {
            let (hi, step) = match rest.split_once(':') {
                Some((h, st)) => (h, Some(st)),
                None => (rest, None),
            };
            let lo: usize = lo.trim().parse().map_err(|_| bad())?;
            let hi: usize = hi.trim().parse().map_err(|_| bad())?;
            match step.map(str::trim) {
                None => (lo..=hi).collect(),
                Some(st) if st.starts_with('x') => {
                    let k: usize = st[1..].parse().map_err(|_| bad())?;
                    if k < 2 || lo == 0 {
                        return Err(bad());
                    }
                    std::iter::successors(Some(lo), |v| v.checked_mul(k))
                        .take_while(|v| *v <= hi)
                        .collect()
                }
                Some(st) => {
                    let k: usize = st.parse().map_err(|_| bad())?;
                    if k == 0 {
                        return Err(bad());
                    }
                    (lo..=hi).step_by(k).collect()
                }
            }
        } else {
            t.split(',')
                .map(|v| v.trim().parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        };
        let mut r = NRange::from_values(values)?;
        r.text = t.to_string();
        Ok(r)
    }
}

/// How the measurement horizon `T` depends on `n`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum HorizonRule {
    /// `πn/2`, parity-matched for the discrete walk, rounded for the continuous one.
    #[default]
    HalfPeriod,
    /// `f·πn/2`, snapped the same way.
    Scaled(f64),
    Fixed(usize),
}

impl HorizonRule {
    pub fn discrete(self, n: usize) -> usize {
        let half = std::f64::consts::PI * n as f64 / 2.0;
        match self {
            Self::HalfPeriod => qwalk::default_horizon(n),
            Self::Scaled(f) => qwalk::parity_matched(f * half, n),
            Self::Fixed(t) => t,
        }
    }

    pub fn continuous(self, n: usize) -> usize {
        let half = std::f64::consts::PI * n as f64 / 2.0;
        match self {
            Self::HalfPeriod => half.round() as usize,
            Self::Scaled(f) => (f * half).round() as usize,
            Self::Fixed(t) => t,
        }
    }
}

impl TryFrom<String> for HorizonRule {
    type Error = ConfigError;
    fn try_from(s: String) -> Result<Self, ConfigError> {
        s.parse()
    }
}

impl From<HorizonRule> for String {
    fn from(h: HorizonRule) -> String {
        h.to_string()
    }
}

impl FromStr for HorizonRule {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let bad = || ConfigError::Horizon(s.to_string());
        match s.trim().split_once(':') {
            None if s.trim() == "half-period" => Ok(Self::HalfPeriod),
            Some(("scaled", f)) => {
                let f: f64 = f.parse().map_err(|_| bad())?;
                if f.is_finite() && f > 0.0 {
                    Ok(Self::Scaled(f))
                } else {
                    Err(bad())
                }
            }
            Some(("fixed", t)) => t.parse().map(Self::Fixed).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for HorizonRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HalfPeriod => f.write_str("half-period"),
            Self::Scaled(x) => write!(f, "scaled:{x}"),
            Self::Fixed(t) => write!(f, "fixed:{t}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineChoice {
    Direct,
    Analytic,
}

impl EngineChoice {
    pub fn engine(self) -> Engine {
        match self {
            Self::Direct => Engine::Direct,
            Self::Analytic => Engine::Analytic,
        }
    }
}

impl FromStr for EngineChoice {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "direct" => Ok(Self::Direct),
            "analytic" => Ok(Self::Analytic),
            other => Err(ConfigError::Engine(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoutingMode {
    /// Measure once after `T` steps.
    #[default]
    OneShot,
    /// The destination measures after every step.
    Concurrent,
}

impl RoutingMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::OneShot => "one-shot",
            Self::Concurrent => "concurrent",
        }
    }
}

/// A deleted edge `{vertex, vertex ⊕ e_bit}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub vertex: String,
    pub bit: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RoutingConfig {
    /// Source bitstring; defaults to `0^n`.
    pub source: Option<String>,
    /// Destination bitstring; defaults to `1^n`.
    pub destination: Option<String>,
    pub mode: RoutingMode,
    pub deleted_edges: Vec<EdgeSpec>,
    pub interceptors: Vec<String>,
    /// Random edges deleted per instance.
    pub random_deleted_edges: usize,
    /// Number of random instances (each with its own seed stream).
    pub instances: usize,
    /// Also scan one interceptor over every sub-cube position.
    pub interceptor_scan: bool,
}

impl Default for RoutingConfig {
    fn default() -> Self {
        Self {
            source: None,
            destination: None,
            mode: RoutingMode::OneShot,
            deleted_edges: Vec::new(),
            interceptors: Vec::new(),
            random_deleted_edges: 0,
            instances: 1,
            interceptor_scan: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n_range: NRange,
    pub horizon: HorizonRule,
    /// Window exponent β for power-law window scans around `πn/2`.
    pub window_exponent: Option<f64>,
    /// `None` picks per experiment: analytic where it applies, else direct.
    pub engine: Option<EngineChoice>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Monte Carlo trials for classical estimates.
    pub trials: u64,
    /// Neighborhood scan depth (largest start distance).
    pub depth: usize,
    pub routing: RoutingConfig,
    /// Negate one coin column in `verify` (mutation test).
    pub tamper_coin: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::Oneshot,
            n_range: NRange::single(10),
            horizon: HorizonRule::HalfPeriod,
            window_exponent: None,
            engine: None,
            seed: 0,
            out: None,
            trials: 20_000,
            depth: 2,
            routing: RoutingConfig::default(),
            tamper_coin: false,
        }
    }
}

/// Largest dimension for Monte Carlo and the directional walk.
pub const MAX_SIMULATED_N: usize = 16;
/// Largest dimension for the neighborhood scan.
pub const MAX_NEIGHBORHOOD_N: usize = 12;
/// Largest dimension for dense continuous-walk checks.
pub const MAX_DENSE_CONTINUOUS_N: usize = 14;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Engine for experiments where both apply; analytic by default.
    pub fn engine_or_analytic(&self) -> Engine {
        self.engine.map_or(Engine::Analytic, EngineChoice::engine)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(b) = self.window_exponent {
            if !(0.0..0.5).contains(&b) {
                return Err(ConfigError::WindowExponent(b));
            }
        }
        let max = self.n_range.max();
        let direct = self.engine == Some(EngineChoice::Direct);
        match self.kind {
            ExperimentKind::Oneshot | ExperimentKind::OneshotWindow | ExperimentKind::Concurrent => {
                if direct && max > MAX_DIRECT_N {
                    return Err(ConfigError::DirectTooLarge {
                        n: max,
                        max: MAX_DIRECT_N,
                    });
                }
            }
            ExperimentKind::Continuous => {
                if direct && max > MAX_DENSE_CONTINUOUS_N {
                    return Err(ConfigError::DirectTooLarge {
                        n: max,
                        max: MAX_DENSE_CONTINUOUS_N,
                    });
                }
            }
            ExperimentKind::Classical => {
                if self.trials == 0 {
                    return Err(ConfigError::Trials);
                }
                if max > MAX_SIMULATED_N {
                    return Err(ConfigError::TooLarge {
                        kind: "classical",
                        n: max,
                        max: MAX_SIMULATED_N,
                    });
                }
            }
            ExperimentKind::Neighborhood => {
                if self.engine == Some(EngineChoice::Analytic) {
                    return Err(ConfigError::AnalyticUnsupported("neighborhood targets are off-corner"));
                }
                if max > MAX_NEIGHBORHOOD_N {
                    return Err(ConfigError::TooLarge {
                        kind: "neighborhood",
                        n: max,
                        max: MAX_NEIGHBORHOOD_N,
                    });
                }
            }
            ExperimentKind::Routing => {
                for &n in self.n_range.values() {
                    crate::routing::RoutingTask::from_config(n, &self.routing)?.check_engine(self.engine)?;
                }
            }
            ExperimentKind::Verify => {
                if max > MAX_DIRECT_N {
                    return Err(ConfigError::DirectTooLarge {
                        n: max,
                        max: MAX_DIRECT_N,
                    });
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn parse_vertex(n: usize, s: &str) -> Result<Vertex, ConfigError> {
    Vertex::parse_with_len(s, n).map_err(|_| ConfigError::Vertex(s.to_string()))
}
