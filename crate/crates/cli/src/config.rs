//! Experiment configs: line-oriented `key = value` text, `#` comments, and
//! `[a, b, c]` lists. Command-line flags of the same name override keys.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use hecool::hamiltonians::FrozenState;
use hecool::oracles::MAX_BRUTE_FORCE_NODES;
use hecool::vqe::EvalMode;

/// Largest chain the sweeps accept; the dense oracle bounds it.
pub const MAX_CHAIN_SITES: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Scalar(String),
    List(Vec<String>),
}

fn parse_value(raw: &str) -> Result<Value, ConfigError> {
    let raw = raw.trim();
    if let Some(inner) = raw.strip_prefix('[') {
        let Some(inner) = inner.strip_suffix(']') else {
            return err(format!("unterminated list {raw:?}"));
        };
        if inner.trim().is_empty() {
            return Ok(Value::List(Vec::new()));
        }
        let items: Vec<String> = inner.split(',').map(|s| s.trim().to_string()).collect();
        if items.iter().any(String::is_empty) {
            return err(format!("empty list item in {raw:?}"));
        }
        Ok(Value::List(items))
    } else if raw.is_empty() {
        err("missing value")
    } else {
        Ok(Value::Scalar(raw.to_string()))
    }
}

/// Untyped key/value pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, Value>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected `key = value`", i + 1));
            };
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return err(format!("line {}: bad key {key:?}", i + 1));
            }
            let value = parse_value(value).map_err(|e| ConfigError(format!("line {}: {e}", i + 1)))?;
            if entries.insert(key.to_string(), value).is_some() {
                return err(format!("line {}: duplicate key {key:?}", i + 1));
            }
        }
        Ok(Self { entries })
    }

    /// Replaces (or adds) `key` with a value in config syntax.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), ConfigError> {
        let value = parse_value(raw).map_err(|e| ConfigError(format!("--{key}: {e}")))?;
        self.entries.insert(key.to_string(), value);
        Ok(())
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.entries.remove(key)
    }
}

fn parse_item<T: std::str::FromStr>(key: &str, s: &str) -> Result<T, ConfigError> {
    s.parse()
        .map_err(|_| ConfigError(format!("{key}: cannot parse {s:?}")))
}

fn scalar<T: std::str::FromStr>(raw: &mut RawConfig, key: &str, default: T) -> Result<T, ConfigError> {
    match raw.take(key) {
        None => Ok(default),
        Some(Value::Scalar(s)) => parse_item(key, &s),
        Some(Value::List(_)) => err(format!("{key}: expected a single value, got a list")),
    }
}

/// A scalar is accepted as a one-element list.
fn list<T: std::str::FromStr>(raw: &mut RawConfig, key: &str, default: Vec<T>) -> Result<Vec<T>, ConfigError> {
    match raw.take(key) {
        None => Ok(default),
        Some(Value::Scalar(s)) => Ok(vec![parse_item(key, &s)?]),
        Some(Value::List(items)) => items.iter().map(|s| parse_item(key, s)).collect(),
    }
}

fn non_empty<T>(key: &str, v: Vec<T>) -> Result<Vec<T>, ConfigError> {
    if v.is_empty() {
        err(format!("{key}: list must not be empty"))
    } else {
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Maxcut,
    Heisenberg,
    OracleFixtures,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Maxcut => "maxcut",
            Experiment::Heisenberg => "heisenberg",
            Experiment::OracleFixtures => "oracle-fixtures",
        }
    }
}

/// Ansatz family named in a MaxCut sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzChoice {
    He,
    Qaoa(usize),
    Hea,
}

impl std::str::FromStr for AnsatzChoice {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "he" => Ok(Self::He),
            "hea" => Ok(Self::Hea),
            _ => match s.strip_prefix("qaoa_p").map(str::parse) {
                Some(Ok(p)) if p >= 1 => Ok(Self::Qaoa(p)),
                _ => Err(()),
            },
        }
    }
}

fn parse_frozen(key: &str, v: Vec<u8>) -> Result<Vec<FrozenState>, ConfigError> {
    v.into_iter()
        .map(|b| match b {
            0 => Ok(FrozenState::Zero),
            1 => Ok(FrozenState::One),
            _ => err(format!("{key}: frozen states are 0 or 1, got {b}")),
        })
        .collect()
}

/// Chain grid shared by `heisenberg` and `oracle-fixtures`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainGrid {
    pub n: usize,
    pub coupling: f64,
    pub h: Vec<f64>,
    pub d: Vec<usize>,
    pub frozen: Vec<FrozenState>,
}

impl ChainGrid {
    fn read(raw: &mut RawConfig) -> Result<Self, ConfigError> {
        let grid = Self {
            n: scalar(raw, "n", 6)?,
            coupling: scalar(raw, "coupling", 1.0)?,
            h: non_empty("h", list(raw, "h", vec![0.0, 1.0, 2.0, 3.0, 4.0])?)?,
            d: non_empty("d", list(raw, "d", vec![0, 1, 2])?)?,
            frozen: non_empty("frozen", parse_frozen("frozen", list(raw, "frozen", vec![0, 1])?)?)?,
        };
        if !(2..=MAX_CHAIN_SITES).contains(&grid.n) {
            return err(format!("n: chain length must be in 2..={MAX_CHAIN_SITES}, got {}", grid.n));
        }
        if let Some(d) = grid.d.iter().find(|&&d| d >= grid.n) {
            return err(format!("d: impurity site {d} outside a {}-site chain", grid.n));
        }
        if !grid.coupling.is_finite() || grid.h.iter().any(|h| !h.is_finite()) {
            return err("coupling and h must be finite");
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxcutSweep {
    pub n: Vec<usize>,
    /// Graph instance seeds.
    pub seeds: Vec<u64>,
    /// Optimizer seed shared by every cell.
    pub seed: u64,
    pub budget: usize,
    pub ansatze: Vec<AnsatzChoice>,
    /// Layers of the hardware-efficient ansatz.
    pub reps: usize,
    pub eval: EvalChoice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergSweep {
    pub grid: ChainGrid,
    /// Optimizer seeds.
    pub seeds: Vec<u64>,
    pub budget: usize,
    pub reps: usize,
    pub eval: EvalChoice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureSet {
    pub grid: ChainGrid,
    pub graph_n: Vec<usize>,
    /// Graph instance seeds.
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalChoice {
    Exact,
    Shots(usize),
}

impl EvalChoice {
    fn read(raw: &mut RawConfig) -> Result<Self, ConfigError> {
        let mode: String = scalar(raw, "eval_mode", "exact".to_string())?;
        let shots: usize = scalar(raw, "shots", 1000)?;
        match mode.as_str() {
            "exact" => Ok(Self::Exact),
            "shots" if shots > 0 => Ok(Self::Shots(shots)),
            "shots" => err("shots: must be at least 1"),
            _ => err(format!("eval_mode: expected `exact` or `shots`, got {mode:?}")),
        }
    }

    /// Shot streams are seeded by the optimizer seed of the cell.
    pub fn mode(self, seed: u64) -> EvalMode {
        match self {
            Self::Exact => EvalMode::Exact,
            Self::Shots(count) => EvalMode::Shots { count, seed },
        }
    }

    pub fn label(self) -> String {
        match self {
            Self::Exact => "exact".into(),
            Self::Shots(n) => format!("shots{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    Maxcut(MaxcutSweep),
    Heisenberg(HeisenbergSweep),
    OracleFixtures(FixtureSet),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sweep: Sweep,
    pub out: PathBuf,
}

impl ExperimentConfig {
    /// Consumes every key; leftovers are reported as unknown.
    pub fn from_raw(experiment: Experiment, mut raw: RawConfig) -> Result<Self, ConfigError> {
        let out: Option<String> = match raw.take("out") {
            None => None,
            Some(Value::Scalar(s)) => Some(s),
            Some(Value::List(_)) => return err("out: expected a path"),
        };
        let Some(out) = out else {
            return err("no output directory: set `out` in the config or pass --out");
        };
        let sweep = match experiment {
            Experiment::Maxcut => {
                let s = MaxcutSweep {
                    n: non_empty("n", list(&mut raw, "n", vec![5])?)?,
                    seeds: non_empty("seeds", list(&mut raw, "seeds", (0..10).collect())?)?,
                    seed: scalar(&mut raw, "seed", 0)?,
                    budget: scalar(&mut raw, "budget", 150)?,
                    ansatze: non_empty(
                        "ansatze",
                        list(
                            &mut raw,
                            "ansatze",
                            vec![
                                AnsatzChoice::He,
                                AnsatzChoice::Qaoa(1),
                                AnsatzChoice::Qaoa(2),
                                AnsatzChoice::Qaoa(3),
                                AnsatzChoice::Hea,
                            ],
                        )?,
                    )?,
                    reps: scalar(&mut raw, "reps", 2)?,
                    eval: EvalChoice::read(&mut raw)?,
                };
                if let Some(n) = s.n.iter().find(|&&n| !(2..=MAX_BRUTE_FORCE_NODES).contains(&n)) {
                    return err(format!("n: graph size must be in 2..={MAX_BRUTE_FORCE_NODES}, got {n}"));
                }
                Sweep::Maxcut(s)
            }
            Experiment::Heisenberg => Sweep::Heisenberg(HeisenbergSweep {
                grid: ChainGrid::read(&mut raw)?,
                seeds: non_empty("seeds", list(&mut raw, "seeds", vec![0])?)?,
                budget: scalar(&mut raw, "budget", 600)?,
                reps: scalar(&mut raw, "reps", 2)?,
                eval: EvalChoice::read(&mut raw)?,
            }),
            Experiment::OracleFixtures => {
                let f = FixtureSet {
                    grid: ChainGrid::read(&mut raw)?,
                    graph_n: non_empty("graph_n", list(&mut raw, "graph_n", vec![5])?)?,
                    seeds: non_empty("seeds", list(&mut raw, "seeds", (0..10).collect())?)?,
                };
                if let Some(n) = f.graph_n.iter().find(|&&n| !(2..=MAX_BRUTE_FORCE_NODES).contains(&n)) {
                    return err(format!("graph_n: graph size must be in 2..={MAX_BRUTE_FORCE_NODES}, got {n}"));
                }
                Sweep::OracleFixtures(f)
            }
        };
        if let Some(key) = raw.entries.keys().next() {
            return err(format!("unknown key {key:?} for {}", experiment.name()));
        }
        Ok(Self {
            sweep,
            out: PathBuf::from(out),
        })
    }
}
