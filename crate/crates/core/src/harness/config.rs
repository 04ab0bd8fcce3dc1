//! Flat `key = value` experiment manifests.
//!
//! ```text
//! # comments start with '#'; blank lines are ignored
//! problem     = group 3                 # or: hard heterogeneity mid-lr
//!                                       #     libsvm data/a9a.txt
//!                                       #     synthetic 2000 20
//! methods     = sfl, pfl
//! rounds      = 100
//! clients     = 2
//! local_steps = 10
//! lr_grid     = default                 # or a list: 0.01, 1e-3, 10^-1.5
//! seeds       = 0..10                   # half-open range, or a list: 1, 4, 9
//! ```
//!
//! Every key appears at most once. CLI overrides use the same `key=value`
//! syntax and replace manifest entries. The full key list is [`KEYS`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::HarnessError;
use crate::objectives::{HardKind, Regime};
use crate::trainers::{Method, TrainingConfig};

/// `{10^−2.5, 10^−2, 10^−1.5, 10^−1, 10^−0.5}`.
pub fn default_lr_grid() -> Vec<f64> {
    [-2.5f64, -2.0, -1.5, -1.0, -0.5]
        .iter()
        .map(|e| 10f64.powf(*e))
        .collect()
}

/// Every key the manifest grammar accepts.
pub const KEYS: &[&str] = &[
    "problem",
    "methods",
    "rounds",
    "clients",
    "local_steps",
    "participants",
    "server_lr",
    "clip",
    "batch",
    "lr_grid",
    "sfl_lr_scale",
    "seeds",
    "init",
    "output",
    // quadratic and hard-instance parameters
    "sigma",
    "zeta",
    "lambda",
    "lambda0",
    "lambda1",
    "mu",
    // logistic parameters
    "labels_per_client",
    "reg",
    "data_seed",
    "partition_seed",
];

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Libsvm(PathBuf),
    Synthetic { n: usize, dim: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    /// One of the ten two-client quadratic groups, optionally with Rademacher
    /// gradient noise of scale `sigma`.
    Group { id: u32, sigma: f64 },
    Hard {
        kind: HardKind,
        regime: Regime,
        lambda: f64,
        lambda0: f64,
        lambda1: f64,
        sigma: f64,
        zeta: f64,
        mu: f64,
    },
    /// Binary logistic regression on a label-restricted partition.
    Logistic {
        source: DataSource,
        labels_per_client: usize,
        reg: f64,
        partition_seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// The instance's own starting point (zero unless a hard instance says otherwise).
    Auto,
    /// One value for every coordinate.
    Fill(f64),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub methods: Vec<Method>,
    /// Run shape; `client_lr` and `seed` are overwritten per grid cell.
    pub training: TrainingConfig,
    pub lr_grid: Vec<f64>,
    pub seeds: Vec<u64>,
    /// SFL runs at `sfl_lr_scale · η` in [`run_experiment`](super::run_experiment).
    /// Defaults to ½ for quadratic groups and 1 otherwise; grid search ignores it.
    pub sfl_lr_scale: f64,
    pub init: Init,
    pub output: Option<PathBuf>,
}

/// Manifest entries before interpretation: key → (line, raw value).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = split_pair(content).ok_or_else(|| HarnessError::Config {
                line: line_no,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            if raw.entries.contains_key(key) {
                return Err(HarnessError::Config {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
            raw.insert(key, value, line_no)?;
        }
        Ok(raw)
    }

    fn insert(&mut self, key: &str, value: &str, line: usize) -> Result<(), HarnessError> {
        if !KEYS.contains(&key) {
            return Err(HarnessError::Config {
                line,
                message: format!("unknown key `{key}`"),
            });
        }
        self.entries
            .insert(key.to_string(), (line, value.to_string()));
        Ok(())
    }

    /// Applies a `key=value` override (line 0 in error messages).
    pub fn set(&mut self, pair: &str) -> Result<(), HarnessError> {
        let (key, value) = split_pair(pair.trim()).ok_or_else(|| HarnessError::Config {
            line: 0,
            message: format!("override `{pair}` is not `key=value`"),
        })?;
        self.insert(key, value, 0)
    }

    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, HarnessError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|(line, v)| {
                v.parse::<T>().map_err(|e| HarnessError::Config {
                    line,
                    message: format!("`{key}`: cannot parse `{v}`: {e}"),
                })
            })
            .transpose()
    }

    fn float(&self, key: &str, default: f64) -> Result<f64, HarnessError> {
        match self.get(key) {
            None => Ok(default),
            Some((line, v)) => {
                parse_float(v).map_err(|message| HarnessError::Config { line, message })
            }
        }
    }
}

fn split_pair(s: &str) -> Option<(&str, &str)> {
    let (k, v) = s.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    (!k.is_empty() && !v.is_empty()).then_some((k, v))
}

/// Accepts ordinary floats and `10^x`.
fn parse_float(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some(e) = s.strip_prefix("10^") {
        return e
            .parse::<f64>()
            .map(|e| 10f64.powf(e))
            .map_err(|_| format!("bad exponent in `{s}`"));
    }
    s.parse::<f64>()
        .map_err(|_| format!("`{s}` is not a number"))
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(item)
        .collect()
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let lo: u64 = a
            .trim()
            .parse()
            .map_err(|_| format!("bad range start `{a}`"))?;
        let hi: u64 = b
            .trim()
            .parse()
            .map_err(|_| format!("bad range end `{b}`"))?;
        return Ok((lo..hi).collect());
    }
    parse_list(s, |t| {
        t.parse::<u64>().map_err(|_| format!("`{t}` is not a seed"))
    })
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        Self::from_raw(&RawConfig::parse(text)?)
    }

    pub fn parse_with_overrides(text: &str, overrides: &[String]) -> Result<Self, HarnessError> {
        let mut raw = RawConfig::parse(text)?;
        for o in overrides {
            raw.set(o)?;
        }
        Self::from_raw(&raw)
    }

    pub fn from_file(path: &Path, overrides: &[String]) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse_with_overrides(&text, overrides)
    }

    pub fn from_raw(raw: &RawConfig) -> Result<Self, HarnessError> {
        let cfg_err = |key: &str, message: String| HarnessError::Config {
            line: raw.get(key).map_or(0, |(l, _)| l),
            message: format!("`{key}`: {message}"),
        };

        let (_, problem_str) = raw
            .get("problem")
            .ok_or_else(|| cfg_err("problem", "missing".into()))?;
        let problem = parse_problem(problem_str, raw).map_err(|m| cfg_err("problem", m))?;

        let methods = match raw.get("methods") {
            None => vec![Method::Sfl, Method::Pfl],
            Some((_, v)) => parse_list(v, |t| t.parse::<Method>().map_err(|e| e.to_string()))
                .map_err(|m| cfg_err("methods", m))?,
        };

        let clients = match (&problem, raw.parsed::<usize>("clients")?) {
            (_, Some(m)) => m,
            (Problem::Group { .. }, None) => 2,
            _ => return Err(cfg_err("clients", "required for this problem".into())),
        };
        if matches!(problem, Problem::Group { .. }) && clients != 2 {
            return Err(cfg_err(
                "clients",
                format!("quadratic groups have exactly 2 clients, got {clients}"),
            ));
        }
        let rounds = raw
            .parsed::<usize>("rounds")?
            .ok_or_else(|| cfg_err("rounds", "missing".into()))?;
        let local_steps = raw.parsed::<usize>("local_steps")?.unwrap_or(1);
        let default_batch = if matches!(problem, Problem::Logistic { .. }) {
            8
        } else {
            1
        };
        let mut training = TrainingConfig::new(rounds, clients, local_steps, 0.0)
            .with_participants(raw.parsed::<usize>("participants")?.unwrap_or(clients))
            .with_server_lr(raw.float("server_lr", 1.0)?)
            .with_batch(raw.parsed::<usize>("batch")?.unwrap_or(default_batch));
        if let Some((line, v)) = raw.get("clip") {
            if v != "none" {
                let c = parse_float(v).map_err(|message| HarnessError::Config { line, message })?;
                training = training.with_clip(c);
            }
        }

        let lr_grid = match raw.get("lr_grid") {
            None => default_lr_grid(),
            Some((_, "default")) => default_lr_grid(),
            Some((_, v)) => parse_list(v, parse_float).map_err(|m| cfg_err("lr_grid", m))?,
        };
        let seeds = match raw.get("seeds") {
            None => vec![0],
            Some((_, v)) => parse_seeds(v).map_err(|m| cfg_err("seeds", m))?,
        };
        let default_scale = if matches!(problem, Problem::Group { .. }) {
            0.5
        } else {
            1.0
        };
        let sfl_lr_scale = raw.float("sfl_lr_scale", default_scale)?;
        let init = match raw.get("init") {
            None | Some((_, "auto")) => Init::Auto,
            Some((_, v)) => {
                let xs = parse_list(v, parse_float).map_err(|m| cfg_err("init", m))?;
                if xs.len() == 1 {
                    Init::Fill(xs[0])
                } else {
                    Init::Vector(xs)
                }
            }
        };
        let output = raw.get("output").map(|(_, v)| PathBuf::from(v));

        let cfg = ExperimentConfig {
            problem,
            methods,
            training,
            lr_grid,
            seeds,
            sfl_lr_scale,
            init,
            output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let invalid = |m: &str| Err(HarnessError::Invalid(m.to_string()));
        if self.methods.is_empty() {
            return invalid("method set is empty");
        }
        if self.lr_grid.is_empty() {
            return invalid("learning-rate grid is empty");
        }
        if self.lr_grid.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return invalid("learning rates must be finite and positive");
        }
        if self.seeds.is_empty() {
            return invalid("seed list is empty");
        }
        if !(self.sfl_lr_scale.is_finite() && self.sfl_lr_scale > 0.0) {
            return invalid("sfl_lr_scale must be finite and positive");
        }
        self.training.clone().with_lr(self.lr_grid[0]).validate()?;
        Ok(())
    }
}

fn parse_problem(s: &str, raw: &RawConfig) -> Result<Problem, String> {
    let tokens: Vec<&str> = s.split_whitespace().collect();
    let num = |key: &str, default: f64| raw.float(key, default).map_err(|e| e.to_string());
    match tokens.as_slice() {
        ["group", id] => {
            let id: u32 = id.parse().map_err(|_| format!("bad group id `{id}`"))?;
            if !(1..=10).contains(&id) {
                return Err(format!("group id must be in 1..=10, got {id}"));
            }
            Ok(Problem::Group {
                id,
                sigma: num("sigma", 0.0)?,
            })
        }
        ["hard", kind, regime] => {
            let kind = match *kind {
                "stochastic" => HardKind::Stochastic,
                "heterogeneity" => HardKind::Heterogeneity,
                "composite" | "composite-sc" => HardKind::CompositeSc,
                other => return Err(format!("unknown hard-instance kind `{other}`")),
            };
            let regime: Regime = regime
                .parse()
                .map_err(|e: crate::objectives::ObjectiveError| e.to_string())?;
            let lambda1 = num("lambda1", 1.0)?;
            Ok(Problem::Hard {
                kind,
                regime,
                lambda: num("lambda", 1.0)?,
                lambda0: num("lambda0", 1010.0 * lambda1)?,
                lambda1,
                sigma: num("sigma", 1.0)?,
                zeta: num("zeta", 1.0)?,
                mu: num("mu", 1.0)?,
            })
        }
        ["libsvm", path] => logistic(DataSource::Libsvm(PathBuf::from(path)), raw),
        ["synthetic", n, dim] => {
            let n: usize = n.parse().map_err(|_| format!("bad sample count `{n}`"))?;
            let dim: usize = dim.parse().map_err(|_| format!("bad dimension `{dim}`"))?;
            let seed = raw
                .parsed::<u64>("data_seed")
                .map_err(|e| e.to_string())?
                .unwrap_or(0);
            logistic(DataSource::Synthetic { n, dim, seed }, raw)
        }
        _ => Err(format!("unrecognised problem `{s}`")),
    }
}

fn logistic(source: DataSource, raw: &RawConfig) -> Result<Problem, String> {
    Ok(Problem::Logistic {
        source,
        labels_per_client: raw
            .parsed::<usize>("labels_per_client")
            .map_err(|e| e.to_string())?
            .unwrap_or(1),
        reg: raw.float("reg", 1e-3).map_err(|e| e.to_string())?,
        partition_seed: raw
            .parsed::<u64>("partition_seed")
            .map_err(|e| e.to_string())?
            .unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "\
# figure-2 style cell
problem = group 3
rounds = 100
local_steps = 10   # K
lr_grid = 0.01, 10^-2
seeds = 0..3
";

    #[test]
    fn parses_basic_manifest() {
        let cfg = ExperimentConfig::parse(BASIC).unwrap();
        assert_eq!(cfg.problem, Problem::Group { id: 3, sigma: 0.0 });
        assert_eq!(cfg.methods, vec![Method::Sfl, Method::Pfl]);
        assert_eq!(cfg.training.rounds, 100);
        assert_eq!(cfg.training.clients, 2);
        assert_eq!(cfg.training.local_steps, 10);
        assert_eq!(cfg.lr_grid, vec![0.01, 0.01]);
        assert_eq!(cfg.seeds, vec![0, 1, 2]);
        assert_eq!(cfg.sfl_lr_scale, 0.5);
        assert_eq!(cfg.init, Init::Auto);
    }

    #[test]
    fn overrides_replace_entries() {
        let cfg = ExperimentConfig::parse_with_overrides(
            BASIC,
            &["rounds=5".into(), "methods = pfl".into()],
        )
        .unwrap();
        assert_eq!(cfg.training.rounds, 5);
        assert_eq!(cfg.methods, vec![Method::Pfl]);
    }

    #[test]
    fn logistic_defaults() {
        let cfg = ExperimentConfig::parse(
            "problem = synthetic 100 5\nclients = 4\nrounds = 3\nparticipants = 2\n",
        )
        .unwrap();
        assert_eq!(
            cfg.problem,
            Problem::Logistic {
                source: DataSource::Synthetic {
                    n: 100,
                    dim: 5,
                    seed: 0
                },
                labels_per_client: 1,
                reg: 1e-3,
                partition_seed: 0
            }
        );
        assert_eq!(cfg.training.batch, 8);
        assert_eq!(cfg.training.participants, 2);
        assert_eq!(cfg.sfl_lr_scale, 1.0);
        assert_eq!(cfg.lr_grid, default_lr_grid());
    }

    #[test]
    fn hard_problem_and_init() {
        let cfg = ExperimentConfig::parse(
            "problem = hard heterogeneity mid-lr\nclients = 4\nrounds = 2\nzeta = 3\ninit = 0.5\nclip = 2\n",
        )
        .unwrap();
        match cfg.problem {
            Problem::Hard {
                kind,
                regime,
                zeta,
                lambda0,
                ..
            } => {
                assert_eq!(kind, HardKind::Heterogeneity);
                assert_eq!(regime, Regime::MidLr);
                assert_eq!(zeta, 3.0);
                assert_eq!(lambda0, 1010.0);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(cfg.init, Init::Fill(0.5));
        assert_eq!(cfg.training.clip, Some(2.0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = ExperimentConfig::parse("problem = group 1\nrounds = 10\nbogus = 1\n").unwrap_err();
        assert!(matches!(e, HarnessError::Config { line: 3, .. }), "{e}");
        let e = ExperimentConfig::parse("problem = group 1\nrounds = ten\n").unwrap_err();
        assert!(matches!(e, HarnessError::Config { line: 2, .. }), "{e}");
        let e = ExperimentConfig::parse("problem = group 1\nrounds = 1\nrounds = 2\n").unwrap_err();
        assert!(e.to_string().contains("duplicate"));
        assert!(ExperimentConfig::parse("problem = group 11\nrounds = 1\n").is_err());
        assert!(ExperimentConfig::parse("problem = group 1\nrounds = 1\nclients = 3\n").is_err());
        assert!(ExperimentConfig::parse("problem = group 1\nrounds = 1\nmethods = sgd\n").is_err());
        assert!(ExperimentConfig::parse("problem = synthetic 10 2\nrounds = 1\n").is_err());
        assert!(ExperimentConfig::parse("rounds = 1\n").is_err());
        assert!(ExperimentConfig::parse("problem group 1\n").is_err());
    }

    #[test]
    fn validation_rejects_empty_sets() {
        assert!(ExperimentConfig::parse("problem = group 1\nrounds = 1\nseeds = 3..3\n").is_err());
        assert!(
            ExperimentConfig::parse("problem = group 1\nrounds = 1\nlr_grid = -0.1\n").is_err()
        );
        assert!(ExperimentConfig::parse("problem = group 1\nrounds = 1\nmethods = ,\n").is_err());
    }
}
