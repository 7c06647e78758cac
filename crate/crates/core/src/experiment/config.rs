use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::samplers::Method;
use crate::{Error, Result};

/// Quantity varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "epsilon")]
    Epsilon,
    /// Observation time of the Lorenz problem.
    #[serde(rename = "T")]
    T,
    #[serde(rename = "n_dim")]
    NDim,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::Epsilon => "epsilon",
            Axis::T => "T",
            Axis::NDim => "n_dim",
        }
    }

    /// Expected log-log slope of `Q` along this axis.
    pub fn nominal_slope(&self, method: Method) -> f64 {
        match (self, method.is_symmetrized()) {
            (Axis::T, false) => 4.0,
            (Axis::T, true) => 6.0,
            (_, false) => 1.0,
            (_, true) => 2.0,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn one() -> f64 {
    1.0
}
fn two() -> usize {
    2
}
fn default_eps() -> f64 {
    1e-4
}
fn default_t_obs() -> f64 {
    0.05
}
fn default_n_samples() -> usize {
    10_000
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn yes() -> bool {
    true
}

/// Problem name and parameters. The swept parameter is overridden per grid
/// point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    RandomWalk {
        #[serde(default = "two")]
        n_dim: usize,
        #[serde(default = "one")]
        alpha: f64,
        #[serde(default = "one")]
        beta: f64,
        #[serde(default = "default_eps")]
        epsilon: f64,
    },
    Lorenz63 {
        #[serde(default = "default_t_obs")]
        t_obs: f64,
        #[serde(default = "one")]
        epsilon: f64,
    },
    /// `G = xᵀHx / (2ε)` with a fixed well-conditioned `H`.
    Quadratic {
        #[serde(default = "two")]
        n_dim: usize,
        #[serde(default = "one")]
        epsilon: f64,
    },
}

impl ProblemConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemConfig::RandomWalk { .. } => "random_walk",
            ProblemConfig::Lorenz63 { .. } => "lorenz63",
            ProblemConfig::Quadratic { .. } => "quadratic",
        }
    }

    /// The same problem with the swept parameter set to `value`.
    pub fn at(&self, axis: Axis, value: f64) -> Result<ProblemConfig> {
        let mut p = self.clone();
        let bad = || Error::Config(format!("axis {axis} does not apply to problem {}", self.name()));
        match (&mut p, axis) {
            (ProblemConfig::RandomWalk { epsilon, .. }, Axis::Epsilon)
            | (ProblemConfig::Lorenz63 { epsilon, .. }, Axis::Epsilon)
            | (ProblemConfig::Quadratic { epsilon, .. }, Axis::Epsilon) => *epsilon = value,
            (ProblemConfig::Lorenz63 { t_obs, .. }, Axis::T) => *t_obs = value,
            (ProblemConfig::RandomWalk { n_dim, .. }, Axis::NDim)
            | (ProblemConfig::Quadratic { n_dim, .. }, Axis::NDim) => *n_dim = value as usize,
            _ => return Err(bad()),
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: Axis,
    pub values: Vec<f64>,
}

/// A sweep experiment, read from JSON.
///
/// ```json
/// {
///   "problem": { "name": "random_walk", "n_dim": 2, "alpha": 1.0, "beta": 1.0 },
///   "methods": ["lm", "slm", "rm", "srm"],
///   "sweep": { "axis": "epsilon", "values": [1e-6, 1e-5, 1e-4] },
///   "n_samples": 10000,
///   "seed": 1,
///   "output_dir": "out",
///   "emit_predictions": true
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub methods: Vec<Method>,
    pub sweep: SweepConfig,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "yes")]
    pub emit_predictions: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("methods must be nonempty".into()));
        }
        let v = &self.sweep.values;
        if v.is_empty() {
            return Err(Error::Config("sweep grid must be nonempty".into()));
        }
        if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::Config("sweep values must be positive".into()));
        }
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("sweep values must be strictly increasing".into()));
        }
        if self.sweep.axis == Axis::NDim && v.iter().any(|x| x.fract() != 0.0) {
            return Err(Error::Config("n_dim values must be integers".into()));
        }
        if self.n_samples < 2 {
            return Err(Error::Config("n_samples must be at least 2".into()));
        }
        self.problem.at(self.sweep.axis, v[0])?;
        Ok(())
    }
}

/// The built-in figure reproductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Random walk, `Q` against `ε`.
    Fig1,
    /// Random walk, `Q` against `N`.
    Fig2,
    /// Lorenz '63 at `ε = 1`, `Q` against `T`.
    Fig3,
    /// Lorenz '63 at `T = 0.05`, `Q` against `ε`.
    Fig4,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            other => Err(Error::Config(format!("unknown figure '{other}'"))),
        }
    }
}

/// Knobs the `repro` subcommand exposes on top of the built-in grids.
#[derive(Debug, Clone, Default)]
pub struct ReproOverrides {
    pub n_samples: Option<usize>,
    pub seed: Option<u64>,
    /// Random-walk dimension for `fig1`.
    pub n_dim: Option<usize>,
    /// Noise level for `fig2`.
    pub epsilon: Option<f64>,
    pub output_dir: Option<PathBuf>,
}

fn half_decades(lo_exp: i32, hi_exp: i32) -> Vec<f64> {
    let mut v = Vec::new();
    for e in lo_exp..=hi_exp {
        v.push(10f64.powi(e));
        if e < hi_exp {
            v.push(10f64.powf(e as f64 + 0.5));
        }
    }
    v
}

pub fn repro_config(fig: Figure, o: &ReproOverrides) -> ExperimentConfig {
    let (problem, sweep, n_samples) = match fig {
        Figure::Fig1 => (
            ProblemConfig::RandomWalk {
                n_dim: o.n_dim.unwrap_or(2),
                alpha: 1.0,
                beta: 1.0,
                epsilon: 1e-4,
            },
            SweepConfig {
                axis: Axis::Epsilon,
                values: half_decades(-6, 0),
            },
            10_000,
        ),
        Figure::Fig2 => (
            ProblemConfig::RandomWalk {
                n_dim: 2,
                alpha: 1.0,
                beta: 1.0,
                epsilon: o.epsilon.unwrap_or(1e-5),
            },
            SweepConfig {
                axis: Axis::NDim,
                values: vec![2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0],
            },
            10_000,
        ),
        Figure::Fig3 => (
            ProblemConfig::Lorenz63 {
                t_obs: 0.05,
                epsilon: 1.0,
            },
            SweepConfig {
                axis: Axis::T,
                values: vec![0.01, 0.02, 0.04, 0.08, 0.16, 0.32, 0.64, 1.28],
            },
            1_000,
        ),
        Figure::Fig4 => (
            ProblemConfig::Lorenz63 {
                t_obs: 0.05,
                epsilon: 1.0,
            },
            SweepConfig {
                axis: Axis::Epsilon,
                values: half_decades(-6, 0),
            },
            1_000,
        ),
    };
    ExperimentConfig {
        problem,
        methods: Method::ALL.to_vec(),
        sweep,
        n_samples: o.n_samples.unwrap_or(n_samples),
        seed: o.seed.unwrap_or(1),
        output_dir: o.output_dir.clone().unwrap_or_else(|| PathBuf::from(format!("out/{fig:?}").to_lowercase())),
        emit_predictions: true,
    }
}
