//! Sweeps over noise level, observation time or dimension, with CSV tables,
//! log-log SVG plots and a text summary.

mod config;
mod plot;
mod table;

pub use config::{repro_config, Axis, ExperimentConfig, Figure, ProblemConfig, ReproOverrides, SweepConfig};
pub use plot::{emit_plot, layout, reference_lines, render_svg, PlotLayout, ReferenceLine};
pub use table::{ResultTable, Row, COLUMNS, STATUS_OK};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;

use crate::asymptotics::{predict_q, randomwalk_exact_moments, sample_taylor_coefficients};
use crate::optimize::{minimize, OptimizeOptions};
use crate::problems::{generate_lorenz_instance, LORENZ_MU0};
use crate::problems::{gaussian_target, RandomWalkProblem};
use crate::quality::{estimate_q, fit_slope};
use crate::samplers::{draw_ensemble, Method};
use crate::target::{ModeInfo, TargetDensity};
use crate::{Error, Matrix, Result, Vector};

/// Draws used for Monte Carlo predictions when no closed form exists.
pub const PREDICTION_DRAWS: usize = 10_000;

/// The fixed Hessian of the quadratic problem: `1 + i/2` on the diagonal,
/// `0.3` next to it.
pub fn quadratic_hessian(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0 + 0.5 * i as f64
        } else if i.abs_diff(j) == 1 {
            0.3
        } else {
            0.0
        }
    })
}

/// A built problem at one grid point.
pub struct Instance {
    pub target: TargetDensity,
    pub mode: ModeInfo,
    kind: ProblemConfig,
}

impl Instance {
    pub fn build(p: &ProblemConfig, seed: u64) -> Result<Self> {
        let (target, start) = match *p {
            ProblemConfig::RandomWalk {
                n_dim,
                alpha,
                beta,
                epsilon,
            } => (RandomWalkProblem::new(n_dim, alpha, beta, epsilon)?.target(), vec![0.0; n_dim]),
            ProblemConfig::Lorenz63 { t_obs, epsilon } => {
                (generate_lorenz_instance(epsilon, t_obs, seed)?.target()?, LORENZ_MU0.to_vec())
            }
            ProblemConfig::Quadratic { n_dim, epsilon } => {
                if n_dim == 0 || !(epsilon > 0.0) {
                    return Err(Error::Config("quadratic problem needs n_dim ≥ 1 and ε > 0".into()));
                }
                let h = quadratic_hessian(n_dim) / epsilon;
                (gaussian_target(Vector::zeros(n_dim), h, epsilon)?.0, vec![0.5; n_dim])
            }
        };
        let mode = minimize(&target, &OptimizeOptions::new(start))?;
        Ok(Self {
            target,
            mode,
            kind: p.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.mode.dim()
    }

    /// Leading-order `Q` for each method: exact moments for the random walk,
    /// zero for the quadratic, Monte Carlo moments for Lorenz.
    pub fn predictions(&self, methods: &[Method], seed: u64) -> Result<Vec<Option<f64>>> {
        match self.kind {
            ProblemConfig::RandomWalk {
                n_dim,
                alpha,
                beta,
                epsilon,
            } => {
                let mom = randomwalk_exact_moments(n_dim, alpha, beta);
                methods
                    .iter()
                    .map(|&m| predict_q(m, n_dim, epsilon, &mom).map(Some))
                    .collect()
            }
            ProblemConfig::Quadratic { .. } => Ok(vec![Some(0.0); methods.len()]),
            ProblemConfig::Lorenz63 { .. } => {
                let s = sample_taylor_coefficients(&self.target, &self.mode, PREDICTION_DRAWS, seed)?;
                let mom = s.moments();
                methods
                    .iter()
                    .map(|&m| predict_q(m, self.dim(), 1.0, &mom).map(Some))
                    .collect()
            }
        }
    }
}

fn failed(e: &Error) -> String {
    format!("failed: {e}")
}

fn point_rows(cfg: &ExperimentConfig, value: f64) -> Vec<Row> {
    let base = |method: Method, dim: usize| Row {
        problem: cfg.problem.name().to_string(),
        method,
        axis: cfg.sweep.axis,
        axis_value: value,
        dim,
        n_samples: cfg.n_samples,
        seed: cfg.seed,
        q_hat: None,
        q_se: None,
        q_pred: None,
        status: STATUS_OK.to_string(),
    };
    let nominal_dim = match cfg.problem.at(cfg.sweep.axis, value) {
        Ok(ProblemConfig::RandomWalk { n_dim, .. }) | Ok(ProblemConfig::Quadratic { n_dim, .. }) => n_dim,
        _ => 3,
    };
    let instance = cfg
        .problem
        .at(cfg.sweep.axis, value)
        .and_then(|p| Instance::build(&p, cfg.seed));
    let inst = match instance {
        Ok(i) => i,
        Err(e) => {
            return cfg
                .methods
                .iter()
                .map(|&m| Row {
                    status: failed(&e),
                    ..base(m, nominal_dim)
                })
                .collect()
        }
    };
    let preds = if cfg.emit_predictions {
        inst.predictions(&cfg.methods, cfg.seed).unwrap_or_else(|e| {
            log::warn!("predictions at {} = {value}: {e}", cfg.sweep.axis);
            vec![None; cfg.methods.len()]
        })
    } else {
        vec![None; cfg.methods.len()]
    };
    cfg.methods
        .iter()
        .zip(preds)
        .map(|(&method, q_pred)| {
            let mut row = base(method, inst.dim());
            row.q_pred = q_pred;
            let result = draw_ensemble(method, &inst.target, &inst.mode, cfg.n_samples, cfg.seed).and_then(|xs| {
                let lw: Vec<f64> = xs.iter().map(|s| s.log_weight).collect();
                estimate_q(&lw)
            });
            match result {
                Ok(r) => {
                    row.q_hat = Some(r.q_hat);
                    row.q_se = Some(r.q_se);
                }
                Err(e) => row.status = failed(&e),
            }
            info!(
                "{} {}={} {}: {}",
                row.problem,
                row.axis,
                value,
                method,
                row.q_hat.map_or(row.status.clone(), |q| format!("Q = {q:e}"))
            );
            row
        })
        .collect()
}

/// Runs every (grid value, method) pair. Failures become row statuses;
/// rows are ordered by grid value, then by the configured method order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let rows: Vec<Vec<Row>> = cfg.sweep.values.par_iter().map(|&v| point_rows(cfg, v)).collect();
    Ok(ResultTable {
        rows: rows.into_iter().flatten().collect(),
    })
}

/// Per-method slopes, constants at the smallest grid value, ratios to the
/// predictions, and the number of failed rows.
pub fn report(table: &ResultTable) -> String {
    let mut s = String::new();
    if let Some(r) = table.rows.first() {
        let _ = writeln!(s, "problem {}, axis {}, {} rows", r.problem, r.axis, table.rows.len());
    }
    for method in table.methods() {
        let rows: Vec<&Row> = table.method_rows(method).filter(|r| r.q_hat.unwrap_or(0.0) > 0.0).collect();
        let Some(first) = rows.first() else {
            let _ = writeln!(s, "{method:<4} no successful rows");
            continue;
        };
        let p = first.axis.nominal_slope(method);
        let xs: Vec<f64> = rows.iter().map(|r| r.axis_value).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.q_hat.unwrap()).collect();
        let slope = match fit_slope(&xs, &ys) {
            Ok((b, _)) => format!("slope {b:.3}"),
            Err(_) => "slope n/a".to_string(),
        };
        let constant = ys[0] / xs[0].powf(p);
        let _ = write!(s, "{method:<4} {slope} (nominal {p}), constant {constant:.4e} at {}={}", first.axis, xs[0]);
        let ratios: Vec<String> = rows
            .iter()
            .filter_map(|r| match (r.q_hat, r.q_pred) {
                (Some(q), Some(p)) if p > 0.0 => Some(format!("{:.3}", q / p)),
                _ => None,
            })
            .collect();
        if !ratios.is_empty() {
            let _ = write!(s, ", q/q_pred [{}]", ratios.join(" "));
        }
        s.push('\n');
    }
    let _ = writeln!(s, "failures: {}", table.n_failed());
    s
}

/// Output paths of a run.
pub struct Outputs {
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
}

/// Writes `results.csv` and, when at least one row succeeded, `plot.svg`.
pub fn write_outputs(table: &ResultTable, dir: &Path) -> Result<Outputs> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join("results.csv");
    table.write_csv(&csv)?;
    let svg = dir.join("plot.svg");
    let svg = match emit_plot(table, &svg) {
        Ok(()) => Some(svg),
        Err(Error::InvalidArgument(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(Outputs { csv, svg })
}
