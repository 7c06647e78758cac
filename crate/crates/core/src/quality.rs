//! The quality measure `Q = E(w²)/E(w)² − 1` of a weighted ensemble, its
//! jackknife error, and log-log slope fits for scaling studies.

use std::ops::Range;

use crate::{Error, Result};

/// Smallest `Q` shown on a logarithmic axis.
pub const PLOT_FLOOR: f64 = 1e-14;

const JACKKNIFE_BATCHES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub q_hat: f64,
    pub q_se: f64,
    pub n_samples: usize,
    pub max_log_weight: f64,
    /// `1 / (1 + q_hat)`, so `n · effective_sample_fraction` is an effective
    /// sample size.
    pub effective_sample_fraction: f64,
}

/// Count, mean and centred sum of squares of a block of values.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn of(v: &[f64]) -> Self {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let m2 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
        Self { n, mean, m2 }
    }

    fn merge(self, o: Self) -> Self {
        if self.n == 0.0 {
            return o;
        }
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        Self {
            n,
            mean: self.mean + delta * o.n / n,
            m2: self.m2 + o.m2 + delta * delta * self.n * o.n / n,
        }
    }

    fn q(&self) -> f64 {
        (self.m2 / self.n) / (self.mean * self.mean)
    }
}

/// Splits `0..n` into `min(100, n)` contiguous, nearly equal batches.
pub fn batch_ranges(n: usize) -> Vec<Range<usize>> {
    let b = n.min(JACKKNIFE_BATCHES);
    (0..b).map(|k| (k * n / b)..((k + 1) * n / b)).collect()
}

/// Jackknife standard error from leave-one-batch-out estimates.
pub fn jackknife_se(leave_out: &[f64]) -> f64 {
    let b = leave_out.len() as f64;
    if b < 2.0 {
        return 0.0;
    }
    let mean = leave_out.iter().sum::<f64>() / b;
    let ss: f64 = leave_out.iter().map(|x| (x - mean) * (x - mean)).sum();
    ((b - 1.0) / b * ss).sqrt()
}

/// Estimates `Q` from log-weights. Weights are rescaled by the largest
/// log-weight before exponentiating, and `Q` is computed as
/// `mean((v − v̄)²) / v̄²`.
pub fn estimate_q(log_weights: &[f64]) -> Result<QualityReport> {
    let n = log_weights.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 log-weights, got {n}")));
    }
    if let Some(bad) = log_weights.iter().find(|l| l.is_nan() || **l == f64::INFINITY) {
        return Err(Error::NonFinite {
            context: format!("log-weight {bad}"),
        });
    }
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::DegenerateWeights);
    }
    let v: Vec<f64> = log_weights.iter().map(|l| (l - max).exp()).collect();

    let blocks: Vec<Moments> = batch_ranges(n).into_iter().map(|r| Moments::of(&v[r])).collect();
    let total = blocks.iter().fold(Moments::default(), |acc, b| acc.merge(*b));
    let q_hat = total.q();

    let leave_out: Vec<f64> = (0..blocks.len())
        .map(|skip| {
            blocks
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != skip)
                .fold(Moments::default(), |acc, (_, b)| acc.merge(*b))
                .q()
        })
        .filter(|q| q.is_finite())
        .collect();
    let q_se = jackknife_se(&leave_out);

    Ok(QualityReport {
        q_hat,
        q_se,
        n_samples: n,
        max_log_weight: max,
        effective_sample_fraction: (1.0 / (1.0 + q_hat.max(0.0))).clamp(f64::MIN_POSITIVE, 1.0),
    })
}

/// `max(q, 1e-14)`.
pub fn plot_floor(q: f64) -> f64 {
    if q.is_nan() {
        PLOT_FLOOR
    } else {
        q.max(PLOT_FLOOR)
    }
}

/// Ordinary least squares of `log y` on `log x`; returns `(slope, intercept)`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("slope fit needs at least 2 points".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument("slope fit needs positive finite values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("slope fit needs distinct x values".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

fn population_variance(v: &[f64]) -> f64 {
    let m = Moments::of(v);
    m.m2 / m.n
}

/// Builds `w = 1 + εʳu₁ + ε²ʳu₂` for each `ε` in the grid and returns the
/// largest `|Q / (ε²ʳ var u₁) − 1|`.
pub fn variance_lemma_check(u1: &[f64], u2: &[f64], r: f64, eps_grid: &[f64]) -> Result<f64> {
    if u1.len() != u2.len() {
        return Err(Error::DimensionMismatch {
            expected: u1.len(),
            got: u2.len(),
        });
    }
    if u1.len() < 2 || eps_grid.is_empty() {
        return Err(Error::InvalidArgument("need at least 2 samples and one ε".into()));
    }
    if eps_grid.iter().any(|e| !(*e > 0.0 && *e <= 1e-2)) {
        return Err(Error::InvalidArgument("ε values must lie in (0, 1e-2]".into()));
    }
    let var_u1 = population_variance(u1);
    if !(var_u1 > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    let mut worst: f64 = 0.0;
    for &eps in eps_grid {
        let a = eps.powf(r);
        let w: Vec<f64> = u1.iter().zip(u2).map(|(x, y)| 1.0 + a * x + a * a * y).collect();
        let m = Moments::of(&w);
        let ratio = m.q() / (a * a * var_u1);
        worst = worst.max((ratio - 1.0).abs());
    }
    Ok(worst)
}
