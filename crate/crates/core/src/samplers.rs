//! The linear-map and random-map samplers and their symmetrized variants.
//!
//! All four share one proposal path: a standard normal `ξ` is drawn from the
//! sample's own stream and mapped through the whitening factor of the mode,
//! `x = x* + S⁻ᵀ ξ`. In whitened coordinates the potential is
//! `φ(η) = G(x* + S⁻ᵀ η) − G*`, whose Hessian at the origin is the identity.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gaussian::RngStream;
use crate::target::{ModeInfo, TargetDensity};
use crate::{Error, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Simple linear map.
    Lm,
    /// Symmetrized linear map.
    Slm,
    /// Simple random map.
    Rm,
    /// Symmetrized random map.
    Srm,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Lm, Method::Slm, Method::Rm, Method::Srm];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Lm => "lm",
            Method::Slm => "slm",
            Method::Rm => "rm",
            Method::Srm => "srm",
        }
    }

    pub fn is_symmetrized(&self) -> bool {
        matches!(self, Method::Slm | Method::Srm)
    }

    pub fn is_random_map(&self) -> bool {
        matches!(self, Method::Rm | Method::Srm)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lm" => Ok(Method::Lm),
            "slm" => Ok(Method::Slm),
            "rm" => Ok(Method::Rm),
            "srm" => Ok(Method::Srm),
            other => Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
        }
    }
}

/// One weighted draw.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    pub x: Vector,
    pub log_weight: f64,
    /// The underlying standard-normal draw.
    pub xi: Vector,
    /// Stretch factor along `ξ` (random-map methods).
    pub lambda_plus: Option<f64>,
    /// Stretch factor along `−ξ` (symmetrized random map).
    pub lambda_minus: Option<f64>,
    /// Whether a symmetrized method emitted the reflected point.
    pub chose_minus: bool,
}

#[derive(Debug, Clone)]
pub struct LambdaOptions {
    pub rel_tol: f64,
    pub max_iters: usize,
    pub bracket_growth: f64,
    pub initial_guess: f64,
}

impl Default for LambdaOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_iters: 100,
            bracket_growth: 2.0,
            initial_guess: 1.0,
        }
    }
}

impl LambdaOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-6) {
            return Err(Error::InvalidArgument(format!("rel_tol {} outside (0, 1e-6]", self.rel_tol)));
        }
        if !(self.bracket_growth > 1.0 && self.bracket_growth.is_finite()) {
            return Err(Error::InvalidArgument("bracket_growth must exceed 1".into()));
        }
        if !(self.initial_guess > 0.0 && self.initial_guess.is_finite()) {
            return Err(Error::InvalidArgument("initial_guess must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

const MONOTONE_PROBES: usize = 8;

/// The whitened potential restricted to the ray `λ ↦ φ(λ ξ)`.
struct Ray<'a> {
    target: &'a TargetDensity,
    mode: &'a ModeInfo,
    dir: Vector,
}

impl<'a> Ray<'a> {
    fn new(target: &'a TargetDensity, mode: &'a ModeInfo, xi: &Vector) -> Self {
        Self {
            target,
            mode,
            dir: mode.direction(xi),
        }
    }

    fn point(&self, lambda: f64) -> Vector {
        &self.mode.x_star + lambda * &self.dir
    }

    fn value(&self, lambda: f64) -> f64 {
        self.target.potential(&self.point(lambda)) - self.mode.g_star
    }

    /// `d/dλ φ(λξ) = ξᵀ∇φ(λξ)`: chain rule through the whitening map when the
    /// target has a gradient, otherwise a five-point difference along the ray.
    fn slope(&self, lambda: f64) -> Result<f64> {
        if let Some(g) = self.target.gradient(&self.point(lambda)) {
            return Ok(g.dot(&self.dir));
        }
        let h = f64::EPSILON.powf(0.2) * lambda.abs().max(1e-3);
        let v = |s: f64| {
            let y = self.value(lambda + s * h);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::NonFinite {
                    context: format!("ray probe at λ = {}", lambda + s * h),
                })
            }
        };
        Ok((-v(2.0)? + 8.0 * v(1.0)? - 8.0 * v(-1.0)? + v(-2.0)?) / (12.0 * h))
    }
}

/// Solves the stretch condition `φ(λ ξ) = ½|ξ|²` for `λ > 0`.
pub fn solve_lambda(t: &TargetDensity, m: &ModeInfo, xi: &Vector, opts: &LambdaOptions) -> Result<f64> {
    opts.validate()?;
    if xi.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: xi.len(),
        });
    }
    let level = 0.5 * xi.norm_squared();
    if !(level > 0.0) {
        return Err(Error::InvalidArgument("stretch condition needs ξ ≠ 0".into()));
    }
    solve_on_ray(&Ray::new(t, m, xi), level, opts)
}

fn solve_on_ray(ray: &Ray<'_>, level: f64, opts: &LambdaOptions) -> Result<f64> {
    let (mut lo, mut hi) = bracket(ray, level, opts)?;
    check_monotone(ray, hi, level)?;

    let tol = opts.rel_tol * level;
    let mut lambda = if opts.initial_guess > lo && opts.initial_guess < hi {
        opts.initial_guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..opts.max_iters {
        let r = ray.value(lambda) - level;
        if !r.is_finite() {
            return Err(Error::NonFinite {
                context: format!("ray value at λ = {lambda}"),
            });
        }
        if r.abs() <= tol {
            return Ok(lambda);
        }
        if r < 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        let s = ray.slope(lambda)?;
        let newton = lambda - r / s;
        let next = if s > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        // Evaluation noise can keep |r| above tol once λ is resolved to
        // machine precision.
        if (next - lambda).abs() <= 4.0 * f64::EPSILON * lambda || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        lambda = next;
    }
    Err(Error::Unsupported(format!(
        "stretch factor did not converge in {} iterations",
        opts.max_iters
    )))
}

fn bracket(ray: &Ray<'_>, level: f64, opts: &LambdaOptions) -> Result<(f64, f64)> {
    let guess = opts.initial_guess;
    let at_guess = ray.value(guess);
    if !at_guess.is_finite() {
        return Err(Error::NoBracket);
    }
    if at_guess >= level {
        let mut hi = guess;
        for _ in 0..opts.max_iters {
            let cand = hi / opts.bracket_growth;
            let v = ray.value(cand);
            if !v.is_finite() {
                return Err(Error::NoBracket);
            }
            if v < level {
                return Ok((cand, hi));
            }
            hi = cand;
        }
        return Ok((0.0, hi));
    }
    let mut lo = guess;
    let mut hi = guess;
    for _ in 0..opts.max_iters {
        hi *= opts.bracket_growth;
        let v = ray.value(hi);
        if !v.is_finite() {
            return Err(Error::NoBracket);
        }
        if v >= level {
            return Ok((lo, hi));
        }
        lo = hi;
    }
    Err(Error::NoBracket)
}

// The stretch factor is unique only if φ(λξ) increases along the ray.
fn check_monotone(ray: &Ray<'_>, hi: f64, level: f64) -> Result<()> {
    let slack = 1e-9 * level;
    let mut prev = 0.0;
    for k in 1..=MONOTONE_PROBES {
        let v = ray.value(hi * k as f64 / MONOTONE_PROBES as f64);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                context: "monotonicity probe".into(),
            });
        }
        if v < prev - slack {
            return Err(Error::NonMonotone);
        }
        prev = v;
    }
    Ok(())
}

/// `log((e^a + e^b) / 2)` without overflow.
pub fn stable_log_mean(l_plus: f64, l_minus: f64) -> Result<f64> {
    if l_plus.is_nan() || l_minus.is_nan() {
        return Err(Error::NonFinite {
            context: "log-weight".into(),
        });
    }
    if l_plus == f64::NEG_INFINITY && l_minus == f64::NEG_INFINITY {
        return Err(Error::DegenerateWeights);
    }
    let (hi, lo) = if l_plus >= l_minus { (l_plus, l_minus) } else { (l_minus, l_plus) };
    Ok(hi + (lo - hi).exp().ln_1p() - std::f64::consts::LN_2)
}

/// Probability of keeping the `+` member of a symmetrized pair.
fn prob_plus(l_plus: f64, l_minus: f64) -> f64 {
    // w₊ / (w₊ + w₋) = 1 / (1 + e^{l₋ − l₊})
    let z = l_minus - l_plus;
    if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

fn linear_log_weight(t: &TargetDensity, m: &ModeInfo, x: &Vector, half_norm_sq: f64) -> Result<f64> {
    let g = t.potential(x);
    if !g.is_finite() {
        return Err(Error::NonFinite {
            context: format!("G at {:?}", x.as_slice()),
        });
    }
    Ok(-(g - m.g_star) + half_norm_sq)
}

fn draw_xi(m: &ModeInfo, rng: RngStream) -> (Vector, crate::gaussian::StreamRng) {
    let mut gen = rng.generator();
    let xi = gen.standard_normal_vec(m.dim());
    (xi, gen)
}

/// Simple linear map: `x ~ N(x*, H⁻¹)`, `log w = −(G(x) − G*) + ½|ξ|²`.
pub fn linear_map_sample(t: &TargetDensity, m: &ModeInfo, rng: RngStream) -> Result<WeightedSample> {
    let (xi, _) = draw_xi(m, rng);
    let x = &m.x_star + m.direction(&xi);
    let log_weight = linear_log_weight(t, m, &x, 0.5 * xi.norm_squared())?;
    Ok(WeightedSample {
        x,
        log_weight,
        xi,
        lambda_plus: None,
        lambda_minus: None,
        chose_minus: false,
    })
}

/// Symmetrized linear map: evaluate `±ξ`, keep one side with probability
/// proportional to its weight, and weight by the average.
pub fn symmetrized_linear_map_sample(t: &TargetDensity, m: &ModeInfo, rng: RngStream) -> Result<WeightedSample> {
    let (xi, mut gen) = draw_xi(m, rng);
    let dir = m.direction(&xi);
    let half = 0.5 * xi.norm_squared();
    let x_plus = &m.x_star + &dir;
    let x_minus = &m.x_star - &dir;
    let l_plus = linear_log_weight(t, m, &x_plus, half)?;
    let l_minus = linear_log_weight(t, m, &x_minus, half)?;
    let log_weight = stable_log_mean(l_plus, l_minus)?;
    let chose_minus = gen.uniform() >= prob_plus(l_plus, l_minus);
    Ok(WeightedSample {
        x: if chose_minus { x_minus } else { x_plus },
        log_weight,
        xi,
        lambda_plus: None,
        lambda_minus: None,
        chose_minus,
    })
}

/// Linear-map log-weight of the proposal point `x* + S⁻ᵀξ`.
pub fn linear_map_log_weight(t: &TargetDensity, m: &ModeInfo, xi: &Vector) -> Result<f64> {
    let x = &m.x_star + m.direction(xi);
    linear_log_weight(t, m, &x, 0.5 * xi.norm_squared())
}

/// Stretch factor and random-map log-weight for a given `ξ`.
pub fn random_map_log_weight(t: &TargetDensity, m: &ModeInfo, xi: &Vector, opts: &LambdaOptions) -> Result<(f64, f64)> {
    opts.validate()?;
    let s = stretch(t, m, xi, opts)?;
    Ok((s.lambda, s.log_weight))
}

struct Stretched {
    lambda: f64,
    log_weight: f64,
}

fn stretch(t: &TargetDensity, m: &ModeInfo, xi: &Vector, opts: &LambdaOptions) -> Result<Stretched> {
    let level = 0.5 * xi.norm_squared();
    if !(level > 0.0) {
        return Err(Error::InvalidArgument("stretch condition needs ξ ≠ 0".into()));
    }
    let ray = Ray::new(t, m, xi);
    let lambda = solve_on_ray(&ray, level, opts)?;
    let slope = ray.slope(lambda)?;
    if !(slope > 0.0) {
        return Err(Error::NonTransverse(slope));
    }
    let d = xi.len() as f64;
    let log_weight = (d - 1.0) * lambda.ln() + (2.0 * level).ln() - slope.ln();
    Ok(Stretched { lambda, log_weight })
}

/// Simple random map: `x = x* + S⁻ᵀ λ(ξ) ξ`,
/// `log w = (d − 1) log λ + log|ξ|² − log(ξᵀ∇φ(λξ))`.
pub fn random_map_sample(t: &TargetDensity, m: &ModeInfo, rng: RngStream) -> Result<WeightedSample> {
    random_map_sample_with(t, m, rng, &LambdaOptions::default())
}

pub fn random_map_sample_with(
    t: &TargetDensity,
    m: &ModeInfo,
    rng: RngStream,
    opts: &LambdaOptions,
) -> Result<WeightedSample> {
    opts.validate()?;
    let (xi, _) = draw_xi(m, rng);
    let s = stretch(t, m, &xi, opts)?;
    Ok(WeightedSample {
        x: &m.x_star + s.lambda * m.direction(&xi),
        log_weight: s.log_weight,
        xi,
        lambda_plus: Some(s.lambda),
        lambda_minus: None,
        chose_minus: false,
    })
}

/// Symmetrized random map.
pub fn symmetrized_random_map_sample(t: &TargetDensity, m: &ModeInfo, rng: RngStream) -> Result<WeightedSample> {
    symmetrized_random_map_sample_with(t, m, rng, &LambdaOptions::default())
}

pub fn symmetrized_random_map_sample_with(
    t: &TargetDensity,
    m: &ModeInfo,
    rng: RngStream,
    opts: &LambdaOptions,
) -> Result<WeightedSample> {
    opts.validate()?;
    let (xi, mut gen) = draw_xi(m, rng);
    let plus = stretch(t, m, &xi, opts)?;
    // λ(ξ) ≈ 1 + √ε λ₁(ξ) with λ₁ odd, so 2 − λ(ξ) is a first-order guess
    // for λ(−ξ).
    let reflected = 2.0 - plus.lambda;
    let guess = if reflected > 0.0 { reflected } else { plus.lambda };
    let minus_opts = LambdaOptions {
        initial_guess: guess,
        ..opts.clone()
    };
    let neg = -&xi;
    let minus = stretch(t, m, &neg, &minus_opts)?;
    let log_weight = stable_log_mean(plus.log_weight, minus.log_weight)?;
    let chose_minus = gen.uniform() >= prob_plus(plus.log_weight, minus.log_weight);
    let dir = m.direction(&xi);
    let x = if chose_minus {
        &m.x_star - minus.lambda * dir
    } else {
        &m.x_star + plus.lambda * dir
    };
    Ok(WeightedSample {
        x,
        log_weight,
        xi,
        lambda_plus: Some(plus.lambda),
        lambda_minus: Some(minus.lambda),
        chose_minus,
    })
}

/// One draw of `method` from stream `rng`.
pub fn sample(method: Method, t: &TargetDensity, m: &ModeInfo, rng: RngStream, opts: &LambdaOptions) -> Result<WeightedSample> {
    match method {
        Method::Lm => linear_map_sample(t, m, rng),
        Method::Slm => symmetrized_linear_map_sample(t, m, rng),
        Method::Rm => random_map_sample_with(t, m, rng, opts),
        Method::Srm => symmetrized_random_map_sample_with(t, m, rng, opts),
    }
}

/// `n` independent samples; sample `k` uses `RngStream(seed, k)`. Runs in
/// parallel, output ordered by stream.
pub fn draw_ensemble(method: Method, t: &TargetDensity, m: &ModeInfo, n: usize, seed: u64) -> Result<Vec<WeightedSample>> {
    draw_ensemble_with(method, t, m, n, seed, &LambdaOptions::default())
}

pub fn draw_ensemble_with(
    method: Method,
    t: &TargetDensity,
    m: &ModeInfo,
    n: usize,
    seed: u64,
    opts: &LambdaOptions,
) -> Result<Vec<WeightedSample>> {
    if n == 0 {
        return Err(Error::InvalidArgument("ensemble size must be at least 1".into()));
    }
    if t.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            got: m.dim(),
        });
    }
    opts.validate()?;
    (0..n as u64)
        .into_par_iter()
        .map(|k| {
            sample(method, t, m, RngStream::new(seed, k), opts).map_err(|e| Error::Sample {
                stream_id: k,
                source: Box::new(e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix;
    use approx::assert_abs_diff_eq;
    use nalgebra::{dmatrix, dvector};

    fn identity_mode(d: usize) -> ModeInfo {
        ModeInfo::new(Vector::zeros(d), 0.0, Matrix::identity(d, d)).unwrap()
    }

    fn poly1d(a: f64, b: f64) -> TargetDensity {
        TargetDensity::new(1, 1.0, move |x| {
            let v = x[0];
            0.5 * v * v + a * v.powi(3) + b * v.powi(4)
        })
        .unwrap()
    }

    #[test]
    fn lambda_quadratic_is_one() {
        let t = TargetDensity::new(3, 1.0, |x| 0.5 * x.norm_squared()).unwrap();
        let m = identity_mode(3);
        let l = solve_lambda(&t, &m, &dvector![0.3, -1.2, 2.0], &LambdaOptions::default()).unwrap();
        assert_abs_diff_eq!(l, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lambda_quartic_closed_form() {
        // ½λ² + 0.1λ⁴ = ½ ⇒ λ² = (−½ + √0.45) / 0.2.
        let t = poly1d(0.0, 0.1);
        let l = solve_lambda(&t, &identity_mode(1), &dvector![1.0], &LambdaOptions::default()).unwrap();
        let want = ((-0.5 + 0.45f64.sqrt()) / 0.2).sqrt();
        assert_abs_diff_eq!(l, want, epsilon = 1e-12);
        assert_abs_diff_eq!(l, 0.924176, epsilon = 1e-6);
    }

    #[test]
    fn lambda_no_bracket() {
        let t = poly1d(0.0, -1.0);
        let err = solve_lambda(&t, &identity_mode(1), &dvector![2.0], &LambdaOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NoBracket), "{err}");
    }

    #[test]
    fn lambda_non_monotone() {
        // Rises to a bump, dips, then grows again: the level ½ is crossed
        // three times along the ray.
        let t = TargetDensity::new(1, 1.0, |x| {
            let v = x[0].abs();
            0.5 * v * v + 2.0 * (-(v - 0.5).powi(2) * 40.0).exp() - 2.0 * (-(v - 0.8).powi(2) * 40.0).exp()
        })
        .unwrap();
        let mut opts = LambdaOptions::default();
        opts.initial_guess = 4.0;
        let err = solve_lambda(&t, &identity_mode(1), &dvector![1.0], &opts).unwrap_err();
        assert!(matches!(err, Error::NonMonotone), "{err}");
    }

    #[test]
    fn lambda_rejects_zero_xi_and_bad_options() {
        let t = poly1d(0.0, 0.1);
        assert!(solve_lambda(&t, &identity_mode(1), &dvector![0.0], &LambdaOptions::default()).is_err());
        let opts = LambdaOptions {
            rel_tol: 1e-3,
            ..Default::default()
        };
        assert!(opts.validate().is_err());
    }

    #[test]
    fn stable_log_mean_examples() {
        assert_eq!(stable_log_mean(0.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(stable_log_mean(-0.1, 0.1).unwrap(), 0.1f64.cosh().ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(stable_log_mean(-0.1, 0.1).unwrap(), 0.0049917, epsilon = 1e-7);
        assert_abs_diff_eq!(
            stable_log_mean(1000.0, -1000.0).unwrap(),
            1000.0 - std::f64::consts::LN_2,
            epsilon = 1e-12
        );
        assert!(stable_log_mean(f64::NEG_INFINITY, 0.0).is_ok());
        assert!(matches!(
            stable_log_mean(f64::NEG_INFINITY, f64::NEG_INFINITY),
            Err(Error::DegenerateWeights)
        ));
    }

    // A stream whose first normal is close to 1 is not needed: the weight
    // formulas are checked by direct evaluation at ξ = 1.
    #[test]
    fn linear_weight_substitution() {
        let t = poly1d(0.1, 0.0);
        let m = identity_mode(1);
        let lw = linear_log_weight(&t, &m, &dvector![1.0], 0.5).unwrap();
        assert_abs_diff_eq!(lw, -0.1, epsilon = 1e-15);
        let lm = linear_log_weight(&t, &m, &dvector![-1.0], 0.5).unwrap();
        assert_abs_diff_eq!(lm, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(stable_log_mean(lw, lm).unwrap(), 0.0049917, epsilon = 1e-7);
        assert_abs_diff_eq!(prob_plus(lw, lm), 0.450166, epsilon = 1e-6);
    }

    #[test]
    fn random_weight_closed_form() {
        let t = poly1d(0.0, 0.1);
        let s = stretch(&t, &identity_mode(1), &dvector![1.0], &LambdaOptions::default()).unwrap();
        let lambda = ((-0.5 + 0.45f64.sqrt()) / 0.2).sqrt();
        let dphi = lambda + 0.4 * lambda.powi(3);
        assert_abs_diff_eq!(dphi, 1.239913, epsilon = 1e-6);
        assert_abs_diff_eq!(s.log_weight, -dphi.ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(s.log_weight, -0.215041, epsilon = 1e-6);
    }

    #[test]
    fn random_weight_uses_analytic_gradient_when_present() {
        let plain = poly1d(0.2, 0.1);
        let with_grad = poly1d(0.2, 0.1).with_gradient(|x| dvector![x[0] + 0.6 * x[0] * x[0] + 0.4 * x[0].powi(3)]);
        let m = identity_mode(1);
        for xi in [0.3, -1.7, 2.5] {
            let a = stretch(&plain, &m, &dvector![xi], &LambdaOptions::default()).unwrap();
            let b = stretch(&with_grad, &m, &dvector![xi], &LambdaOptions::default()).unwrap();
            assert_abs_diff_eq!(a.lambda, b.lambda, epsilon = 1e-12);
            assert_abs_diff_eq!(a.log_weight, b.log_weight, epsilon = 1e-9);
        }
    }

    #[test]
    fn quadratic_targets_give_constant_weights() {
        let h = dmatrix![2.0, 0.5; 0.5, 1.0];
        let c = dvector![1.0, -3.0];
        let (hc, cc) = (h.clone(), c.clone());
        let t = TargetDensity::new(2, 1.0, move |x| {
            let dx = x - &cc;
            4.0 + 0.5 * dx.dot(&(&hc * &dx))
        })
        .unwrap();
        let m = ModeInfo::new(c, 4.0, h).unwrap();
        for method in Method::ALL {
            for k in 0..50 {
                let s = sample(method, &t, &m, RngStream::new(9, k), &LambdaOptions::default()).unwrap();
                assert!(s.log_weight.abs() < 1e-10, "{method}: {}", s.log_weight);
                if method == Method::Srm {
                    assert_abs_diff_eq!(s.lambda_plus.unwrap(), 1.0, epsilon = 1e-11);
                    assert_abs_diff_eq!(s.lambda_minus.unwrap(), 1.0, epsilon = 1e-11);
                }
            }
        }
    }

    #[test]
    fn even_potential_gives_equal_stretches() {
        let t = poly1d(0.0, 0.3);
        let m = identity_mode(1);
        for k in 0..20 {
            let s = symmetrized_random_map_sample(&t, &m, RngStream::new(4, k)).unwrap();
            assert_abs_diff_eq!(s.lambda_plus.unwrap(), s.lambda_minus.unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn symmetrized_weights_are_even_in_xi() {
        let t = poly1d(0.15, 0.05);
        let m = identity_mode(1);
        for xi in [0.4, 1.3, 2.2] {
            let lp = linear_log_weight(&t, &m, &dvector![xi], 0.5 * xi * xi).unwrap();
            let ln = linear_log_weight(&t, &m, &dvector![-xi], 0.5 * xi * xi).unwrap();
            assert_eq!(stable_log_mean(lp, ln).unwrap(), stable_log_mean(ln, lp).unwrap());
            let a = stretch(&t, &m, &dvector![xi], &LambdaOptions::default()).unwrap();
            let b = stretch(&t, &m, &dvector![-xi], &LambdaOptions::default()).unwrap();
            let w1 = stable_log_mean(a.log_weight, b.log_weight).unwrap();
            let w2 = stable_log_mean(b.log_weight, a.log_weight).unwrap();
            assert!((w1 - w2).abs() <= 1e-12);
        }
    }

    #[test]
    fn selection_frequency_matches_probability() {
        let t = poly1d(0.2, 0.05);
        let m = identity_mode(1);
        let xs = draw_ensemble(Method::Slm, &t, &m, 20_000, 3).unwrap();
        // Average of 1{minus} − p₋ should vanish.
        let mut resid = 0.0;
        for s in &xs {
            let xi = s.xi[0];
            let lp = linear_log_weight(&t, &m, &dvector![xi], 0.5 * xi * xi).unwrap();
            let ln = linear_log_weight(&t, &m, &dvector![-xi], 0.5 * xi * xi).unwrap();
            let p_minus = 1.0 - prob_plus(lp, ln);
            resid += if s.chose_minus { 1.0 } else { 0.0 } - p_minus;
        }
        let mean = resid / xs.len() as f64;
        assert!(mean.abs() < 4.0 * 0.5 / (xs.len() as f64).sqrt(), "{mean}");
    }

    #[test]
    fn ensemble_is_deterministic_and_reports_stream() {
        let t = poly1d(0.1, 0.05);
        let m = identity_mode(1);
        let a = draw_ensemble(Method::Srm, &t, &m, 1, 5).unwrap();
        let b = draw_ensemble(Method::Srm, &t, &m, 1, 5).unwrap();
        assert_eq!(a, b);

        let bad = TargetDensity::new(1, 1.0, |x| if x[0] > 2.0 { f64::NAN } else { 0.5 * x[0] * x[0] }).unwrap();
        let err = draw_ensemble(Method::Lm, &bad, &m, 1000, 5).unwrap_err();
        assert!(matches!(err, Error::Sample { .. }), "{err}");
        assert!(draw_ensemble(Method::Lm, &t, &m, 0, 5).is_err());
    }

    #[test]
    fn method_parsing() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("xyz".parse::<Method>().is_err());
    }
}
