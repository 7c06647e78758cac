//! Predicted small-noise error constants.
//!
//! In whitened coordinates the potential expands as
//! `φ(η) = ½|η|² + C₃(η) + C₄(η) + …` with `Cₖ` homogeneous of degree `k`.
//! The leading behaviour of `Q` is governed by Gaussian moments of `C₃` and
//! `C₄`. Targets built with the noise level folded into `G` carry the `√ε`,
//! `ε` factors inside `C₃`, `C₄`; predictions for them take `eps = 1`.

use log::warn;
use rayon::prelude::*;

use crate::gaussian::{Polynomial, RngStream};
use crate::quality::{batch_ranges, jackknife_se};
use crate::samplers::Method;
use crate::target::{ModeInfo, TargetDensity};
use crate::{Error, Matrix, Result, Vector};

/// Ladder of steps in the ray parameter for the seven-point stencils.
pub const RAY_STEPS: [f64; 6] = [0.4, 0.2, 0.1, 0.05, 0.025, 0.0125];

const D3: [f64; 7] = [0.125, -1.0, 1.625, 0.0, -1.625, 1.0, -0.125];
const D4: [f64; 7] = [-1.0 / 6.0, 2.0, -6.5, 28.0 / 3.0, -6.5, 2.0, -1.0 / 6.0];

/// Gaussian moments of the third- and fourth-order Taylor coefficients, each
/// with a standard error.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TaylorMoments {
    pub e_c3sq: f64,
    pub e_c4: f64,
    pub var_c4_minus_half_c3sq: f64,
    pub e_c3_4: f64,
    pub e_c3sq_c4: f64,
    pub e_c4sq: f64,
    pub n_used: usize,
    pub se_e_c3sq: f64,
    pub se_e_c4: f64,
    pub se_var_c4_minus_half_c3sq: f64,
    pub se_e_c3_4: f64,
    pub se_e_c3sq_c4: f64,
    pub se_e_c4sq: f64,
}

fn stencil(g: &[f64; 7], w: &[f64; 7]) -> f64 {
    g.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// `(C₃(x), C₄(x))` from the restriction `g(s) = G(x* + s(x − x*)) − G*`:
/// `C₃ = g‴(0)/6`, `C₄ = g⁗(0)/24`.
///
/// Seven-point stencils are evaluated on a ladder of steps; the estimate is
/// taken at the finer step of the adjacent pair whose `C₄` values agree best,
/// which balances truncation against roundoff without knowing either scale.
pub fn taylor_ray_coefficients(t: &TargetDensity, m: &ModeInfo, x: &Vector) -> Result<(f64, f64)> {
    if x.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: x.len(),
        });
    }
    let dx = x - &m.x_star;
    let g = |s: f64| -> Result<f64> {
        let v = t.potential(&(&m.x_star + s * &dx)) - m.g_star;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                context: format!("ray probe s = {s}"),
            })
        }
    };
    let at = |h: f64| -> Result<(f64, f64)> {
        let mut v = [0.0; 7];
        for (k, slot) in v.iter_mut().enumerate() {
            if k != 3 {
                *slot = g((k as f64 - 3.0) * h)?;
            }
        }
        Ok((stencil(&v, &D3) / (6.0 * h.powi(3)), stencil(&v, &D4) / (24.0 * h.powi(4))))
    };
    let mut last_err = None;
    let ladder: Vec<Option<(f64, f64)>> = RAY_STEPS
        .iter()
        .map(|&h| match at(h) {
            Ok(c) => Some(c),
            Err(e) => {
                last_err = Some(e);
                None
            }
        })
        .collect();
    let mut best: Option<(f64, (f64, f64))> = None;
    for w in ladder.windows(2) {
        if let [Some(a), Some(b)] = w {
            let diff = (a.1 - b.1).abs();
            if best.is_none_or(|(d, _)| diff < d) {
                best = Some((diff, *b));
            }
        }
    }
    let Some((diff, (c3, c4))) = best else {
        return Err(last_err.unwrap_or(Error::NonFinite {
            context: "ray probes".into(),
        }));
    };
    let floor = 1e-8 * 0.5 * m.whiten(x)?.norm_squared();
    if diff > 0.01 * c4.abs() + floor {
        warn!("fourth-order ray coefficient unresolved: {c4:e}, step-to-step change {diff:e}");
    }
    Ok((c3, c4))
}

/// Per-draw ray coefficients at `x = x* + S⁻ᵀξ`, `ξ ~ N(0, I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSamples {
    pub dim: usize,
    pub c3: Vec<f64>,
    pub c4: Vec<f64>,
}

struct Sums {
    n: f64,
    c3sq: f64,
    c4: f64,
    c3_4: f64,
    c3sq_c4: f64,
    c4sq: f64,
}

impl Sums {
    fn collect<'a>(pairs: impl Iterator<Item = (&'a f64, &'a f64)>) -> Self {
        let mut s = Sums {
            n: 0.0,
            c3sq: 0.0,
            c4: 0.0,
            c3_4: 0.0,
            c3sq_c4: 0.0,
            c4sq: 0.0,
        };
        for (a, b) in pairs {
            let a2 = a * a;
            s.n += 1.0;
            s.c3sq += a2;
            s.c4 += b;
            s.c3_4 += a2 * a2;
            s.c3sq_c4 += a2 * b;
            s.c4sq += b * b;
        }
        s
    }

    fn minus(&self, o: &Sums) -> Sums {
        Sums {
            n: self.n - o.n,
            c3sq: self.c3sq - o.c3sq,
            c4: self.c4 - o.c4,
            c3_4: self.c3_4 - o.c3_4,
            c3sq_c4: self.c3sq_c4 - o.c3sq_c4,
            c4sq: self.c4sq - o.c4sq,
        }
    }

    /// Point estimates with zero standard errors.
    fn moments(&self) -> TaylorMoments {
        let n = self.n;
        let e_c3sq = self.c3sq / n;
        let e_c4 = self.c4 / n;
        let e_c3_4 = self.c3_4 / n;
        let e_c3sq_c4 = self.c3sq_c4 / n;
        let e_c4sq = self.c4sq / n;
        let var = e_c4sq - e_c3sq_c4 + 0.25 * e_c3_4 - (e_c4 - 0.5 * e_c3sq).powi(2);
        TaylorMoments {
            e_c3sq,
            e_c4,
            var_c4_minus_half_c3sq: var,
            e_c3_4,
            e_c3sq_c4,
            e_c4sq,
            n_used: n as usize,
            ..Default::default()
        }
    }
}

impl TaylorSamples {
    pub fn len(&self) -> usize {
        self.c3.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c3.is_empty()
    }

    fn blocks(&self) -> (Sums, Vec<Sums>) {
        let total = Sums::collect(self.c3.iter().zip(&self.c4));
        let blocks = batch_ranges(self.len())
            .into_iter()
            .map(|r| Sums::collect(self.c3[r.clone()].iter().zip(&self.c4[r])))
            .collect();
        (total, blocks)
    }

    /// Leave-one-batch-out values of `f` and its full-sample value.
    fn jackknife(&self, f: impl Fn(&TaylorMoments) -> f64) -> (f64, f64) {
        let (total, blocks) = self.blocks();
        let full = f(&total.moments());
        let loo: Vec<f64> = blocks.iter().map(|b| f(&total.minus(b).moments())).collect();
        (full, jackknife_se(&loo))
    }

    pub fn moments(&self) -> TaylorMoments {
        let mut m = self.blocks().0.moments();
        m.se_e_c3sq = self.jackknife(|m| m.e_c3sq).1;
        m.se_e_c4 = self.jackknife(|m| m.e_c4).1;
        m.se_var_c4_minus_half_c3sq = self.jackknife(|m| m.var_c4_minus_half_c3sq).1;
        m.se_e_c3_4 = self.jackknife(|m| m.e_c3_4).1;
        m.se_e_c3sq_c4 = self.jackknife(|m| m.e_c3sq_c4).1;
        m.se_e_c4sq = self.jackknife(|m| m.e_c4sq).1;
        m
    }

    /// `predict_q` with a jackknife standard error.
    pub fn prediction(&self, method: Method, eps: f64) -> Result<(f64, f64)> {
        predict_q(method, self.dim, eps, &self.moments())?;
        let d = self.dim;
        Ok(self.jackknife(|m| predict_q(method, d, eps, m).unwrap_or(f64::NAN)))
    }
}

/// Ray coefficients at `n` proposal draws; draw `k` uses stream `k`.
pub fn sample_taylor_coefficients(t: &TargetDensity, m: &ModeInfo, n: usize, seed: u64) -> Result<TaylorSamples> {
    let pairs: Vec<(f64, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let xi = RngStream::new(seed, k).generator().standard_normal_vec(m.dim());
            let x = &m.x_star + m.direction(&xi);
            taylor_ray_coefficients(t, m, &x).map_err(|e| Error::Sample {
                stream_id: k,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let (c3, c4) = pairs.into_iter().unzip();
    Ok(TaylorSamples { dim: m.dim(), c3, c4 })
}

/// Monte Carlo moments of `C₃`, `C₄` under the Gaussian approximation, with
/// jackknife standard errors.
pub fn estimate_taylor_moments(t: &TargetDensity, m: &ModeInfo, n: usize, seed: u64) -> Result<TaylorMoments> {
    if n < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 draws, got {n}")));
    }
    Ok(sample_taylor_coefficients(t, m, n, seed)?.moments())
}

/// `(1 + d)² / ((2 + d)(4 + d))`, the random-map to linear-map ratio.
pub fn random_map_factor(d: usize) -> f64 {
    let d = d as f64;
    (1.0 + d).powi(2) / ((2.0 + d) * (4.0 + d))
}

/// Leading-order `Q` for `method` in dimension `d`.
///
/// * LM: `ε E C₃²`
/// * RM: `ε (1+d)²/((2+d)(4+d)) E C₃²`
/// * SLM: `ε² var(C₄ − ½C₃²)`
/// * SRM: see [`predict_q_symmetrized_random`].
pub fn predict_q(method: Method, d: usize, eps: f64, mom: &TaylorMoments) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    Ok(match method {
        Method::Lm => eps * mom.e_c3sq,
        Method::Rm => eps * random_map_factor(d) * mom.e_c3sq,
        Method::Slm => eps * eps * mom.var_c4_minus_half_c3sq,
        Method::Srm => predict_q_symmetrized_random(d, eps, mom)?,
    })
}

/// Exact-in-`d` leading `Q` of the symmetrized random map, `ε²(I − 2·II + III)`:
///
/// * `I = (d+2)²(d+4)² / (4(d+4)(d+6)(d+8)(d+10)) · E C₃⁴ − (½ E C₃²)²`
/// * `II = (d+2)²(d+4) / (2(d+4)(d+6)(d+8)) · E C₃²C₄ − ½ E C₃² · E C₄`
/// * `III = (d+2)² / ((d+4)(d+6)) · E C₄² − (E C₄)²`
///
/// As `d → ∞` the prefactors tend to `¼, ½, 1` and the sum tends to
/// `var(C₄ − ½C₃²)`.
pub fn predict_q_symmetrized_random(d: usize, eps: f64, mom: &TaylorMoments) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let (i, ii, iii) = srm_terms(d, mom);
    Ok(eps * eps * (i - 2.0 * ii + iii))
}

/// The three terms `I`, `II`, `III` of the symmetrized random-map constant.
pub fn srm_terms(d: usize, mom: &TaylorMoments) -> (f64, f64, f64) {
    let d = d as f64;
    let a1 = (d + 2.0).powi(2) * (d + 4.0).powi(2) / (4.0 * (d + 4.0) * (d + 6.0) * (d + 8.0) * (d + 10.0));
    let a2 = (d + 2.0).powi(2) * (d + 4.0) / (2.0 * (d + 4.0) * (d + 6.0) * (d + 8.0));
    let a3 = (d + 2.0).powi(2) / ((d + 4.0) * (d + 6.0));
    let i = a1 * mom.e_c3_4 - (0.5 * mom.e_c3sq).powi(2);
    let ii = a2 * mom.e_c3sq_c4 - 0.5 * mom.e_c3sq * mom.e_c4;
    let iii = a3 * mom.e_c4sq - mom.e_c4 * mom.e_c4;
    (i, ii, iii)
}

/// Moments of the unscaled random-walk coefficients `C₃ = αΣΔ³`,
/// `C₄ = βΣΔ⁴` with independent standard-normal increments. Exact, so all
/// standard errors are zero.
pub fn randomwalk_exact_moments(n_dim: usize, alpha: f64, beta: f64) -> TaylorMoments {
    let n = n_dim as f64;
    let pairs = n * (n - 1.0);
    let (a2, b) = (alpha * alpha, beta);
    let e_c3sq = 15.0 * a2 * n;
    let e_c4 = 3.0 * b * n;
    let e_c4sq = b * b * (105.0 * n + 9.0 * pairs);
    let e_c3sq_c4 = a2 * b * (945.0 * n + 45.0 * pairs);
    let e_c3_4 = a2 * a2 * (10395.0 * n + 675.0 * pairs);
    let var = e_c4sq - e_c3sq_c4 + 0.25 * e_c3_4 - (e_c4 - 0.5 * e_c3sq).powi(2);
    TaylorMoments {
        e_c3sq,
        e_c4,
        var_c4_minus_half_c3sq: var,
        e_c3_4,
        e_c3sq_c4,
        e_c4sq,
        n_used: 0,
        ..Default::default()
    }
}

/// Closed-form random-walk constants: `15α²Nε` (LM),
/// `15α²ε N(N+1)²/((N+2)(N+4))` (RM) and the leading symmetrized term
/// `(225α⁴N²/2) ε²` (SLM).
pub fn randomwalk_closed_form(method: Method, n_dim: usize, alpha: f64, eps: f64) -> Result<f64> {
    if n_dim == 0 {
        return Err(Error::InvalidArgument("random walk needs N ≥ 1".into()));
    }
    let n = n_dim as f64;
    match method {
        Method::Lm => Ok(15.0 * alpha * alpha * n * eps),
        Method::Rm => Ok(15.0 * alpha * alpha * eps * n * (n + 1.0).powi(2) / ((n + 2.0) * (n + 4.0))),
        Method::Slm => Ok(112.5 * alpha.powi(4) * n * n * eps * eps),
        Method::Srm => Err(Error::Unsupported(
            "no closed form for the symmetrized random map; use predict_q_symmetrized_random".into(),
        )),
    }
}

/// `E C₃²` for the random walk computed by Wick's formula in the original
/// coordinates, where `x ~ N(0, H⁻¹)` and `C₃ = αΣ(xₖ − xₖ₋₁)³`.
pub fn randomwalk_c3sq_wick(n_dim: usize, alpha: f64) -> Result<f64> {
    if n_dim == 0 {
        return Err(Error::InvalidArgument("random walk needs N ≥ 1".into()));
    }
    let h = crate::problems::second_difference(n_dim);
    let cov: Matrix = h
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("second difference".into()))?
        .inverse();
    let mut c3 = Polynomial::zero();
    for k in 0..n_dim {
        let inc = if k == 0 {
            Polynomial::linear(&[(0, 1.0)])
        } else {
            Polynomial::linear(&[(k, 1.0), (k - 1, -1.0)])
        };
        c3 = c3.add(&inc.pow(3).scale(alpha));
    }
    c3.pow(2).expectation(&cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gaussian_target, RandomWalkProblem};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use nalgebra::{dmatrix, dvector};
    use proptest::prelude::*;

    fn identity_mode(d: usize) -> ModeInfo {
        ModeInfo::new(Vector::zeros(d), 0.0, Matrix::identity(d, d)).unwrap()
    }

    #[test]
    fn quadratic_has_no_higher_coefficients() {
        let (t, m) = gaussian_target(dvector![1.0, -1.0], dmatrix![3.0, 1.0; 1.0, 2.0], 1.0).unwrap();
        let (c3, c4) = taylor_ray_coefficients(&t, &m, &dvector![2.0, 0.5]).unwrap();
        assert!(c3.abs() < 1e-8 && c4.abs() < 1e-8, "{c3} {c4}");
        let mom = estimate_taylor_moments(&t, &m, 500, 1).unwrap();
        assert!(mom.e_c3sq < 1e-8 && mom.e_c4.abs() < 1e-8 && mom.var_c4_minus_half_c3sq.abs() < 1e-8);
    }

    #[test]
    fn polynomial_coefficients() {
        let t = TargetDensity::new(1, 1.0, |x| {
            let v = x[0];
            0.5 * v * v + 0.3 * v.powi(3) + 0.05 * v.powi(4)
        })
        .unwrap();
        let (c3, c4) = taylor_ray_coefficients(&t, &identity_mode(1), &dvector![1.0]).unwrap();
        assert_abs_diff_eq!(c3, 0.3, epsilon = 1e-6);
        assert_abs_diff_eq!(c4, 0.05, epsilon = 1e-6);
    }

    #[test]
    fn random_walk_coefficients() {
        let eps: f64 = 0.01;
        let p = RandomWalkProblem::new(2, 1.0, 1.0, eps).unwrap();
        let (c3, c4) = taylor_ray_coefficients(&p.target(), &p.mode(), &dvector![1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(c3, eps.sqrt(), epsilon = 1e-8);
        assert_abs_diff_eq!(c4, eps, epsilon = 1e-8);
    }

    #[test]
    fn cubic_moment_matches_gaussian_sixth_moment() {
        let a = 0.2;
        let t = TargetDensity::new(1, 1.0, move |x| 0.5 * x[0] * x[0] + a * x[0].powi(3)).unwrap();
        let mom = estimate_taylor_moments(&t, &identity_mode(1), 100_000, 3).unwrap();
        assert!((mom.e_c3sq - 15.0 * a * a).abs() < 3.0 * mom.se_e_c3sq, "{} ± {}", mom.e_c3sq, mom.se_e_c3sq);
    }

    #[test]
    fn closed_forms() {
        assert_abs_diff_eq!(randomwalk_closed_form(Method::Lm, 2, 1.0, 1.0).unwrap(), 30.0);
        assert_abs_diff_eq!(randomwalk_closed_form(Method::Rm, 2, 1.0, 1.0).unwrap(), 11.25);
        assert_relative_eq!(randomwalk_closed_form(Method::Slm, 200, 1.0, 1.0).unwrap(), 4.5e6);
        assert!(randomwalk_closed_form(Method::Srm, 2, 1.0, 1.0).is_err());
    }

    #[test]
    fn predictions_from_exact_moments() {
        let eps = 1e-4;
        let mom = randomwalk_exact_moments(2, 1.0, 1.0);
        assert_relative_eq!(predict_q(Method::Lm, 2, eps, &mom).unwrap(), 3.0e-3, max_relative = 1e-12);
        assert_relative_eq!(predict_q(Method::Rm, 2, eps, &mom).unwrap(), 1.125e-3, max_relative = 1e-12);
        assert_relative_eq!(mom.var_c4_minus_half_c3sq, 3702.0, max_relative = 1e-12);
        let (i, ii, iii) = srm_terms(2, &mom);
        assert_relative_eq!(i, 328.5, max_relative = 1e-12);
        assert_relative_eq!(ii, 108.0, max_relative = 1e-12);
        assert_relative_eq!(iii, 40.0, max_relative = 1e-12);
        assert_relative_eq!(predict_q(Method::Srm, 2, 1.0, &mom).unwrap(), 152.5, max_relative = 1e-12);
    }

    #[test]
    fn slm_leading_term_of_exact_variance() {
        // var(C₄ − ½C₃²) = 112.5 N² + 1626 N for α = β = 1.
        for n in [1usize, 2, 10, 200] {
            let nf = n as f64;
            let mom = randomwalk_exact_moments(n, 1.0, 1.0);
            assert_relative_eq!(mom.var_c4_minus_half_c3sq, 112.5 * nf * nf + 1626.0 * nf, max_relative = 1e-12);
        }
        let lead = randomwalk_closed_form(Method::Slm, 200, 1.0, 1.0).unwrap();
        let mom = randomwalk_exact_moments(200, 1.0, 1.0);
        assert_relative_eq!(predict_q(Method::Slm, 200, 1e-4, &mom).unwrap() / 1e-8, lead * (1.0 + 1626.0 / 22500.0), max_relative = 1e-12);
    }

    #[test]
    fn srm_tends_to_slm_for_large_dimension() {
        let mom = randomwalk_exact_moments(3, 0.7, 1.3);
        let slm = predict_q(Method::Slm, 3, 1.0, &mom).unwrap();
        let far = predict_q_symmetrized_random(1_000_000, 1.0, &mom).unwrap();
        assert_relative_eq!(far / slm, 1.0, max_relative = 1e-4);
        assert_eq!(predict_q_symmetrized_random(4, 1.0, &TaylorMoments::default()).unwrap(), 0.0);
    }

    #[test]
    fn wick_c3sq_matches_closed_form() {
        for n in 1..=4 {
            let w = randomwalk_c3sq_wick(n, 1.3).unwrap();
            let c = randomwalk_closed_form(Method::Lm, n, 1.3, 1.0).unwrap();
            assert_relative_eq!(w, c, max_relative = 1e-10);
        }
    }

    #[test]
    fn random_walk_moments_recovered_by_monte_carlo() {
        let eps = 0.01;
        let p = RandomWalkProblem::new(2, 1.0, 1.0, eps).unwrap();
        let s = sample_taylor_coefficients(&p.target(), &p.mode(), 100_000, 5).unwrap();
        let mom = s.moments();
        let exact = randomwalk_exact_moments(2, 1.0, 1.0);
        assert!((mom.e_c3sq - eps * exact.e_c3sq).abs() < 3.0 * mom.se_e_c3sq);
        assert!((mom.e_c4 - eps * exact.e_c4).abs() < 3.0 * mom.se_e_c4);
        assert!(mom.e_c3_4 >= mom.e_c3sq * mom.e_c3sq - 3.0 * mom.se_e_c3_4);
        let (pred, se) = s.prediction(Method::Srm, 1.0).unwrap();
        assert!((pred - 152.5 * eps * eps).abs() < 4.0 * se, "{pred} ± {se}");
    }

    proptest! {
        #[test]
        fn rm_over_lm_ratio(d in 1usize..500) {
            let mom = TaylorMoments { e_c3sq: 2.0, ..Default::default() };
            let r = predict_q(Method::Rm, d, 1.0, &mom).unwrap() / predict_q(Method::Lm, d, 1.0, &mom).unwrap();
            prop_assert!((r - random_map_factor(d)).abs() < 1e-14);
            prop_assert!(r < 1.0);
            prop_assert!(random_map_factor(d + 1) > random_map_factor(d));
        }

        #[test]
        fn srm_prediction_nonnegative(n in 1usize..300, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
            let mom = randomwalk_exact_moments(n, alpha, beta);
            prop_assert!(mom.e_c3_4 >= mom.e_c3sq * mom.e_c3sq);
            let v = predict_q_symmetrized_random(n, 1.0, &mom).unwrap();
            prop_assert!(v >= -1e-9 * mom.e_c3_4.max(mom.e_c4sq).max(1.0), "{}", v);
        }

        #[test]
        fn srm_prediction_nonnegative_one_dimensional(a in -3.0f64..3.0, b in -3.0f64..3.0) {
            // C₃ = aη³, C₄ = bη⁴ with η standard normal.
            let mom = TaylorMoments {
                e_c3sq: 15.0 * a * a,
                e_c4: 3.0 * b,
                e_c3_4: 10395.0 * a.powi(4),
                e_c3sq_c4: 945.0 * a * a * b,
                e_c4sq: 105.0 * b * b,
                ..Default::default()
            };
            let v = predict_q_symmetrized_random(1, 1.0, &mom).unwrap();
            prop_assert!(v >= -1e-9 * (mom.e_c3_4 + mom.e_c4sq).max(1.0), "{}", v);
        }
    }
}
