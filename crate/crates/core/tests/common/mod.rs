#![allow(dead_code)]

use implicit_samplers::prelude::*;

/// `G(x) = ½x² + a x³ + b x⁴`, star-shaped about its mode at 0 when `9a² < 16b`.
pub fn quartic_1d(a: f64, b: f64) -> (TargetDensity, ModeInfo) {
    let t = TargetDensity::new(1, 1.0, move |x| {
        let v = x[0];
        0.5 * v * v + a * v * v * v + b * v * v * v * v
    })
    .unwrap()
    .with_gradient(move |x| {
        let v = x[0];
        Vector::from_element(1, v + 3.0 * a * v * v + 4.0 * b * v * v * v)
    });
    let m = ModeInfo::new(Vector::zeros(1), 0.0, Matrix::identity(1, 1)).unwrap();
    (t, m)
}

pub fn cubic_1d() -> (TargetDensity, ModeInfo) {
    quartic_1d(0.1, 0.05)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`, started from 64 panels so
/// narrow peaks are not skipped.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| simpson_panel(f, a + i as f64 * h, a + (i + 1) as f64 * h, tol / panels as f64))
        .sum()
}

fn simpson_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let c = 0.5 * (a + b);
    let fc = f(c);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    simpson_rec(f, a, b, fa, fb, fc, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fb: f64, fc: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let c = 0.5 * (a + b);
    let d = 0.5 * (a + c);
    let e = 0.5 * (c + b);
    let fd = f(d);
    let fe = f(e);
    let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, c, fa, fc, fd, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, c, b, fc, fb, fe, right, 0.5 * tol, depth - 1)
}

/// Mean and standard error.
pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Self-normalized weighted mean of `u` and its delta-method standard error.
pub fn weighted_mean_se(log_w: &[f64], u: &[f64]) -> (f64, f64) {
    let top = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|l| (l - top).exp()).collect();
    let sw: f64 = w.iter().sum();
    let mu = w.iter().zip(u).map(|(w, u)| w * u).sum::<f64>() / sw;
    let s2: f64 = w.iter().zip(u).map(|(w, u)| w * w * (u - mu) * (u - mu)).sum();
    (mu, s2.sqrt() / sw)
}

/// Jackknife ratio `q_a / q_b` over matched contiguous batches.
pub fn q_ratio(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    use implicit_samplers::quality::{batch_ranges, jackknife_se};
    let full = estimate_q(a)?.q_hat / estimate_q(b)?.q_hat;
    let mut leave = Vec::new();
    for r in batch_ranges(a.len()) {
        let drop = |v: &[f64]| -> Vec<f64> { v[..r.start].iter().chain(&v[r.end..]).cloned().collect() };
        leave.push(estimate_q(&drop(a))?.q_hat / estimate_q(&drop(b))?.q_hat);
    }
    Ok((full, jackknife_se(&leave)))
}

pub fn log_weights(s: &[WeightedSample]) -> Vec<f64> {
    s.iter().map(|w| w.log_weight).collect()
}

/// Largest discrepancy between random-map draws on `G` and on `G∘M` built from
/// the same streams: `(max |x − M y|, max |Δ log w|)`.
pub fn affine_invariance_gap(method: Method, n: usize) -> Result<(f64, f64)> {
    let p = RandomWalkProblem::new(3, 1.0, 1.0, 0.05)?;
    let (t, m) = (p.target(), p.mode());
    let map = Matrix::from_row_slice(3, 3, &[2.0, 0.3, -0.5, 0.1, 1.5, 0.2, -0.4, 0.7, 0.8]);
    let map_inv = map.clone().try_inverse().unwrap();
    let tm = t.compose_linear(&map)?;
    let hm = map.transpose() * &m.hessian * &map;
    let mm = ModeInfo::with_factor(&map_inv * &m.x_star, m.g_star, hm, map.transpose() * &m.chol)?;
    let a = draw_ensemble(method, &t, &m, n, 5)?;
    let b = draw_ensemble(method, &tm, &mm, n, 5)?;
    let mut gap = (0.0f64, 0.0f64);
    for (sa, sb) in a.iter().zip(&b) {
        gap.0 = gap.0.max((&sa.x - &map * &sb.x).amax());
        gap.1 = gap.1.max((sa.log_weight - sb.log_weight).abs());
    }
    Ok(gap)
}

/// `|∫ q_s − 1|` for a symmetrized method on the 1D test target, with `q_s`
/// assembled from the Gaussian density, the weights and the emitted-point map.
pub fn symmetrized_normalization_error(method: Method) -> Result<f64> {
    let (t, m) = cubic_1d();
    let opts = LambdaOptions::default();
    let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let log_w = |xi: f64| -> f64 {
        let v = Vector::from_element(1, xi);
        match method {
            Method::Slm => linear_map_log_weight(&t, &m, &v).unwrap(),
            _ => random_map_log_weight(&t, &m, &v, &opts).unwrap().1,
        }
    };
    let p_plus = |xi: f64| 1.0 / (1.0 + (log_w(-xi) - log_w(xi)).exp());
    // Each emitted x has one preimage ξ along the "+" branch and its mirror
    // along the "−" branch; both contribute p₊(ξ) times the forward density.
    let density = |x: f64| -> f64 {
        if x == 0.0 {
            return phi(0.0);
        }
        match method {
            Method::Slm => 2.0 * p_plus(x) * phi(x),
            _ => {
                let g = t.potential(&Vector::from_element(1, x));
                let xi = x.signum() * (2.0 * g).sqrt();
                let slope = t.gradient(&Vector::from_element(1, x)).unwrap()[0];
                2.0 * p_plus(xi) * phi(xi) * slope / xi
            }
        }
    };
    let lim = match method {
        Method::Slm => 12.0,
        _ => 5.0,
    };
    let total = simpson(&density, -lim, 0.0, 1e-10) + simpson(&density, 0.0, lim, 1e-10);
    Ok((total - 1.0).abs())
}

/// z-scores of the two moment-matching identities between a symmetrized
/// method and its simple counterpart.
pub fn moment_matching_z(method: Method, n: usize) -> Result<(f64, f64)> {
    let (t, m) = cubic_1d();
    let opts = LambdaOptions::default();
    let simple = if method.is_random_map() { Method::Rm } else { Method::Lm };
    let sym = draw_ensemble(method, &t, &m, n, 11)?;
    let base = draw_ensemble(simple, &t, &m, n, 12)?;
    let w_sym: Vec<f64> = sym.iter().map(|s| s.log_weight.exp()).collect();
    let w_sym2: Vec<f64> = w_sym.iter().map(|w| w * w).collect();
    let w_base: Vec<f64> = base.iter().map(|s| s.log_weight.exp()).collect();
    let mut ws_base2 = Vec::with_capacity(n);
    for s in &base {
        let reflected = -&s.xi;
        let l_minus = match simple {
            Method::Lm => linear_map_log_weight(&t, &m, &reflected)?,
            _ => random_map_log_weight(&t, &m, &reflected, &opts)?.1,
        };
        let ls = implicit_samplers::samplers::stable_log_mean(s.log_weight, l_minus)?;
        ws_base2.push((2.0 * ls).exp());
    }
    let z = |a: &[f64], b: &[f64]| {
        let (ma, sa) = mean_se(a);
        let (mb, sb) = mean_se(b);
        (ma - mb) / (sa * sa + sb * sb).sqrt()
    };
    Ok((z(&w_sym, &w_base), z(&w_sym2, &ws_base2)))
}

/// Quadrature value of `E_p(X)` on the 1D test target.
pub fn cubic_1d_mean() -> f64 {
    let (t, _) = cubic_1d();
    let dens = |x: f64| (-t.potential(&Vector::from_element(1, x))).exp();
    let z = simpson(&dens, -15.0, 15.0, 1e-13);
    let first = simpson(&|x| x * dens(x), -15.0, 15.0, 1e-13);
    first / z
}

/// z-score of the self-normalized estimate of `E_p(X)`.
pub fn weighted_mean_z(method: Method, n: usize) -> Result<f64> {
    let (t, m) = cubic_1d();
    let s = draw_ensemble(method, &t, &m, n, 21)?;
    let u: Vec<f64> = s.iter().map(|w| w.x[0]).collect();
    let (mu, se) = weighted_mean_se(&log_weights(&s), &u);
    Ok((mu - cubic_1d_mean()) / se)
}

/// Whether ensembles drawn under 1 and 4 worker threads are bit-identical.
pub fn replay_is_thread_independent(n: usize) -> Result<bool> {
    let p = RandomWalkProblem::new(2, 1.0, 1.0, 1e-2)?;
    let (t, m) = (p.target(), p.mode());
    let run = |threads: usize| -> Result<Vec<Vec<u64>>> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            Method::ALL
                .iter()
                .map(|&meth| Ok(draw_ensemble(meth, &t, &m, n, 99)?.iter().map(|s| s.log_weight.to_bits()).collect()))
                .collect()
        })
    };
    Ok(run(1)? == run(4)?)
}
