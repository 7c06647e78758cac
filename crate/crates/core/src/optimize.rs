//! Mode finding: BFGS with backtracking line search, finite-difference
//! derivatives, and the Hessian at the minimizer.

use crate::target::{ModeInfo, TargetDensity};
use crate::{Error, Matrix, Result, Vector};

/// Relative central-difference step for gradients, `cbrt(machine epsilon)`.
pub fn default_grad_step() -> f64 {
    f64::EPSILON.cbrt()
}

/// Relative second-difference step for Hessians, `machine epsilon^(1/4)`.
pub fn default_hess_step() -> f64 {
    f64::EPSILON.powf(0.25)
}

const ARMIJO: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 60;
const MAX_POLISH: usize = 4;

#[derive(Debug, Clone)]
pub struct OptimizeOptions {
    /// Sup-norm gradient tolerance.
    pub grad_tol: f64,
    pub max_iters: usize,
    pub fd_step_grad: f64,
    pub fd_step_hess: f64,
    pub initial_point: Vec<f64>,
    /// Accept a stalled line search when the whitened gradient
    /// `sqrt(gᵀ H⁻¹ g)` is below this. Potentials with evaluation noise (an
    /// ODE solve, say) cannot reach `grad_tol` in absolute terms.
    pub stall_tol: f64,
}

impl OptimizeOptions {
    pub fn new(initial_point: Vec<f64>) -> Self {
        Self {
            grad_tol: 1e-8,
            max_iters: 200,
            fd_step_grad: default_grad_step(),
            fd_step_hess: default_hess_step(),
            initial_point,
            stall_tol: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.grad_tol, self.fd_step_grad, self.fd_step_hess, self.stall_tol];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidArgument("tolerances and steps must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if self.initial_point.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("initial point is not finite".into()));
        }
        Ok(())
    }
}

/// Diagnostics from [`minimize_with_stats`].
#[derive(Debug, Clone)]
pub struct OptimizeStats {
    pub iterations: usize,
    pub grad_norm_inf: f64,
    /// `sqrt(gᵀ H⁻¹ g)` at the returned point.
    pub whitened_grad_norm: f64,
    pub stalled: bool,
}

fn probe(t: &TargetDensity, x: &Vector) -> Result<f64> {
    let v = t.potential(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            context: format!("{:?}", x.as_slice()),
        })
    }
}

fn check_step(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {h}")))
    }
}

/// Central differences `(G(x + hᵢeᵢ) − G(x − hᵢeᵢ)) / 2hᵢ` with
/// `hᵢ = step · max(1, |xᵢ|)`.
pub fn fd_gradient(t: &TargetDensity, x: &Vector, step: f64) -> Result<Vector> {
    check_step(step)?;
    if x.len() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            got: x.len(),
        });
    }
    let mut g = Vector::zeros(x.len());
    let mut xp = x.clone();
    for i in 0..x.len() {
        let h = step * x[i].abs().max(1.0);
        let xi = x[i];
        xp[i] = xi + h;
        let up = probe(t, &xp)?;
        xp[i] = xi - h;
        let dn = probe(t, &xp)?;
        xp[i] = xi;
        g[i] = (up - dn) / (2.0 * h);
    }
    Ok(g)
}

/// Central second differences, symmetrized so the result is exactly
/// symmetric.
pub fn fd_hessian(t: &TargetDensity, x: &Vector, step: f64) -> Result<Matrix> {
    check_step(step)?;
    let d = x.len();
    if d != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            got: d,
        });
    }
    let h: Vec<f64> = x.iter().map(|v| step * v.abs().max(1.0)).collect();
    let f0 = probe(t, x)?;
    let mut out = Matrix::zeros(d, d);
    let mut xp = x.clone();
    for i in 0..d {
        xp[i] = x[i] + h[i];
        let up = probe(t, &xp)?;
        xp[i] = x[i] - h[i];
        let dn = probe(t, &xp)?;
        xp[i] = x[i];
        out[(i, i)] = (up - 2.0 * f0 + dn) / (h[i] * h[i]);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut corner = |si: f64, sj: f64| -> Result<f64> {
                xp[i] = x[i] + si * h[i];
                xp[j] = x[j] + sj * h[j];
                let v = probe(t, &xp);
                xp[i] = x[i];
                xp[j] = x[j];
                v
            };
            let v = (corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)? + corner(-1.0, -1.0)?)
                / (4.0 * h[i] * h[j]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    // Average with the transpose; a no-op for the construction above but
    // keeps the contract explicit.
    Ok((&out + out.transpose()) * 0.5)
}

fn gradient(t: &TargetDensity, x: &Vector, opts: &OptimizeOptions) -> Result<Vector> {
    match t.gradient(x) {
        Some(g) if g.iter().all(|v| v.is_finite()) => Ok(g),
        Some(_) => Err(Error::NonFinite {
            context: "analytic gradient".into(),
        }),
        None => fd_gradient(t, x, opts.fd_step_grad),
    }
}

fn hessian(t: &TargetDensity, x: &Vector, opts: &OptimizeOptions) -> Result<Matrix> {
    match t.hessian(x) {
        Some(h) => Ok(h),
        None => fd_hessian(t, x, opts.fd_step_hess),
    }
}

/// Finds the mode of `t` and the Gaussian approximation there.
pub fn minimize(t: &TargetDensity, opts: &OptimizeOptions) -> Result<ModeInfo> {
    minimize_with_stats(t, opts).map(|(m, _)| m)
}

pub fn minimize_with_stats(t: &TargetDensity, opts: &OptimizeOptions) -> Result<(ModeInfo, OptimizeStats)> {
    opts.validate()?;
    let d = t.dim();
    if opts.initial_point.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: opts.initial_point.len(),
        });
    }
    let mut x = Vector::from_column_slice(&opts.initial_point);
    let mut f = probe(t, &x)?;
    let mut g = gradient(t, &x, opts)?;
    let mut hinv = Matrix::identity(d, d);
    let mut scaled = false;
    let mut iterations = 0;
    let mut stalled = false;

    while g.amax() > opts.grad_tol {
        if iterations >= opts.max_iters {
            return Err(Error::IterationLimit {
                iterations,
                grad_norm: g.amax(),
            });
        }
        iterations += 1;

        let mut p = -(&hinv * &g);
        let mut slope = g.dot(&p);
        if !(slope < 0.0) {
            hinv = Matrix::identity(d, d);
            p = -g.clone();
            slope = -g.norm_squared();
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial = &x + alpha * &p;
            let ft = t.potential(&trial);
            if ft.is_finite() && ft <= f + ARMIJO * alpha * slope {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= BACKTRACK;
        }
        let Some((x_new, f_new)) = accepted else {
            stalled = true;
            break;
        };
        let g_new = gradient(t, &x_new, opts)?;
        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() && sy > 0.0 {
            if !scaled {
                hinv = Matrix::identity(d, d) * (sy / y.norm_squared());
                scaled = true;
            }
            let rho = 1.0 / sy;
            let i = Matrix::identity(d, d);
            let left = &i - rho * &s * y.transpose();
            let right = &i - rho * &y * s.transpose();
            hinv = &left * &hinv * &right + rho * &s * s.transpose();
        }
        let no_progress = f_new >= f && s.amax() <= f64::EPSILON * x.amax().max(1.0);
        x = x_new;
        f = f_new;
        g = g_new;
        if no_progress {
            stalled = true;
            break;
        }
    }

    let mut h = hessian(t, &x, opts)?;
    let mut whitened = whitened_norm(&h, &g)?;
    if stalled {
        // Newton polish with the full Hessian; noise-limited potentials end
        // here rather than at the sup-norm test.
        for _ in 0..MAX_POLISH {
            if whitened <= opts.stall_tol {
                break;
            }
            let step = solve_spd(&h, &g)?;
            let x_new = &x - step;
            let f_new = probe(t, &x_new)?;
            let g_new = gradient(t, &x_new, opts)?;
            let h_new = hessian(t, &x_new, opts)?;
            let w_new = whitened_norm(&h_new, &g_new)?;
            if w_new >= whitened {
                break;
            }
            x = x_new;
            f = f_new;
            g = g_new;
            h = h_new;
            whitened = w_new;
        }
        if whitened > opts.stall_tol && g.amax() > opts.grad_tol {
            return Err(Error::IterationLimit {
                iterations,
                grad_norm: g.amax(),
            });
        }
    }

    let mode = ModeInfo::new(x, f, h)?;
    let stats = OptimizeStats {
        iterations,
        grad_norm_inf: g.amax(),
        whitened_grad_norm: whitened,
        stalled,
    };
    Ok((mode, stats))
}

fn solve_spd(h: &Matrix, g: &Vector) -> Result<Vector> {
    let chol = nalgebra::Cholesky::new(h.clone()).ok_or_else(|| {
        Error::NotPositiveDefinite("Hessian at the optimizer's end point (saddle or degenerate minimum)".into())
    })?;
    Ok(chol.solve(g))
}

fn whitened_norm(h: &Matrix, g: &Vector) -> Result<f64> {
    Ok(g.dot(&solve_spd(h, g)?).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{dmatrix, dvector};

    fn quadratic(h: Matrix, center: Vector) -> TargetDensity {
        TargetDensity::new(center.len(), 1.0, move |x| {
            let dx = x - &center;
            0.5 * dx.dot(&(&h * &dx))
        })
        .unwrap()
    }

    #[test]
    fn gradient_examples() {
        let t = TargetDensity::new(2, 1.0, |x| 0.5 * x.norm_squared()).unwrap();
        let g = fd_gradient(&t, &dvector![1.0, 2.0], 1e-3).unwrap();
        assert_abs_diff_eq!(g, dvector![1.0, 2.0], epsilon = 1e-10);
        let t = TargetDensity::new(1, 1.0, |x| x[0].powi(3)).unwrap();
        let g = fd_gradient(&t, &dvector![1.0], 1e-4).unwrap();
        assert_abs_diff_eq!(g[0], 3.0, epsilon = 1e-7);
        assert!(fd_gradient(&t, &dvector![1.0], 0.0).is_err());
    }

    #[test]
    fn gradient_reports_non_finite() {
        let t = TargetDensity::new(1, 1.0, |x| if x[0] > 1.0 { f64::NAN } else { x[0] }).unwrap();
        assert!(matches!(fd_gradient(&t, &dvector![1.0], 1e-3), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn hessian_examples() {
        let t = quadratic(dmatrix![1.0, 0.0; 0.0, 4.0], dvector![0.0, 0.0]);
        let h = fd_hessian(&t, &dvector![0.3, -0.2], default_hess_step()).unwrap();
        assert_abs_diff_eq!(h, dmatrix![1.0, 0.0; 0.0, 4.0], epsilon = 1e-6);
        assert_eq!(h, h.transpose());

        // Σ (x_{k+1} − x_k)² / 2 with x₀ = 0, N = 2.
        let t = TargetDensity::new(2, 1.0, |x| 0.5 * (x[0] * x[0] + (x[1] - x[0]).powi(2))).unwrap();
        let h = fd_hessian(&t, &dvector![0.0, 0.0], default_hess_step()).unwrap();
        assert_abs_diff_eq!(h, dmatrix![2.0, -1.0; -1.0, 1.0], epsilon = 1e-6);
    }

    #[test]
    fn minimize_quadratic_one_shot() {
        let t = quadratic(Matrix::identity(2, 2), dvector![3.0, -1.0]);
        let m = minimize(&t, &OptimizeOptions::new(vec![0.0, 0.0])).unwrap();
        assert_abs_diff_eq!(m.x_star, dvector![3.0, -1.0], epsilon = 1e-8);
        assert_abs_diff_eq!(m.hessian, Matrix::identity(2, 2), epsilon = 1e-5);
        assert_abs_diff_eq!(m.g_star, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn minimize_quadratic_from_many_starts() {
        let h = dmatrix![4.0, 1.0, 0.0; 1.0, 3.0, 0.5; 0.0, 0.5, 0.2];
        let c = dvector![1.0, -2.0, 5.0];
        let t = quadratic(h.clone(), c.clone());
        for start in [vec![0.0, 0.0, 0.0], vec![10.0, 10.0, -10.0], vec![-3.0, 0.1, 40.0]] {
            let m = minimize(&t, &OptimizeOptions::new(start)).unwrap();
            assert_abs_diff_eq!(m.x_star, c, epsilon = 1e-8);
            let rel = (&m.hessian - &h).amax() / h.amax();
            assert!(rel < 1e-5, "{rel}");
        }
    }

    #[test]
    fn rerun_from_mode_is_immediate() {
        let t = TargetDensity::new(2, 1.0, |x| {
            (x[0] - 1.0).powi(2) + 0.5 * (x[1] + 0.5).powi(2) + 0.1 * (x[0] - 1.0).powi(4)
        })
        .unwrap();
        let (m, _) = minimize_with_stats(&t, &OptimizeOptions::new(vec![4.0, 4.0])).unwrap();
        let (m2, stats) = minimize_with_stats(&t, &OptimizeOptions::new(m.x_star.iter().copied().collect())).unwrap();
        assert!(stats.iterations <= 2);
        assert!((m2.x_star - m.x_star).amax() < 1e-8);
    }

    #[test]
    fn saddle_is_rejected() {
        let t = TargetDensity::new(2, 1.0, |x| 0.5 * x[0] * x[0] - 0.5 * x[1] * x[1]).unwrap();
        // Starting on the stable manifold converges to the saddle.
        let err = minimize(&t, &OptimizeOptions::new(vec![1.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite(_)), "{err}");
    }

    #[test]
    fn iteration_limit_is_reported() {
        let t = TargetDensity::new(2, 1.0, |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)).unwrap();
        let mut opts = OptimizeOptions::new(vec![-1.2, 1.0]);
        opts.max_iters = 3;
        assert!(matches!(minimize(&t, &opts), Err(Error::IterationLimit { .. })));
    }

    #[test]
    fn rosenbrock_converges() {
        let t = TargetDensity::new(2, 1.0, |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)).unwrap();
        let m = minimize(&t, &OptimizeOptions::new(vec![-1.2, 1.0])).unwrap();
        assert_abs_diff_eq!(m.x_star, dvector![1.0, 1.0], epsilon = 1e-6);
    }

    #[test]
    fn options_validation() {
        let mut o = OptimizeOptions::new(vec![0.0]);
        o.max_iters = 0;
        assert!(o.validate().is_err());
        let mut o = OptimizeOptions::new(vec![0.0]);
        o.grad_tol = -1.0;
        assert!(o.validate().is_err());
    }
}
