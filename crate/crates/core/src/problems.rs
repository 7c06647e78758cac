//! Benchmark targets: a nonlinear random walk, a Lorenz '63 initial-condition
//! posterior, and plain Gaussians.

use nalgebra::Vector3;

use crate::gaussian::RngStream;
use crate::target::{ModeInfo, TargetDensity};
use crate::{Error, Matrix, Result, Vector};

/// Stream used for synthetic observation noise, disjoint from sample streams.
pub const DATA_STREAM: u64 = 1 << 63;

/// Gaussian target `G(x) = ½(x − c)ᵀH(x − c)` with analytic derivatives.
pub fn gaussian_target(center: Vector, hessian: Matrix, epsilon: f64) -> Result<(TargetDensity, ModeInfo)> {
    let mode = ModeInfo::new(center.clone(), 0.0, hessian.clone())?;
    let (c1, h1) = (center.clone(), hessian.clone());
    let (c2, h2) = (center, hessian.clone());
    let t = TargetDensity::new(mode.dim(), epsilon, move |x| {
        let dx = x - &c1;
        0.5 * dx.dot(&(&h1 * &dx))
    })?
    .with_gradient(move |x| &h2 * (x - &c2))
    .with_hessian(move |_| hessian.clone());
    Ok((t, mode))
}

/// The walk `x₀ = 0, x₁, …, x_N` with increment potential
/// `½Δ² + √ε αΔ³ + ε βΔ⁴`, `Δₖ = xₖ − xₖ₋₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomWalkProblem {
    pub n_dim: usize,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
}

impl RandomWalkProblem {
    pub fn new(n_dim: usize, alpha: f64, beta: f64, epsilon: f64) -> Result<Self> {
        if n_dim == 0 {
            return Err(Error::InvalidArgument("random walk needs N ≥ 1".into()));
        }
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidArgument("couplings must be finite".into()));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidArgument(format!("bad epsilon {epsilon}")));
        }
        Ok(Self {
            n_dim,
            alpha,
            beta,
            epsilon,
        })
    }

    fn coefficients(&self) -> (f64, f64) {
        (self.epsilon.sqrt() * self.alpha, self.epsilon * self.beta)
    }

    pub fn target(&self) -> TargetDensity {
        randomwalk_target(self)
    }

    /// The exact mode: `x* = 0`, `G* = 0`, `H` the second-difference matrix.
    pub fn mode(&self) -> ModeInfo {
        ModeInfo::new(Vector::zeros(self.n_dim), 0.0, second_difference(self.n_dim))
            .expect("second-difference matrix is positive definite")
    }

    /// Increments `Δₖ = xₖ − xₖ₋₁` with `x₀ = 0`.
    pub fn increments(x: &Vector) -> Vector {
        Vector::from_fn(x.len(), |k, _| if k == 0 { x[0] } else { x[k] - x[k - 1] })
    }
}

/// `Hᵢᵢ = 2` (last entry 1), `Hᵢ,ᵢ₊₁ = −1`.
pub fn second_difference(n: usize) -> Matrix {
    let mut h = Matrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = if i + 1 == n { 1.0 } else { 2.0 };
        if i + 1 < n {
            h[(i, i + 1)] = -1.0;
            h[(i + 1, i)] = -1.0;
        }
    }
    h
}

pub fn randomwalk_target(p: &RandomWalkProblem) -> TargetDensity {
    let (a, b) = p.coefficients();
    let n = p.n_dim;
    let dpsi = move |d: f64| d + 3.0 * a * d * d + 4.0 * b * d * d * d;
    let ddpsi = move |d: f64| 1.0 + 6.0 * a * d + 12.0 * b * d * d;
    TargetDensity::new(n, p.epsilon, move |x| {
        let mut prev = 0.0;
        let mut s = 0.0;
        for &xi in x.iter() {
            let d = xi - prev;
            let d2 = d * d;
            s += 0.5 * d2 + a * d2 * d + b * d2 * d2;
            prev = xi;
        }
        s
    })
    .expect("validated problem")
    .with_gradient(move |x| {
        let inc = RandomWalkProblem::increments(x);
        Vector::from_fn(n, |i, _| {
            let next = if i + 1 < n { dpsi(inc[i + 1]) } else { 0.0 };
            dpsi(inc[i]) - next
        })
    })
    .with_hessian(move |x| {
        let inc = RandomWalkProblem::increments(x);
        let mut h = Matrix::zeros(n, n);
        for k in 0..n {
            let c = ddpsi(inc[k]);
            h[(k, k)] += c;
            if k > 0 {
                h[(k - 1, k - 1)] += c;
                h[(k - 1, k)] -= c;
                h[(k, k - 1)] -= c;
            }
        }
        h
    })
}

/// Lorenz '63 initial-condition inference from one full-state observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Lorenz63Problem {
    pub sigma: f64,
    pub beta: f64,
    pub rho: f64,
    /// Observation time `T`.
    pub t_obs: f64,
    pub epsilon: f64,
    pub mu0: Vector3<f64>,
    pub data: Vector3<f64>,
    pub x0_true: Vector3<f64>,
    pub ode_rel_tol: f64,
    pub ode_abs_tol: f64,
}

pub const LORENZ_MU0: [f64; 3] = [3.6314, 6.6136, 10.6044];

impl Lorenz63Problem {
    /// A problem with the standard parameters and the given data.
    pub fn new(t_obs: f64, epsilon: f64, x0_true: Vector3<f64>, data: Vector3<f64>) -> Result<Self> {
        if !(t_obs.is_finite() && t_obs >= 0.0) {
            return Err(Error::InvalidArgument(format!("bad observation time {t_obs}")));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("bad epsilon {epsilon}")));
        }
        Ok(Self {
            sigma: 10.0,
            beta: 8.0 / 3.0,
            rho: 28.0,
            t_obs,
            epsilon,
            mu0: Vector3::from(LORENZ_MU0),
            data,
            x0_true,
            ode_rel_tol: 1e-10,
            ode_abs_tol: 1e-12,
        })
    }

    fn rhs(&self, u: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(
            self.sigma * (u[1] - u[0]),
            u[0] * (self.rho - u[2]) - u[1],
            u[0] * u[1] - self.beta * u[2],
        )
    }

    pub fn target(&self) -> Result<TargetDensity> {
        lorenz_target(self)
    }
}

// Dormand–Prince 5(4) tableau. The system is autonomous, so the nodes are
// not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 1_000_000;

/// One Dormand–Prince step; returns the 5th-order solution, the error
/// estimate and the derivative at the new point.
fn dopri_step(
    p: &Lorenz63Problem,
    y: &Vector3<f64>,
    k1: Vector3<f64>,
    h: f64,
) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
    let mut k = [Vector3::zeros(); 7];
    k[0] = k1;
    for s in 1..7 {
        let mut acc = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            acc += h * A[s][j] * kj;
        }
        if s == 6 {
            // Row 7 of the tableau is the 5th-order solution.
            k[6] = p.rhs(&acc);
            let err = k.iter().zip(E.iter()).fold(Vector3::zeros(), |e, (kj, ej)| e + h * ej * kj);
            return (acc, err, k[6]);
        }
        k[s] = p.rhs(&acc);
    }
    unreachable!()
}

/// Solution of the Lorenz system at time `p.t_obs` from `x0`, with adaptive
/// step control to `p.ode_rel_tol`, `p.ode_abs_tol`.
pub fn integrate_lorenz(x0: &Vector3<f64>, p: &Lorenz63Problem) -> Result<Vector3<f64>> {
    Ok(adaptive(x0, p)?.0)
}

/// Adaptive integration that also returns the accepted step sizes.
fn adaptive(x0: &Vector3<f64>, p: &Lorenz63Problem) -> Result<(Vector3<f64>, Vec<f64>)> {
    if !x0.iter().all(|v| v.is_finite()) {
        return Err(Error::Ode("non-finite initial condition".into()));
    }
    let t_end = p.t_obs;
    let mut y = *x0;
    let mut steps = Vec::new();
    if t_end == 0.0 {
        return Ok((y, steps));
    }
    let mut t = 0.0;
    let mut k1 = p.rhs(&y);
    let mut h = (1e-3f64).min(t_end);
    let h_min = 1e-14 * t_end;
    for _ in 0..MAX_STEPS {
        let last = t + h >= t_end;
        let step = if last { t_end - t } else { h };
        let (y_new, err, k7) = dopri_step(p, &y, k1, step);
        let norm = (0..3)
            .map(|i| {
                let sc = p.ode_abs_tol + p.ode_rel_tol * y[i].abs().max(y_new[i].abs());
                (err[i] / sc).powi(2)
            })
            .sum::<f64>()
            / 3.0;
        let norm = norm.sqrt();
        if !norm.is_finite() {
            return Err(Error::Ode(format!("non-finite state at t = {t}")));
        }
        let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
        if norm <= 1.0 {
            t = if last { t_end } else { t + step };
            y = y_new;
            k1 = k7;
            steps.push(step);
            if last {
                return Ok((y, steps));
            }
            h = step * factor;
        } else {
            h = step * factor.min(1.0);
            if h < h_min {
                return Err(Error::Ode(format!("step size underflow at t = {t}")));
            }
        }
    }
    Err(Error::Ode(format!("more than {MAX_STEPS} steps")))
}

/// Integrates with a fixed sequence of steps.
fn fixed(x0: &Vector3<f64>, p: &Lorenz63Problem, steps: &[f64]) -> Vector3<f64> {
    let mut y = *x0;
    let mut k1 = p.rhs(&y);
    for &h in steps {
        let (y_new, _, k7) = dopri_step(p, &y, k1, h);
        y = y_new;
        k1 = k7;
    }
    y
}

/// The flow map `x₀ ↦ x(T)` used by [`lorenz_target`].
pub fn lorenz_flow_map(p: &Lorenz63Problem) -> Result<impl Fn(&Vector3<f64>) -> Vector3<f64> + Send + Sync> {
    let mut fine = p.clone();
    fine.ode_rel_tol /= 10.0;
    fine.ode_abs_tol /= 10.0;
    let (_, steps) = adaptive(&p.mu0, &fine)?;
    let q = p.clone();
    Ok(move |x0: &Vector3<f64>| fixed(x0, &q, &steps))
}

/// `G(x₀) = [½|d − h(x₀)|² + ½|μ₀ − x₀|²] / ε`, where `h` is the Lorenz flow
/// map to time `T`.
///
/// The flow map is evaluated with the step sequence the adaptive solver
/// selects from `μ₀` at a tenth of the configured tolerances, so `G` is a
/// smooth function of `x₀` rather than one with tiny jumps wherever the
/// adaptive step sequence changes.
pub fn lorenz_target(p: &Lorenz63Problem) -> Result<TargetDensity> {
    let flow = lorenz_flow_map(p)?;
    let q = p.clone();
    TargetDensity::new(3, p.epsilon, move |x| {
        let x0 = Vector3::new(x[0], x[1], x[2]);
        let h = flow(&x0);
        let r = q.data - h;
        let b = q.mu0 - x0;
        0.5 * (r.norm_squared() + b.norm_squared()) / q.epsilon
    })
}

/// Synthetic instance: `x₀,true = μ₀ + ½√ε(1, −1, 1)`, data
/// `h(x₀,true) + √ε v` with `v` standard normal from [`DATA_STREAM`].
pub fn generate_lorenz_instance(eps: f64, t_obs: f64, seed: u64) -> Result<Lorenz63Problem> {
    if !(eps > 0.0 && t_obs > 0.0) {
        return Err(Error::InvalidArgument("ε and T must be positive".into()));
    }
    let mu0 = Vector3::from(LORENZ_MU0);
    let s = eps.sqrt();
    let x0_true = mu0 + 0.5 * s * Vector3::new(1.0, -1.0, 1.0);
    let mut p = Lorenz63Problem::new(t_obs, eps, x0_true, Vector3::zeros())?;
    let mut g = RngStream::new(seed, DATA_STREAM).generator();
    let v = Vector3::new(g.standard_normal(), g.standard_normal(), g.standard_normal());
    p.data = integrate_lorenz(&x0_true, &p)? + s * v;
    Ok(p)
}
