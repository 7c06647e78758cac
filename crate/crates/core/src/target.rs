//! Target densities `p(x) ∝ exp(-G(x))` and the Gaussian approximation at
//! their mode.
//!
//! The working potential `G` already contains the noise level: problems build
//! `G = F / ε`, so samplers never see `ε` directly.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Matrix, Result, Vector};

type PotentialFn = dyn Fn(&Vector) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&Vector) -> Vector + Send + Sync;
type HessianFn = dyn Fn(&Vector) -> Matrix + Send + Sync;

/// An evaluatable potential `G` on `R^d`, with optional analytic derivatives.
#[derive(Clone)]
pub struct TargetDensity {
    dim: usize,
    epsilon: f64,
    potential: Arc<PotentialFn>,
    gradient: Option<Arc<GradientFn>>,
    hessian: Option<Arc<HessianFn>>,
}

impl fmt::Debug for TargetDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetDensity")
            .field("dim", &self.dim)
            .field("epsilon", &self.epsilon)
            .field("gradient", &self.gradient.is_some())
            .field("hessian", &self.hessian.is_some())
            .finish()
    }
}

impl TargetDensity {
    /// Wraps a potential evaluator. `epsilon` is metadata only; it must be
    /// finite and non-negative (zero is allowed for purely Gaussian limits).
    pub fn new(
        dim: usize,
        epsilon: f64,
        potential: impl Fn(&Vector) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidArgument(format!("bad epsilon {epsilon}")));
        }
        Ok(Self {
            dim,
            epsilon,
            potential: Arc::new(potential),
            gradient: None,
            hessian: None,
        })
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn with_hessian(
        mut self,
        hessian: impl Fn(&Vector) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        self.hessian = Some(Arc::new(hessian));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn has_hessian(&self) -> bool {
        self.hessian.is_some()
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `G(x)`, with a dimension check.
    pub fn eval_potential(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        Ok((self.potential)(x))
    }

    /// `G(x)` without the dimension check; used in inner loops.
    #[inline]
    pub fn potential(&self, x: &Vector) -> f64 {
        (self.potential)(x)
    }

    /// Analytic `∇G(x)` when the target provides one.
    pub fn gradient(&self, x: &Vector) -> Option<Vector> {
        self.gradient.as_ref().map(|g| g(x))
    }

    /// Analytic Hessian when the target provides one.
    pub fn hessian(&self, x: &Vector) -> Option<Matrix> {
        self.hessian.as_ref().map(|h| h(x))
    }

    /// The pulled-back target `y ↦ G(M y)`. Analytic derivatives are carried
    /// through the chain rule.
    pub fn compose_linear(&self, m: &Matrix) -> Result<TargetDensity> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: m.nrows(),
            });
        }
        let base = self.clone();
        let map = m.clone();
        let mut out = TargetDensity::new(self.dim, self.epsilon, move |y| base.potential(&(&map * y)))?;
        if let Some(g) = self.gradient.clone() {
            let map = m.clone();
            out = out.with_gradient(move |y| map.transpose() * g(&(&map * y)));
        }
        if let Some(h) = self.hessian.clone() {
            let map = m.clone();
            out = out.with_hessian(move |y| map.transpose() * h(&(&map * y)) * &map);
        }
        Ok(out)
    }
}

/// Mode of a target and the Gaussian approximation anchored there.
///
/// The whitening factor `S` satisfies `H = S Sᵀ`. [`ModeInfo::new`] uses the
/// lower Cholesky factor; [`ModeInfo::with_factor`] accepts any square root,
/// which is what makes pathwise affine-invariance checks possible.
#[derive(Debug, Clone)]
pub struct ModeInfo {
    pub x_star: Vector,
    pub g_star: f64,
    pub hessian: Matrix,
    pub chol: Matrix,
    factor_inv_t: Matrix,
}

impl ModeInfo {
    pub fn new(x_star: Vector, g_star: f64, hessian: Matrix) -> Result<Self> {
        let d = x_star.len();
        check_hessian(&hessian, d)?;
        let chol = nalgebra::Cholesky::new(hessian.clone())
            .ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorization failed".into()))?
            .l();
        Self::assemble(x_star, g_star, hessian, chol)
    }

    /// Uses `factor` (with `factor · factorᵀ = hessian`) for whitening.
    pub fn with_factor(x_star: Vector, g_star: f64, hessian: Matrix, factor: Matrix) -> Result<Self> {
        let d = x_star.len();
        check_hessian(&hessian, d)?;
        if factor.nrows() != d || factor.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: factor.nrows(),
            });
        }
        let resid = (&factor * factor.transpose() - &hessian).amax();
        if resid > 1e-8 * hessian.amax().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "factor does not reproduce the Hessian (residual {resid:e})"
            )));
        }
        Self::assemble(x_star, g_star, hessian, factor)
    }

    fn assemble(x_star: Vector, g_star: f64, hessian: Matrix, chol: Matrix) -> Result<Self> {
        let factor_inv_t = chol
            .transpose()
            .try_inverse()
            .ok_or_else(|| Error::NotPositiveDefinite("singular whitening factor".into()))?;
        Ok(Self {
            x_star,
            g_star,
            hessian,
            chol,
            factor_inv_t,
        })
    }

    pub fn dim(&self) -> usize {
        self.x_star.len()
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `½ (x − x*)ᵀ H (x − x*)`.
    pub fn centered_quadratic(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        let dx = x - &self.x_star;
        Ok(0.5 * dx.dot(&(&self.hessian * &dx)))
    }

    /// `η = Sᵀ (x − x*)`.
    pub fn whiten(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        Ok(self.chol.transpose() * (x - &self.x_star))
    }

    /// `x = x* + S⁻ᵀ η`.
    pub fn unwhiten(&self, eta: &Vector) -> Result<Vector> {
        self.check_dim(eta)?;
        Ok(&self.x_star + self.direction(eta))
    }

    /// `S⁻ᵀ η`: the displacement from the mode for whitened point `η`.
    #[inline]
    pub fn direction(&self, eta: &Vector) -> Vector {
        &self.factor_inv_t * eta
    }
}

fn check_hessian(h: &Matrix, d: usize) -> Result<()> {
    if h.nrows() != d || h.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: h.nrows(),
        });
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "Hessian".into(),
        });
    }
    let scale = h.amax().max(f64::MIN_POSITIVE);
    let asym = (h - h.transpose()).amax();
    if asym > 1e-8 * scale {
        return Err(Error::InvalidArgument(format!("Hessian is not symmetric ({asym:e})")));
    }
    Ok(())
}
