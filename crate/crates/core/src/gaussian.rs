//! Reproducible Gaussian draws, Wick's formula, and the rational Gaussian
//! expectation identities.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::target::ModeInfo;
use crate::{Error, Matrix, Result, Vector};

/// Identifies an independent random substream.
///
/// Each Monte Carlo sample `k` uses `stream_id = k`, so results do not depend
/// on the order in which samples are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn generator(&self) -> StreamRng {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(self.stream_id);
        StreamRng { inner }
    }
}

/// Counter-based generator for one [`RngStream`].
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval (0, 1), 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal by inverse CDF of a uniform draw.
    pub fn standard_normal(&mut self) -> f64 {
        let u = self.uniform();
        Normal::standard().inverse_cdf(u)
    }

    pub fn standard_normal_vec(&mut self, d: usize) -> Vector {
        Vector::from_fn(d, |_, _| self.standard_normal())
    }
}

/// `d` independent standard normals from the start of `rng`'s stream.
pub fn sample_standard_normal(rng: RngStream, d: usize) -> Vector {
    rng.generator().standard_normal_vec(d)
}

/// Draws `x ~ N(x*, H⁻¹)` as `x = x* + S⁻ᵀ ξ` and returns `(x, ξ)`.
pub fn sample_proposal(m: &ModeInfo, rng: RngStream) -> (Vector, Vector) {
    let xi = sample_standard_normal(rng, m.dim());
    let x = &m.x_star + m.direction(&xi);
    (x, xi)
}

/// A Gaussian monomial `X_{i_1} ⋯ X_{i_k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub indices: Vec<usize>,
}

impl Monomial {
    pub fn new(indices: Vec<usize>) -> Self {
        Self { indices }
    }

    /// `X_i^power`.
    pub fn power(index: usize, power: usize) -> Self {
        Self::new(vec![index; power])
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }
}

pub const MAX_WICK_DEGREE: usize = 16;

/// `E(X_{i_1} ⋯ X_{i_2n})` for a centred Gaussian with covariance `cov`,
/// summed over all `(2n − 1)!!` pairings. Odd degree gives exactly zero.
pub fn wick_expectation(mono: &Monomial, cov: &Matrix) -> Result<f64> {
    let deg = mono.degree();
    if deg > MAX_WICK_DEGREE {
        return Err(Error::DegreeTooLarge(deg));
    }
    if let Some(&i) = mono.indices.iter().find(|&&i| i >= cov.nrows() || i >= cov.ncols()) {
        return Err(Error::DimensionMismatch {
            expected: cov.nrows(),
            got: i + 1,
        });
    }
    if deg % 2 == 1 {
        return Ok(0.0);
    }
    let mut idx = mono.indices.clone();
    Ok(pair_smallest(&mut idx, cov))
}

// Pairs the first remaining index with each later one in turn, which visits
// every perfect matching exactly once.
fn pair_smallest(idx: &mut Vec<usize>, cov: &Matrix) -> f64 {
    if idx.is_empty() {
        return 1.0;
    }
    let first = idx.remove(0);
    let mut total = 0.0;
    for j in 0..idx.len() {
        let c = cov[(first, idx[j])];
        if c != 0.0 {
            let partner = idx.remove(j);
            total += c * pair_smallest(idx, cov);
            idx.insert(j, partner);
        }
    }
    idx.insert(0, first);
    total
}

/// `(2n − 1)!!`, the number of pairings of `2n` items.
pub fn double_factorial_odd(n: usize) -> f64 {
    (1..=n).map(|k| (2 * k - 1) as f64).product()
}

/// Factor `c` with `E(C(ξ) / |ξ|^{2k}) = c · E(C(ξ))` for `C` homogeneous of
/// degree `p` and `ξ ~ N(0, I_d)`; `k` is 1 or 2.
pub fn rational_reduction_factor(p: usize, d: usize, k: usize) -> Result<f64> {
    if !(k == 1 || k == 2) {
        return Err(Error::InvalidArgument(format!("k must be 1 or 2, got {k}")));
    }
    let (p, d) = (p as i64, d as i64);
    let mut factor = 1.0;
    for j in 1..=k as i64 {
        let denom = p - 2 * j + d;
        if denom <= 0 {
            return Err(Error::InvalidArgument(format!(
                "nonpositive denominator p - {} + d = {denom}",
                2 * j
            )));
        }
        factor /= denom as f64;
    }
    Ok(factor)
}

/// Sparse polynomial in Gaussian coordinates, keyed by sorted index lists.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Polynomial {
    terms: BTreeMap<Vec<usize>, f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    /// The linear form `Σ coeffs[i] X_i`.
    pub fn linear(coeffs: &[(usize, f64)]) -> Self {
        let mut p = Self::zero();
        for &(i, c) in coeffs {
            p.add_term(vec![i], c);
        }
        p
    }

    pub fn add_term(&mut self, mut indices: Vec<usize>, coeff: f64) {
        indices.sort_unstable();
        let e = self.terms.entry(indices).or_insert(0.0);
        *e += coeff;
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (k, &c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(k, &c)| (k.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let mut idx = a.clone();
                idx.extend_from_slice(b);
                out.add_term(idx, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        (0..n).fold(Polynomial::constant(1.0), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        self.terms
            .iter()
            .map(|(k, &c)| c * k.iter().map(|&i| x[i]).product::<f64>())
            .sum()
    }

    /// Gaussian expectation term by term via [`wick_expectation`].
    pub fn expectation(&self, cov: &Matrix) -> Result<f64> {
        self.terms.iter().try_fold(0.0, |acc, (k, &c)| {
            Ok(acc + c * wick_expectation(&Monomial::new(k.clone()), cov)?)
        })
    }
}
