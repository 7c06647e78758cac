//! Exact Gaussian moments by pairing enumeration.
use implicit_samplers::asymptotics::randomwalk_c3sq_wick;
use implicit_samplers::gaussian::{rational_reduction_factor, Polynomial};
use implicit_samplers::prelude::*;

fn main() -> Result<()> {
    let id = Matrix::identity(1, 1);
    for k in [2, 4, 6, 8] {
        println!("E Z^{k} = {}", wick_expectation(&Monomial::power(0, k), &id)?);
    }
    let cov = Matrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
    println!("E X0² X1² = {} under a correlated covariance", wick_expectation(&Monomial::new(vec![0, 0, 1, 1]), &cov)?);

    let sum = Polynomial::linear(&[(0, 1.0), (1, -1.0)]);
    println!("E (X0 − X1)⁴ = {}", sum.pow(4).expectation(&cov)?);

    for n in 1..=4 {
        println!("random walk N={n}: E C3² = {}", randomwalk_c3sq_wick(n, 1.0)?);
    }
    println!("E[Z⁴/|Z|²] in d=3 reduces by {}", rational_reduction_factor(4, 3, 1)?);
    Ok(())
}
