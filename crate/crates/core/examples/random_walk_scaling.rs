//! How Q scales with the noise level and the dimension on the random walk.
use implicit_samplers::prelude::*;

fn q(method: Method, n: usize, eps: f64) -> Result<f64> {
    let p = RandomWalkProblem::new(n, 1.0, 1.0, eps)?;
    let s = draw_ensemble(method, &p.target(), &p.mode(), 10_000, 1)?;
    let lw: Vec<f64> = s.iter().map(|w| w.log_weight).collect();
    Ok(estimate_q(&lw)?.q_hat)
}

fn main() -> Result<()> {
    let eps = [1e-6, 1e-5, 1e-4, 1e-3];
    for method in Method::ALL {
        let ys = eps.iter().map(|&e| q(method, 2, e)).collect::<Result<Vec<_>>>()?;
        let (slope, _) = fit_slope(&eps, &ys)?;
        println!("{method:<4} slope in ε: {slope:.3}");
    }
    println!();
    for n in [2, 20, 200] {
        let (lm, rm) = (q(Method::Lm, n, 1e-5)?, q(Method::Rm, n, 1e-5)?);
        println!("N={n:<4} Q_RM / Q_LM = {:.3}", rm / lm);
    }
    Ok(())
}
