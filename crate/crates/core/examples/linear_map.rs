//! Linear-map sampling of a non-Gaussian 1D target, with a weighted mean.
use implicit_samplers::prelude::*;

fn main() -> Result<()> {
    let t = TargetDensity::new(1, 1.0, |x| 0.5 * x[0] * x[0] + 0.1 * x[0].powi(3) + 0.05 * x[0].powi(4))?;
    let mode = minimize(&t, &OptimizeOptions::new(vec![0.3]))?;
    println!("mode {:.6}, G* {:.3e}, H {:.6}", mode.x_star[0], mode.g_star, mode.hessian[(0, 0)]);

    let samples = draw_ensemble(Method::Lm, &t, &mode, 20_000, 1)?;
    let top = samples.iter().map(|s| s.log_weight).fold(f64::NEG_INFINITY, f64::max);
    let (mut sw, mut swx) = (0.0, 0.0);
    for s in &samples {
        let w = (s.log_weight - top).exp();
        sw += w;
        swx += w * s.x[0];
    }
    let lw: Vec<f64> = samples.iter().map(|s| s.log_weight).collect();
    let q = estimate_q(&lw)?;
    println!("E[X] ≈ {:.4}", swx / sw);
    println!("Q = {:.4} ± {:.4}, effective fraction {:.3}", q.q_hat, q.q_se, q.effective_sample_fraction);
    Ok(())
}
