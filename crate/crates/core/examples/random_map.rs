//! The stretch factor along single rays, and a random-map ensemble.
use implicit_samplers::prelude::*;
use implicit_samplers::samplers::solve_lambda;

fn main() -> Result<()> {
    let t = TargetDensity::new(2, 1.0, |x| {
        0.5 * (x[0] * x[0] + x[1] * x[1]) + 0.1 * x[0].powi(3) + 0.05 * (x[0].powi(4) + x[1].powi(4))
    })?;
    let m = ModeInfo::new(Vector::zeros(2), 0.0, Matrix::identity(2, 2))?;
    let opts = LambdaOptions::default();
    for xi in [[1.0, 0.0], [-1.0, 0.0], [0.5, 2.0], [-3.0, 1.0]] {
        let xi = Vector::from_column_slice(&xi);
        let lambda = solve_lambda(&t, &m, &xi, &opts)?;
        let (_, lw) = random_map_log_weight(&t, &m, &xi, &opts)?;
        println!("ξ = ({:5.2}, {:5.2})  λ = {lambda:.6}  log w = {lw:+.6}", xi[0], xi[1]);
    }
    let s = draw_ensemble(Method::Rm, &t, &m, 10_000, 3)?;
    let lw: Vec<f64> = s.iter().map(|w| w.log_weight).collect();
    println!("random map Q = {:.4}", estimate_q(&lw)?.q_hat);
    Ok(())
}
