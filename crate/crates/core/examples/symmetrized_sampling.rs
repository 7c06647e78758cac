//! Symmetrized samplers cancel the odd part of the weight error.
use implicit_samplers::prelude::*;

fn main() -> Result<()> {
    let p = RandomWalkProblem::new(4, 1.0, 1.0, 1e-3)?;
    let (t, m) = (p.target(), p.mode());
    for method in [Method::Lm, Method::Slm, Method::Rm, Method::Srm] {
        let s = draw_ensemble(method, &t, &m, 10_000, 2)?;
        let minus = s.iter().filter(|w| w.chose_minus).count();
        let lw: Vec<f64> = s.iter().map(|w| w.log_weight).collect();
        let q = estimate_q(&lw)?;
        println!("{method:<4} Q = {:.3e} ± {:.1e}   reflected draws: {minus}", q.q_hat, q.q_se);
    }
    Ok(())
}
