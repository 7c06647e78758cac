//! Inferring a Lorenz '63 initial state from one noisy observation.
use implicit_samplers::prelude::*;
use implicit_samplers::problems::generate_lorenz_instance;

fn main() -> Result<()> {
    let p = generate_lorenz_instance(1.0, 0.1, 7)?;
    println!("truth {:?}", p.x0_true.as_slice());
    println!("data  {:?}", p.data.as_slice());
    let t = p.target()?;
    let m = minimize(&t, &OptimizeOptions::new(p.mu0.as_slice().to_vec()))?;
    println!("mode  {:?}", m.x_star.as_slice());

    for method in Method::ALL {
        let s = draw_ensemble(method, &t, &m, 1000, 1)?;
        let lw: Vec<f64> = s.iter().map(|w| w.log_weight).collect();
        let q = estimate_q(&lw)?;
        println!("{method:<4} Q = {:.3e} ± {:.1e}", q.q_hat, q.q_se);
    }
    Ok(())
}
