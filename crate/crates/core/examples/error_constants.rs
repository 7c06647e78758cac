//! Leading-order predictions of Q from Taylor moments along rays.
use implicit_samplers::asymptotics::randomwalk_exact_moments;
use implicit_samplers::prelude::*;

fn main() -> Result<()> {
    let eps = 1e-4;
    let p = RandomWalkProblem::new(2, 1.0, 1.0, 1.0)?;
    let (t, m) = (p.target(), p.mode());
    let sampled = estimate_taylor_moments(&t, &m, 20_000, 5)?;
    let exact = randomwalk_exact_moments(2, 1.0, 1.0);
    println!("E C3²: sampled {:.3} exact {:.3}", sampled.e_c3sq, exact.e_c3sq);
    for method in Method::ALL {
        let a = predict_q(method, 2, eps, &sampled)?;
        let b = predict_q(method, 2, eps, &exact)?;
        println!("{method:<4} predicted Q at ε={eps:e}: {a:.4e} (exact moments {b:.4e})");
    }
    Ok(())
}
