//! The quality measure on weights with a known answer.
use implicit_samplers::prelude::*;

fn main() -> Result<()> {
    // log w ~ N(0, s²) has Q = exp(s²) − 1.
    let mut rng = RngStream::new(9, 0).generator();
    for s in [0.1f64, 0.5, 1.0] {
        let lw: Vec<f64> = (0..100_000).map(|_| s * rng.standard_normal()).collect();
        let r = estimate_q(&lw)?;
        println!("s={s}: Q = {:.4} ± {:.4} (exact {:.4})", r.q_hat, r.q_se, (s * s).exp_m1());
    }
    // Shifting every log-weight leaves Q unchanged.
    let lw = [0.0, 1.0f64.ln(), 3.0f64.ln()];
    let shifted: Vec<f64> = lw.iter().map(|l| l + 700.0).collect();
    println!("{:.12} == {:.12}", estimate_q(&lw)?.q_hat, estimate_q(&shifted)?.q_hat);
    Ok(())
}
