//! A configured sweep written to CSV and SVG.
use implicit_samplers::experiment::{report, run_sweep, write_outputs, ExperimentConfig};

fn main() -> implicit_samplers::Result<()> {
    let cfg = ExperimentConfig::from_json(
        r#"{
            "problem": { "name": "random_walk", "n_dim": 2 },
            "methods": ["lm", "slm", "rm", "srm"],
            "sweep": { "axis": "epsilon", "values": [1e-6, 1e-5, 1e-4, 1e-3] },
            "n_samples": 5000,
            "seed": 1
        }"#,
    )?;
    let table = run_sweep(&cfg)?;
    let dir = std::env::temp_dir().join("implicit-samplers-sweep");
    let out = write_outputs(&table, &dir)?;
    print!("{}", report(&table));
    println!("csv: {}", out.csv.display());
    if let Some(svg) = out.svg {
        println!("svg: {}", svg.display());
    }
    Ok(())
}
