use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use implicit_samplers::experiment::{
    repro_config, report, run_sweep, write_outputs, ExperimentConfig, Figure, ReproOverrides,
};

#[derive(Parser)]
#[command(version, about = "Implicit weighted samplers: sweeps and figure reproductions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n_samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce one of the four figures (fig1, fig2, fig3, fig4).
    Repro {
        figure: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        n_samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Random-walk dimension for fig1.
        #[arg(long)]
        n_dim: Option<usize>,
        /// Noise level for fig2.
        #[arg(long)]
        epsilon: Option<f64>,
    },
}

fn config(cmd: Command) -> implicit_samplers::Result<ExperimentConfig> {
    match cmd {
        Command::Run {
            config,
            n_samples,
            seed,
            out,
        } => {
            let mut c = ExperimentConfig::from_path(&config)?;
            if let Some(n) = n_samples {
                c.n_samples = n;
            }
            if let Some(s) = seed {
                c.seed = s;
            }
            if let Some(o) = out {
                c.output_dir = o;
            }
            c.validate()?;
            Ok(c)
        }
        Command::Repro {
            figure,
            out,
            n_samples,
            seed,
            n_dim,
            epsilon,
        } => {
            let fig: Figure = figure.parse()?;
            let c = repro_config(
                fig,
                &ReproOverrides {
                    n_samples,
                    seed,
                    n_dim,
                    epsilon,
                    output_dir: out,
                },
            );
            c.validate()?;
            Ok(c)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = config(cli.command).and_then(|c| {
        let table = run_sweep(&c)?;
        let out = write_outputs(&table, &c.output_dir)?;
        Ok((table, out))
    });
    match outcome {
        Ok((table, out)) => {
            print!("{}", report(&table));
            println!("wrote {}", out.csv.display());
            match &out.svg {
                Some(p) => println!("wrote {}", p.display()),
                None => println!("no successful rows; plot skipped"),
            }
            if table.n_failed() == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
