use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use daslice::batch::Execution;
use daslice::diagnostics::CostMode;
use daslice_cli::{
    cmd_compare, cmd_generate_data, cmd_run, cmd_sweep, ExperimentConfig, Overrides, RunSummary,
};

#[derive(Parser)]
#[command(
    name = "daslice",
    version,
    about = "Delayed-acceptance slice sampling experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic data set of a model.
    GenerateData(Common),
    /// Run one chain and write its CSV and summary.
    Run(Common),
    /// Run the plain baseline and the delayed sampler over an h-grid.
    Sweep(Common),
    /// Relative efficiency of one summary against another.
    Compare {
        /// Summary of the delayed-acceptance run.
        da: PathBuf,
        /// Summary of the plain run.
        plain: PathBuf,
        /// Also write the comparison as JSON into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CostArg {
    Wall,
    Evals,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    thin: Option<usize>,
    #[arg(long, value_enum)]
    cost_mode: Option<CostArg>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        Overrides {
            seed: self.seed,
            out: self.out.clone(),
            thin: self.thin,
            cost_mode: self.cost_mode.map(|c| match c {
                CostArg::Wall => CostMode::Wall,
                CostArg::Evals => CostMode::WeightedEvals,
            }),
        }
        .apply(&mut cfg);
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::GenerateData(c) => {
            let path = cmd_generate_data(&c.load()?)?;
            println!("wrote {}", path.display());
        }
        Command::Run(c) => {
            let s = cmd_run(&c.load()?)?;
            println!(
                "n_eff {:.1}  asym_var {:.4}  mean {:.6}  n_coarse {}  n_fine {}",
                s.report.n_eff,
                s.report.asym_var,
                s.report.mean,
                s.report.n_coarse,
                s.report.n_fine
            );
            if let Some(r) = s.relative_efficiency {
                println!("relative efficiency {r:.4}");
            }
        }
        Command::Sweep(c) => {
            let outcome = cmd_sweep(&c.load()?, Execution::default())?;
            for r in &outcome.rows {
                println!(
                    "h {:<12} n_eff {:>10.1}  cost {:>14.1}  rel_eff {:.4}",
                    r.h, r.n_eff, r.t_total, r.relative_efficiency
                );
            }
            for (h, e) in &outcome.failures {
                eprintln!("cell h = {h} failed: {e}");
            }
            return Ok(outcome.succeeded());
        }
        Command::Compare { da, plain, out } => {
            let cmp = cmd_compare(&RunSummary::load(&da)?, &RunSummary::load(&plain)?)?;
            match cmp.wall {
                Some(w) => println!("relative efficiency (wall)  {w:.4}"),
                None => println!("relative efficiency (wall)  unavailable"),
            }
            println!("relative efficiency (evals) {:.4}", cmp.evals);
            if let Some(dir) = out {
                let path = dir.join("comparison.json");
                std::fs::write(&path, serde_json::to_string_pretty(&cmp)? + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
