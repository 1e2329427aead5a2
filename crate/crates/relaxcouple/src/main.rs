use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relaxcouple::{cmd_consistency, cmd_convergence, cmd_run, RunConfig, RunError};

#[derive(Parser)]
#[command(name = "relaxcouple", version, about = "Relaxation schemes for coupled gas pipes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write snapshots and interface errors.
    Run(Common),
    /// Mesh-convergence sweep of the interface coupling errors.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Comma-separated doubling list of cell counts.
        #[arg(long, value_name = "LIST")]
        cell_list: Option<String>,
    },
    /// Check a coupling approach against the turbine conditions.
    Consistency(Common),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    approach: Option<u8>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    /// Relaxation rate; 0 runs the central scheme.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut o = Vec::new();
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                o.push((k.to_string(), v));
            }
        };
        push("scenario", self.scenario.clone());
        push("approach", self.approach.map(|x| x.to_string()));
        push("cells", self.cells.map(|x| x.to_string()));
        push("cfl", self.cfl.map(|x| x.to_string()));
        push("epsilon", self.epsilon.map(|x| x.to_string()));
        push("output_dir", self.out.as_ref().map(|p| p.display().to_string()));
        o
    }

    fn load(&self, extra: Vec<(String, String)>) -> Result<RunConfig, RunError> {
        let mut overrides = self.overrides();
        overrides.extend(extra);
        RunConfig::load(self.config.as_deref(), &overrides)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<u8, RunError> {
    match command {
        Command::Run(common) => {
            let config = common.load(Vec::new())?;
            let summary = cmd_run(&config)?;
            for p in &summary.snapshots {
                println!("wrote {}", p.display());
            }
            println!("wrote {}", summary.errors.display());
            println!(
                "{} steps, L1(E1) = {:.4e}, L1(E2) = {:.4e}",
                summary.steps, summary.l1.0, summary.l1.1
            );
            Ok(0)
        }
        Command::Convergence { common, cell_list } => {
            let extra = cell_list.map(|l| ("cell_list".to_string(), l)).into_iter().collect();
            let config = common.load(extra)?;
            let approaches = match common.approach {
                Some(a) => vec![a],
                None => vec![1, 2, 3, 4],
            };
            for table in cmd_convergence(&config, &approaches)? {
                println!("approach {} ({})", table.approach, table.path.display());
                print!("{}", std::fs::read_to_string(&table.path).map_err(|e| RunError::io(&table.path, e))?);
            }
            Ok(0)
        }
        Command::Consistency(common) => {
            let config = common.load(Vec::new())?;
            let ex = config.experiment()?;
            let verdict = cmd_consistency(&ex.model, config.approach)?;
            print!("{}", verdict.describe());
            Ok(if verdict.is_consistent() { 0 } else { 3 })
        }
    }
}
