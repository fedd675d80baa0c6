use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;
use kgmod_cli::{run, CliError, Command, RunConfig, Scenario};

#[derive(Debug, Parser)]
#[command(name = "kgmod", about = "Klein-Gordon experiments on periodic grids")]
struct Args {
    command: Command,
    /// `key = value` scenario file; built-in defaults apply without one.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// `key=value` override, applied after the scenario file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn resolve(args: &Args) -> Result<RunConfig> {
    let mut scenario = match &args.scenario {
        Some(path) => Scenario::load(path).map_err(CliError::from)?,
        None => Scenario::default(),
    };
    for pair in &args.overrides {
        scenario.apply_override(pair).map_err(CliError::from)?;
    }
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    Ok(RunConfig { command: args.command, scenario, out: args.out.clone(), jobs: args.jobs.max(1) })
}

fn main() -> ExitCode {
    let args = Args::parse();
    match resolve(&args).and_then(|cfg| run(&cfg)) {
        Ok(output) => {
            for line in &output.notes {
                println!("{line}");
            }
            for f in output.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<CliError>().map_or(1, CliError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
