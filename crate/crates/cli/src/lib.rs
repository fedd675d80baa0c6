//! Batch driver: resolves a scenario, runs one command and writes its
//! artifacts.

use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;
use thiserror::Error;

pub mod commands;
pub mod output;
pub mod scenario;

pub use commands::{calibration_exponents, initial_data, run};
pub use output::RunOutput;
pub use scenario::{ConfigParseError, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Norms,
    Evolve,
    Picard,
    Params,
    Strichartz,
    Highlow,
    Calibrate,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigParseError),
    #[error("scenario infeasible: {0}")]
    ScenarioInfeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::ScenarioInfeasible(_) => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub scenario: Scenario,
    pub out: PathBuf,
    pub jobs: usize,
}
