//! Run reports written by `--report`.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Solved,
    NotInRegime,
    NotInLattice,
    Infeasible,
    BudgetExceeded,
    Error,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Solved => "ok",
            Outcome::NotInRegime => "not_in_regime",
            Outcome::NotInLattice => "not_in_lattice",
            Outcome::Infeasible => "infeasible",
            Outcome::BudgetExceeded => "budget_exceeded",
            Outcome::Error => "error",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Solved => 0,
            Outcome::Error => 1,
            Outcome::NotInRegime => 2,
            Outcome::NotInLattice | Outcome::Infeasible => 3,
            Outcome::BudgetExceeded => 4,
        }
    }
}

#[derive(Serialize)]
pub struct RunReport {
    command: String,
    input_sha256: String,
    outcome: &'static str,
    exit_code: u8,
    output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    wall_time_ms: f64,
}

impl RunReport {
    pub fn new(command: &str, input: &str, outcome: Outcome, output: Option<String>, wall: Duration) -> Self {
        let digest = Sha256::digest(input.as_bytes());
        RunReport {
            command: command.to_string(),
            input_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
            outcome: outcome.as_str(),
            exit_code: outcome.exit_code(),
            output,
            certificate: None,
            wall_time_ms: wall.as_secs_f64() * 1e3,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
