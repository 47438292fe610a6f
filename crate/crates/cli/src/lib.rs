//! Reproducible scenario runner for the coarse-grained entanglement laboratory.
//!
//! Each [`Scenario`] is one numerical experiment with a typed parameter schema.
//! [`run`] resolves nothing on its own: callers build a [`ScenarioConfig`]
//! (defaults, config file, overrides) and receive a [`RunReport`] with rows,
//! verdicts and a timestamp that is the only nondeterministic field.

pub mod config;
pub mod report;
pub mod scenarios;

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use thiserror::Error;

pub use config::{ConfigError, Scenario, ScenarioConfig};
pub use report::{Cell, Format, RunReport, Verdict};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERDICT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Core(#[from] cge_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        use cge_core::Error as E;
        match self {
            RunError::Config(_) | RunError::Io(_) => EXIT_CONFIG,
            RunError::Core(e) => match e {
                E::NotPositiveDefinite { .. }
                | E::NotCanonical { .. }
                | E::UncertaintyViolation { .. }
                | E::RankDeficient
                | E::QuadratureNotConverged { .. }
                | E::VanishingNorm => EXIT_NUMERICAL,
                // Everything else is a module precondition tripped by a parameter.
                _ => EXIT_CONFIG,
            },
        }
    }
}

/// Runs a scenario and assembles its report.
pub fn run(config: &ScenarioConfig) -> Result<RunReport, RunError> {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0);
    let clock = Instant::now();
    let table = scenarios::dispatch(config)?;
    let passed = table.verdicts.iter().all(|v| v.pass);
    let parameters = config
        .params()
        .iter()
        .map(|(k, v)| (k.clone(), serde_json::to_value(v).expect("parameter serializes")))
        .collect();
    Ok(RunReport {
        scenario: config.scenario.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        parameters,
        entropy_unit: "nats".into(),
        columns: table.columns,
        rows: table.rows,
        verdicts: table.verdicts,
        passed,
        timestamp: report::Timestamp {
            started_unix_ms: started,
            wall_time_ms: clock.elapsed().as_secs_f64() * 1e3,
        },
    })
}
