//! Experiment runner for hypercube quantum walks.
//!
//! A run takes an [`ExperimentConfig`], validates it, and produces a CSV
//! [`Table`] whose header comments record the tool version and the full
//! configuration.

pub mod config;
pub mod experiments;
pub mod routing;
pub mod table;
pub mod verify;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
pub use table::{ResultRow, Table};
pub use verify::VerifyReport;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Walk(#[from] qwalk::WalkError),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 2 for bad input, 1 for anything that went wrong while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Walk(_) => 2,
            RunError::Io(_) => 1,
        }
    }
}

/// A finished run. `passed` is false only for a failing `verify`.
#[derive(Debug)]
pub struct RunOutput {
    pub table: Table,
    pub passed: bool,
    pub report: Option<VerifyReport>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    cfg.validate()?;
    let (mut table, report) = match cfg.kind {
        ExperimentKind::Oneshot | ExperimentKind::OneshotWindow => (experiments::run_oneshot(cfg)?, None),
        ExperimentKind::Concurrent => (experiments::run_concurrent(cfg)?, None),
        ExperimentKind::Continuous => (experiments::run_continuous(cfg)?, None),
        ExperimentKind::Classical => (experiments::run_classical(cfg)?, None),
        ExperimentKind::Neighborhood => (experiments::run_neighborhood(cfg)?, None),
        ExperimentKind::Routing => (experiments::run_routing(cfg)?, None),
        ExperimentKind::Verify => {
            let report = verify::run_verify(cfg)?;
            (report.to_table(cfg.seed), Some(report))
        }
    };
    table.note("qwalk", env!("CARGO_PKG_VERSION"));
    table.note("kind", cfg.kind.name());
    table.note("config", cfg.to_json());
    let passed = report.as_ref().is_none_or(VerifyReport::passed);
    Ok(RunOutput { table, passed, report })
}
