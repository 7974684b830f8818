//! Surrogate scoring rules and the uniform Dominant Truth Serum.
//!
//! Agents answer binary tasks in triples. Each agent is scored against a
//! randomly chosen peer's report using a surrogate rule built from the peer
//! pool's estimated error rates, so truthful reporting maximizes expected
//! score without access to ground truth.

pub mod bench;
pub mod cli;
pub mod data;
pub mod dts;
pub mod error;
pub mod moments;
pub mod scoring;
pub mod seed;
pub mod sim;
pub mod surrogate;

pub use dts::{
    assign_tasks, dts_run, exact_expected_dts, AgentScore, AgentStatus, Assignment, DtsConfig, Panel, ScoreTable,
};
pub use error::{Error, Result};
pub use moments::{EstimationResult, Moments, PriorMode};
pub use scoring::{Elicitation, PredictionRule, Prior, Report, ScoringRule};
pub use sim::{AgentParams, PredictionStrategy, Scenario, SignalStrategy, Strategy};
pub use surrogate::{surrogate_score, ErrorRates};
