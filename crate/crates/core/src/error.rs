use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid prior: p0={p0}, p1={p1}")]
    InvalidPrior { p0: f64, p1: f64 },

    #[error("prior is uniform (p0 = p1 = 0.5); error rates are not identifiable")]
    UniformPrior,

    #[error("invalid error rates: e1={e1}, e0={e0} (both must lie in [0, 1])")]
    InvalidErrorRates { e1: f64, e0: f64 },

    #[error("probability {name}={value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("rule `{rule}` expects a {expected} report")]
    ReportTypeMismatch { rule: &'static str, expected: &'static str },

    #[error("prior assigns zero mass to outcome {outcome}")]
    ZeroPriorMass { outcome: u8 },

    #[error("posterior-signal rule needs the reporter's error rates")]
    MissingErrorRates,

    #[error("reference is uninformative: |1 - e1 - e0| = {gap} is below {threshold}")]
    Uninformative { gap: f64, threshold: f64 },

    #[error("degenerate posterior: zero denominator for signal {signal}")]
    DegeneratePosterior { signal: u8 },

    #[error("moment denominator c2 - c1^2 = {value} is below the degeneracy threshold")]
    DegenerateMoments { value: f64 },

    #[error("insufficient tasks for estimation: {found} < {required}")]
    InsufficientTasks { found: usize, required: usize },

    #[error("task {task} has {len} reports; exactly 3 are required")]
    MalformedTriple { task: String, len: usize },

    #[error("both candidate priors are within tolerance of 0.5 (p0 = {p0}); the one-bit prior cannot disambiguate")]
    AmbiguousPrior { p0: f64 },

    #[error("need at least 3 agents, got {0}")]
    TooFewAgents(usize),

    #[error("need at least 1 task")]
    NoTasks,

    #[error("agent {agent} is not assigned to task {task}")]
    NotAssigned { agent: String, task: String },

    #[error("missing report from agent {agent} on task {task}")]
    MissingReport { agent: String, task: String },

    #[error("missing ground truth for task {0}")]
    MissingTruth(String),

    #[error("agent sets differ between the two score vectors")]
    AgentSetMismatch,

    #[error("need at least {required} values, got {found}")]
    TooFewValues { found: usize, required: usize },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {}", errors.join("; "))]
    Records { path: PathBuf, errors: Vec<String> },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by user input (configs, data files, flags) rather than
    /// by the computation itself.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Records { .. }
                | Error::InvalidPrior { .. }
                | Error::InvalidErrorRates { .. }
                | Error::OutOfRange { .. }
                | Error::ReportTypeMismatch { .. }
                | Error::MalformedTriple { .. }
                | Error::MissingErrorRates
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
