//! Strictly proper scoring rules for binary outcomes and the value-of-information
//! quantities they induce.
//!
//! Prediction rules (Brier, logarithmic, spherical) score a probability
//! `p = Pr[y = 1]`. Signal rules (1/Prior, posterior-signal) score a binary
//! answer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surrogate::ErrorRates;

/// Predictions are clamped to `[LOG_CLAMP, 1 - LOG_CLAMP]` before taking logs.
pub const DEFAULT_LOG_CLAMP: f64 = 1e-9;

const PRIOR_SUM_TOL: f64 = 1e-12;

/// Marginal distribution of the ground truth over the task set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prior {
    p0: f64,
    p1: f64,
}

impl Prior {
    /// Both masses must lie in `[0, 1]` and sum to one. Degenerate priors are
    /// accepted here (a world can be all ones); paths that need both classes
    /// check [`Prior::is_proper`] themselves.
    pub fn new(p0: f64, p1: f64) -> Result<Self> {
        let ok = (0.0..=1.0).contains(&p0) && (0.0..=1.0).contains(&p1) && (p0 + p1 - 1.0).abs() <= PRIOR_SUM_TOL;
        if !ok {
            return Err(Error::InvalidPrior { p0, p1 });
        }
        Ok(Prior { p0, p1 })
    }

    pub fn from_p1(p1: f64) -> Result<Self> {
        Prior::new(1.0 - p1, p1)
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn mass(&self, outcome: bool) -> f64 {
        if outcome {
            self.p1
        } else {
            self.p0
        }
    }

    /// `0 < p0 < 1`.
    pub fn is_proper(&self) -> bool {
        self.p0 > 0.0 && self.p0 < 1.0
    }

    pub fn is_uniform(&self, tol: f64) -> bool {
        (self.p0 - self.p1).abs() <= tol
    }

    /// The one bit of prior knowledge the unknown-prior solver needs: `1(P0 > 0.5)`.
    pub fn zero_is_majority(&self) -> bool {
        self.p0 > 0.5
    }
}

/// Whether agents report binary signals or probabilistic predictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Elicitation {
    Signal,
    Prediction,
}

/// One agent's answer on one task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Report {
    Prediction(f64),
    Signal(bool),
}

impl Report {
    pub fn is_signal(&self) -> bool {
        matches!(self, Report::Signal(_))
    }
}

/// Rules that score a probabilistic prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "kebab-case")]
pub enum PredictionRule {
    Brier,
    Logarithmic { clamp: f64 },
    Spherical,
}

impl PredictionRule {
    pub fn logarithmic() -> Self {
        PredictionRule::Logarithmic {
            clamp: DEFAULT_LOG_CLAMP,
        }
    }

    fn eval(&self, p: f64, outcome: bool) -> f64 {
        match *self {
            PredictionRule::Brier => {
                let y = if outcome { 1.0 } else { 0.0 };
                1.0 - (p - y) * (p - y)
            }
            PredictionRule::Logarithmic { clamp } => {
                let p = p.clamp(clamp, 1.0 - clamp);
                if outcome {
                    p.ln()
                } else {
                    (1.0 - p).ln()
                }
            }
            PredictionRule::Spherical => {
                let norm = (p * p + (1.0 - p) * (1.0 - p)).sqrt();
                if outcome {
                    p / norm
                } else {
                    (1.0 - p) / norm
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PredictionRule::Brier => "brier",
            PredictionRule::Logarithmic { .. } => "logarithmic",
            PredictionRule::Spherical => "spherical",
        }
    }
}

/// A strictly proper scoring rule over binary outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "kebab-case")]
pub enum ScoringRule {
    Prediction {
        rule: PredictionRule,
    },
    /// `1(s = y) / Pr[y = s]`.
    OneOverPrior {
        prior: Prior,
    },
    /// Scores a signal by the base rule evaluated at the Bayes posterior
    /// `Pr[y = 1 | s]`, computed from the prior and the reporter's rates.
    PosteriorSignal {
        prior: Prior,
        rates: Option<ErrorRates>,
        base: PredictionRule,
    },
}

impl ScoringRule {
    pub fn brier() -> Self {
        ScoringRule::Prediction {
            rule: PredictionRule::Brier,
        }
    }

    pub fn logarithmic() -> Self {
        ScoringRule::Prediction {
            rule: PredictionRule::logarithmic(),
        }
    }

    pub fn spherical() -> Self {
        ScoringRule::Prediction {
            rule: PredictionRule::Spherical,
        }
    }

    pub fn one_over_prior(prior: Prior) -> Self {
        ScoringRule::OneOverPrior { prior }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScoringRule::Prediction { rule } => rule.name(),
            ScoringRule::OneOverPrior { .. } => "one-over-prior",
            ScoringRule::PosteriorSignal { .. } => "posterior-signal",
        }
    }

    /// Whether the rule scores binary signals (as opposed to predictions).
    pub fn scores_signals(&self) -> bool {
        !matches!(self, ScoringRule::Prediction { .. })
    }

    pub fn elicitation(&self) -> Elicitation {
        if self.scores_signals() {
            Elicitation::Signal
        } else {
            Elicitation::Prediction
        }
    }

    pub fn score(&self, report: Report, outcome: bool) -> Result<f64> {
        match (self, report) {
            (ScoringRule::Prediction { rule }, Report::Prediction(p)) => {
                check_prob("prediction", p)?;
                Ok(rule.eval(p, outcome))
            }
            (ScoringRule::OneOverPrior { prior }, Report::Signal(s)) => {
                let mass = prior.mass(s);
                if mass <= 0.0 {
                    return Err(Error::ZeroPriorMass { outcome: s as u8 });
                }
                Ok(if s == outcome { 1.0 / mass } else { 0.0 })
            }
            (ScoringRule::PosteriorSignal { prior, rates, base }, Report::Signal(s)) => {
                let rates = rates.ok_or(Error::MissingErrorRates)?;
                let p = crate::sim::posterior_from_signal(s, rates, *prior)?;
                Ok(base.eval(p, outcome))
            }
            (rule, _) => Err(Error::ReportTypeMismatch {
                rule: rule.name(),
                expected: if rule.scores_signals() { "signal" } else { "prediction" },
            }),
        }
    }
}

/// Anything that scores a report against a binary outcome.
///
/// [`ScoringRule`] is the production implementation; the trait exists so the
/// surrogate machinery can be exercised with arbitrary score tables.
pub trait BinaryScore {
    fn score(&self, report: Report, outcome: bool) -> Result<f64>;
}

impl BinaryScore for ScoringRule {
    fn score(&self, report: Report, outcome: bool) -> Result<f64> {
        ScoringRule::score(self, report, outcome)
    }
}

pub fn score<S: BinaryScore + ?Sized>(rule: &S, report: Report, outcome: bool) -> Result<f64> {
    rule.score(report, outcome)
}

/// Exact expectation of the score when `Pr[y = 1] = belief`.
pub fn expected_score<S: BinaryScore + ?Sized>(rule: &S, report: Report, belief: f64) -> Result<f64> {
    check_prob("belief", belief)?;
    let s1 = rule.score(report, true)?;
    let s0 = rule.score(report, false)?;
    Ok(belief * s1 + (1.0 - belief) * s0)
}

/// Brier's Bregman divergence between a prediction and the true distribution.
/// Smaller is better; equals the expected-Brier gap to the truthful report.
pub fn brier_divergence(report: f64, truth: f64) -> f64 {
    (truth - report) * (truth - report)
}

/// Weighted sum of errors that ranks reporters under the 1/Prior rule:
/// `(1 - p*) / P0 * e0 + p* / P1 * e1`. Lower means a higher expected score.
pub fn voi_one_over_prior(rates: ErrorRates, truth: f64, prior: Prior) -> Result<f64> {
    check_prob("truth", truth)?;
    let (p0, p1) = nonzero_masses(prior)?;
    Ok((1.0 - truth) / p0 * rates.e0() + truth / p1 * rates.e1())
}

/// Expected 1/Prior score of a truthful reporter with the given rates, using
/// the weighted-error identity.
pub fn expected_one_over_prior(rates: ErrorRates, truth: f64, prior: Prior) -> Result<f64> {
    let (p0, p1) = nonzero_masses(prior)?;
    Ok((1.0 - truth) / p0 + truth / p1 - voi_one_over_prior(rates, truth, prior)?)
}

fn nonzero_masses(prior: Prior) -> Result<(f64, f64)> {
    if prior.p0() <= 0.0 {
        return Err(Error::ZeroPriorMass { outcome: 0 });
    }
    if prior.p1() <= 0.0 {
        return Err(Error::ZeroPriorMass { outcome: 1 });
    }
    Ok((prior.p0(), prior.p1()))
}

pub(crate) fn check_prob(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value })
    }
}
