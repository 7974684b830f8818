//! Surrogate scoring: scoring a report against a noisy binary reference so
//! that, in expectation over the reference noise, the report receives exactly
//! the strictly proper score it would have received against the ground truth.
//!
//! With reference error rates `e1 = Pr[z=0 | y=1]` and `e0 = Pr[z=1 | y=0]`,
//! the surrogate score of report `a` against reference `z = o` is
//!
//! ```text
//! phi(a, o) = [(1 - e_{1-o}) S(a, o) - e_o S(a, 1-o)] / (1 - e1 - e0)
//! ```
//!
//! The same formula covers references with `e1 + e0 > 1`; it coincides with
//! scoring against the flipped reference using the flipped rates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::{check_prob, BinaryScore, Prior, Report};

/// Smallest `|1 - e1 - e0|` the raw surrogate score accepts.
pub const DENOMINATOR_EPS: f64 = 1e-12;

/// False-negative / false-positive rates of a binary channel:
/// `e1 = Pr[obs = 0 | y = 1]`, `e0 = Pr[obs = 1 | y = 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    e1: f64,
    e0: f64,
}

impl ErrorRates {
    pub fn new(e1: f64, e0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&e1) || !(0.0..=1.0).contains(&e0) {
            return Err(Error::InvalidErrorRates { e1, e0 });
        }
        Ok(ErrorRates { e1, e0 })
    }

    pub const fn perfect() -> Self {
        ErrorRates { e1: 0.0, e0: 0.0 }
    }

    pub fn e1(&self) -> f64 {
        self.e1
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    /// `e_o`: `e1` for `o = true`, `e0` for `o = false`.
    pub fn rate(&self, o: bool) -> f64 {
        if o {
            self.e1
        } else {
            self.e0
        }
    }

    /// `1 - e1 - e0`. Zero exactly when the channel carries no information.
    pub fn gap(&self) -> f64 {
        1.0 - self.e1 - self.e0
    }

    /// Stochastic relevance: the observation depends on `y` iff `e1 + e0 != 1`.
    pub fn is_informative(&self) -> bool {
        self.gap() != 0.0
    }

    /// Bayesian informative: `e1 + e0 < 1`.
    pub fn is_bayesian_informative(&self) -> bool {
        self.gap() > 0.0
    }

    /// `Pr[obs = observed | y]`.
    pub fn channel(&self, y: bool, observed: bool) -> f64 {
        let p_one = self.prob_one(y);
        if observed {
            p_one
        } else {
            1.0 - p_one
        }
    }

    /// `Pr[obs = 1 | y]`.
    pub fn prob_one(&self, y: bool) -> f64 {
        if y {
            1.0 - self.e1
        } else {
            self.e0
        }
    }

    /// Rates of the relabeled observation `1 - obs`.
    pub fn flipped(&self) -> Self {
        ErrorRates {
            e1: 1.0 - self.e1,
            e0: 1.0 - self.e0,
        }
    }
}

/// Surrogate score of `report` against the noisy reference `reference`.
///
/// Fails with [`Error::Uninformative`] when `|1 - e1 - e0| <= 1e-12`; callers
/// running a mechanism route that case to a zero score instead.
pub fn surrogate_score<S: BinaryScore + ?Sized>(
    rule: &S,
    report: Report,
    reference: bool,
    rates: ErrorRates,
) -> Result<f64> {
    // Work with (keep, err) pairs where keep = 1 - err holds exactly in
    // floating point. Flipping the rates then swaps keep and err without
    // rounding, and the flip identity holds bit for bit.
    let keep1 = 1.0 - rates.e1;
    let keep0 = 1.0 - rates.e0;
    let (e1, e0) = (1.0 - keep1, 1.0 - keep0);
    let gap = keep1 - e0;
    if gap.abs() <= DENOMINATOR_EPS {
        return Err(Error::Uninformative {
            gap: gap.abs(),
            threshold: DENOMINATOR_EPS,
        });
    }
    let o = reference;
    let matched = rule.score(report, o)?;
    let other = rule.score(report, !o)?;
    let (keep_other, err_o) = if o { (keep0, e1) } else { (keep1, e0) };
    // + 0.0 maps -0.0 to 0.0, so a zero score has one representation
    Ok((keep_other * matched - err_o * other) / gap + 0.0)
}

/// `E[phi(report, z) | y]`, by enumerating the two reference values.
pub fn expected_surrogate_given_truth<S: BinaryScore + ?Sized>(
    rule: &S,
    report: Report,
    y: bool,
    rates: ErrorRates,
) -> Result<f64> {
    let one = surrogate_score(rule, report, true, rates)?;
    let zero = surrogate_score(rule, report, false, rates)?;
    Ok(rates.channel(y, true) * one + rates.channel(y, false) * zero)
}

/// Subjective expectation of the surrogate score for an agent whose belief
/// is `Pr[y = 1] = belief`.
pub fn expected_surrogate<S: BinaryScore + ?Sized>(
    rule: &S,
    report: Report,
    belief: f64,
    rates: ErrorRates,
) -> Result<f64> {
    check_prob("belief", belief)?;
    Ok(belief * expected_surrogate_given_truth(rule, report, true, rates)?
        + (1.0 - belief) * expected_surrogate_given_truth(rule, report, false, rates)?)
}

/// Variance of the surrogate score over the joint draw of `(y, z)`.
///
/// The four `(y, z)` cells are enumerated for the marginal `q = Pr[z = 1]`.
/// Since the score depends on `z` only, the variance is `q (1 - q) (phi1 - phi0)^2`,
/// which equals `E[phi^2] - E[phi]^2` and is exactly zero when both scores agree.
pub fn surrogate_variance<S: BinaryScore + ?Sized>(
    rule: &S,
    report: Report,
    rates: ErrorRates,
    prior: Prior,
) -> Result<f64> {
    let phi0 = surrogate_score(rule, report, false, rates)?;
    let phi1 = surrogate_score(rule, report, true, rates)?;
    let mut q = 0.0;
    for y in [false, true] {
        q += prior.mass(y) * rates.channel(y, true);
    }
    let d = phi1 - phi0;
    Ok(q * (1.0 - q) * d * d)
}

/// `2 max|S| / |1 - e1 - e0|`, the largest magnitude a surrogate score can reach
/// given the base rule's range on this report.
pub fn surrogate_bound(max_abs_score: f64, rates: ErrorRates) -> f64 {
    2.0 * max_abs_score / rates.gap().abs()
}
