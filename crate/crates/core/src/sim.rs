//! Seeded synthetic worlds: ground truths drawn from a prior, conditionally
//! independent agent signals, Bayes posteriors and reporting strategies.

use serde::{Deserialize, Serialize};

use crate::dts::{AgentScore, AgentStatus, Assignment, Panel, ScoreTable, TaskScore};
use crate::error::{Error, Result};
use crate::scoring::{check_prob, Elicitation, Prior, Report, ScoringRule};
use crate::seed::{self, Stream};
use crate::surrogate::ErrorRates;

/// Default range for per-agent error rates; every agent drawn from it is
/// Bayesian informative.
pub const DEFAULT_RATE_RANGE: (f64, f64) = (0.05, 0.45);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentParams {
    pub rates: ErrorRates,
    /// Half-width of the uniform per-task perturbation applied to both rates.
    /// Zero means the agent's rates are identical across tasks.
    pub task_jitter: f64,
}

impl AgentParams {
    pub fn new(rates: ErrorRates) -> Self {
        AgentParams {
            rates,
            task_jitter: 0.0,
        }
    }

    /// The rates used on one task, after jitter. Jitter keeps a Bayesian
    /// informative agent informative.
    fn rates_on(&self, agent: usize, task: usize, seed: u64) -> ErrorRates {
        if self.task_jitter <= 0.0 {
            return self.rates;
        }
        let j = self.task_jitter;
        let d1 = (2.0 * seed::uniform(seed, Stream::Jitter, agent as u64, 2 * task as u64) - 1.0) * j;
        let d0 = (2.0 * seed::uniform(seed, Stream::Jitter, agent as u64, 2 * task as u64 + 1) - 1.0) * j;
        let mut e1 = (self.rates.e1() + d1).clamp(0.0, 1.0);
        let mut e0 = (self.rates.e0() + d0).clamp(0.0, 1.0);
        if self.rates.is_bayesian_informative() && e1 + e0 >= 1.0 - 1e-6 {
            let scale = (1.0 - 1e-6) / (e1 + e0);
            e1 *= scale;
            e0 *= scale;
        }
        ErrorRates::new(e1, e0).expect("clamped")
    }
}

/// Agents with rates drawn independently and uniformly from `[lo, hi]^2`.
pub fn uniform_population(n: usize, lo: f64, hi: f64, seed: u64) -> Result<Vec<AgentParams>> {
    check_prob("lo", lo)?;
    check_prob("hi", hi)?;
    (0..n)
        .map(|i| {
            let a = seed::uniform(seed, Stream::Population, i as u64, 0);
            let b = seed::uniform(seed, Stream::Population, i as u64, 1);
            Ok(AgentParams::new(ErrorRates::new(
                lo + (hi - lo) * a,
                lo + (hi - lo) * b,
            )?))
        })
        .collect()
}

/// Agents whose rates are `mean ± spread`, uniformly, clamped to `[0, 1]`.
pub fn jittered_population(n: usize, mean: ErrorRates, spread: f64, seed: u64) -> Result<Vec<AgentParams>> {
    (0..n)
        .map(|i| {
            let a = 2.0 * seed::uniform(seed, Stream::Population, i as u64, 0) - 1.0;
            let b = 2.0 * seed::uniform(seed, Stream::Population, i as u64, 1) - 1.0;
            let e1 = (mean.e1() + spread * a).clamp(0.0, 1.0);
            let e0 = (mean.e0() + spread * b).clamp(0.0, 1.0);
            Ok(AgentParams::new(ErrorRates::new(e1, e0)?))
        })
        .collect()
}

/// Reporting strategy for signal elicitation: `f0 = Pr[report 1 | s = 0]`,
/// `f1 = Pr[report 1 | s = 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalStrategy {
    pub f0: f64,
    pub f1: f64,
}

impl SignalStrategy {
    pub const TRUTHFUL: SignalStrategy = SignalStrategy { f0: 0.0, f1: 1.0 };
    pub const FLIP: SignalStrategy = SignalStrategy { f0: 1.0, f1: 0.0 };
    pub const ALWAYS_ZERO: SignalStrategy = SignalStrategy { f0: 0.0, f1: 0.0 };
    pub const ALWAYS_ONE: SignalStrategy = SignalStrategy { f0: 1.0, f1: 1.0 };

    pub fn new(f0: f64, f1: f64) -> Result<Self> {
        check_prob("f0", f0)?;
        check_prob("f1", f1)?;
        Ok(SignalStrategy { f0, f1 })
    }

    /// `weight * self + (1 - weight) * other`.
    pub fn mix(&self, other: &SignalStrategy, weight: f64) -> SignalStrategy {
        SignalStrategy {
            f0: weight * self.f0 + (1.0 - weight) * other.f0,
            f1: weight * self.f1 + (1.0 - weight) * other.f1,
        }
    }

    pub fn prob_one(&self, signal: bool) -> f64 {
        if signal {
            self.f1
        } else {
            self.f0
        }
    }
}

/// Deterministic transforms of the agent's posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param", rename_all = "kebab-case")]
pub enum PredictionStrategy {
    Truthful,
    /// Report `1 - p`.
    Flip,
    Constant(f64),
    /// Move `p` toward 0.5 by `lambda`: `(1 - lambda) p + lambda / 2`.
    Shrink(f64),
    /// `slope * p + intercept`, clipped to `[0, 1]`.
    Affine {
        slope: f64,
        intercept: f64,
    },
}

impl PredictionStrategy {
    pub fn apply(&self, p: f64) -> f64 {
        match *self {
            PredictionStrategy::Truthful => p,
            PredictionStrategy::Flip => 1.0 - p,
            PredictionStrategy::Constant(c) => c,
            PredictionStrategy::Shrink(lambda) => (1.0 - lambda) * p + 0.5 * lambda,
            PredictionStrategy::Affine { slope, intercept } => (slope * p + intercept).clamp(0.0, 1.0),
        }
    }
}

/// One agent's reporting strategy, used uniformly across all its tasks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Signal(SignalStrategy),
    Prediction(PredictionStrategy),
}

impl Strategy {
    pub fn elicitation(&self) -> Elicitation {
        match self {
            Strategy::Signal(_) => Elicitation::Signal,
            Strategy::Prediction(_) => Elicitation::Prediction,
        }
    }

    pub fn truthful(elicitation: Elicitation) -> Self {
        match elicitation {
            Elicitation::Signal => Strategy::Signal(SignalStrategy::TRUTHFUL),
            Elicitation::Prediction => Strategy::Prediction(PredictionStrategy::Truthful),
        }
    }

    /// Turns private information into a report. `draw` is a uniform number in
    /// `[0, 1)` consumed by randomized signal strategies.
    pub fn apply(&self, info: Report, draw: f64) -> Result<Report> {
        match (self, info) {
            (Strategy::Signal(s), Report::Signal(sig)) => Ok(Report::Signal(draw < s.prob_one(sig))),
            (Strategy::Prediction(s), Report::Prediction(p)) => {
                check_prob("prediction", p)?;
                Ok(Report::Prediction(s.apply(p).clamp(0.0, 1.0)))
            }
            (Strategy::Signal(_), _) => Err(Error::ReportTypeMismatch {
                rule: "signal strategy",
                expected: "signal",
            }),
            (Strategy::Prediction(_), _) => Err(Error::ReportTypeMismatch {
                rule: "prediction strategy",
                expected: "prediction",
            }),
        }
    }
}

pub fn apply_strategy(strategy: &Strategy, info: Report, seed: u64, agent: usize, task: usize) -> Result<Report> {
    strategy.apply(info, seed::uniform(seed, Stream::Strategies, agent as u64, task as u64))
}

/// `Pr[y = 1 | s]` for an agent with the given rates.
pub fn posterior_from_signal(signal: bool, rates: ErrorRates, prior: Prior) -> Result<f64> {
    let (p0, p1) = (prior.p0(), prior.p1());
    let (num, den) = if signal {
        let n = p1 * (1.0 - rates.e1());
        (n, n + p0 * rates.e0())
    } else {
        let n = p1 * rates.e1();
        (n, n + p0 * (1.0 - rates.e0()))
    };
    if den <= 0.0 {
        return Err(Error::DegeneratePosterior { signal: signal as u8 });
    }
    Ok(num / den)
}

/// A binary "signal" drawn from a reported prediction: Bernoulli(p).
pub fn sample_signal_from_prediction(p: f64, draw: f64) -> bool {
    draw < p
}

/// Draw for the report in slot `slot` (0..3) of task `task`.
pub fn sample_signal(p: f64, seed: u64, task: usize, slot: usize) -> bool {
    sample_signal_from_prediction(
        p,
        seed::uniform(seed, Stream::PredictionSamples, task as u64, slot as u64),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub prior: Prior,
    pub seed: u64,
    pub truths: Vec<bool>,
}

impl World {
    pub fn frequency_of_ones(&self) -> f64 {
        self.truths.iter().filter(|y| **y).count() as f64 / self.truths.len().max(1) as f64
    }
}

/// `n_tasks` i.i.d. Bernoulli(p1) ground truths.
pub fn gen_world(prior: Prior, n_tasks: usize, seed: u64) -> World {
    let truths = (0..n_tasks)
        .map(|k| seed::uniform(seed, Stream::World, k as u64, 0) < prior.p1())
        .collect();
    World { prior, seed, truths }
}

/// Private signals for every assigned (agent, task) pair, aligned with the
/// assignment's triples.
pub fn gen_signals(
    world: &World,
    assignment: &Assignment,
    params: &[AgentParams],
    seed: u64,
) -> Result<Vec<[bool; 3]>> {
    if assignment.n_tasks() > world.truths.len() {
        return Err(Error::MissingTruth(world.truths.len().to_string()));
    }
    if assignment.n_agents() > params.len() {
        return Err(Error::AgentSetMismatch);
    }
    Ok(assignment
        .tasks()
        .iter()
        .enumerate()
        .map(|(k, triple)| {
            let y = world.truths[k];
            triple.map(|i| {
                let rates = params[i].rates_on(i, k, seed);
                seed::uniform(seed, Stream::Signals, i as u64, k as u64) < rates.prob_one(y)
            })
        })
        .collect())
}

/// Everything needed to generate one synthetic report panel.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub prior: Prior,
    pub n_tasks: usize,
    pub agents: Vec<AgentParams>,
    pub strategies: Vec<Strategy>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub world: World,
    pub panel: Panel,
    pub signals: Vec<[bool; 3]>,
}

impl Scenario {
    /// Truthful agents drawn from the default rate range.
    pub fn truthful(
        prior: Prior,
        n_agents: usize,
        n_tasks: usize,
        elicitation: Elicitation,
        seed: u64,
    ) -> Result<Self> {
        let (lo, hi) = DEFAULT_RATE_RANGE;
        Ok(Scenario {
            prior,
            n_tasks,
            agents: uniform_population(n_agents, lo, hi, seed)?,
            strategies: vec![Strategy::truthful(elicitation); n_agents],
            seed,
        })
    }

    pub fn run(&self) -> Result<Simulation> {
        let n = self.agents.len();
        if self.strategies.len() != n {
            return Err(Error::AgentSetMismatch);
        }
        let assignment = Assignment::random(self.n_tasks, n, self.seed)?;
        let world = gen_world(self.prior, self.n_tasks, self.seed);
        let signals = gen_signals(&world, &assignment, &self.agents, self.seed)?;
        let mut reports = Vec::with_capacity(self.n_tasks);
        for (k, (triple, sigs)) in assignment.tasks().iter().zip(&signals).enumerate() {
            let mut row = [Report::Signal(false); 3];
            for pos in 0..3 {
                let i = triple[pos];
                let info = match self.strategies[i] {
                    Strategy::Signal(_) => Report::Signal(sigs[pos]),
                    Strategy::Prediction(_) => {
                        let rates = self.agents[i].rates_on(i, k, self.seed);
                        Report::Prediction(posterior_from_signal(sigs[pos], rates, self.prior)?)
                    }
                };
                row[pos] = apply_strategy(&self.strategies[i], info, self.seed, i, k)?;
            }
            reports.push(row);
        }
        Ok(Simulation {
            panel: Panel::new(assignment, reports)?,
            world,
            signals,
        })
    }
}

/// Scores with ground truth: per-task `S(report, y)` and per-agent means.
pub fn true_scores(panel: &Panel, truths: &[Option<bool>], rule: &ScoringRule) -> Result<ScoreTable> {
    let mut per_agent: Vec<Vec<TaskScore>> = vec![Vec::new(); panel.n_agents()];
    for (k, (triple, reports)) in panel.assignment().tasks().iter().zip(panel.reports()).enumerate() {
        let y = truths
            .get(k)
            .copied()
            .flatten()
            .ok_or_else(|| Error::MissingTruth(panel.task_id(k).to_string()))?;
        for pos in 0..3 {
            per_agent[triple[pos]].push(TaskScore {
                task: k,
                score: rule.score(reports[pos], y)?,
                reference: Some(y),
                zeroed: false,
            });
        }
    }
    let agents = per_agent
        .into_iter()
        .enumerate()
        .map(|(i, tasks)| {
            let mean = (!tasks.is_empty()).then(|| tasks.iter().map(|t| t.score).sum::<f64>() / tasks.len() as f64);
            AgentScore {
                agent: i,
                n_tasks: tasks.len(),
                mean_score: mean,
                status: if mean.is_some() {
                    AgentStatus::Scored
                } else {
                    AgentStatus::Unscored
                },
                estimation: None,
                tasks,
            }
        })
        .collect();
    Ok(ScoreTable::new(agents))
}

/// Exact expected score under `rule` for an agent with `rates` following
/// `strategy`, obtained by enumerating `(y, s, report)`.
pub fn expected_true_score(rule: &ScoringRule, strategy: &Strategy, rates: ErrorRates, prior: Prior) -> Result<f64> {
    let mut total = 0.0;
    for y in [false, true] {
        for s in [false, true] {
            let w = prior.mass(y) * rates.channel(y, s);
            if w == 0.0 {
                continue;
            }
            total += w * match strategy {
                Strategy::Signal(st) => {
                    let f = st.prob_one(s);
                    f * rule.score(Report::Signal(true), y)? + (1.0 - f) * rule.score(Report::Signal(false), y)?
                }
                Strategy::Prediction(st) => {
                    let p = st.apply(posterior_from_signal(s, rates, prior)?).clamp(0.0, 1.0);
                    rule.score(Report::Prediction(p), y)?
                }
            };
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn prior(p1: f64) -> Prior {
        Prior::from_p1(p1).unwrap()
    }

    #[test]
    fn world_examples() {
        let w = gen_world(prior(1.0), 10, 3);
        assert!(w.truths.iter().all(|y| *y));
        assert_eq!(gen_world(prior(0.6), 500, 9), gen_world(prior(0.6), 500, 9));
        assert_ne!(
            gen_world(prior(0.6), 500, 9).truths,
            gen_world(prior(0.6), 500, 10).truths
        );
    }

    #[test]
    fn world_frequency_matches_prior() {
        // binomial sd at K=1e5 is ~0.0015, so 0.01 is > 6 sd
        let mut hits = 0;
        for seed in 0..20 {
            let w = gen_world(prior(0.6), 100_000, seed);
            hits += ((w.frequency_of_ones() - 0.6).abs() <= 0.01) as usize;
        }
        assert!(hits >= 19);
    }

    #[test]
    fn posterior_examples() {
        let pr = Prior::new(0.4, 0.6).unwrap();
        let e = ErrorRates::new(0.3, 0.2).unwrap();
        assert!(close(posterior_from_signal(true, e, pr).unwrap(), 0.84, 1e-12));
        assert!(close(posterior_from_signal(false, e, pr).unwrap(), 0.36, 1e-12));
        assert_eq!(posterior_from_signal(true, ErrorRates::perfect(), pr).unwrap(), 1.0);
    }

    #[test]
    fn posterior_degenerate() {
        // p1 = 1 and e1 = 1: signal 1 is impossible
        let e = ErrorRates::new(1.0, 0.0).unwrap();
        assert!(posterior_from_signal(true, e, prior(1.0)).is_err());
    }

    #[test]
    fn strategy_examples() {
        let t = Strategy::Signal(SignalStrategy::TRUTHFUL);
        assert_eq!(t.apply(Report::Signal(false), 0.3).unwrap(), Report::Signal(false));
        let f = Strategy::Prediction(PredictionStrategy::Flip);
        match f.apply(Report::Prediction(0.84), 0.0).unwrap() {
            Report::Prediction(p) => assert!(close(p, 0.16, 1e-12)),
            _ => unreachable!(),
        }
        assert!(t.apply(Report::Prediction(0.4), 0.1).is_err());
        let shrink = PredictionStrategy::Shrink(0.5).apply(0.9);
        assert!(close(shrink, 0.7, 1e-12));
    }

    #[test]
    fn mixed_strategy_report_is_independent_of_signal() {
        let mix = Strategy::Signal(SignalStrategy::new(0.5, 0.5).unwrap());
        let (mut ones_given0, mut ones_given1) = (0usize, 0usize);
        let n = 100_000;
        for k in 0..n {
            let sig = k % 2 == 1;
            let r = apply_strategy(&mix, Report::Signal(sig), 5, 0, k).unwrap();
            if r == Report::Signal(true) {
                if sig {
                    ones_given1 += 1;
                } else {
                    ones_given0 += 1;
                }
            }
        }
        let half = n as f64 / 2.0;
        assert!((ones_given1 as f64 / half - ones_given0 as f64 / half).abs() < 0.01);
    }

    #[test]
    fn prediction_sampling() {
        assert!(!sample_signal(0.0, 1, 2, 3));
        assert!(sample_signal(1.0, 1, 2, 3));
        assert_eq!(sample_signal(0.7, 4, 5, 6), sample_signal(0.7, 4, 5, 6));
        let n = 100_000;
        let ones = (0..n).filter(|k| sample_signal(0.7, 8, *k, 0)).count();
        assert!((ones as f64 / n as f64 - 0.7).abs() < 0.01);
    }

    #[test]
    fn perfect_signals_equal_truths() {
        let world = gen_world(prior(0.6), 300, 1);
        let a = Assignment::random(300, 5, 1).unwrap();
        let params = vec![AgentParams::new(ErrorRates::perfect()); 5];
        let sigs = gen_signals(&world, &a, &params, 1).unwrap();
        for (k, t) in sigs.iter().enumerate() {
            assert!(t.iter().all(|s| *s == world.truths[k]));
        }
    }

    #[test]
    fn signal_error_frequency() {
        let world = gen_world(prior(1.0), 100_000, 2);
        let a = Assignment::random(100_000, 3, 2).unwrap();
        let params = vec![AgentParams::new(ErrorRates::new(0.3, 0.2).unwrap()); 3];
        let sigs = gen_signals(&world, &a, &params, 2).unwrap();
        let zeros = sigs.iter().filter(|t| !t[0]).count();
        assert!((zeros as f64 / 100_000.0 - 0.3).abs() < 0.01);
    }

    #[test]
    fn signals_are_conditionally_independent() {
        let world = gen_world(prior(0.6), 100_000, 3);
        let a = Assignment::random(100_000, 3, 3).unwrap();
        let params = vec![
            AgentParams::new(ErrorRates::new(0.3, 0.2).unwrap()),
            AgentParams::new(ErrorRates::new(0.1, 0.4).unwrap()),
            AgentParams::new(ErrorRates::new(0.25, 0.25).unwrap()),
        ];
        let sigs = gen_signals(&world, &a, &params, 3).unwrap();
        for y in [false, true] {
            let rows: Vec<&[bool; 3]> = sigs
                .iter()
                .zip(&world.truths)
                .filter(|(_, t)| **t == y)
                .map(|(s, _)| s)
                .collect();
            let n = rows.len() as f64;
            let pi = rows.iter().filter(|r| r[0]).count() as f64 / n;
            let pj = rows.iter().filter(|r| r[1]).count() as f64 / n;
            let pij = rows.iter().filter(|r| r[0] && r[1]).count() as f64 / n;
            assert!((pij - pi * pj).abs() < 0.01);
        }
    }

    #[test]
    fn jitter_keeps_agents_informative() {
        let p = AgentParams {
            rates: ErrorRates::new(0.45, 0.45).unwrap(),
            task_jitter: 0.2,
        };
        for k in 0..1000 {
            let r = p.rates_on(0, k, 7);
            assert!(r.e1() + r.e0() < 1.0);
        }
    }

    #[test]
    fn true_scores_examples() {
        let a = Assignment::random(60, 3, 0).unwrap();
        let world = gen_world(prior(0.6), 60, 0);
        let truths: Vec<Option<bool>> = world.truths.iter().map(|y| Some(*y)).collect();
        let perfect: Vec<[Report; 3]> = world
            .truths
            .iter()
            .map(|y| [Report::Prediction(*y as u8 as f64); 3])
            .collect();
        let panel = Panel::new(a.clone(), perfect).unwrap();
        let t = true_scores(&panel, &truths, &ScoringRule::brier()).unwrap();
        assert!(t.agents.iter().all(|s| s.mean_score == Some(1.0)));

        let half = Panel::new(a, vec![[Report::Prediction(0.5); 3]; 60]).unwrap();
        let t = true_scores(&half, &truths, &ScoringRule::brier()).unwrap();
        assert!(t.agents.iter().all(|s| s.mean_score == Some(0.75)));

        let missing = vec![None; 60];
        assert!(matches!(
            true_scores(&half, &missing, &ScoringRule::brier()),
            Err(Error::MissingTruth(_))
        ));
    }

    #[test]
    fn truthful_posterior_mean_brier_matches_enumeration() {
        let pr = Prior::new(0.4, 0.6).unwrap();
        let e = ErrorRates::new(0.3, 0.2).unwrap();
        let scenario = Scenario {
            prior: pr,
            n_tasks: 50_000,
            agents: vec![AgentParams::new(e); 3],
            strategies: vec![Strategy::Prediction(PredictionStrategy::Truthful); 3],
            seed: 21,
        };
        let sim = scenario.run().unwrap();
        let truths: Vec<Option<bool>> = sim.world.truths.iter().map(|y| Some(*y)).collect();
        let table = true_scores(&sim.panel, &truths, &ScoringRule::brier()).unwrap();
        let exact = expected_true_score(
            &ScoringRule::brier(),
            &Strategy::Prediction(PredictionStrategy::Truthful),
            e,
            pr,
        )
        .unwrap();
        // four-cell enumeration by hand: y=1 (0.6): s=1 w.p. 0.7 -> p=0.84, s=0 w.p. 0.3 -> p=0.36
        let by_hand = 0.6 * (0.7 * (1.0 - 0.16f64.powi(2)) + 0.3 * (1.0 - 0.64f64.powi(2)))
            + 0.4 * (0.2 * (1.0 - 0.84f64.powi(2)) + 0.8 * (1.0 - 0.36f64.powi(2)));
        assert!(close(exact, by_hand, 1e-12));
        for a in &table.agents {
            assert!(close(a.mean_score.unwrap(), exact, 0.01));
        }
    }
}
