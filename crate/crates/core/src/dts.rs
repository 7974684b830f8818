//! The uniform Dominant Truth Serum.
//!
//! Each task is answered by three agents. To score agent `i`, the mechanism
//!
//! 1. estimates the pool's error rates from the tasks `i` did not answer,
//! 2. gives `i` a hard zero on every task if that pool looks uninformative
//!    (`|e1 + e0 - 1| <= kappa`),
//! 3. otherwise scores each of `i`'s reports with the surrogate rule against
//!    one of the two co-assignees' reports, picked uniformly at random.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{self, EstimationResult, MomentCounts, PriorMode, DEFAULT_KAPPA, DEFAULT_MIN_TASKS};
use crate::scoring::{Elicitation, Prior, Report, ScoringRule};
use crate::seed::{self, Stream};
use crate::sim::{self, Strategy};
use crate::surrogate::{surrogate_score, ErrorRates};

/// Which three agents answer each task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    n_agents: usize,
    tasks: Vec<[usize; 3]>,
}

impl Assignment {
    pub fn new(n_agents: usize, tasks: Vec<[usize; 3]>) -> Result<Self> {
        if n_agents < 3 {
            return Err(Error::TooFewAgents(n_agents));
        }
        for (k, t) in tasks.iter().enumerate() {
            let distinct = t[0] != t[1] && t[0] != t[2] && t[1] != t[2];
            if !distinct || t.iter().any(|a| *a >= n_agents) {
                return Err(Error::MalformedTriple {
                    task: k.to_string(),
                    len: 3,
                });
            }
        }
        Ok(Assignment { n_agents, tasks })
    }

    /// Random triples with balanced load.
    ///
    /// Agents are dealt from a shuffled deck that is reshuffled once
    /// exhausted, so every agent appears once per pass and loads differ by at
    /// most one pass boundary. A duplicate within a triple is swapped with a
    /// later card of the same pass.
    pub fn random(n_tasks: usize, n_agents: usize, seed: u64) -> Result<Self> {
        if n_agents < 3 {
            return Err(Error::TooFewAgents(n_agents));
        }
        if n_tasks == 0 {
            return Err(Error::NoTasks);
        }
        let mut rng = seed::rng(seed, Stream::Assignment, 0, 0);
        let mut deck: Vec<usize> = (0..n_agents).collect();
        deck.shuffle(&mut rng);
        let mut pos = 0;
        let mut tasks = Vec::with_capacity(n_tasks);
        for _ in 0..n_tasks {
            let mut triple = [usize::MAX; 3];
            for slot in 0..3 {
                if pos == deck.len() {
                    deck.shuffle(&mut rng);
                    pos = 0;
                }
                if triple[..slot].contains(&deck[pos]) {
                    let swap = (pos + 1..deck.len())
                        .find(|j| !triple[..slot].contains(&deck[*j]))
                        .expect("at least three agents per pass");
                    deck.swap(pos, swap);
                }
                triple[slot] = deck[pos];
                pos += 1;
            }
            tasks.push(triple);
        }
        Ok(Assignment { n_agents, tasks })
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn tasks(&self) -> &[[usize; 3]] {
        &self.tasks
    }

    pub fn loads(&self) -> Vec<usize> {
        let mut loads = vec![0; self.n_agents];
        for t in &self.tasks {
            for a in t {
                loads[*a] += 1;
            }
        }
        loads
    }

    pub fn position(&self, task: usize, agent: usize) -> Option<usize> {
        self.tasks.get(task)?.iter().position(|a| *a == agent)
    }

    /// For each agent, the `(task, position)` pairs it answers.
    pub fn by_agent(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.n_agents];
        for (k, t) in self.tasks.iter().enumerate() {
            for (pos, a) in t.iter().enumerate() {
                out[*a].push((k, pos));
            }
        }
        out
    }
}

pub fn assign_tasks(n_tasks: usize, n_agents: usize, seed: u64) -> Result<Assignment> {
    Assignment::random(n_tasks, n_agents, seed)
}

/// An assignment together with the three reports collected on each task.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    assignment: Assignment,
    reports: Vec<[Report; 3]>,
    agent_ids: Vec<String>,
    task_ids: Vec<String>,
}

impl Panel {
    pub fn new(assignment: Assignment, reports: Vec<[Report; 3]>) -> Result<Self> {
        let agent_ids = (0..assignment.n_agents()).map(|i| format!("a{i}")).collect();
        let task_ids = (0..assignment.n_tasks()).map(|k| format!("t{k}")).collect();
        Panel::with_ids(assignment, reports, agent_ids, task_ids)
    }

    pub fn with_ids(
        assignment: Assignment,
        reports: Vec<[Report; 3]>,
        agent_ids: Vec<String>,
        task_ids: Vec<String>,
    ) -> Result<Self> {
        if reports.len() != assignment.n_tasks() {
            let k = reports.len().min(assignment.n_tasks());
            return Err(Error::MissingReport {
                agent: "?".into(),
                task: k.to_string(),
            });
        }
        if agent_ids.len() != assignment.n_agents() || task_ids.len() != assignment.n_tasks() {
            return Err(Error::AgentSetMismatch);
        }
        Ok(Panel {
            assignment,
            reports,
            agent_ids,
            task_ids,
        })
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn reports(&self) -> &[[Report; 3]] {
        &self.reports
    }

    pub fn n_agents(&self) -> usize {
        self.assignment.n_agents()
    }

    pub fn n_tasks(&self) -> usize {
        self.assignment.n_tasks()
    }

    pub fn agent_id(&self, i: usize) -> &str {
        &self.agent_ids[i]
    }

    pub fn task_id(&self, k: usize) -> &str {
        &self.task_ids[k]
    }

    pub fn agent_ids(&self) -> &[String] {
        &self.agent_ids
    }

    /// Binary view of every report: signals as-is, predictions replaced by a
    /// seeded Bernoulli draw. The draw is fixed per (task, slot), so the same
    /// value feeds both estimation and scoring, whatever order agents are
    /// numbered in.
    pub fn binary_reports(&self, seed: u64) -> Vec<[bool; 3]> {
        self.reports
            .iter()
            .enumerate()
            .map(|(k, reports)| {
                std::array::from_fn(|pos| match reports[pos] {
                    Report::Signal(s) => s,
                    Report::Prediction(p) => sim::sample_signal(p, seed, k, pos),
                })
            })
            .collect()
    }
}

/// The co-assignee whose report serves as agent `agent`'s reference on `task`.
pub fn pick_reference(assignment: &Assignment, task: usize, agent: usize, seed: u64) -> Result<usize> {
    let pos = assignment.position(task, agent).ok_or_else(|| Error::NotAssigned {
        agent: agent.to_string(),
        task: task.to_string(),
    })?;
    let triple = assignment.tasks()[task];
    let others: Vec<usize> = (0..3).filter(|p| *p != pos).map(|p| triple[p]).collect();
    let second = seed::uniform(seed, Stream::References, task as u64, pos as u64) >= 0.5;
    Ok(others[second as usize])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtsConfig {
    pub rule: ScoringRule,
    pub kappa: f64,
    pub prior_mode: PriorMode,
    pub min_tasks: usize,
    pub seed: u64,
}

impl DtsConfig {
    pub fn new(rule: ScoringRule, prior_mode: PriorMode) -> Self {
        DtsConfig {
            rule,
            kappa: DEFAULT_KAPPA,
            prior_mode,
            min_tasks: DEFAULT_MIN_TASKS,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappa.is_nan() || self.kappa < 0.0 {
            return Err(Error::Config(format!("kappa must be >= 0, got {}", self.kappa)));
        }
        if let PriorMode::Known { prior } = self.prior_mode {
            if !prior.is_proper() {
                return Err(Error::InvalidPrior {
                    p0: prior.p0(),
                    p1: prior.p1(),
                });
            }
            if prior.is_uniform(moments::UNIFORM_PRIOR_TOL) {
                return Err(Error::UniformPrior);
            }
        }
        Ok(())
    }

    pub fn elicitation(&self) -> Elicitation {
        self.rule.elicitation()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub task: usize,
    pub score: f64,
    /// The reference the report was scored against (ground truth for true scores).
    pub reference: Option<bool>,
    /// Scored zero because the reference pool was uninformative.
    pub zeroed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentStatus {
    Scored,
    /// Pool treated as uninformative; every task scored exactly zero.
    Uninformative,
    /// Too few leave-one-out tasks to estimate the pool.
    Unscored,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentScore {
    pub agent: usize,
    pub n_tasks: usize,
    pub mean_score: Option<f64>,
    pub status: AgentStatus,
    pub estimation: Option<EstimationResult>,
    pub tasks: Vec<TaskScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub agents: Vec<AgentScore>,
}

impl ScoreTable {
    pub fn new(agents: Vec<AgentScore>) -> Self {
        ScoreTable { agents }
    }

    pub fn means(&self) -> Vec<Option<f64>> {
        self.agents.iter().map(|a| a.mean_score).collect()
    }
}

fn mean(xs: &[TaskScore]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().map(|t| t.score).sum::<f64>() / xs.len() as f64)
}

fn solve_counts(counts: &MomentCounts, config: &DtsConfig) -> Result<Option<EstimationResult>> {
    let Ok(m) = counts.moments(config.min_tasks) else {
        return Ok(None);
    };
    let mut est = match moments::solve(&m, config.prior_mode, config.kappa) {
        Ok(e) => e,
        Err(Error::AmbiguousPrior { .. }) => EstimationResult::ambiguous(&m),
        Err(e) => return Err(e),
    };
    est.diagnostics.tasks = Some(counts.tasks);
    Ok(Some(est))
}

fn ordered_counts(binary: &[[bool; 3]], seed: u64) -> (Vec<[bool; 3]>, MomentCounts) {
    let ordered: Vec<[bool; 3]> = binary
        .iter()
        .enumerate()
        .map(|(k, t)| moments::order_triple(k as u64, seed, *t))
        .collect();
    let mut total = MomentCounts::default();
    for t in &ordered {
        total.add(*t);
    }
    (ordered, total)
}

/// Pool estimates from all tasks (first) and, per agent, from the tasks that
/// agent did not answer. `None` where too few tasks remain.
pub fn estimate_pools(
    panel: &Panel,
    config: &DtsConfig,
) -> Result<(Option<EstimationResult>, Vec<Option<EstimationResult>>)> {
    config.validate()?;
    let (ordered, total) = ordered_counts(&panel.binary_reports(config.seed), config.seed);
    let pooled = solve_counts(&total, config)?;
    let per_agent = leave_one_out(panel, &ordered, total, config)?;
    Ok((pooled, per_agent))
}

fn leave_one_out(
    panel: &Panel,
    ordered: &[[bool; 3]],
    total: MomentCounts,
    config: &DtsConfig,
) -> Result<Vec<Option<EstimationResult>>> {
    let by_agent = panel.assignment().by_agent();
    (0..panel.n_agents())
        .into_par_iter()
        .map(|i| {
            let mut counts = total;
            for (k, _) in &by_agent[i] {
                counts.remove(ordered[*k]);
            }
            solve_counts(&counts, config)
        })
        .collect()
}

/// Runs the mechanism over a full panel.
pub fn dts_run(panel: &Panel, config: &DtsConfig) -> Result<ScoreTable> {
    config.validate()?;
    let assignment = panel.assignment();
    let binary = panel.binary_reports(config.seed);
    let (ordered, total) = ordered_counts(&binary, config.seed);
    let estimates = leave_one_out(panel, &ordered, total, config)?;
    let by_agent = assignment.by_agent();

    let agents = (0..panel.n_agents())
        .into_par_iter()
        .map(|i| {
            let own = &by_agent[i];
            let Some(est) = estimates[i] else {
                return Ok(AgentScore {
                    agent: i,
                    n_tasks: own.len(),
                    mean_score: None,
                    status: AgentStatus::Unscored,
                    estimation: None,
                    tasks: Vec::new(),
                });
            };
            let mut tasks = Vec::with_capacity(own.len());
            for &(k, pos) in own {
                let reference_agent = pick_reference(assignment, k, i, config.seed)?;
                let rpos = assignment.position(k, reference_agent).expect("co-assignee");
                let z = binary[k][rpos];
                let (score, zeroed) = if est.informative {
                    (
                        surrogate_score(&config.rule, panel.reports()[k][pos], z, est.rates())?,
                        false,
                    )
                } else {
                    (0.0, true)
                };
                tasks.push(TaskScore {
                    task: k,
                    score,
                    reference: Some(z),
                    zeroed,
                });
            }
            Ok(AgentScore {
                agent: i,
                n_tasks: own.len(),
                mean_score: mean(&tasks),
                status: if est.informative {
                    AgentStatus::Scored
                } else {
                    AgentStatus::Uninformative
                },
                estimation: Some(est),
                tasks,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreTable::new(agents))
}

/// `(Pr[z = 1 | y = 0], Pr[z = 1 | y = 1])` for a reference drawn uniformly
/// from `others`. Prediction reports enter through their sampled signal.
pub fn pool_rates(others: &[(ErrorRates, Strategy)], prior: Prior) -> Result<(f64, f64)> {
    if others.is_empty() {
        return Err(Error::TooFewAgents(0));
    }
    let mut u = 0.0;
    let mut v = 0.0;
    for (rates, strategy) in others {
        u += reference_prob_one(*rates, strategy, prior, false)?;
        v += reference_prob_one(*rates, strategy, prior, true)?;
    }
    let n = others.len() as f64;
    Ok((u / n, v / n))
}

fn reference_prob_one(rates: ErrorRates, strategy: &Strategy, prior: Prior, y: bool) -> Result<f64> {
    let mut total = 0.0;
    for s in [false, true] {
        let w = rates.channel(y, s);
        if w == 0.0 {
            continue;
        }
        total += w * match strategy {
            Strategy::Signal(st) => st.prob_one(s),
            Strategy::Prediction(st) => st.apply(sim::posterior_from_signal(s, rates, prior)?).clamp(0.0, 1.0),
        };
    }
    Ok(total)
}

/// Exact expected per-task DTS score of an agent with `rates` following
/// `strategy`, when the others follow the given strategies and the mechanism
/// estimates the pool from its exact matching statistics.
///
/// Enumerates `(y, s, report, z)`; randomized signal strategies contribute
/// both reports with their probabilities. Returns 0 when the pool is judged
/// uninformative.
pub fn exact_expected_dts(
    strategy: &Strategy,
    rates: ErrorRates,
    others: &[(ErrorRates, Strategy)],
    prior: Prior,
    config: &DtsConfig,
) -> Result<f64> {
    let est = exact_pool_estimate(others, prior, config)?;
    if !est.informative {
        return Ok(0.0);
    }
    let e_hat = est.rates();
    let (u, v) = pool_rates(others, prior)?;
    let z_one = |y: bool| if y { v } else { u };
    let rule = &config.rule;

    let mut total = 0.0;
    for y in [false, true] {
        for s in [false, true] {
            let w = prior.mass(y) * rates.channel(y, s);
            if w == 0.0 {
                continue;
            }
            let reports: Vec<(f64, Report)> = match strategy {
                Strategy::Signal(st) => {
                    let f = st.prob_one(s);
                    vec![(f, Report::Signal(true)), (1.0 - f, Report::Signal(false))]
                }
                Strategy::Prediction(st) => {
                    let p = st.apply(sim::posterior_from_signal(s, rates, prior)?).clamp(0.0, 1.0);
                    vec![(1.0, Report::Prediction(p))]
                }
            };
            for (wr, report) in reports {
                if wr == 0.0 {
                    continue;
                }
                let pz = z_one(y);
                let phi = pz * surrogate_score(rule, report, true, e_hat)?
                    + (1.0 - pz) * surrogate_score(rule, report, false, e_hat)?;
                total += w * wr * phi;
            }
        }
    }
    Ok(total)
}

/// What the mechanism's estimator returns in the large-sample limit.
pub fn exact_pool_estimate(
    others: &[(ErrorRates, Strategy)],
    prior: Prior,
    config: &DtsConfig,
) -> Result<EstimationResult> {
    config.validate()?;
    let (u, v) = pool_rates(others, prior)?;
    let m = moments::forward_moments(prior, u, v)?;
    match moments::solve(&m, config.prior_mode, config.kappa) {
        Err(Error::AmbiguousPrior { .. }) => Ok(EstimationResult::ambiguous(&m)),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{PredictionStrategy, SignalStrategy};

    fn prior() -> Prior {
        Prior::new(0.4, 0.6).unwrap()
    }

    fn known() -> PriorMode {
        PriorMode::Known { prior: prior() }
    }

    #[test]
    fn assignment_single_task() {
        let a = assign_tasks(1, 3, 5).unwrap();
        let mut t = a.tasks()[0];
        t.sort();
        assert_eq!(t, [0, 1, 2]);
    }

    #[test]
    fn assignment_is_deterministic_and_balanced() {
        assert_eq!(assign_tasks(900, 30, 1).unwrap(), assign_tasks(900, 30, 1).unwrap());
        assert_ne!(assign_tasks(900, 30, 1).unwrap(), assign_tasks(900, 30, 2).unwrap());
        let loads = assign_tasks(900, 30, 1).unwrap().loads();
        assert!(loads.iter().all(|l| *l == 90), "{loads:?}");
        let loads = assign_tasks(1000, 7, 3).unwrap().loads();
        let (lo, hi) = (loads.iter().min().unwrap(), loads.iter().max().unwrap());
        assert!(hi - lo <= 1);
    }

    #[test]
    fn assignment_rejects_small_pools() {
        assert!(matches!(assign_tasks(10, 2, 0), Err(Error::TooFewAgents(2))));
        assert!(matches!(assign_tasks(0, 5, 0), Err(Error::NoTasks)));
        assert!(Assignment::new(4, vec![[0, 1, 1]]).is_err());
    }

    #[test]
    fn reference_pick_is_fair() {
        let a = Assignment::new(3, vec![[0, 1, 2]; 10_000]).unwrap();
        let first = (0..10_000)
            .filter(|k| pick_reference(&a, *k, 0, 17).unwrap() == 1)
            .count();
        assert!((first as f64 / 10_000.0 - 0.5).abs() < 0.02);
        assert!(matches!(
            pick_reference(&Assignment::new(4, vec![[0, 1, 2]]).unwrap(), 0, 3, 0),
            Err(Error::NotAssigned { .. })
        ));
    }

    #[test]
    fn matching_references_are_irrelevant_to_the_draw() {
        let a = Assignment::new(3, vec![[0, 1, 2]; 50]).unwrap();
        let p = Panel::new(
            a.clone(),
            vec![[Report::Signal(false), Report::Signal(true), Report::Signal(true)]; 50],
        )
        .unwrap();
        let bin = p.binary_reports(0);
        for k in 0..50 {
            let r = pick_reference(&a, k, 0, 3).unwrap();
            assert!(bin[k][a.position(k, r).unwrap()]);
        }
    }

    #[test]
    fn all_ones_collusion_scores_zero() {
        let a = assign_tasks(600, 12, 4).unwrap();
        let panel = Panel::new(a, vec![[Report::Signal(true); 3]; 600]).unwrap();
        let cfg = DtsConfig::new(ScoringRule::one_over_prior(prior()), known());
        let t = dts_run(&panel, &cfg).unwrap();
        for ag in &t.agents {
            assert_eq!(ag.status, AgentStatus::Uninformative);
            assert_eq!(ag.mean_score, Some(0.0));
            assert!(ag.tasks.iter().all(|s| s.score == 0.0 && s.zeroed));
            assert!(!ag.estimation.unwrap().informative);
        }
    }

    #[test]
    fn starved_agent_is_unscored_others_unaffected() {
        // agent 0 answers almost every task, leaving it only 5 leave-one-out tasks
        let mut tasks = Vec::new();
        for k in 0..200 {
            let b = 1 + k % 6;
            let c = 1 + (k + 1) % 6;
            tasks.push([0, b, c]);
        }
        for k in 0..5 {
            tasks.push([1 + k % 6, 1 + (k + 2) % 6, 1 + (k + 4) % 6]);
        }
        let a = Assignment::new(7, tasks).unwrap();
        let sim = crate::sim::Scenario {
            prior: prior(),
            n_tasks: a.n_tasks(),
            agents: vec![crate::sim::AgentParams::new(ErrorRates::new(0.2, 0.2).unwrap()); 7],
            strategies: vec![Strategy::Signal(SignalStrategy::TRUTHFUL); 7],
            seed: 1,
        };
        let world = crate::sim::gen_world(prior(), a.n_tasks(), 1);
        let sigs = crate::sim::gen_signals(&world, &a, &sim.agents, 1).unwrap();
        let reports = sigs.iter().map(|t| t.map(Report::Signal)).collect();
        let panel = Panel::new(a, reports).unwrap();
        let mut cfg = DtsConfig::new(ScoringRule::one_over_prior(prior()), known());
        cfg.kappa = 0.0;
        let t = dts_run(&panel, &cfg).unwrap();
        assert_eq!(t.agents[0].status, AgentStatus::Unscored);
        assert_eq!(t.agents[0].mean_score, None);
        assert!(t.agents[1..].iter().all(|a| a.status != AgentStatus::Unscored));
    }

    #[test]
    fn run_is_deterministic() {
        let sc = crate::sim::Scenario::truthful(prior(), 15, 900, Elicitation::Prediction, 3).unwrap();
        let sim = sc.run().unwrap();
        let cfg = DtsConfig::new(
            ScoringRule::brier(),
            PriorMode::OneBit {
                zero_is_majority: false,
            },
        )
        .with_seed(9);
        assert_eq!(dts_run(&sim.panel, &cfg).unwrap(), dts_run(&sim.panel, &cfg).unwrap());
    }

    fn truthful_others(n: usize, rates: ErrorRates, el: Elicitation) -> Vec<(ErrorRates, Strategy)> {
        vec![(rates, Strategy::truthful(el)); n]
    }

    #[test]
    fn exact_truthful_equals_exact_brier() {
        let e = ErrorRates::new(0.3, 0.2).unwrap();
        let cfg = DtsConfig::new(ScoringRule::brier(), known());
        let others = truthful_others(9, e, Elicitation::Prediction);
        let truthful = Strategy::Prediction(PredictionStrategy::Truthful);
        let v = exact_expected_dts(&truthful, e, &others, prior(), &cfg).unwrap();
        let exact = crate::sim::expected_true_score(&cfg.rule, &truthful, e, prior()).unwrap();
        assert!((v - exact).abs() < 1e-10, "{v} vs {exact}");
    }

    #[test]
    fn exact_always_one_is_worse_than_truthful() {
        let e = ErrorRates::new(0.3, 0.2).unwrap();
        let cfg = DtsConfig::new(ScoringRule::one_over_prior(prior()), known());
        let others = truthful_others(9, e, Elicitation::Signal);
        let t = exact_expected_dts(&Strategy::Signal(SignalStrategy::TRUTHFUL), e, &others, prior(), &cfg).unwrap();
        let one = exact_expected_dts(&Strategy::Signal(SignalStrategy::ALWAYS_ONE), e, &others, prior(), &cfg).unwrap();
        assert!(t > one + 1e-6);
    }

    #[test]
    fn exact_colluding_others_give_zero() {
        let e = ErrorRates::new(0.3, 0.2).unwrap();
        let cfg = DtsConfig::new(ScoringRule::one_over_prior(prior()), known());
        let others = vec![(e, Strategy::Signal(SignalStrategy::ALWAYS_ONE)); 9];
        for st in [
            SignalStrategy::TRUTHFUL,
            SignalStrategy::FLIP,
            SignalStrategy::ALWAYS_ZERO,
        ] {
            assert_eq!(
                exact_expected_dts(&Strategy::Signal(st), e, &others, prior(), &cfg).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn pool_rates_of_truthful_signals_are_mean_rates() {
        let others = vec![
            (
                ErrorRates::new(0.1, 0.3).unwrap(),
                Strategy::Signal(SignalStrategy::TRUTHFUL),
            ),
            (
                ErrorRates::new(0.3, 0.1).unwrap(),
                Strategy::Signal(SignalStrategy::TRUTHFUL),
            ),
        ];
        let (u, v) = pool_rates(&others, prior()).unwrap();
        assert!((u - 0.2).abs() < 1e-15 && (v - 0.8).abs() < 1e-15);
    }
}
