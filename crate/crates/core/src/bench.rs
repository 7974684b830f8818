//! Evaluation harness: DTS against ground-truth scores and a peer-agreement
//! baseline, estimator consistency sweeps, and analytic dominance grids.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dts::{self, DtsConfig, Panel};
use crate::error::{Error, Result};
use crate::moments::{self, MomentCounts, PriorMode};
use crate::scoring::{Elicitation, Prior, ScoringRule};
use crate::seed::{self, Stream};
use crate::sim::{self, AgentParams, PredictionStrategy, Scenario, SignalStrategy, Strategy};
use crate::surrogate::ErrorRates;

pub const DEFAULT_BOOTSTRAP: usize = 1000;
/// Margins above this count as strict dominance.
pub const DOMINANCE_MARGIN: f64 = 1e-6;
/// Tolerance for the logarithmic rule, which is only asserted to be close to
/// optimal.
pub const LOG_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mse {
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

fn sq_err(est: &[f64], truth: &[f64], idx: impl Iterator<Item = usize>) -> f64 {
    let mut n = 0usize;
    let mut s = 0.0;
    for i in idx {
        s += (est[i] - truth[i]).powi(2);
        n += 1;
    }
    s / n as f64
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Mean squared error over agents, with a 95% percentile bootstrap interval
/// from `resamples` seeded resamples of agents.
pub fn mse(est: &[f64], truth: &[f64], resamples: usize, seed: u64) -> Result<Mse> {
    if est.len() != truth.len() {
        return Err(Error::AgentSetMismatch);
    }
    if est.is_empty() {
        return Err(Error::TooFewValues { found: 0, required: 1 });
    }
    let n = est.len();
    let value = sq_err(est, truth, 0..n);
    let mut boots: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = seed::rng(seed, Stream::Bootstrap, b as u64, 0);
            let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            sq_err(est, truth, idx.into_iter())
        })
        .collect();
    boots.sort_by(f64::total_cmp);
    let (ci_low, ci_high) = if boots.is_empty() {
        (value, value)
    } else {
        (quantile(&boots, 0.025), quantile(&boots, 0.975))
    };
    Ok(Mse { value, ci_low, ci_high })
}

/// Ranks starting at 1; ties share their average rank.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|a, b| xs[*a].total_cmp(&xs[*b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[order[k]] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rho, or `None` when either vector is constant.
pub fn rank_correlation(est: &[f64], truth: &[f64]) -> Result<Option<f64>> {
    if est.len() != truth.len() {
        return Err(Error::AgentSetMismatch);
    }
    if est.len() < 2 {
        return Err(Error::TooFewValues {
            found: est.len(),
            required: 2,
        });
    }
    let (a, b) = (average_ranks(est), average_ranks(truth));
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(&b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Ok(None);
    }
    Ok(Some((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)))
}

/// Peer Truth Serum means: `1(a_i = z) / R(a_i)` against the same reference
/// DTS would use, where `R` is the frequency of the answer over all reports.
/// Predictions enter through their sampled signals.
pub fn pts_baseline(panel: &Panel, seed: u64) -> Result<Vec<Option<f64>>> {
    let binary = panel.binary_reports(seed);
    let total = (binary.len() * 3) as f64;
    let ones = binary.iter().flatten().filter(|b| **b).count() as f64;
    let freq = |b: bool| if b { ones / total } else { 1.0 - ones / total };
    let assignment = panel.assignment();
    let mut sums = vec![0.0; panel.n_agents()];
    let mut counts = vec![0usize; panel.n_agents()];
    for (k, triple) in assignment.tasks().iter().enumerate() {
        for pos in 0..3 {
            let i = triple[pos];
            let r = dts::pick_reference(assignment, k, i, seed)?;
            let z = binary[k][assignment.position(k, r).expect("co-assignee")];
            let a = binary[k][pos];
            let f = freq(a);
            sums[i] += if a == z && f > 0.0 { 1.0 / f } else { 0.0 };
            counts[i] += 1;
        }
    }
    Ok(sums
        .iter()
        .zip(&counts)
        .map(|(s, c)| (*c > 0).then(|| s / *c as f64))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentComparison {
    pub agent_id: String,
    pub true_mean: f64,
    pub dts_mean: f64,
    pub pts_mean: f64,
}

/// One synthetic run compared three ways.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityRun {
    pub seed: u64,
    pub agents: Vec<AgentComparison>,
    pub dts_mse: Mse,
    pub pts_mse: Mse,
    pub dts_rank: Option<f64>,
    pub pts_rank: Option<f64>,
    /// Fraction of agents with `|dts - true| <= 0.02`.
    pub within_002: f64,
    /// Agents left out because DTS could not score them.
    pub unscored: usize,
}

/// Simulates `scenario`, scores with DTS, ground truth and PTS, and compares.
pub fn fidelity_run(scenario: &Scenario, config: &DtsConfig, resamples: usize) -> Result<FidelityRun> {
    let sim = scenario.run()?;
    let truths: Vec<Option<bool>> = sim.world.truths.iter().map(|y| Some(*y)).collect();
    let truth = sim::true_scores(&sim.panel, &truths, &config.rule)?;
    let table = dts::dts_run(&sim.panel, config)?;
    let pts = pts_baseline(&sim.panel, config.seed)?;
    let mut agents = Vec::new();
    let mut unscored = 0;
    for i in 0..sim.panel.n_agents() {
        match (truth.agents[i].mean_score, table.agents[i].mean_score, pts[i]) {
            (Some(t), Some(d), Some(p)) => agents.push(AgentComparison {
                agent_id: sim.panel.agent_id(i).to_string(),
                true_mean: t,
                dts_mean: d,
                pts_mean: p,
            }),
            _ => unscored += 1,
        }
    }
    compare(scenario.seed, agents, unscored, resamples)
}

/// Summaries for per-agent comparisons, e.g. read back from CSV.
pub fn compare(seed: u64, agents: Vec<AgentComparison>, unscored: usize, resamples: usize) -> Result<FidelityRun> {
    let t: Vec<f64> = agents.iter().map(|a| a.true_mean).collect();
    let d: Vec<f64> = agents.iter().map(|a| a.dts_mean).collect();
    let p: Vec<f64> = agents.iter().map(|a| a.pts_mean).collect();
    let within = agents
        .iter()
        .filter(|a| (a.dts_mean - a.true_mean).abs() <= 0.02)
        .count();
    Ok(FidelityRun {
        seed,
        dts_mse: mse(&d, &t, resamples, seed)?,
        pts_mse: mse(&p, &t, resamples, seed)?,
        dts_rank: rank_correlation(&d, &t)?,
        pts_rank: rank_correlation(&p, &t)?,
        within_002: within as f64 / agents.len().max(1) as f64,
        unscored,
        agents,
    })
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Some(quantile(&v, 0.5))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub tasks: usize,
    pub agents: usize,
    pub seeds: usize,
    pub median_error: f64,
    pub q25: f64,
    pub q75: f64,
    /// Error when the solver is fed the exact moments of the same pools.
    pub exact_error: f64,
}

/// `max(|e0_hat - e0_pool|, |e1_hat - e1_pool|)` where the pool rates are the
/// agents' mean rates.
fn rate_error(est: ErrorRates, pool: ErrorRates) -> f64 {
    (est.e0() - pool.e0()).abs().max((est.e1() - pool.e1()).abs())
}

pub fn mean_rates(agents: &[AgentParams]) -> ErrorRates {
    let n = agents.len() as f64;
    let e1 = agents.iter().map(|a| a.rates.e1()).sum::<f64>() / n;
    let e0 = agents.iter().map(|a| a.rates.e0()).sum::<f64>() / n;
    ErrorRates::new(e1, e0).expect("mean of valid rates")
}

/// Estimation error of the full-pool estimator on one synthetic panel.
pub fn consistency_error(
    prior: Prior,
    agents: &[AgentParams],
    n_tasks: usize,
    mode: PriorMode,
    seed: u64,
) -> Result<(f64, f64)> {
    let assignment = dts::Assignment::random(n_tasks, agents.len(), seed)?;
    let world = sim::gen_world(prior, n_tasks, seed);
    let signals = sim::gen_signals(&world, &assignment, agents, seed)?;
    let mut counts = MomentCounts::default();
    for (k, t) in signals.iter().enumerate() {
        counts.add(moments::order_triple(k as u64, seed, *t));
    }
    let pool = mean_rates(agents);
    let est = moments::solve(&counts.moments(1)?, mode, 0.0)?;
    let u: Vec<f64> = agents.iter().map(|a| a.rates.e0()).collect();
    let v: Vec<f64> = agents.iter().map(|a| 1.0 - a.rates.e1()).collect();
    let u_bar = u.iter().sum::<f64>() / u.len() as f64;
    let v_bar = v.iter().sum::<f64>() / v.len() as f64;
    let exact = moments::solve(&moments::forward_moments(prior, u_bar, v_bar)?, mode, 0.0)?;
    Ok((rate_error(est.rates(), pool), rate_error(exact.rates(), pool)))
}

/// Median and interquartile range of the estimation error over `seeds` runs
/// per `(tasks, agents)` cell. Each seed draws its own population.
pub fn run_consistency_sweep(
    prior: Prior,
    rates: &crate::data::RateDistribution,
    tasks: &[usize],
    agents: &[usize],
    seeds: usize,
    mode: PriorMode,
    master: u64,
) -> Result<Vec<SweepCell>> {
    let mut cells = Vec::new();
    for &n in agents {
        for &k in tasks {
            let runs = (0..seeds)
                .into_par_iter()
                .map(|s| {
                    let seed = seed::derive(master, Stream::Sweep, s as u64, 0);
                    let pop = rates.population(n, seed)?;
                    consistency_error(prior, &pop, k, mode, seed)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut errs: Vec<f64> = runs.iter().map(|r| r.0).collect();
            errs.sort_by(f64::total_cmp);
            cells.push(SweepCell {
                tasks: k,
                agents: n,
                seeds,
                median_error: quantile(&errs, 0.5),
                q25: quantile(&errs, 0.25),
                q75: quantile(&errs, 0.75),
                exact_error: runs.iter().map(|r| r.1).fold(0.0, f64::max),
            });
        }
    }
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasRow {
    pub agents: usize,
    /// Largest gap between the exact without-replacement moments and the
    /// moments of the averaged channel.
    pub moment_bias: f64,
    /// Estimator error on the exact without-replacement moments, against the
    /// pool's mean rates (the infinite-task limit).
    pub rate_error: f64,
}

/// Isolates the finite-pool bias: three distinct agents per task make the
/// matching statistics differ from those of the averaged channel.
pub fn without_replacement_bias(
    prior: Prior,
    rates: &crate::data::RateDistribution,
    agents: &[usize],
    mode: PriorMode,
    master: u64,
) -> Result<Vec<BiasRow>> {
    agents
        .iter()
        .map(|&n| {
            let pop = rates.population(n, master)?;
            let us: Vec<f64> = pop.iter().map(|a| a.rates.e0()).collect();
            let vs: Vec<f64> = pop.iter().map(|a| 1.0 - a.rates.e1()).collect();
            let exact = moments::pool_moments(prior, &us, &vs)?;
            let n_f = n as f64;
            let averaged = moments::forward_moments(prior, us.iter().sum::<f64>() / n_f, vs.iter().sum::<f64>() / n_f)?;
            let moment_bias = (exact.c1 - averaged.c1)
                .abs()
                .max((exact.c2 - averaged.c2).abs())
                .max((exact.c3 - averaged.c3).abs());
            let est = moments::solve(&exact, mode, 0.0)?;
            Ok(BiasRow {
                agents: n,
                moment_bias,
                rate_error: rate_error(est.rates(), mean_rates(&pop)),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Truthful beats the deviation by more than the margin.
    Strict,
    /// Deviation is truthful itself (same report distribution).
    Equal,
    /// Within the logarithmic rule's tolerance of truthful.
    EpsClose,
    /// Pool judged uninformative: every strategy scores zero.
    WeakZero,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceRow {
    pub profile: String,
    pub deviation: String,
    pub informative: bool,
    pub truthful_value: f64,
    pub deviation_value: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

/// Other-agent profiles: everyone plays one strategy, a quarter of the pool
/// deviates, or everyone mixes 25% of a strategy into truthful play.
pub fn other_profiles(elicitation: Elicitation, n_others: usize) -> Vec<(String, Vec<Strategy>)> {
    let truthful = Strategy::truthful(elicitation);
    let named: Vec<(&str, Strategy)> = match elicitation {
        Elicitation::Signal => vec![
            ("flip", Strategy::Signal(SignalStrategy::FLIP)),
            ("always_zero", Strategy::Signal(SignalStrategy::ALWAYS_ZERO)),
            ("always_one", Strategy::Signal(SignalStrategy::ALWAYS_ONE)),
        ],
        Elicitation::Prediction => vec![
            ("flip", Strategy::Prediction(PredictionStrategy::Flip)),
            ("always_zero", Strategy::Prediction(PredictionStrategy::Constant(0.0))),
            ("always_one", Strategy::Prediction(PredictionStrategy::Constant(1.0))),
        ],
    };
    let mut out = vec![("truthful".to_string(), vec![truthful; n_others])];
    for (name, s) in &named {
        out.push(((*name).to_string(), vec![*s; n_others]));
    }
    let quarter = n_others.div_ceil(4);
    for (name, s) in &named {
        let mut v = vec![truthful; n_others];
        v[..quarter].fill(*s);
        out.push((format!("quarter_{name}"), v));
    }
    for (name, s) in &named {
        let mixed = match (s, truthful) {
            (Strategy::Signal(x), Strategy::Signal(t)) => Strategy::Signal(x.mix(&t, 0.25)),
            (Strategy::Prediction(PredictionStrategy::Constant(c)), _) => {
                Strategy::Prediction(PredictionStrategy::Affine {
                    slope: 0.75,
                    intercept: 0.25 * c,
                })
            }
            // 0.25 (1 - p) + 0.75 p
            (Strategy::Prediction(PredictionStrategy::Flip), _) => Strategy::Prediction(PredictionStrategy::Affine {
                slope: 0.5,
                intercept: 0.25,
            }),
            _ => unreachable!(),
        };
        out.push((format!("mix25_{name}"), vec![mixed; n_others]));
    }
    out
}

/// Deviations for agent i: every signal strategy on a 0.1 grid (which includes
/// the four deterministic ones), or a family of prediction transforms.
pub fn deviations(elicitation: Elicitation) -> Vec<(String, Strategy)> {
    let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    match elicitation {
        Elicitation::Signal => {
            let mut out = Vec::new();
            for &f0 in &grid {
                for &f1 in &grid {
                    out.push((
                        format!("f0={f0:.1},f1={f1:.1}"),
                        Strategy::Signal(SignalStrategy { f0, f1 }),
                    ));
                }
            }
            out
        }
        Elicitation::Prediction => {
            let mut out = vec![
                (
                    "truthful".to_string(),
                    Strategy::Prediction(PredictionStrategy::Truthful),
                ),
                ("flip".to_string(), Strategy::Prediction(PredictionStrategy::Flip)),
            ];
            for &c in &grid {
                out.push((
                    format!("constant={c:.1}"),
                    Strategy::Prediction(PredictionStrategy::Constant(c)),
                ));
            }
            for &l in &grid[1..] {
                out.push((
                    format!("shrink={l:.1}"),
                    Strategy::Prediction(PredictionStrategy::Shrink(l)),
                ));
            }
            for &g in &grid[1..] {
                let s = PredictionStrategy::Affine {
                    slope: 1.0 - g,
                    intercept: g,
                };
                out.push((format!("toward_one={g:.1}"), Strategy::Prediction(s)));
            }
            out
        }
    }
}

fn is_truthful(s: &Strategy, rates: ErrorRates, prior: Prior) -> bool {
    match s {
        Strategy::Signal(x) => *x == SignalStrategy::TRUTHFUL,
        Strategy::Prediction(p) => [false, true].iter().all(|sig| {
            let post = sim::posterior_from_signal(*sig, rates, prior).unwrap_or(f64::NAN);
            (p.apply(post) - post).abs() < 1e-15
        }),
    }
}

/// Exact expected DTS payoff of every deviation under every profile.
///
/// Agent i and each of the `n_agents - 1` others share `rates`.
pub fn run_dominance_grid(
    rates: ErrorRates,
    n_agents: usize,
    prior: Prior,
    config: &DtsConfig,
) -> Result<Vec<DominanceRow>> {
    if n_agents < 3 {
        return Err(Error::TooFewAgents(n_agents));
    }
    let el = config.elicitation();
    let log_rule = matches!(
        config.rule,
        ScoringRule::Prediction {
            rule: crate::scoring::PredictionRule::Logarithmic { .. }
        }
    );
    let truthful = Strategy::truthful(el);
    let devs = deviations(el);
    let mut rows = Vec::new();
    for (profile, strategies) in other_profiles(el, n_agents - 1) {
        let others: Vec<(ErrorRates, Strategy)> = strategies.into_iter().map(|s| (rates, s)).collect();
        let est = dts::exact_pool_estimate(&others, prior, config)?;
        let t = dts::exact_expected_dts(&truthful, rates, &others, prior, config)?;
        let values = devs
            .par_iter()
            .map(|(_, d)| dts::exact_expected_dts(d, rates, &others, prior, config))
            .collect::<Result<Vec<_>>>()?;
        for ((name, dev), v) in devs.iter().zip(values) {
            let margin = t - v;
            let verdict = if !est.informative {
                if t == 0.0 && v == 0.0 {
                    Verdict::WeakZero
                } else {
                    Verdict::Violation
                }
            } else if is_truthful(dev, rates, prior) {
                if margin.abs() <= 1e-12 {
                    Verdict::Equal
                } else {
                    Verdict::Violation
                }
            } else if margin > DOMINANCE_MARGIN {
                Verdict::Strict
            } else if log_rule && margin >= -LOG_EPSILON {
                Verdict::EpsClose
            } else {
                Verdict::Violation
            };
            rows.push(DominanceRow {
                profile: profile.clone(),
                deviation: name.clone(),
                informative: est.informative,
                truthful_value: t,
                deviation_value: v,
                margin,
                verdict,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_examples() {
        let t = [0.3, 0.5, 0.9];
        assert_eq!(mse(&t, &t, 100, 0).unwrap().value, 0.0);
        let shifted: Vec<f64> = t.iter().map(|x| x + 0.1).collect();
        assert!((mse(&shifted, &t, 100, 0).unwrap().value - 0.01).abs() < 1e-12);
        let m = mse(&[0.1, -0.3], &[0.0, 0.0], 1000, 4).unwrap();
        assert!((m.value - 0.05).abs() < 1e-15);
        assert!(m.ci_low <= m.value && m.value <= m.ci_high);
        assert_eq!(m, mse(&[0.1, -0.3], &[0.0, 0.0], 1000, 4).unwrap());
        assert!(matches!(mse(&[0.1], &[0.1, 0.2], 10, 0), Err(Error::AgentSetMismatch)));
    }

    #[test]
    fn spearman_examples() {
        assert_eq!(rank_correlation(&[1.0, 2.0, 3.0], &[4.0, 5.0, 9.0]).unwrap(), Some(1.0));
        assert_eq!(
            rank_correlation(&[3.0, 2.0, 1.0], &[1.0, 2.0, 3.0]).unwrap(),
            Some(-1.0)
        );
        assert!((rank_correlation(&[1.0, 3.0, 2.0], &[1.0, 2.0, 3.0]).unwrap().unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(rank_correlation(&[1.0, 1.0], &[1.0, 2.0]).unwrap(), None);
        assert!(rank_correlation(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn ties_get_average_ranks() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn pts_identical_reports() {
        let a = dts::assign_tasks(60, 6, 0).unwrap();
        let p = Panel::new(a, vec![[crate::Report::Signal(true); 3]; 60]).unwrap();
        assert!(pts_baseline(&p, 0).unwrap().iter().all(|m| *m == Some(1.0)));
    }

    #[test]
    fn pts_half_frequency_match_scores_two() {
        use crate::Report::Signal as S;
        // three ones among six reports, so R(0) = R(1) = 1/2
        let a = dts::Assignment::new(4, vec![[0, 1, 2], [0, 1, 3]]).unwrap();
        let p = Panel::new(a, vec![[S(true), S(true), S(false)], [S(false), S(false), S(true)]]).unwrap();
        let m = pts_baseline(&p, 7).unwrap();
        assert_eq!(m[2], Some(0.0));
        assert_eq!(m[3], Some(0.0));
        // agent 0 matches agent 1 on both tasks and nobody else
        let picks = (0..2)
            .filter(|k| dts::pick_reference(p.assignment(), *k, 0, 7).unwrap() == 1)
            .count();
        assert_eq!(m[0], Some(2.0 * picks as f64 / 2.0));
    }

    #[test]
    fn grid_truthful_others_flip_deviation_is_strict() {
        let prior = Prior::new(0.4, 0.6).unwrap();
        let cfg = DtsConfig::new(ScoringRule::one_over_prior(prior), PriorMode::Known { prior });
        let rows = run_dominance_grid(ErrorRates::new(0.2, 0.3).unwrap(), 10, prior, &cfg).unwrap();
        let r = rows
            .iter()
            .find(|r| r.profile == "truthful" && r.deviation == "f0=1.0,f1=0.0")
            .unwrap();
        assert_eq!(r.verdict, Verdict::Strict);
        assert!(rows
            .iter()
            .filter(|r| r.profile == "always_one")
            .all(|r| r.verdict == Verdict::WeakZero));
    }

    #[test]
    fn exact_injection_is_exact() {
        let prior = Prior::new(0.4, 0.6).unwrap();
        let pop = crate::data::RateDistribution::Jittered {
            e1: 0.2,
            e0: 0.3,
            spread: 0.1,
        }
        .population(50, 3)
        .unwrap();
        let (_, exact) = consistency_error(prior, &pop, 100, PriorMode::Known { prior }, 3).unwrap();
        assert!(exact < 1e-9);
    }
}
