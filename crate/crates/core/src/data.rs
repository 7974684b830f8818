//! Report datasets, score tables and run configuration on disk.
//!
//! Reports use one CSV schema for synthetic and real data:
//!
//! ```text
//! task_id,agent_id,signal,prediction,ground_truth
//! t0,alice,1,0.82,1
//! t0,bob,0,0.35,1
//! ```
//!
//! `signal` and `ground_truth` are `0`/`1`, `prediction` is a probability in
//! `[0, 1]`; empty cells mean absent. Every row needs a signal or a prediction.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dts::{AgentStatus, Assignment, Panel, ScoreTable};
use crate::error::{Error, Result};
use crate::moments::{Diagnostics, PriorMode, DEFAULT_KAPPA, DEFAULT_MIN_TASKS};
use crate::scoring::{Elicitation, PredictionRule, Prior, Report, ScoringRule, DEFAULT_LOG_CLAMP};
use crate::sim::{self, AgentParams, PredictionStrategy, SignalStrategy, Strategy};
use crate::surrogate::ErrorRates;

pub const REPORT_HEADER: [&str; 5] = ["task_id", "agent_id", "signal", "prediction", "ground_truth"];
pub const SCORE_HEADER: [&str; 6] = ["agent_id", "n_tasks", "mean_score", "informative", "e0_hat", "e1_hat"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub task_id: String,
    pub agent_id: String,
    pub signal: Option<bool>,
    pub prediction: Option<f64>,
    pub ground_truth: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Formats with 10 significant digits, without trailing zeros.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.9e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

fn parse_bit(field: &str, value: &str) -> std::result::Result<Option<bool>, String> {
    match value.trim() {
        "" => Ok(None),
        "0" => Ok(Some(false)),
        "1" => Ok(Some(true)),
        other => Err(format!("{field} must be 0 or 1, got `{other}`")),
    }
}

fn bit(b: Option<bool>) -> &'static str {
    match b {
        None => "",
        Some(false) => "0",
        Some(true) => "1",
    }
}

/// Parses and validates reports, collecting every row error before failing.
pub fn read_reports<R: Read>(reader: R, origin: &Path) -> Result<Vec<ReportRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != REPORT_HEADER {
        return Err(Error::Records {
            path: origin.to_path_buf(),
            errors: vec![format!(
                "line 1: header must be `{}`, got `{}`",
                REPORT_HEADER.join(","),
                got.join(",")
            )],
        });
    }
    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut seen = HashSet::new();
    for row in rdr.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                errors.push(format!("line {line}: {e}"));
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        let mut row_errors = Vec::new();
        let task_id = row[0].trim().to_string();
        let agent_id = row[1].trim().to_string();
        if task_id.is_empty() {
            row_errors.push("empty task_id".to_string());
        }
        if agent_id.is_empty() {
            row_errors.push("empty agent_id".to_string());
        }
        let signal = parse_bit("signal", &row[2]).unwrap_or_else(|e| {
            row_errors.push(e);
            None
        });
        let ground_truth = parse_bit("ground_truth", &row[4]).unwrap_or_else(|e| {
            row_errors.push(e);
            None
        });
        let prediction = match row[3].trim() {
            "" => None,
            s => match s.parse::<f64>() {
                Ok(p) if (0.0..=1.0).contains(&p) => Some(p),
                Ok(p) => {
                    row_errors.push(format!("prediction {p} is outside [0, 1]"));
                    None
                }
                Err(_) => {
                    row_errors.push(format!("prediction `{s}` is not a number"));
                    None
                }
            },
        };
        if signal.is_none() && prediction.is_none() && row[2].trim().is_empty() && row[3].trim().is_empty() {
            row_errors.push("row has neither signal nor prediction".to_string());
        }
        if !task_id.is_empty() && !agent_id.is_empty() && !seen.insert((task_id.clone(), agent_id.clone())) {
            row_errors.push(format!("duplicate report from agent {agent_id} on task {task_id}"));
        }
        if row_errors.is_empty() {
            records.push(ReportRecord {
                task_id,
                agent_id,
                signal,
                prediction,
                ground_truth,
            });
        } else {
            errors.extend(row_errors.into_iter().map(|e| format!("line {line}: {e}")));
        }
    }
    if errors.is_empty() {
        Ok(records)
    } else {
        Err(Error::Records {
            path: origin.to_path_buf(),
            errors,
        })
    }
}

pub fn load_reports(path: impl AsRef<Path>) -> Result<Vec<ReportRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_reports(file, path)
}

pub fn write_reports_to<W: Write>(writer: W, records: &[ReportRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(REPORT_HEADER)?;
    for r in records {
        let pred = r.prediction.map(|p| p.to_string()).unwrap_or_default();
        w.write_record([
            r.task_id.as_str(),
            &r.agent_id,
            bit(r.signal),
            &pred,
            bit(r.ground_truth),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<writer>", e))?;
    Ok(())
}

pub fn write_reports(path: impl AsRef<Path>, records: &[ReportRecord]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_reports_to(file, records)
}

/// Records for every report in a panel, optionally with ground truth.
pub fn panel_records(panel: &Panel, truths: Option<&[bool]>) -> Vec<ReportRecord> {
    let mut out = Vec::with_capacity(panel.n_tasks() * 3);
    for (k, (triple, reports)) in panel.assignment().tasks().iter().zip(panel.reports()).enumerate() {
        for pos in 0..3 {
            let (signal, prediction) = match reports[pos] {
                Report::Signal(s) => (Some(s), None),
                Report::Prediction(p) => (None, Some(p)),
            };
            out.push(ReportRecord {
                task_id: panel.task_id(k).to_string(),
                agent_id: panel.agent_id(triple[pos]).to_string(),
                signal,
                prediction,
                ground_truth: truths.map(|t| t[k]),
            });
        }
    }
    out
}

/// A panel built from records, plus per-task ground truth where given.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub panel: Panel,
    pub truths: Vec<Option<bool>>,
}

impl Dataset {
    pub fn has_truth(&self) -> bool {
        !self.truths.is_empty() && self.truths.iter().all(Option::is_some)
    }
}

/// Groups records into tasks of exactly three reports.
///
/// Tasks and agents are indexed in order of first appearance.
pub fn to_dataset(records: &[ReportRecord], elicitation: Elicitation) -> Result<Dataset> {
    let mut task_index: HashMap<&str, usize> = HashMap::new();
    let mut agent_index: HashMap<&str, usize> = HashMap::new();
    let mut task_ids = Vec::new();
    let mut agent_ids = Vec::new();
    let mut rows: Vec<Vec<(usize, Report)>> = Vec::new();
    let mut truths: Vec<Option<bool>> = Vec::new();
    let mut errors = Vec::new();

    for r in records {
        let k = *task_index.entry(&r.task_id).or_insert_with(|| {
            task_ids.push(r.task_id.clone());
            rows.push(Vec::new());
            truths.push(r.ground_truth);
            task_ids.len() - 1
        });
        let i = *agent_index.entry(&r.agent_id).or_insert_with(|| {
            agent_ids.push(r.agent_id.clone());
            agent_ids.len() - 1
        });
        if truths[k] != r.ground_truth {
            errors.push(format!("task {}: conflicting ground_truth values", r.task_id));
        }
        let report = match elicitation {
            Elicitation::Signal => r.signal.map(Report::Signal),
            Elicitation::Prediction => r.prediction.map(Report::Prediction),
        };
        match report {
            Some(rep) => rows[k].push((i, rep)),
            None => {
                return Err(Error::MissingReport {
                    agent: r.agent_id.clone(),
                    task: r.task_id.clone(),
                })
            }
        }
    }
    if !errors.is_empty() {
        errors.dedup();
        return Err(Error::Records {
            path: PathBuf::from("<reports>"),
            errors,
        });
    }
    let mut triples = Vec::with_capacity(rows.len());
    let mut reports = Vec::with_capacity(rows.len());
    for (k, row) in rows.iter().enumerate() {
        if row.len() != 3 {
            return Err(Error::MalformedTriple {
                task: task_ids[k].clone(),
                len: row.len(),
            });
        }
        triples.push([row[0].0, row[1].0, row[2].0]);
        reports.push([row[0].1, row[1].1, row[2].1]);
    }
    if triples.is_empty() {
        return Err(Error::NoTasks);
    }
    let assignment = Assignment::new(agent_ids.len(), triples)?;
    Ok(Dataset {
        panel: Panel::with_ids(assignment, reports, agent_ids, task_ids)?,
        truths,
    })
}

/// One row of the per-agent score CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub agent_id: String,
    pub n_tasks: usize,
    pub mean_score: Option<f64>,
    pub informative: Option<bool>,
    pub e0_hat: Option<f64>,
    pub e1_hat: Option<f64>,
}

pub fn score_rows(table: &ScoreTable, agent_ids: &[String]) -> Vec<ScoreRow> {
    table
        .agents
        .iter()
        .map(|a| ScoreRow {
            agent_id: agent_ids[a.agent].clone(),
            n_tasks: a.n_tasks,
            mean_score: a.mean_score,
            informative: a.estimation.map(|e| e.informative),
            e0_hat: a.estimation.map(|e| e.e0_hat),
            e1_hat: a.estimation.map(|e| e.e1_hat),
        })
        .collect()
}

#[derive(Serialize)]
struct JsonTask<'a> {
    task_id: &'a str,
    score: f64,
    reference: Option<u8>,
    zeroed: bool,
}

#[derive(Serialize)]
struct JsonAgent<'a> {
    agent_id: &'a str,
    n_tasks: usize,
    mean_score: Option<f64>,
    status: AgentStatus,
    informative: Option<bool>,
    e0_hat: Option<f64>,
    e1_hat: Option<f64>,
    p0_hat: Option<f64>,
    diagnostics: Option<Diagnostics>,
    tasks: Vec<JsonTask<'a>>,
}

fn round_json(x: f64) -> f64 {
    fmt_float(x).parse().unwrap_or(x)
}

pub fn write_scores_to<W: Write>(writer: W, table: &ScoreTable, panel: &Panel, format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            w.write_record(SCORE_HEADER)?;
            for r in score_rows(table, panel.agent_ids()) {
                let opt = |x: Option<f64>| x.map(fmt_float).unwrap_or_default();
                w.write_record([
                    r.agent_id,
                    r.n_tasks.to_string(),
                    opt(r.mean_score),
                    r.informative.map(|b| b.to_string()).unwrap_or_default(),
                    opt(r.e0_hat),
                    opt(r.e1_hat),
                ])?;
            }
            w.flush().map_err(|e| Error::io("<writer>", e))?;
        }
        Format::Json => {
            let agents: Vec<JsonAgent> = table
                .agents
                .iter()
                .map(|a| JsonAgent {
                    agent_id: panel.agent_id(a.agent),
                    n_tasks: a.n_tasks,
                    mean_score: a.mean_score.map(round_json),
                    status: a.status,
                    informative: a.estimation.map(|e| e.informative),
                    e0_hat: a.estimation.map(|e| round_json(e.e0_hat)),
                    e1_hat: a.estimation.map(|e| round_json(e.e1_hat)),
                    p0_hat: a.estimation.and_then(|e| e.p0_hat.map(round_json)),
                    diagnostics: a.estimation.map(|e| e.diagnostics),
                    tasks: a
                        .tasks
                        .iter()
                        .map(|t| JsonTask {
                            task_id: panel.task_id(t.task),
                            score: round_json(t.score),
                            reference: t.reference.map(u8::from),
                            zeroed: t.zeroed,
                        })
                        .collect(),
                })
                .collect();
            let mut writer = writer;
            serde_json::to_writer_pretty(&mut writer, &serde_json::json!({ "agents": agents }))?;
            writeln!(writer).map_err(|e| Error::io("<writer>", e))?;
        }
    }
    Ok(())
}

pub fn write_scores(table: &ScoreTable, panel: &Panel, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_scores_to(std::io::BufWriter::new(file), table, panel, format)
}

pub fn read_score_rows<R: Read>(reader: R) -> Result<Vec<ScoreRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    Ok(rdr.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn load_scores(path: impl AsRef<Path>) -> Result<Vec<ScoreRow>> {
    let path = path.as_ref();
    read_score_rows(File::open(path).map_err(|e| Error::io(path, e))?)
}

/// Named strategy in configs; maps onto either elicitation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyName {
    Truthful,
    Flip,
    AlwaysZero,
    AlwaysOne,
}

impl StrategyName {
    pub fn strategy(&self, elicitation: Elicitation) -> Strategy {
        match (elicitation, self) {
            (Elicitation::Signal, StrategyName::Truthful) => Strategy::Signal(SignalStrategy::TRUTHFUL),
            (Elicitation::Signal, StrategyName::Flip) => Strategy::Signal(SignalStrategy::FLIP),
            (Elicitation::Signal, StrategyName::AlwaysZero) => Strategy::Signal(SignalStrategy::ALWAYS_ZERO),
            (Elicitation::Signal, StrategyName::AlwaysOne) => Strategy::Signal(SignalStrategy::ALWAYS_ONE),
            (Elicitation::Prediction, StrategyName::Truthful) => Strategy::Prediction(PredictionStrategy::Truthful),
            (Elicitation::Prediction, StrategyName::Flip) => Strategy::Prediction(PredictionStrategy::Flip),
            (Elicitation::Prediction, StrategyName::AlwaysZero) => {
                Strategy::Prediction(PredictionStrategy::Constant(0.0))
            }
            (Elicitation::Prediction, StrategyName::AlwaysOne) => {
                Strategy::Prediction(PredictionStrategy::Constant(1.0))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleName {
    Brier,
    Logarithmic,
    Spherical,
    OneOverPrior,
    PosteriorSignal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorModeName {
    Known,
    OneBit,
}

/// How simulated agents' error rates are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RateDistribution {
    /// Every agent has the same rates.
    Fixed { e1: f64, e0: f64 },
    /// Both rates independently uniform on `[low, high]`.
    Uniform { low: f64, high: f64 },
    /// `e1 ± spread`, `e0 ± spread`, uniformly.
    Jittered { e1: f64, e0: f64, spread: f64 },
}

impl RateDistribution {
    pub fn population(&self, n: usize, seed: u64) -> Result<Vec<AgentParams>> {
        match *self {
            RateDistribution::Fixed { e1, e0 } => Ok(vec![AgentParams::new(ErrorRates::new(e1, e0)?); n]),
            RateDistribution::Uniform { low, high } => sim::uniform_population(n, low, high, seed),
            RateDistribution::Jittered { e1, e0, spread } => {
                sim::jittered_population(n, ErrorRates::new(e1, e0)?, spread, seed)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    pub agents: usize,
    pub tasks: usize,
    pub rates: RateDistribution,
    /// Per-task uniform perturbation of each agent's rates.
    pub task_jitter: f64,
    pub strategy: StrategyName,
    /// The first `deviators` agents play `deviation` instead of `strategy`.
    pub deviators: usize,
    pub deviation: StrategyName,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            agents: 50,
            tasks: 20_000,
            rates: RateDistribution::Uniform { low: 0.05, high: 0.45 },
            task_jitter: 0.0,
            strategy: StrategyName::Truthful,
            deviators: 0,
            deviation: StrategyName::AlwaysOne,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchConfig {
    /// Independent fidelity runs.
    pub seeds: usize,
    pub bootstrap: usize,
    pub sweep_seeds: usize,
    pub sweep_tasks: Vec<usize>,
    pub sweep_agents: Vec<usize>,
    pub sweep_rates: RateDistribution,
    /// Pool sizes for the exact without-replacement bias check.
    pub bias_agents: Vec<usize>,
    /// Rates of the scored agent and of every other agent in the dominance grid.
    pub grid_rates: [f64; 2],
    pub grid_agents: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seeds: 20,
            bootstrap: 1000,
            sweep_seeds: 50,
            sweep_tasks: vec![500, 2_000, 8_000, 32_000],
            sweep_agents: vec![50],
            sweep_rates: RateDistribution::Jittered {
                e1: 0.2,
                e0: 0.3,
                spread: 0.1,
            },
            bias_agents: vec![5, 10, 200],
            grid_rates: [0.2, 0.3],
            grid_agents: 50,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    elicitation: Elicitation,
    rule: RuleName,
    prior: Option<f64>,
    prior_mode: Option<PriorModeName>,
    zero_is_majority: Option<bool>,
    kappa: Option<f64>,
    min_tasks: Option<usize>,
    seed: Option<u64>,
    log_clamp: Option<f64>,
    reporter_rates: Option<[f64; 2]>,
    reports: Option<PathBuf>,
    out: Option<PathBuf>,
    #[serde(default)]
    simulation: SimulationConfig,
    #[serde(default)]
    bench: BenchConfig,
}

/// Default `Pr[y = 1]` when a config does not name a prior.
pub const DEFAULT_PRIOR_P1: f64 = 0.6;

/// A validated run configuration with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub elicitation: Elicitation,
    pub rule: ScoringRule,
    /// Prior of the simulated world, of the known-prior solver, and of the
    /// prior-dependent signal rules.
    pub prior: Prior,
    pub prior_mode: PriorMode,
    pub kappa: f64,
    pub min_tasks: usize,
    pub seed: u64,
    pub reports: Option<PathBuf>,
    pub out: PathBuf,
    pub simulation: SimulationConfig,
    pub bench: BenchConfig,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    /// Parses TOML. Relative paths are resolved against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        let p1 = raw.prior.unwrap_or(DEFAULT_PRIOR_P1);
        let prior = Prior::from_p1(p1).map_err(|_| invalid(format!("prior must be in [0, 1], got {p1}")))?;
        if !prior.is_proper() {
            return Err(invalid(format!("prior must be strictly between 0 and 1, got {p1}")));
        }
        let clamp = raw.log_clamp.unwrap_or(DEFAULT_LOG_CLAMP);
        if !(clamp > 0.0 && clamp < 0.5) {
            return Err(invalid(format!("log_clamp must be in (0, 0.5), got {clamp}")));
        }
        if raw.reporter_rates.is_some() && raw.rule != RuleName::PosteriorSignal {
            return Err(invalid("reporter_rates only applies to rule = \"posterior_signal\""));
        }
        let rule = match raw.rule {
            RuleName::Brier => ScoringRule::brier(),
            RuleName::Logarithmic => ScoringRule::Prediction {
                rule: PredictionRule::Logarithmic { clamp },
            },
            RuleName::Spherical => ScoringRule::spherical(),
            RuleName::OneOverPrior => ScoringRule::one_over_prior(prior),
            RuleName::PosteriorSignal => {
                let [e1, e0] = raw
                    .reporter_rates
                    .ok_or_else(|| invalid("rule = \"posterior_signal\" needs reporter_rates = [e1, e0]"))?;
                ScoringRule::PosteriorSignal {
                    prior,
                    rates: Some(ErrorRates::new(e1, e0).map_err(|e| invalid(e.to_string()))?),
                    base: PredictionRule::Brier,
                }
            }
        };
        if rule.elicitation() != raw.elicitation {
            return Err(invalid(format!(
                "rule {} scores {} reports but elicitation is {}",
                rule.name(),
                match rule.elicitation() {
                    Elicitation::Signal => "signal",
                    Elicitation::Prediction => "prediction",
                },
                match raw.elicitation {
                    Elicitation::Signal => "signal",
                    Elicitation::Prediction => "prediction",
                },
            )));
        }
        let prior_mode = match raw.prior_mode.unwrap_or(PriorModeName::Known) {
            PriorModeName::Known => {
                if raw.zero_is_majority.is_some() {
                    return Err(invalid("zero_is_majority only applies to prior_mode = \"one_bit\""));
                }
                if prior.is_uniform(crate::moments::UNIFORM_PRIOR_TOL) {
                    return Err(invalid("prior_mode = \"known\" needs a non-uniform prior"));
                }
                PriorMode::Known { prior }
            }
            PriorModeName::OneBit => PriorMode::OneBit {
                zero_is_majority: raw
                    .zero_is_majority
                    .ok_or_else(|| invalid("prior_mode = \"one_bit\" needs zero_is_majority = true|false"))?,
            },
        };
        let kappa = raw.kappa.unwrap_or(DEFAULT_KAPPA);
        if kappa.is_nan() || kappa < 0.0 {
            return Err(invalid(format!("kappa must be >= 0, got {kappa}")));
        }
        let min_tasks = raw.min_tasks.unwrap_or(DEFAULT_MIN_TASKS);
        if min_tasks == 0 {
            return Err(invalid("min_tasks must be >= 1"));
        }
        let cfg = RunConfig {
            elicitation: raw.elicitation,
            rule,
            prior,
            prior_mode,
            kappa,
            min_tasks,
            seed: raw.seed.unwrap_or(0),
            reports: raw.reports.map(|p| base.join(p)),
            out: base.join(raw.out.unwrap_or_else(|| PathBuf::from("out"))),
            simulation: raw.simulation,
            bench: raw.bench,
        };
        cfg.validate_blocks()?;
        Ok(cfg)
    }

    fn validate_blocks(&self) -> Result<()> {
        let s = &self.simulation;
        if s.agents < 3 {
            return Err(invalid(format!("simulation.agents must be >= 3, got {}", s.agents)));
        }
        if s.tasks == 0 {
            return Err(invalid("simulation.tasks must be >= 1"));
        }
        if s.deviators > s.agents {
            return Err(invalid("simulation.deviators exceeds simulation.agents"));
        }
        if !(0.0..=0.5).contains(&s.task_jitter) {
            return Err(invalid("simulation.task_jitter must be in [0, 0.5]"));
        }
        for (name, d) in [
            ("simulation.rates", s.rates),
            ("bench.sweep_rates", self.bench.sweep_rates),
        ] {
            d.population(1, 0).map_err(|e| invalid(format!("{name}: {e}")))?;
            if let RateDistribution::Uniform { low, high } = d {
                if low > high {
                    return Err(invalid(format!("{name}: low > high")));
                }
            }
        }
        let b = &self.bench;
        if b.seeds == 0 || b.bootstrap == 0 || b.sweep_seeds == 0 {
            return Err(invalid(
                "bench.seeds, bench.bootstrap and bench.sweep_seeds must be >= 1",
            ));
        }
        if b.sweep_agents.iter().chain(&b.bias_agents).any(|n| *n < 3) || b.grid_agents < 3 {
            return Err(invalid("bench agent counts must be >= 3"));
        }
        if b.sweep_tasks.contains(&0) {
            return Err(invalid("bench.sweep_tasks entries must be >= 1"));
        }
        ErrorRates::new(b.grid_rates[0], b.grid_rates[1]).map_err(|e| invalid(format!("bench.grid_rates: {e}")))?;
        Ok(())
    }

    /// Applies `DTS_SEED` and `DTS_OUT` from `lookup`.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<()> {
        if let Some(s) = lookup("DTS_SEED") {
            self.seed = s
                .trim()
                .parse()
                .map_err(|_| invalid(format!("DTS_SEED must be an unsigned integer, got `{s}`")))?;
        }
        if let Some(o) = lookup("DTS_OUT") {
            self.out = PathBuf::from(o);
        }
        Ok(())
    }

    pub fn dts_config(&self) -> crate::dts::DtsConfig {
        crate::dts::DtsConfig {
            rule: self.rule,
            kappa: self.kappa,
            prior_mode: self.prior_mode,
            min_tasks: self.min_tasks,
            seed: self.seed,
        }
    }

    /// The scenario described by the `[simulation]` block.
    pub fn scenario(&self) -> Result<sim::Scenario> {
        let s = &self.simulation;
        let mut agents = s.rates.population(s.agents, self.seed)?;
        for a in &mut agents {
            a.task_jitter = s.task_jitter;
        }
        let strategies = (0..s.agents)
            .map(|i| {
                if i < s.deviators {
                    s.deviation.strategy(self.elicitation)
                } else {
                    s.strategy.strategy(self.elicitation)
                }
            })
            .collect();
        Ok(sim::Scenario {
            prior: self.prior,
            n_tasks: s.tasks,
            agents,
            strategies,
            seed: self.seed,
        })
    }
}

/// Reads a config file, then applies environment overrides.
pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut cfg = RunConfig::from_toml(&text, base).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    cfg.apply_env(|k| std::env::var(k).ok())?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<ReportRecord>> {
        read_reports(text.as_bytes(), Path::new("mem.csv"))
    }

    fn config(text: &str) -> Result<RunConfig> {
        RunConfig::from_toml(text, Path::new(""))
    }

    #[test]
    fn two_valid_rows() {
        let r = parse("task_id,agent_id,signal,prediction,ground_truth\nt1,a,1,,\nt1,b,,0.25,0\n").unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].signal, Some(true));
        assert_eq!(r[1].prediction, Some(0.25));
        assert_eq!(r[1].ground_truth, Some(false));
    }

    #[test]
    fn bad_prediction_cites_line() {
        let text = "task_id,agent_id,signal,prediction,ground_truth\nt1,a,1,,\nt1,b,0,,\nt1,c,1,,\nt2,a,,1.2,\n";
        match parse(text) {
            Err(Error::Records { errors, .. }) => {
                assert_eq!(errors.len(), 1);
                assert!(errors[0].starts_with("line 5:"), "{errors:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_are_aggregated() {
        let text = "task_id,agent_id,signal,prediction,ground_truth\nt1,a,2,,\n,b,1,,\nt1,a,1,,\nt2,c,,,\n";
        let Err(Error::Records { errors, .. }) = parse(text) else {
            panic!()
        };
        assert_eq!(errors.len(), 4, "{errors:?}");
        assert!(errors.iter().any(|e| e.contains("duplicate")));
    }

    #[test]
    fn header_must_match() {
        let e = parse("task,agent,signal,prediction,ground_truth\n").unwrap_err();
        assert!(e.is_validation());
        assert!(parse("task_id,agent_id,signal,prediction\nt,a,1,\n").is_err());
    }

    #[test]
    fn crlf_is_accepted() {
        let r = parse("task_id,agent_id,signal,prediction,ground_truth\r\nt1,a,1,,1\r\n").unwrap();
        assert_eq!(r[0].ground_truth, Some(true));
    }

    #[test]
    fn reports_roundtrip() {
        let recs = vec![
            ReportRecord {
                task_id: "t".into(),
                agent_id: "x".into(),
                signal: Some(false),
                prediction: Some(0.123456789012),
                ground_truth: None,
            },
            ReportRecord {
                task_id: "t".into(),
                agent_id: "y, z".into(),
                signal: None,
                prediction: Some(1.0),
                ground_truth: Some(true),
            },
        ];
        let mut buf = Vec::new();
        write_reports_to(&mut buf, &recs).unwrap();
        let back = parse(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back[1], recs[1]);
        assert!((back[0].prediction.unwrap() - 0.123456789012).abs() < 1e-9);
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(0.1), "0.1");
        assert_eq!(fmt_float(2.0 / 3.0), "0.6666666667");
        assert_eq!(fmt_float(-1234.56789012345), "-1234.56789");
    }

    #[test]
    fn dataset_requires_triples() {
        let recs = parse("task_id,agent_id,signal,prediction,ground_truth\nt1,a,1,,\nt1,b,0,,\n").unwrap();
        assert!(matches!(
            to_dataset(&recs, Elicitation::Signal),
            Err(Error::MalformedTriple { len: 2, .. })
        ));
        let recs = parse("task_id,agent_id,signal,prediction,ground_truth\nt1,a,1,,\nt1,b,0,,\nt1,c,,0.3,\n").unwrap();
        assert!(matches!(
            to_dataset(&recs, Elicitation::Signal),
            Err(Error::MissingReport { .. })
        ));
        let ds = to_dataset(&recs, Elicitation::Prediction);
        assert!(ds.is_err());
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = config("rule = \"brier\"\nelicitation = \"prediction\"\n").unwrap();
        assert_eq!(c.kappa, 0.05);
        assert_eq!(c.min_tasks, 30);
        assert_eq!(c.seed, 0);
        assert_eq!(c.simulation, SimulationConfig::default());
        assert!(matches!(c.prior_mode, PriorMode::Known { .. }));
    }

    #[test]
    fn config_validation() {
        assert!(config("rule = \"brier\"\nelicitation = \"prediction\"\nkappa = -0.1\n")
            .unwrap_err()
            .is_validation());
        let e = config("rule = \"brier\"\nelicitation = \"prediction\"\nprior_mode = \"one_bit\"\n").unwrap_err();
        assert!(e.to_string().contains("zero_is_majority"));
        assert!(config("rule = \"brier\"\nelicitation = \"signal\"\n").is_err());
        assert!(config("rule = \"brier\"\nelicitation = \"prediction\"\ncolour = 1\n").is_err());
        assert!(config("rule = \"brier\"\nelicitation = \"prediction\"\nkappa = \"big\"\n").is_err());
        assert!(config("rule = \"brier\"\nelicitation = \"prediction\"\n[simulation]\nagents = 2\n").is_err());
        assert!(config("rule = \"brier\"\nelicitation = \"prediction\"\nprior = 0.5\n").is_err());
        assert!(config("rule = \"posterior_signal\"\nelicitation = \"signal\"\n").is_err());
        assert!(config("elicitation = \"prediction\"\n").is_err());
    }

    #[test]
    fn one_bit_with_bit() {
        let c = config(
            "rule = \"one_over_prior\"\nelicitation = \"signal\"\nprior_mode = \"one_bit\"\nzero_is_majority = false\n",
        )
        .unwrap();
        assert_eq!(
            c.prior_mode,
            PriorMode::OneBit {
                zero_is_majority: false
            }
        );
    }

    #[test]
    fn env_overrides_seed_and_out() {
        let mut c = config("rule = \"brier\"\nelicitation = \"prediction\"\nseed = 3\n").unwrap();
        c.apply_env(|k| match k {
            "DTS_SEED" => Some("11".into()),
            "DTS_OUT" => Some("/tmp/x".into()),
            _ => None,
        })
        .unwrap();
        assert_eq!(c.seed, 11);
        assert_eq!(c.out, PathBuf::from("/tmp/x"));
        assert!(c.apply_env(|_| Some("nope".into())).is_err());
    }

    #[test]
    fn nested_blocks_reject_unknown_keys() {
        let base = "rule = \"brier\"\nelicitation = \"prediction\"\n";
        assert!(config(&format!("{base}[simulation]\nagentz = 5\n")).is_err());
        assert!(config(&format!(
            "{base}[simulation]\nrates = {{ kind = \"fixed\", e1 = 0.2, e0 = 0.3, x = 1 }}\n"
        ))
        .is_err());
        let c = config(&format!(
            "{base}[simulation]\nrates = {{ kind = \"fixed\", e1 = 0.2, e0 = 0.3 }}\n"
        ))
        .unwrap();
        assert_eq!(c.simulation.rates, RateDistribution::Fixed { e1: 0.2, e0: 0.3 });
    }
}
