//! The `dts` command line.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use crate::bench::{self, DominanceRow, Verdict};
use crate::data::{self, Format, RunConfig};
use crate::dts;
use crate::error::{Error, Result};
use crate::moments::{EstimationResult, PriorMode};
use crate::seed::{self, Stream};
use crate::sim;
use crate::surrogate::ErrorRates;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;

const SCHEMA_HINT: &str = "a minimal config is two lines:\n  elicitation = \"prediction\"   # or \"signal\"\n  rule = \"brier\"               # brier | logarithmic | spherical | one_over_prior | posterior_signal\nsee the README for every key";

#[derive(Debug, Parser)]
#[command(name = "dts", version, about = "Score binary reports without ground truth")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic report panel and its ground truth
    Simulate(Common),
    /// Estimate the reference pool's error rates, overall and leave-one-out
    Estimate(Common),
    /// Score a report file with DTS (and with ground truth when present)
    Score(Common),
    /// Compare DTS with true scores and PTS; sweep estimator consistency
    Bench(Common),
    /// Exact expected payoffs of deviations from truthful reporting
    Dominance(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML run configuration
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the config and DTS_SEED
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output directory; overrides the config and DTS_OUT
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Report CSV for estimate and score; overrides the config
    #[arg(long, value_name = "PATH")]
    pub reports: Option<PathBuf>,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Simulate(c)
            | Command::Estimate(c)
            | Command::Score(c)
            | Command::Bench(c)
            | Command::Dominance(c) => c,
        }
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let common = cli.command.common();
    let config = resolve_config(common)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = common.jobs {
        pool = pool.num_threads(j as usize);
    }
    let pool = pool.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    fs::create_dir_all(&config.out).map_err(|e| Error::io(&config.out, e))?;
    let format = match common.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    pool.install(|| match &cli.command {
        Command::Simulate(_) => simulate(&config),
        Command::Estimate(_) => estimate(&config, format),
        Command::Score(_) => score(&config, format),
        Command::Bench(_) => bench_cmd(&config, format),
        Command::Dominance(_) => dominance(&config, format),
    })
}

fn resolve_config(common: &Common) -> Result<RunConfig> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| Error::Config(format!("--config PATH is required; {SCHEMA_HINT}")))?;
    if !path.exists() {
        return Err(Error::Config(format!(
            "config file {} does not exist; {SCHEMA_HINT}",
            path.display()
        )));
    }
    let mut config = data::load_config(path)?;
    if let Some(s) = common.seed {
        config.seed = s;
    }
    if let Some(o) = &common.out {
        config.out = o.clone();
    }
    if let Some(r) = &common.reports {
        config.reports = Some(r.clone());
    }
    Ok(config)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    info!("writing {}", path.display());
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T], format: Format) -> Result<()> {
    let mut w = create(path)?;
    match format {
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            for r in rows {
                c.serialize(r)?;
            }
            c.flush().map_err(|e| Error::io(path, e))?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w).map_err(|e| Error::io(path, e))?;
            w.flush().map_err(|e| Error::io(path, e))?;
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn simulate(config: &RunConfig) -> Result<()> {
    let sim = config.scenario()?.run()?;
    let records = data::panel_records(&sim.panel, Some(&sim.world.truths));
    data::write_reports(config.out.join("reports.csv"), &records)?;
    let mut w = csv::Writer::from_writer(create(&config.out.join("world.csv"))?);
    w.write_record(["task_id", "ground_truth"])?;
    for (k, y) in sim.world.truths.iter().enumerate() {
        w.write_record([sim.panel.task_id(k), if *y { "1" } else { "0" }])?;
    }
    w.flush().map_err(|e| Error::io(&config.out, e))?;
    info!(
        "simulated {} tasks for {} agents",
        sim.world.truths.len(),
        sim.panel.n_agents()
    );
    Ok(())
}

fn load_dataset(config: &RunConfig) -> Result<data::Dataset> {
    let path = config
        .reports
        .as_ref()
        .ok_or_else(|| Error::Config("no report file: set `reports` in the config or pass --reports".into()))?;
    let records = data::load_reports(path)?;
    data::to_dataset(&records, config.elicitation).map_err(|e| match e {
        e @ (Error::MissingReport { .. } | Error::AgentSetMismatch | Error::NoTasks | Error::TooFewAgents(_)) => {
            Error::Records {
                path: path.clone(),
                errors: vec![e.to_string()],
            }
        }
        other => other,
    })
}

#[derive(Serialize)]
struct EstimateRow {
    agent_id: String,
    n_tasks: usize,
    informative: Option<bool>,
    e0_hat: Option<f64>,
    e1_hat: Option<f64>,
    p0_hat: Option<f64>,
    tasks_used: Option<usize>,
}

impl EstimateRow {
    fn new(agent_id: String, n_tasks: usize, e: Option<EstimationResult>) -> Self {
        EstimateRow {
            agent_id,
            n_tasks,
            informative: e.map(|e| e.informative),
            e0_hat: e.map(|e| e.e0_hat),
            e1_hat: e.map(|e| e.e1_hat),
            p0_hat: e.and_then(|e| e.p0_hat),
            tasks_used: e.and_then(|e| e.diagnostics.tasks),
        }
    }
}

fn estimate(config: &RunConfig, format: Format) -> Result<()> {
    let ds = load_dataset(config)?;
    let (pooled, per_agent) = dts::estimate_pools(&ds.panel, &config.dts_config())?;
    let loads = ds.panel.assignment().loads();
    match format {
        Format::Json => {
            let agents: Vec<_> = per_agent
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    serde_json::json!({
                        "agent_id": ds.panel.agent_id(i),
                        "n_tasks": loads[i],
                        "leave_one_out": e,
                    })
                })
                .collect();
            write_json(
                &config.out.join("estimation.json"),
                &serde_json::json!({ "pooled": pooled, "agents": agents }),
            )
        }
        Format::Csv => {
            let mut rows = vec![EstimateRow::new("*".into(), ds.panel.n_tasks(), pooled)];
            rows.extend(
                per_agent
                    .iter()
                    .enumerate()
                    .map(|(i, e)| EstimateRow::new(ds.panel.agent_id(i).to_string(), loads[i], *e)),
            );
            write_rows(&config.out.join("estimation.csv"), &rows, format)
        }
    }
}

fn score(config: &RunConfig, format: Format) -> Result<()> {
    let ds = load_dataset(config)?;
    let table = dts::dts_run(&ds.panel, &config.dts_config())?;
    let ext = format.extension();
    data::write_scores(&table, &ds.panel, config.out.join(format!("scores.{ext}")), format)?;
    if ds.has_truth() {
        let truth = sim::true_scores(&ds.panel, &ds.truths, &config.rule)?;
        data::write_scores(&truth, &ds.panel, config.out.join(format!("true_scores.{ext}")), format)?;
    }
    let zeroed = table
        .agents
        .iter()
        .filter(|a| a.status == dts::AgentStatus::Uninformative)
        .count();
    let unscored = table
        .agents
        .iter()
        .filter(|a| a.status == dts::AgentStatus::Unscored)
        .count();
    info!(
        "scored {} agents ({zeroed} zeroed, {unscored} unscored)",
        table.agents.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct FidelityRow<'a> {
    seed: u64,
    agent_rank: usize,
    agent_id: &'a str,
    true_score: f64,
    dts_score: f64,
    pts_score: f64,
}

#[derive(Serialize)]
struct RunSummary {
    seed: u64,
    dts_mse: f64,
    dts_mse_ci_low: f64,
    dts_mse_ci_high: f64,
    pts_mse: f64,
    pts_mse_ci_low: f64,
    pts_mse_ci_high: f64,
    dts_rank: Option<f64>,
    pts_rank: Option<f64>,
    within_002: f64,
    unscored: usize,
}

fn bench_cmd(config: &RunConfig, format: Format) -> Result<()> {
    let b = &config.bench;
    let dts_cfg = config.dts_config();
    let mut runs = Vec::with_capacity(b.seeds);
    for s in 0..b.seeds {
        let seed = seed::derive(config.seed, Stream::Sweep, s as u64, 1);
        let scenario = RunConfig { seed, ..config.clone() }.scenario()?;
        runs.push(bench::fidelity_run(
            &scenario,
            &dts::DtsConfig { seed, ..dts_cfg },
            b.bootstrap,
        )?);
        info!("fidelity run {}/{} done", s + 1, b.seeds);
    }

    let mut long = Vec::new();
    for run in &runs {
        let mut order: Vec<usize> = (0..run.agents.len()).collect();
        order.sort_by(|x, y| run.agents[*y].true_mean.total_cmp(&run.agents[*x].true_mean));
        for (rank, &i) in order.iter().enumerate() {
            let a = &run.agents[i];
            long.push(FidelityRow {
                seed: run.seed,
                agent_rank: rank + 1,
                agent_id: &a.agent_id,
                true_score: a.true_mean,
                dts_score: a.dts_mean,
                pts_score: a.pts_mean,
            });
        }
    }
    write_rows(
        &config.out.join(format!("fidelity.{}", format.extension())),
        &long,
        format,
    )?;
    let summaries: Vec<RunSummary> = runs
        .iter()
        .map(|r| RunSummary {
            seed: r.seed,
            dts_mse: r.dts_mse.value,
            dts_mse_ci_low: r.dts_mse.ci_low,
            dts_mse_ci_high: r.dts_mse.ci_high,
            pts_mse: r.pts_mse.value,
            pts_mse_ci_low: r.pts_mse.ci_low,
            pts_mse_ci_high: r.pts_mse.ci_high,
            dts_rank: r.dts_rank,
            pts_rank: r.pts_rank,
            within_002: r.within_002,
            unscored: r.unscored,
        })
        .collect();
    write_rows(
        &config.out.join(format!("runs.{}", format.extension())),
        &summaries,
        format,
    )?;

    let mode = sweep_mode(config);
    let sweep = bench::run_consistency_sweep(
        config.prior,
        &b.sweep_rates,
        &b.sweep_tasks,
        &b.sweep_agents,
        b.sweep_seeds,
        mode,
        config.seed,
    )?;
    write_rows(
        &config.out.join(format!("sweep.{}", format.extension())),
        &sweep,
        format,
    )?;
    let bias = bench::without_replacement_bias(config.prior, &b.sweep_rates, &b.bias_agents, mode, config.seed)?;
    write_rows(&config.out.join(format!("bias.{}", format.extension())), &bias, format)?;

    let ranks = |f: fn(&bench::FidelityRun) -> Option<f64>| runs.iter().filter_map(f).collect::<Vec<_>>();
    write_json(
        &config.out.join("bench_summary.json"),
        &serde_json::json!({
            "runs": runs.len(),
            "median_dts_rank": bench::median(&ranks(|r| r.dts_rank)),
            "median_pts_rank": bench::median(&ranks(|r| r.pts_rank)),
            "median_dts_mse": bench::median(&runs.iter().map(|r| r.dts_mse.value).collect::<Vec<_>>()),
            "median_pts_mse": bench::median(&runs.iter().map(|r| r.pts_mse.value).collect::<Vec<_>>()),
            "median_within_002": bench::median(&runs.iter().map(|r| r.within_002).collect::<Vec<_>>()),
            "sweep_prior_mode": mode,
        }),
    )
}

/// The sweep uses the root-based solver, oriented by the configured prior's
/// majority bit; see the README for why.
fn sweep_mode(config: &RunConfig) -> PriorMode {
    match config.prior_mode {
        PriorMode::OneBit { .. } => config.prior_mode,
        PriorMode::Known { prior } => PriorMode::OneBit {
            zero_is_majority: prior.zero_is_majority(),
        },
    }
}

fn dominance(config: &RunConfig, format: Format) -> Result<()> {
    let b = &config.bench;
    let rates = ErrorRates::new(b.grid_rates[0], b.grid_rates[1])?;
    let rows: Vec<DominanceRow> = bench::run_dominance_grid(rates, b.grid_agents, config.prior, &config.dts_config())?;
    write_rows(
        &config.out.join(format!("dominance.{}", format.extension())),
        &rows,
        format,
    )?;
    let count = |v: Verdict| rows.iter().filter(|r| r.verdict == v).count();
    let violations = count(Verdict::Violation);
    write_json(
        &config.out.join("dominance_summary.json"),
        &serde_json::json!({
            "rows": rows.len(),
            "strict": count(Verdict::Strict),
            "equal": count(Verdict::Equal),
            "eps_close": count(Verdict::EpsClose),
            "weak_zero": count(Verdict::WeakZero),
            "violations": violations,
        }),
    )?;
    if violations > 0 {
        log::warn!("{violations} dominance violations");
    }
    Ok(())
}
