//! A pool that always reports the same answer carries no information, so
//! everyone scores zero.

use dts_core::dts::assign_tasks;
use dts_core::moments::{self, MomentCounts};
use dts_core::{dts_run, AgentStatus, DtsConfig, Panel, Prior, PriorMode, Report, ScoringRule};

fn main() -> dts_core::Result<()> {
    let prior = Prior::from_p1(0.6)?;
    let assignment = assign_tasks(2_000, 20, 1)?;
    let panel = Panel::new(assignment, vec![[Report::Signal(true); 3]; 2_000])?;

    let mut counts = MomentCounts::default();
    for triple in panel.binary_reports(1) {
        counts.add(triple);
    }
    let m = counts.moments(1)?;
    println!("c1={} c2={} c3={} denominator={}", m.c1, m.c2, m.c3, m.denominator());
    let est = moments::solve(&m, PriorMode::Known { prior }, 0.0)?;
    println!("pool informative: {}", est.informative);

    let config = DtsConfig::new(ScoringRule::one_over_prior(prior), PriorMode::Known { prior }).with_seed(1);
    let table = dts_run(&panel, &config)?;
    let zeroed = table
        .agents
        .iter()
        .filter(|a| a.status == AgentStatus::Uninformative)
        .count();
    let max = table
        .agents
        .iter()
        .filter_map(|a| a.mean_score)
        .fold(0.0f64, |m, s| m.max(s.abs()));
    println!(
        "{zeroed} of {} agents zeroed, largest |mean score| = {max}",
        table.agents.len()
    );
    Ok(())
}
