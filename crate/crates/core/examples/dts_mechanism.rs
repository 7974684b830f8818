//! Running the full mechanism on a simulated signal-elicitation panel.

use dts_core::sim::{self, AgentParams};
use dts_core::{
    dts_run, AgentStatus, DtsConfig, Elicitation, ErrorRates, Prior, PriorMode, Scenario, ScoringRule, Strategy,
};

fn main() -> dts_core::Result<()> {
    let prior = Prior::from_p1(0.7)?;
    let agents: Vec<AgentParams> = (0..12)
        .map(|i| AgentParams::new(ErrorRates::new(0.05 + 0.02 * i as f64, 0.1).unwrap()))
        .collect();
    let scenario = Scenario {
        prior,
        n_tasks: 20_000,
        strategies: vec![Strategy::truthful(Elicitation::Signal); agents.len()],
        agents,
        seed: 42,
    };
    let run = scenario.run()?;

    let rule = ScoringRule::one_over_prior(prior);
    let config = DtsConfig::new(
        rule,
        PriorMode::OneBit {
            zero_is_majority: false,
        },
    )
    .with_seed(42);
    let table = dts_run(&run.panel, &config)?;
    let truths: Vec<Option<bool>> = run.world.truths.iter().map(|y| Some(*y)).collect();
    let truth = sim::true_scores(&run.panel, &truths, &rule)?;

    println!("{:<5} {:>6} {:>10} {:>10} {:>8}", "agent", "tasks", "dts", "true", "e1");
    for (i, (a, t)) in table.agents.iter().zip(&truth.agents).enumerate() {
        let mean = match a.status {
            AgentStatus::Unscored => "-".to_string(),
            _ => format!("{:.4}", a.mean_score.unwrap()),
        };
        println!(
            "{:<5} {:>6} {:>10} {:>10.4} {:>8.2}",
            run.panel.agent_id(i),
            a.n_tasks,
            mean,
            t.mean_score.unwrap(),
            scenario.agents[i].rates.e1()
        );
    }
    Ok(())
}
