//! Simulate, write reports to CSV, read them back and score.

use dts_core::data::{self, Format};
use dts_core::{dts_run, DtsConfig, Elicitation, Prior, PriorMode, Scenario, ScoringRule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prior = Prior::from_p1(0.6)?;
    let scenario = Scenario::truthful(prior, 10, 10_000, Elicitation::Signal, 5)?;
    let run = scenario.run()?;

    let dir = std::env::temp_dir().join("dts_csv_pipeline");
    std::fs::create_dir_all(&dir)?;
    let reports = dir.join("reports.csv");
    data::write_reports(&reports, &data::panel_records(&run.panel, Some(&run.world.truths)))?;

    let ds = data::to_dataset(&data::load_reports(&reports)?, Elicitation::Signal)?;
    let config = DtsConfig::new(
        ScoringRule::one_over_prior(prior),
        PriorMode::OneBit {
            zero_is_majority: false,
        },
    )
    .with_seed(5);
    let table = dts_run(&ds.panel, &config)?;

    let mut out = Vec::new();
    data::write_scores_to(&mut out, &table, &ds.panel, Format::Csv)?;
    print!("{}", String::from_utf8_lossy(&out));
    println!("reports written to {}", reports.display());
    Ok(())
}
