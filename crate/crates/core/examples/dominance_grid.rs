//! Exact expected payoffs of truthful reporting against unilateral deviations.

use dts_core::bench::{run_dominance_grid, Verdict};
use dts_core::{DtsConfig, ErrorRates, Prior, PriorMode, ScoringRule};

fn main() -> dts_core::Result<()> {
    let prior = Prior::from_p1(0.6)?;
    let rates = ErrorRates::new(0.2, 0.3)?;
    let config = DtsConfig::new(
        ScoringRule::brier(),
        PriorMode::OneBit {
            zero_is_majority: false,
        },
    );
    let rows = run_dominance_grid(rates, 50, prior, &config)?;

    for row in rows
        .iter()
        .filter(|r| r.deviation == "flip" || r.deviation == "constant_0.5")
    {
        println!(
            "others {:<20} deviation {:<13} truthful {:>8.4} deviation {:>8.4} {:?}",
            row.profile, row.deviation, row.truthful_value, row.deviation_value, row.verdict
        );
    }
    let violations = rows.iter().filter(|r| r.verdict == Verdict::Violation).count();
    let worst = rows
        .iter()
        .filter(|r| r.verdict == Verdict::Strict)
        .map(|r| r.margin)
        .fold(f64::INFINITY, f64::min);
    println!(
        "{} rows, {violations} violations, smallest strict margin {worst:.5}",
        rows.len()
    );
    Ok(())
}
