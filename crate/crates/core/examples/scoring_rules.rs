//! Strictly proper scoring rules on binary outcomes.

use dts_core::scoring::{brier_divergence, expected_score};
use dts_core::{Prior, Report, ScoringRule};

fn main() -> dts_core::Result<()> {
    let prior = Prior::from_p1(0.6)?;
    let rules = [
        ScoringRule::brier(),
        ScoringRule::logarithmic(),
        ScoringRule::spherical(),
    ];

    println!("{:<12} {:>6} {:>9} {:>9}", "rule", "p", "S(p, 1)", "S(p, 0)");
    for rule in &rules {
        for p in [0.1, 0.5, 0.8] {
            let r = Report::Prediction(p);
            println!(
                "{:<12} {:>6.2} {:>9.4} {:>9.4}",
                rule.name(),
                p,
                rule.score(r, true)?,
                rule.score(r, false)?
            );
        }
    }

    // an agent believing Pr[y=1] = 0.7 does best by reporting 0.7
    let belief = 0.7;
    let brier = ScoringRule::brier();
    for p in [0.5, 0.6, 0.7, 0.8, 0.9] {
        let e = expected_score(&brier, Report::Prediction(p), belief)?;
        println!(
            "report {p:.1}: expected brier {e:.4}, divergence from belief {:.4}",
            brier_divergence(p, belief)
        );
    }

    let signal_rule = ScoringRule::one_over_prior(prior);
    for (a, y) in [(true, true), (false, false), (true, false)] {
        println!(
            "1/prior rule: report {} vs outcome {} -> {:.4}",
            a as u8,
            y as u8,
            signal_rule.score(Report::Signal(a), y)?
        );
    }
    Ok(())
}
