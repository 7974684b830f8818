//! Scoring against a noisy reference instead of the ground truth.

use dts_core::surrogate::{expected_surrogate_given_truth, surrogate_score, surrogate_variance};
use dts_core::{ErrorRates, Prior, Report, ScoringRule};

fn main() -> dts_core::Result<()> {
    let brier = ScoringRule::brier();
    let report = Report::Prediction(0.8);
    let prior = Prior::from_p1(0.6)?;

    for (e1, e0) in [(0.0, 0.0), (0.3, 0.2), (0.6, 0.7)] {
        let rates = ErrorRates::new(e1, e0)?;
        let on_one = surrogate_score(&brier, report, true, rates)?;
        let on_zero = surrogate_score(&brier, report, false, rates)?;
        let unbiased = expected_surrogate_given_truth(&brier, report, true, rates)?;
        let var = surrogate_variance(&brier, report, rates, prior)?;
        println!("e=({e1}, {e0}): phi(z=1)={on_one:.4} phi(z=0)={on_zero:.4} E[phi|y=1]={unbiased:.4} var={var:.4}");
    }
    println!("brier(0.8, y=1) = {:.4}", brier.score(report, true)?);

    // a channel with e1 + e0 = 1 says nothing about y
    let useless = ErrorRates::new(0.5, 0.5)?;
    match surrogate_score(&brier, report, true, useless) {
        Err(e) => println!("uninformative reference: {e}"),
        Ok(v) => println!("unexpected score {v}"),
    }
    Ok(())
}
