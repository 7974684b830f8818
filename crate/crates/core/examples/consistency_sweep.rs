//! Estimation error of the pool's error rates as the number of tasks grows.

use dts_core::bench::{run_consistency_sweep, without_replacement_bias};
use dts_core::data::RateDistribution;
use dts_core::{Prior, PriorMode};

fn main() -> dts_core::Result<()> {
    let prior = Prior::from_p1(0.6)?;
    let rates = RateDistribution::Jittered {
        e1: 0.2,
        e0: 0.3,
        spread: 0.1,
    };
    let mode = PriorMode::OneBit {
        zero_is_majority: prior.zero_is_majority(),
    };

    let cells = run_consistency_sweep(prior, &rates, &[500, 2_000, 8_000], &[50], 20, mode, 7)?;
    for c in &cells {
        println!(
            "K={:>5} N={}: median max-error {:.4} [{:.4}, {:.4}], exact-moment error {:.1e}",
            c.tasks, c.agents, c.median_error, c.q25, c.q75, c.exact_error
        );
    }
    for row in without_replacement_bias(prior, &rates, &[5, 10, 200], mode, 7)? {
        println!(
            "N={:>3}: moment bias {:.2e}, rate error {:.2e}",
            row.agents, row.moment_bias, row.rate_error
        );
    }
    Ok(())
}
