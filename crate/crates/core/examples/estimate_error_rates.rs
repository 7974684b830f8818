//! Recovering a pool's error rates from matching statistics on report triples.

use dts_core::moments::{self, MomentCounts};
use dts_core::sim::gen_world;
use dts_core::{Prior, PriorMode};
use rand::Rng;

fn main() -> dts_core::Result<()> {
    let prior = Prior::from_p1(0.6)?;
    let (u, v) = (0.2, 0.7);

    // exact moments round-trip through both solvers
    let exact = moments::forward_moments(prior, u, v)?;
    let known = moments::solve_known_prior(&exact, prior, 0.0)?;
    let one_bit = moments::solve_unknown_prior(&exact, prior.zero_is_majority(), 0.0)?;
    println!("exact moments c1={:.4} c2={:.4} c3={:.4}", exact.c1, exact.c2, exact.c3);
    println!("known prior: e0={:.4} e1={:.4}", known.e0_hat, known.e1_hat);
    println!(
        "one bit:     e0={:.4} e1={:.4} p0={:.4}",
        one_bit.e0_hat,
        one_bit.e1_hat,
        one_bit.p0_hat.unwrap()
    );
    println!("predicted c4 = {:.6}", moments::predict_c4(&exact)?);

    // sampled triples
    let mut rng = dts_core::seed::rng(3, dts_core::seed::Stream::Signals, 0, 0);
    for k in [1_000, 10_000, 100_000] {
        let world = gen_world(prior, k, 9);
        let mut counts = MomentCounts::default();
        for (t, y) in world.truths.iter().enumerate() {
            let p_one = if *y { v } else { u };
            let triple = [
                rng.gen::<f64>() < p_one,
                rng.gen::<f64>() < p_one,
                rng.gen::<f64>() < p_one,
            ];
            counts.add(moments::order_triple(t as u64, 3, triple));
        }
        let m = counts.moments(1)?;
        let est = moments::solve(
            &m,
            PriorMode::OneBit {
                zero_is_majority: false,
            },
            0.0,
        )?;
        println!(
            "K={k:>6}: e0={:.4} e1={:.4} (true {u:.2}, {:.2})",
            est.e0_hat,
            est.e1_hat,
            1.0 - v
        );
    }
    Ok(())
}
