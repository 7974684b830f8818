//! Estimating a reference pool's aggregate error rates from matching-on-1
//! statistics, without ground truth.
//!
//! Convention: `u = Pr[report = 1 | y = 0]` and `v = Pr[report = 1 | y = 1]`,
//! so the pool's rates are `e0 = u` and `e1 = 1 - v`. The three statistics are
//!
//! ```text
//! c1 = Pr[z1 = 1]            = p0 u   + p1 v
//! c2 = Pr[z1 = z2 = 1]       = p0 u^2 + p1 v^2
//! c3 = Pr[z1 = z2 = z3 = 1]  = p0 u^3 + p1 v^3
//! ```
//!
//! `u` and `v` are the roots of `t^2 - a t + b` with
//! `a = (c3 - c1 c2) / (c2 - c1^2)` and `b = (c1 c3 - c2^2) / (c2 - c1^2)`.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::{check_prob, Prior};
use crate::seed::{self, Stream};
use crate::surrogate::ErrorRates;

pub const DEFAULT_KAPPA: f64 = 0.05;
/// `|c2 - c1^2|` at or below this is treated as an independent (uninformative) pool.
pub const DEGENERACY_EPS: f64 = 1e-9;
/// Negative discriminants this small are sampling noise and clamp to zero.
pub const DISCRIMINANT_TOL: f64 = 1e-9;
/// `|p0 - p1|` at or below this counts as a uniform prior.
pub const UNIFORM_PRIOR_TOL: f64 = 1e-9;
pub const DEFAULT_MIN_TASKS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Moments {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        check_prob("c1", c1)?;
        check_prob("c2", c2)?;
        check_prob("c3", c3)?;
        Ok(Moments { c1, c2, c3 })
    }

    /// `c2 - c1^2`, the pool's covariance across two reports on one task.
    pub fn denominator(&self) -> f64 {
        self.c2 - self.c1 * self.c1
    }

    /// `(a, b)` = (sum, product) of the two class-conditional rates.
    fn sum_product(&self) -> Result<(f64, f64)> {
        let den = self.denominator();
        if den.abs() <= DEGENERACY_EPS {
            return Err(Error::DegenerateMoments { value: den });
        }
        let a = (self.c3 - self.c1 * self.c2) / den;
        let b = (self.c1 * self.c3 - self.c2 * self.c2) / den;
        Ok((a, b))
    }
}

/// How much the mechanism knows about the prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PriorMode {
    Known {
        prior: Prior,
    },
    /// Only `1(P0 > 0.5)` is known.
    OneBit {
        zero_is_majority: bool,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub denominator: f64,
    pub sum_rates: Option<f64>,
    pub product_rates: Option<f64>,
    pub discriminant: Option<f64>,
    pub tasks: Option<usize>,
    pub degenerate: bool,
    pub clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub e0_hat: f64,
    pub e1_hat: f64,
    pub p0_hat: Option<f64>,
    pub informative: bool,
    #[serde(flatten)]
    pub diagnostics: Diagnostics,
}

impl EstimationResult {
    pub fn rates(&self) -> ErrorRates {
        ErrorRates::new(self.e1_hat, self.e0_hat).expect("estimates are clamped to [0, 1]")
    }

    fn from_uv(u: f64, v: f64, kappa: f64, mut diagnostics: Diagnostics) -> Self {
        let e0 = u.clamp(0.0, 1.0);
        let e1 = (1.0 - v).clamp(0.0, 1.0);
        diagnostics.clamped |= e0 != u || e1 != 1.0 - v;
        EstimationResult {
            e0_hat: e0,
            e1_hat: e1,
            p0_hat: None,
            informative: is_informative(ErrorRates::new(e1, e0).unwrap(), kappa),
            diagnostics,
        }
    }

    /// Stand-in when the orientation cannot be decided (estimated prior at
    /// one half): the pool is treated as uninformative.
    pub fn ambiguous(m: &Moments) -> Self {
        let diag = Diagnostics {
            denominator: m.denominator(),
            ..Diagnostics::default()
        };
        EstimationResult::independent(m, diag)
    }

    /// Result for a pool whose reports are independent of `y`: `u = v = c1`.
    fn independent(m: &Moments, diagnostics: Diagnostics) -> Self {
        let c1 = m.c1.clamp(0.0, 1.0);
        EstimationResult {
            e0_hat: c1,
            e1_hat: 1.0 - c1,
            p0_hat: None,
            informative: false,
            diagnostics: Diagnostics {
                degenerate: true,
                ..diagnostics
            },
        }
    }
}

/// `|e1 + e0 - 1| > kappa`.
pub fn is_informative(rates: ErrorRates, kappa: f64) -> bool {
    rates.gap().abs() > kappa
}

/// Population matching statistics of a pool with class-conditional rates `u`, `v`.
pub fn forward_moments(prior: Prior, u: f64, v: f64) -> Result<Moments> {
    check_prob("u", u)?;
    check_prob("v", v)?;
    let (p0, p1) = (prior.p0(), prior.p1());
    Moments::new(
        p0 * u + p1 * v,
        p0 * u * u + p1 * v * v,
        p0 * u * u * u + p1 * v * v * v,
    )
}

/// Exact matching statistics when the reports on a task come from distinct
/// agents drawn without replacement from a heterogeneous pool.
///
/// `us[j]`, `vs[j]` are agent `j`'s rates. The average product over ordered
/// distinct k-tuples is `k! e_k / N^(k)` with `e_k` the elementary symmetric
/// polynomial.
pub fn pool_moments(prior: Prior, us: &[f64], vs: &[f64]) -> Result<Moments> {
    if us.len() != vs.len() {
        return Err(Error::AgentSetMismatch);
    }
    let n = us.len();
    if n < 3 {
        return Err(Error::TooFewAgents(n));
    }
    let falling = |k: usize| (0..k).map(|i| (n - i) as f64).product::<f64>();
    let distinct = |xs: &[f64]| {
        let (mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0);
        for &x in xs {
            s1 += x;
            s2 += x * x;
            s3 += x * x * x;
        }
        let e2 = (s1 * s1 - s2) / 2.0;
        let e3 = (s1 * s1 * s1 - 3.0 * s1 * s2 + 2.0 * s3) / 6.0;
        (s1 / n as f64, 2.0 * e2 / falling(2), 6.0 * e3 / falling(3))
    };
    let (u1, u2, u3) = distinct(us);
    let (v1, v2, v3) = distinct(vs);
    let (p0, p1) = (prior.p0(), prior.p1());
    Moments::new(
        (p0 * u1 + p1 * v1).clamp(0.0, 1.0),
        (p0 * u2 + p1 * v2).clamp(0.0, 1.0),
        (p0 * u3 + p1 * v3).clamp(0.0, 1.0),
    )
}

/// Running counts of matching-on-1 events over positionally ordered triples.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MomentCounts {
    pub tasks: usize,
    pub first: usize,
    pub pair: usize,
    pub triple: usize,
}

impl MomentCounts {
    pub fn add(&mut self, ordered: [bool; 3]) {
        self.tasks += 1;
        self.first += ordered[0] as usize;
        self.pair += (ordered[0] && ordered[1]) as usize;
        self.triple += (ordered[0] && ordered[1] && ordered[2]) as usize;
    }

    pub fn remove(&mut self, ordered: [bool; 3]) {
        self.tasks -= 1;
        self.first -= ordered[0] as usize;
        self.pair -= (ordered[0] && ordered[1]) as usize;
        self.triple -= (ordered[0] && ordered[1] && ordered[2]) as usize;
    }

    pub fn moments(&self, min_tasks: usize) -> Result<Moments> {
        if self.tasks < min_tasks.max(1) {
            return Err(Error::InsufficientTasks {
                found: self.tasks,
                required: min_tasks.max(1),
            });
        }
        let k = self.tasks as f64;
        Moments::new(self.first as f64 / k, self.pair as f64 / k, self.triple as f64 / k)
    }
}

/// Seeded uniform permutation of a task's three reports, so that positions
/// `r1, r2, r3` carry no systematic assignment order.
pub fn order_triple(task_key: u64, seed: u64, reports: [bool; 3]) -> [bool; 3] {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let p = PERMS[seed::rng(seed, Stream::Shuffle, task_key, 0).gen_range(0..6)];
    [reports[p[0]], reports[p[1]], reports[p[2]]]
}

/// Empirical matching statistics from per-task report triples.
///
/// Each item is `(task_key, reports)`; the key seeds the position shuffle so a
/// task is ordered the same way in every leave-one-out subset.
pub fn estimate_moments<'a, I>(tasks: I, min_tasks: usize, seed: u64) -> Result<Moments>
where
    I: IntoIterator<Item = (u64, &'a [bool])>,
{
    let mut counts = MomentCounts::default();
    for (key, reports) in tasks {
        let triple: [bool; 3] = reports.try_into().map_err(|_| Error::MalformedTriple {
            task: key.to_string(),
            len: reports.len(),
        })?;
        counts.add(order_triple(key, seed, triple));
    }
    counts.moments(min_tasks)
}

/// Closed-form rates when the prior is known.
pub fn solve_known_prior(m: &Moments, prior: Prior, kappa: f64) -> Result<EstimationResult> {
    if !prior.is_proper() {
        return Err(Error::InvalidPrior {
            p0: prior.p0(),
            p1: prior.p1(),
        });
    }
    if prior.is_uniform(UNIFORM_PRIOR_TOL) {
        return Err(Error::UniformPrior);
    }
    let mut diag = Diagnostics {
        denominator: m.denominator(),
        ..Diagnostics::default()
    };
    let Ok((a, b)) = m.sum_product() else {
        return Ok(EstimationResult::independent(m, diag));
    };
    diag.sum_rates = Some(a);
    diag.product_rates = Some(b);
    let (p0, p1) = (prior.p0(), prior.p1());
    let u = (a * p1 - m.c1) / (p1 - p0);
    let v = (m.c1 - a * p0) / (p1 - p0);
    let mut out = EstimationResult::from_uv(u, v, kappa, diag);
    out.p0_hat = None;
    Ok(out)
}

/// Recovers `(p0, e0, e1)` from the three statistics plus `1(P0 > 0.5)`.
///
/// The statistics alone fix `{u, v}` as an unordered pair; the two orderings
/// are mirror worlds with priors `p0` and `1 - p0`, and the bit picks one.
pub fn solve_unknown_prior(m: &Moments, zero_is_majority: bool, kappa: f64) -> Result<EstimationResult> {
    let mut diag = Diagnostics {
        denominator: m.denominator(),
        ..Diagnostics::default()
    };
    let Ok((a, b)) = m.sum_product() else {
        return Ok(EstimationResult::independent(m, diag));
    };
    diag.sum_rates = Some(a);
    diag.product_rates = Some(b);
    let mut disc = a * a - 4.0 * b;
    diag.discriminant = Some(disc);
    if disc < 0.0 {
        if disc < -DISCRIMINANT_TOL {
            return Ok(EstimationResult::independent(m, diag));
        }
        disc = 0.0;
    }
    let root = disc.sqrt();
    let (lo, hi) = ((a - root) / 2.0, (a + root) / 2.0);
    if hi - lo <= DEGENERACY_EPS {
        return Ok(EstimationResult::independent(m, diag));
    }
    // world with u = lo, v = hi; its mirror has prior 1 - p0
    let p0_low = (m.c1 - hi) / (lo - hi);
    if (p0_low - 0.5).abs() <= UNIFORM_PRIOR_TOL {
        return Err(Error::AmbiguousPrior { p0: p0_low });
    }
    let (u, v, p0) = if (p0_low > 0.5) == zero_is_majority {
        (lo, hi, p0_low)
    } else {
        (hi, lo, 1.0 - p0_low)
    };
    let p0_clamped = p0.clamp(0.0, 1.0);
    diag.clamped |= p0_clamped != p0;
    let mut out = EstimationResult::from_uv(u, v, kappa, diag);
    out.p0_hat = Some(p0_clamped);
    Ok(out)
}

pub fn solve(m: &Moments, mode: PriorMode, kappa: f64) -> Result<EstimationResult> {
    match mode {
        PriorMode::Known { prior } => solve_known_prior(m, prior, kappa),
        PriorMode::OneBit { zero_is_majority } => solve_unknown_prior(m, zero_is_majority, kappa),
    }
}

/// The fourth matching statistic implied by the first three:
/// `c4 = a c3 - b c2`.
pub fn predict_c4(m: &Moments) -> Result<f64> {
    let (a, b) = m.sum_product()?;
    Ok(m.c3 * a - m.c2 * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn prior(p0: f64) -> Prior {
        Prior::new(p0, 1.0 - p0).unwrap()
    }

    #[test]
    fn forward_examples() {
        let m = forward_moments(prior(0.4), 0.2, 0.7).unwrap();
        assert!(close(m.c1, 0.5, 1e-15));
        assert!(close(m.c2, 0.31, 1e-15));
        assert!(close(m.c3, 0.209, 1e-15));

        let m = forward_moments(prior(0.3), 0.4, 0.4).unwrap();
        assert!(close(m.c1, 0.4, 1e-15) && close(m.c2, 0.16, 1e-15) && close(m.c3, 0.064, 1e-15));

        let m = forward_moments(prior(0.7), 1.0, 1.0).unwrap();
        assert_eq!((m.c1, m.c2, m.c3), (1.0, 1.0, 1.0));
    }

    #[test]
    fn estimate_examples() {
        let t: Vec<(u64, Vec<bool>)> = vec![(0, vec![true, true, true]), (1, vec![false, false, false])];
        let m = estimate_moments(t.iter().map(|(k, r)| (*k, r.as_slice())), 1, 0).unwrap();
        assert_eq!((m.c1, m.c2, m.c3), (0.5, 0.5, 0.5));
    }

    #[test]
    fn estimate_uses_positions() {
        // (1,0,1) and (1,1,0): c1 = 1, c2 = 0.5, c3 = 0 in the given order
        let mut counts = MomentCounts::default();
        counts.add([true, false, true]);
        counts.add([true, true, false]);
        let m = counts.moments(1).unwrap();
        assert_eq!((m.c1, m.c2, m.c3), (1.0, 0.5, 0.0));
    }

    #[test]
    fn estimate_errors() {
        let bad: Vec<(u64, Vec<bool>)> = vec![(3, vec![true, false])];
        assert!(matches!(
            estimate_moments(bad.iter().map(|(k, r)| (*k, r.as_slice())), 1, 0),
            Err(Error::MalformedTriple { len: 2, .. })
        ));
        let few: Vec<(u64, Vec<bool>)> = (0..5).map(|k| (k, vec![true, false, true])).collect();
        assert!(matches!(
            estimate_moments(few.iter().map(|(k, r)| (*k, r.as_slice())), 30, 0),
            Err(Error::InsufficientTasks { found: 5, required: 30 })
        ));
    }

    #[test]
    fn counts_add_remove_roundtrip() {
        let mut c = MomentCounts::default();
        c.add([true, true, false]);
        c.add([true, true, true]);
        c.remove([true, true, false]);
        assert_eq!(
            c,
            MomentCounts {
                tasks: 1,
                first: 1,
                pair: 1,
                triple: 1
            }
        );
    }

    #[test]
    fn triple_order_is_a_uniform_permutation() {
        let mut firsts = [0usize; 3];
        for key in 0..6000u64 {
            let o = order_triple(key, 11, [true, false, false]);
            assert_eq!(o.iter().filter(|x| **x).count(), 1);
            firsts[o.iter().position(|x| *x).unwrap()] += 1;
        }
        for f in firsts {
            assert!((f as f64 / 6000.0 - 1.0 / 3.0).abs() < 0.03);
        }
        assert_eq!(
            order_triple(9, 1, [true, false, true]),
            order_triple(9, 1, [true, false, true])
        );
    }

    #[test]
    fn known_prior_examples() {
        let m = Moments::new(0.5, 0.31, 0.209).unwrap();
        let r = solve_known_prior(&m, prior(0.4), DEFAULT_KAPPA).unwrap();
        assert!(close(r.e0_hat, 0.2, 1e-9) && close(r.e1_hat, 0.3, 1e-9));
        assert!(r.informative && !r.diagnostics.clamped);

        let ones = Moments::new(1.0, 1.0, 1.0).unwrap();
        for p0 in [0.2, 0.4, 0.7] {
            let r = solve_known_prior(&ones, prior(p0), DEFAULT_KAPPA).unwrap();
            assert_eq!((r.e1_hat, r.e0_hat, r.informative), (0.0, 1.0, false));
        }

        let indep = forward_moments(prior(0.3), 0.35, 0.35).unwrap();
        let r = solve_known_prior(&indep, prior(0.3), DEFAULT_KAPPA).unwrap();
        assert!(!r.informative && r.diagnostics.degenerate);
    }

    #[test]
    fn known_prior_rejects_uniform() {
        let m = Moments::new(0.5, 0.31, 0.209).unwrap();
        assert!(matches!(
            solve_known_prior(&m, prior(0.5), 0.05),
            Err(Error::UniformPrior)
        ));
    }

    #[test]
    fn unknown_prior_examples() {
        let m = Moments::new(0.5, 0.31, 0.209).unwrap();
        let r = solve_unknown_prior(&m, false, DEFAULT_KAPPA).unwrap();
        assert!(close(r.diagnostics.sum_rates.unwrap(), 0.9, 1e-12));
        assert!(close(r.diagnostics.product_rates.unwrap(), 0.14, 1e-12));
        assert!(close(r.p0_hat.unwrap(), 0.4, 1e-9));
        assert!(close(r.e0_hat, 0.2, 1e-9) && close(r.e1_hat, 0.3, 1e-9));

        let r = solve_unknown_prior(&m, true, DEFAULT_KAPPA).unwrap();
        assert!(close(r.p0_hat.unwrap(), 0.6, 1e-9));
        assert!(close(r.e0_hat, 0.7, 1e-9) && close(r.e1_hat, 0.8, 1e-9));
        assert!(r.informative);

        let indep = forward_moments(prior(0.3), 0.6, 0.6).unwrap();
        let r = solve_unknown_prior(&indep, true, DEFAULT_KAPPA).unwrap();
        assert!(!r.informative);
    }

    #[test]
    fn unknown_prior_negative_discriminant_is_uninformative() {
        // c2 < c1^2 with a tiny c3: no real pair of rates fits
        let m = Moments::new(0.46, 0.133, 0.003).unwrap();
        let (a, b) = m.sum_product().unwrap();
        assert!(a * a - 4.0 * b < -1e-3);
        let r = solve_unknown_prior(&m, false, DEFAULT_KAPPA).unwrap();
        assert!(!r.informative);
    }

    #[test]
    fn unknown_prior_ambiguous_at_half() {
        let m = forward_moments(prior(0.5), 0.2, 0.7).unwrap();
        assert!(matches!(
            solve_unknown_prior(&m, false, 0.05),
            Err(Error::AmbiguousPrior { .. })
        ));
    }

    #[test]
    fn c4_examples() {
        let m = Moments::new(0.5, 0.31, 0.209).unwrap();
        let c4 = predict_c4(&m).unwrap();
        assert!(close(c4, 0.1447, 1e-12));
        assert!(close(c4, 0.4 * 0.2f64.powi(4) + 0.6 * 0.7f64.powi(4), 1e-12));

        let t = 0.3;
        let m = Moments::new(t, t * t, t * t * t).unwrap();
        assert!(matches!(predict_c4(&m), Err(Error::DegenerateMoments { .. })));
    }

    #[test]
    fn informativeness_examples() {
        let r = |e1, e0| ErrorRates::new(e1, e0).unwrap();
        assert!(is_informative(r(0.3, 0.2), 0.05));
        assert!(!is_informative(r(0.5, 0.5), 1e-6));
        assert!(!is_informative(r(0.52, 0.5), 0.05));
    }

    #[test]
    fn pool_moments_match_forward_for_identical_agents() {
        let us = vec![0.2; 7];
        let vs = vec![0.7; 7];
        let a = pool_moments(prior(0.4), &us, &vs).unwrap();
        let b = forward_moments(prior(0.4), 0.2, 0.7).unwrap();
        assert!(close(a.c1, b.c1, 1e-12) && close(a.c2, b.c2, 1e-12) && close(a.c3, b.c3, 1e-12));
    }

    #[test]
    fn pool_moments_brute_force() {
        let us = [0.1, 0.25, 0.3, 0.15];
        let vs = [0.8, 0.6, 0.75, 0.9];
        let pr = prior(0.35);
        let (mut c2, mut c3, mut n2, mut n3) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                c2 += pr.p0() * us[i] * us[j] + pr.p1() * vs[i] * vs[j];
                n2 += 1.0;
                for k in 0..4 {
                    if k == i || k == j {
                        continue;
                    }
                    c3 += pr.p0() * us[i] * us[j] * us[k] + pr.p1() * vs[i] * vs[j] * vs[k];
                    n3 += 1.0;
                }
            }
        }
        let m = pool_moments(pr, &us, &vs).unwrap();
        assert!(close(m.c2, c2 / n2, 1e-14));
        assert!(close(m.c3, c3 / n3, 1e-14));
    }
}
