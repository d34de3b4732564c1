//! Trial-by-trial simulation of the swap-window procedure on one elementary
//! link: every slot the source may emit a pair, each photon may survive its
//! channel and be stored, and a trial succeeds when some slot stored both.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::LinkSnapshot;
use crate::devices::memory_efficiency;

/// Trials per random stream; fixed so that results do not depend on how
/// chunks are spread over threads.
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    /// Binomial standard error of the estimate.
    pub standard_error: f64,
    /// Wilson score interval at 95%.
    pub interval: (f64, f64),
}

impl MonteCarloEstimate {
    fn from_counts(trials: u64, successes: u64) -> Self {
        let n = trials as f64;
        let p = successes as f64 / n;
        let z = 1.959_963_984_540_054;
        let denom = 1.0 + z * z / n;
        let centre = (p + z * z / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
        Self {
            trials,
            successes,
            estimate: p,
            standard_error: (p * (1.0 - p) / n).sqrt(),
            interval: ((centre - half).max(0.0), (centre + half).min(1.0)),
        }
    }
}

/// Deviation of an estimate from `expected` in units of the binomial standard
/// error at `expected`.
pub fn z_score(estimate: &MonteCarloEstimate, expected: f64) -> f64 {
    let se = (expected * (1.0 - expected) / estimate.trials as f64).sqrt();
    let diff = estimate.estimate - expected;
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

fn run_trial(rng: &mut ChaCha8Rng, link: &LinkSnapshot, modes: u32, slot_s: f64) -> bool {
    let mut bernoulli = |p: f64| rng.random::<f64>() < p;
    (1..=modes).any(|k| {
        let t_k = k as f64 * slot_s;
        bernoulli(link.source_efficiency)
            && bernoulli(link.channel_efficiencies[0])
            && bernoulli(memory_efficiency(&link.memories[0], t_k))
            && bernoulli(link.channel_efficiencies[1])
            && bernoulli(memory_efficiency(&link.memories[1], t_k))
    })
}

/// Estimates the probability that a window of `modes` slots stores at least
/// one pair. Deterministic for a given seed whatever the thread count.
pub fn monte_carlo_elementary(
    link: &LinkSnapshot,
    modes: u32,
    slot_s: f64,
    trials: u64,
    seed: u64,
) -> MonteCarloEstimate {
    assert!(trials >= 1, "at least one trial is required");
    let chunks = trials.div_ceil(CHUNK);
    let successes: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let n = CHUNK.min(trials - chunk * CHUNK);
            (0..n)
                .filter(|_| run_trial(&mut rng, link, modes, slot_s))
                .count() as u64
        })
        .sum();
    MonteCarloEstimate::from_counts(trials, successes)
}
