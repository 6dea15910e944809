//! Seeded Monte Carlo runs of the optimal protocol.
//!
//! Exact readout distributions come from the simulator; each shot draws from
//! them by inverse CDF using counter-based randomness keyed on
//! `(seed, shot index)`, so any sharding of the shot range gives identical
//! totals.

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{apply, Circuit};
use crate::error::{Error, Result};
use crate::linalg::StateVector;
use crate::oracle::{canonical_one_bit_family, BoolFunc};
use crate::protocol::{full_protocol_circuit, full_protocol_distribution};
use crate::rng::CounterRng;

const SHARD: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShotRecord {
    pub hidden_function_index: usize,
    pub outcome: usize,
    /// Outcome `m` reports `f_m`.
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSummary {
    pub shots: u64,
    pub successes: u64,
    pub frequency: f64,
    pub std_error: f64,
    pub seed: u64,
}

impl SampleSummary {
    fn new(shots: u64, successes: u64, seed: u64) -> Self {
        let frequency = successes as f64 / shots as f64;
        Self {
            shots,
            successes,
            frequency,
            std_error: (frequency * (1.0 - frequency) / shots as f64).sqrt(),
            seed,
        }
    }
}

/// Index of the first outcome whose cumulative probability exceeds `u`.
fn inverse_cdf(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Roundoff left `u` above the total mass: take the last possible outcome.
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}

/// Shot generator for the canonical four-function experiment.
#[derive(Debug, Clone)]
pub struct CanonicalSampler {
    distributions: Vec<Vec<f64>>,
    rng: CounterRng,
}

impl CanonicalSampler {
    pub fn new(seed: u64) -> Result<Self> {
        let distributions = canonical_one_bit_family()
            .members()
            .iter()
            .map(full_protocol_distribution)
            .collect::<Result<_>>()?;
        Ok(Self {
            distributions,
            rng: CounterRng::new(seed),
        })
    }

    /// Shot `index` uses draws `2*index` (hidden function) and `2*index + 1`
    /// (readout).
    pub fn shot(&self, index: u64) -> ShotRecord {
        self.shots(index..index + 1).next().unwrap()
    }

    /// Consecutive shots, read from one sequential stream.
    pub fn shots(&self, range: std::ops::Range<u64>) -> impl Iterator<Item = ShotRecord> + '_ {
        let mut s = self.rng.stream_at(2 * range.start);
        range.map(move |_| {
            let hidden = s.next_index(self.distributions.len());
            let outcome = inverse_cdf(&self.distributions[hidden], s.next_f64());
            ShotRecord {
                hidden_function_index: hidden,
                outcome,
                correct: outcome == hidden,
            }
        })
    }
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be >= 1".into()));
    }
    Ok(())
}

fn shards(shots: u64) -> impl ParallelIterator<Item = std::ops::Range<u64>> {
    (0..shots.div_ceil(SHARD))
        .into_par_iter()
        .map(move |k| k * SHARD..((k + 1) * SHARD).min(shots))
}

/// Uniformly random hidden function per shot, full protocol, decoding table.
pub fn run_shots(shots: u64, seed: u64) -> Result<SampleSummary> {
    check_shots(shots)?;
    let sampler = CanonicalSampler::new(seed)?;
    let successes = shards(shots)
        .map(|r| sampler.shots(r).filter(|s| s.correct).count() as u64)
        .sum();
    Ok(SampleSummary::new(shots, successes, seed))
}

/// Readout histogram of `circuit` applied to `input`; shot `i` uses draw `i`.
pub fn sample_circuit(
    circuit: &Circuit,
    input: &StateVector,
    shots: u64,
    seed: u64,
) -> Result<Vec<u64>> {
    check_shots(shots)?;
    let probs = apply(circuit, input)?.probabilities();
    let rng = CounterRng::new(seed);
    let dim = probs.len();
    Ok(shards(shots)
        .map(|r| {
            let mut h = vec![0u64; dim];
            let mut s = rng.stream_at(r.start);
            for _ in r {
                h[inverse_cdf(&probs, s.next_f64())] += 1;
            }
            h
        })
        .reduce(
            || vec![0u64; dim],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        ))
}

/// Readout histogram of the full protocol with a fixed hidden function.
pub fn run_shots_fixed(f: &BoolFunc, shots: u64, seed: u64) -> Result<Vec<u64>> {
    let c = full_protocol_circuit(f)?;
    sample_circuit(&c, &StateVector::zero(2), shots, seed)
}
