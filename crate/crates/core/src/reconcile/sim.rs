//! Seeded end-to-end reconciliation simulations.
//!
//! Block `b` draws its photons from stream `rng_for(seed, b)`. Blocks run in
//! fixed batches of [`SIM_BATCH`] across the rayon pool and the stop rule is
//! checked between batches, so results do not depend on the worker count.

use super::{
    alice_emit, bit_distance, bob_reconcile_algebraic, bob_reconcile_soft_with, ldpc_word, photons_per_block, raw_word,
};
use crate::channel::{sample_valid_observation, ChannelParams, SoftObservation};
use crate::codes::{BitDemapper, BpConfig, Code, LdpcCode};
use crate::stream::rng_for;
use crate::{Error, Result};
use rayon::prelude::*;

/// Blocks per parallel batch.
pub const SIM_BATCH: u64 = 64;

/// Stop after `min_events` failed blocks or `max_blocks` blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_events: u64,
    pub max_blocks: u64,
}

impl StopRule {
    pub fn new(min_events: u64, max_blocks: u64) -> Result<Self> {
        if min_events == 0 || max_blocks == 0 {
            return Err(Error::Config("stop rule needs positive event and block budgets".into()));
        }
        Ok(Self { min_events, max_blocks })
    }
}

/// Post-reconciliation error counts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BerEstimate {
    pub blocks: u64,
    /// Blocks left with at least one wrong bit.
    pub block_errors: u64,
    /// Blocks the decoder flagged as failed.
    pub decode_failures: u64,
    pub bits: u64,
    pub bit_errors: u64,
    /// Sum over blocks of squared bit-error counts.
    sum_sq: f64,
    pub iterations: u64,
}

impl BerEstimate {
    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / self.bits.max(1) as f64
    }

    /// Block error rate.
    pub fn bler(&self) -> f64 {
        self.block_errors as f64 / self.blocks.max(1) as f64
    }

    /// Standard error of [`ber`](Self::ber) from the spread of per-block counts,
    /// which accounts for errors arriving in bursts.
    pub fn ber_std_error(&self) -> f64 {
        if self.blocks < 2 {
            return f64::NAN;
        }
        let b = self.blocks as f64;
        let per_block = self.bits as f64 / b;
        let mean = self.bit_errors as f64 / b;
        let var = (self.sum_sq / b - mean * mean).max(0.0) * b / (b - 1.0);
        (var / b).sqrt() / per_block
    }

    pub fn mean_iterations(&self) -> f64 {
        self.iterations as f64 / self.blocks.max(1) as f64
    }

    fn add_block(&mut self, bits: usize, errors: usize, failed: bool, iterations: usize) {
        self.blocks += 1;
        self.bits += bits as u64;
        self.bit_errors += errors as u64;
        self.sum_sq += (errors * errors) as f64;
        self.block_errors += u64::from(errors > 0);
        self.decode_failures += u64::from(failed);
        self.iterations += iterations as u64;
    }
}

/// The valid-frame observations of block `block`.
pub fn block_observations(params: &ChannelParams, photons: usize, seed: u64, block: u64) -> Vec<SoftObservation> {
    let mut rng = rng_for(seed, block);
    (0..photons).map(|_| sample_valid_observation(params, &mut rng)).collect()
}

fn run<F>(stop: StopRule, block: F) -> Result<BerEstimate>
where
    F: Fn(u64) -> Result<(usize, usize, bool, usize)> + Sync,
{
    let mut est = BerEstimate::default();
    let mut next = 0u64;
    while next < stop.max_blocks && est.block_errors < stop.min_events {
        let end = (next + SIM_BATCH).min(stop.max_blocks);
        let batch: Vec<_> = (next..end).into_par_iter().map(&block).collect::<Result<_>>()?;
        for (bits, errors, failed, iters) in batch {
            est.add_block(bits, errors, failed, iters);
        }
        next = end;
    }
    Ok(est)
}

fn bits_per_frame(params: &ChannelParams) -> Result<u32> {
    let n = params.n_bins();
    if !n.is_power_of_two() {
        return Err(Error::Config(format!("Gray labelling needs N = 2^m, got {n}")));
    }
    Ok(n.trailing_zeros())
}

/// RS or BCH reconciliation from Bob's hard bins, with the re-encoding guard on.
pub fn simulate_algebraic(params: &ChannelParams, code: &Code, stop: StopRule, seed: u64) -> Result<BerEstimate> {
    let m = bits_per_frame(params)?;
    let photons = photons_per_block(code, m)?;
    let bits = code.n() * code.symbol_bits() as usize;
    run(stop, |b| {
        let obs = block_observations(params, photons, seed, b);
        let alice_bins: Vec<usize> = obs.iter().map(|o| o.alice_bin()).collect();
        let bob_bins: Vec<usize> = obs.iter().map(|o| o.bob_bin()).collect();
        let alice = raw_word(code, &alice_bins, m)?;
        let bob = raw_word(code, &bob_bins, m)?;
        let msg = alice_emit(&alice, code, photons as u32, [0; 8])?;
        let r = bob_reconcile_algebraic(&bob, &msg, code)?;
        Ok((bits, bit_distance(&r.recovered_word, &alice), !r.success, 0))
    })
}

/// LDPC reconciliation from Bob's positions through `demapper`.
pub fn simulate_ldpc(
    params: &ChannelParams,
    code: &LdpcCode,
    demapper: &BitDemapper,
    cfg: &BpConfig,
    stop: StopRule,
    seed: u64,
) -> Result<BerEstimate> {
    let m = bits_per_frame(params)?;
    if demapper.bits() != m || !code.n().is_multiple_of(m as usize) {
        return Err(Error::Config(format!("length {} does not pack {m}-bit photons", code.n())));
    }
    let photons = code.n() / m as usize;
    let wrapped = Code::Ldpc(code.clone());
    run(stop, |b| {
        let obs = block_observations(params, photons, seed, b);
        let bins: Vec<usize> = obs.iter().map(|o| o.alice_bin()).collect();
        let alice = ldpc_word(&bins, m);
        let msg = alice_emit(&alice, &wrapped, photons as u32, [0; 8])?;
        let r = bob_reconcile_soft_with(&obs, &msg, code, demapper, cfg)?;
        Ok((code.n(), bit_distance(&r.recovered_word, &alice), !r.success, r.iterations_used.unwrap_or(0)))
    })
}

/// Uncoded bit error rate of Gray-labelled hard decisions over valid frames.
pub fn simulate_uncoded(
    params: &ChannelParams,
    photons_per_block: usize,
    stop: StopRule,
    seed: u64,
) -> Result<BerEstimate> {
    let m = bits_per_frame(params)?;
    run(stop, |b| {
        let obs = block_observations(params, photons_per_block, seed, b);
        let errors = obs
            .iter()
            .map(|o| {
                (crate::codes::gray_code(o.alice_bin()) ^ crate::codes::gray_code(o.bob_bin())).count_ones() as usize
            })
            .sum();
        Ok((photons_per_block * m as usize, errors, false, 0))
    })
}
