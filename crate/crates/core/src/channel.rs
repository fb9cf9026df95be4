//! The jittered time-bin channel.
//!
//! An emission time `U ~ Uniform[0, N)` is observed by Alice as `U + Z1` and by
//! Bob as `U + Z2`, with `Z1, Z2 ~ N(0, sigma^2)` independent. Positions are in
//! bin-width units; a frame is valid for a party when its position lands in
//! `[0, N)`, and the raw-key symbol is the bin index `floor(position)`.

use crate::numerics::{self, integrate_breaks, q_diff, QuadratureSpec};
use crate::rates::RateCurve;
use crate::stream::rng_for;
use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Frame geometry and jitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    n_bins: usize,
    sigma: f64,
}

impl ChannelParams {
    /// `n_bins >= 2` bins per frame, jitter `sigma > 0` in bin widths.
    pub fn new(n_bins: usize, sigma: f64) -> Result<Self> {
        if n_bins < 2 {
            return Err(Error::Domain(format!("need at least 2 bins per frame, got {n_bins}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!("jitter must be positive and finite, got {sigma}")));
        }
        Ok(Self { n_bins, sigma })
    }

    /// Parameters at `gamma = 1/sigma^2` given in dB.
    pub fn from_gamma_db(n_bins: usize, gamma_db: f64) -> Result<Self> {
        Self::new(n_bins, 10f64.powf(-gamma_db / 20.0))
    }

    /// Parameters at `gamma_bar = N^2/sigma^2` given in dB.
    pub fn from_gamma_bar_db(n_bins: usize, gamma_bar_db: f64) -> Result<Self> {
        Self::new(n_bins, n_bins as f64 * 10f64.powf(-gamma_bar_db / 20.0))
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Bits per photon `log2 N`.
    pub fn bits_per_frame(&self) -> f64 {
        (self.n_bins as f64).log2()
    }

    /// Per-bin SNR `1/sigma^2`.
    pub fn gamma(&self) -> f64 {
        1.0 / (self.sigma * self.sigma)
    }

    /// Frame-normalized SNR `N^2 * gamma`.
    pub fn gamma_bar(&self) -> f64 {
        (self.n_bins * self.n_bins) as f64 * self.gamma()
    }

    pub fn gamma_db(&self) -> f64 {
        10.0 * self.gamma().log10()
    }

    pub fn gamma_bar_db(&self) -> f64 {
        10.0 * self.gamma_bar().log10()
    }

    /// `sigma / N`, the jitter relative to the frame.
    pub fn sigma_over_n(&self) -> f64 {
        self.sigma / self.n_bins as f64
    }

    /// Probability that a party observing emission time `u` sees a valid frame.
    pub fn frame_validity(&self, u: f64) -> f64 {
        q_diff(-u / self.sigma, (self.n_bins as f64 - u) / self.sigma)
    }

    /// Probability that emission time `u` is observed in bin `i`.
    pub fn bin_capture(&self, i: usize, u: f64) -> f64 {
        let i = i as f64;
        q_diff((i - u) / self.sigma, (i + 1.0 - u) / self.sigma)
    }

    /// Bin index of a position, with `N` itself folded into the last bin.
    pub fn bin_of(&self, position: f64) -> usize {
        (position.floor().max(0.0) as usize).min(self.n_bins - 1)
    }

    /// Breakpoints for integrals over `[0, N)` of kernels built from
    /// [`frame_validity`](Self::frame_validity) and [`bin_capture`](Self::bin_capture):
    /// bin edges plus points `delta` either side so tail regions get their own panels.
    pub fn frame_breakpoints(&self) -> Vec<f64> {
        let n = self.n_bins as f64;
        let delta = (12.0 * self.sigma).min(0.5);
        let mut pts = vec![0.0];
        for k in 0..self.n_bins {
            let k = k as f64;
            for x in [k + delta, k + 1.0 - delta, k + 1.0] {
                if x > *pts.last().unwrap() && x <= n {
                    pts.push(x);
                }
            }
        }
        pts
    }
}

/// One emitted photon pair as seen by both detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonPairSample {
    pub u: f64,
    pub x_tilde: f64,
    pub y_tilde: f64,
    pub alice_valid: bool,
    pub bob_valid: bool,
}

/// A photon pair for which both frames were valid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftObservation {
    alice_bin: usize,
    bob_position: f64,
    bob_bin: usize,
}

impl SoftObservation {
    /// Fails unless `alice_bin < N` and `0 <= bob_position < N`.
    pub fn new(params: &ChannelParams, alice_bin: usize, bob_position: f64) -> Result<Self> {
        let n = params.n_bins();
        if alice_bin >= n || !(0.0..n as f64).contains(&bob_position) {
            return Err(Error::Domain(format!(
                "observation outside frame: bin {alice_bin}, position {bob_position}, N = {n}"
            )));
        }
        Ok(Self { alice_bin, bob_position, bob_bin: params.bin_of(bob_position) })
    }

    pub fn alice_bin(&self) -> usize {
        self.alice_bin
    }

    pub fn bob_position(&self) -> f64 {
        self.bob_position
    }

    pub fn bob_bin(&self) -> usize {
        self.bob_bin
    }
}

/// Draws one photon pair.
pub fn sample_pair<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> PhotonPairSample {
    let n = params.n_bins as f64;
    let u = rng.random::<f64>() * n;
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    let x_tilde = u + params.sigma * z1;
    let y_tilde = u + params.sigma * z2;
    PhotonPairSample {
        u,
        x_tilde,
        y_tilde,
        alice_valid: (0.0..n).contains(&x_tilde),
        bob_valid: (0.0..n).contains(&y_tilde),
    }
}

/// Draws photon pairs until both frames are valid.
pub fn sample_valid_observation<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> SoftObservation {
    loop {
        let s = sample_pair(params, rng);
        if s.alice_valid && s.bob_valid {
            return SoftObservation {
                alice_bin: params.bin_of(s.x_tilde),
                bob_position: s.y_tilde,
                bob_bin: params.bin_of(s.y_tilde),
            };
        }
    }
}

/// High-SNR symbol error rate `2/sqrt(pi) * (1 - 1/N) / sqrt(gamma)`.
///
/// The dropped terms are `O(exp(-gamma/4))`; below 10 dB they are not
/// negligible and a warning is logged.
pub fn error_rate_closed_form(params: &ChannelParams) -> f64 {
    if params.gamma_db() < 10.0 {
        log::warn!(
            "closed-form error rate used at {:.2} dB; it is a high-SNR expansion valid above 10 dB",
            params.gamma_db()
        );
    }
    2.0 / PI.sqrt() * (1.0 - 1.0 / params.n_bins as f64) / params.gamma().sqrt()
}

/// A Monte Carlo proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub events: u64,
}

impl McEstimate {
    /// Proportion `events / trials`.
    pub fn from_counts(events: u64, trials: u64) -> Self {
        let p = events as f64 / trials as f64;
        Self { estimate: p, std_error: (p * (1.0 - p) / trials as f64).sqrt(), trials, events }
    }
}

/// Symbol error rate over emitted pairs: an error is a pair with both frames
/// valid and differing bins. This is the quantity the closed form expands.
///
/// Stops after `min_error_events` errors; fails with
/// [`Error::BudgetExceeded`] if `max_trials` pairs are drawn first.
pub fn error_rate_monte_carlo<R: Rng + ?Sized>(
    params: &ChannelParams,
    min_error_events: u64,
    max_trials: u64,
    rng: &mut R,
) -> Result<McEstimate> {
    check_event_target(min_error_events)?;
    let (mut events, mut trials) = (0u64, 0u64);
    while events < min_error_events {
        if trials >= max_trials {
            return Err(Error::BudgetExceeded { trials, events });
        }
        let s = sample_pair(params, rng);
        trials += 1;
        if s.alice_valid && s.bob_valid && params.bin_of(s.x_tilde) != params.bin_of(s.y_tilde) {
            events += 1;
        }
    }
    Ok(McEstimate::from_counts(events, trials))
}

/// Symbol error rate conditioned on both frames being valid, i.e. the
/// disagreement rate of [`sample_valid_observation`] draws.
pub fn error_rate_valid_frames<R: Rng + ?Sized>(
    params: &ChannelParams,
    min_error_events: u64,
    max_trials: u64,
    rng: &mut R,
) -> Result<McEstimate> {
    check_event_target(min_error_events)?;
    let (mut events, mut trials) = (0u64, 0u64);
    while events < min_error_events {
        if trials >= max_trials {
            return Err(Error::BudgetExceeded { trials, events });
        }
        let o = sample_valid_observation(params, rng);
        trials += 1;
        if o.alice_bin != o.bob_bin {
            events += 1;
        }
    }
    Ok(McEstimate::from_counts(events, trials))
}

fn check_event_target(min_error_events: u64) -> Result<()> {
    if min_error_events < 100 {
        return Err(Error::Config(format!("need at least 100 error events, got {min_error_events}")));
    }
    Ok(())
}

/// Pairs drawn per Monte Carlo chunk; chunk `c` uses stream `c` of the seed.
pub const MC_CHUNK: u64 = 1 << 16;
/// Chunks evaluated between stopping checks; fixed so results do not depend
/// on the worker count.
pub const MC_BATCH: u64 = 32;

/// Parallel, seed-reproducible version of [`error_rate_monte_carlo`].
///
/// Work is split into fixed chunks on independent streams, and the stop rule
/// is applied after whole batches, so the result depends only on `seed`.
pub fn error_rate_monte_carlo_par(
    params: &ChannelParams,
    min_error_events: u64,
    max_trials: u64,
    seed: u64,
    conditioned_on_valid: bool,
) -> Result<McEstimate> {
    check_event_target(min_error_events)?;
    let (mut events, mut trials) = (0u64, 0u64);
    let mut next_chunk = 0u64;
    while events < min_error_events {
        if trials >= max_trials {
            return Err(Error::BudgetExceeded { trials, events });
        }
        let counts: Vec<(u64, u64)> = (next_chunk..next_chunk + MC_BATCH)
            .into_par_iter()
            .map(|c| {
                let mut rng = rng_for(seed, c);
                let mut e = 0u64;
                let mut t = 0u64;
                for _ in 0..MC_CHUNK {
                    let s = sample_pair(params, &mut rng);
                    let both = s.alice_valid && s.bob_valid;
                    if conditioned_on_valid && !both {
                        continue;
                    }
                    t += 1;
                    if both && params.bin_of(s.x_tilde) != params.bin_of(s.y_tilde) {
                        e += 1;
                    }
                }
                (e, t)
            })
            .collect();
        next_chunk += MC_BATCH;
        for (e, t) in counts {
            events += e;
            trials += t;
        }
    }
    Ok(McEstimate::from_counts(events, trials))
}

/// `P(both frames valid) = (1/N) * integral over [0, N) of validity(u)^2`.
pub fn validity_probability(params: &ChannelParams) -> Result<f64> {
    let spec = QuadratureSpec::default();
    let pts = params.frame_breakpoints();
    let i = integrate_breaks(|u| params.frame_validity(u).powi(2), &pts, &spec)?;
    Ok(i / params.n_bins as f64)
}

/// Least-squares slope of `-ln Pe` against `ln gamma` over the top decade
/// (10 dB) of the curve.
pub fn diversity_order(curve: &RateCurve) -> Result<f64> {
    let pts = curve.points();
    let Some(top) = pts.last().map(|p| p.snr_db) else {
        return Err(Error::InsufficientData("empty curve".into()));
    };
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts
        .iter()
        .filter(|p| p.snr_db >= top - 10.0 - 1e-9 && p.value > 0.0)
        .map(|p| (p.snr_db / 10.0 * std::f64::consts::LN_10, -p.value.ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!("need 3 positive points in the top decade, found {}", xs.len())));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Expected leading-order jitter loss of validity, `2 beta sigma / N` with
/// `beta = (1 + sqrt 2) / (2 sqrt pi)`.
pub fn validity_loss_highsnr(params: &ChannelParams) -> f64 {
    2.0 * numerics::BETA * params.sigma_over_n()
}
