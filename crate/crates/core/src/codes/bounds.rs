//! Union bounds on the post-decoding bit error rate of the algebraic codes.
//!
//! Binomial tails are summed in the log domain so that block lengths up to
//! 10^4 and probabilities down to 1e-300 neither overflow nor underflow.

use super::bch::BchCode;
use super::rs::RsCode;
use crate::channel::{error_rate_closed_form, ChannelParams};
use crate::numerics::log_sum_exp;
use crate::{Error, Result};

/// Lowest SNR at which the closed-form symbol error rate is trusted.
pub const BOUND_MIN_GAMMA_DB: f64 = 10.0;

/// `ln C(n, i)`.
pub fn ln_binomial(n: usize, i: usize) -> f64 {
    if i > n {
        return f64::NEG_INFINITY;
    }
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(i as f64 + 1.0) - libm::lgamma((n - i) as f64 + 1.0)
}

/// `ln sum_{i=t+1}^{blocks} (w i / n) C(blocks, i) p^i (1-p)^{blocks-i}`,
/// the expected fraction of `n` positions left wrong when every failure
/// leaves its `i` erroneous blocks, each worth `w` positions.
pub fn ln_failure_tail(blocks: usize, t: usize, ln_p: f64, ln_q: f64, w: f64, n: f64) -> f64 {
    if ln_p == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let terms: Vec<f64> = (t + 1..=blocks)
        .map(|i| (w * i as f64 / n).ln() + ln_binomial(blocks, i) + i as f64 * ln_p + (blocks - i) as f64 * ln_q)
        .collect();
    log_sum_exp(&terms)
}

/// `(ln p, ln(1-p))` for a probability.
fn ln_pq(p: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    Ok((p.ln(), (-p).ln_1p()))
}

fn check_snr(params: &ChannelParams) -> Result<f64> {
    if params.gamma_db() < BOUND_MIN_GAMMA_DB {
        return Err(Error::Domain(format!(
            "union bounds need gamma >= {BOUND_MIN_GAMMA_DB} dB, got {:.2} dB",
            params.gamma_db()
        )));
    }
    Ok(error_rate_closed_form(params))
}

/// Uncoded bit error rate under Gray labelling: one bit per symbol error.
pub fn uncoded_bit_error_rate(params: &ChannelParams) -> Result<f64> {
    Ok(check_snr(params)? / params.bits_per_frame())
}

/// RS bit error rate after bounded-distance decoding, where each field
/// symbol packs `ell` photons: symbol error `1-(1-Pe)^ell`, decoded symbol
/// error rate by the union bound, mapped back to one photon and one bit.
pub fn union_bound_rs(params: &ChannelParams, code: &RsCode, ell: usize) -> Result<f64> {
    if ell == 0 {
        return Err(Error::Domain("ell must be positive".into()));
    }
    let pe = check_snr(params)?;
    let (_, ln_q) = ln_pq(pe)?;
    let ln_q_in = ell as f64 * ln_q;
    let ln_p_in = (-ln_q_in.exp_m1()).ln();
    let n = code.n();
    let ln_p_rs = ln_failure_tail(n, code.t(), ln_p_in, ln_q_in, 1.0, n as f64);
    let p_rs = ln_p_rs.exp();
    let p_out = -((-p_rs).ln_1p() / ell as f64).exp_m1();
    Ok(p_out / params.bits_per_frame())
}

/// How many coded bits one wrong bin flips inside its `m`-bit block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockErrorModel {
    /// Gray labelling with one-bin slips: one bit per wrong block.
    #[default]
    OneBit,
    /// Pessimistic comparison: two bits per wrong block.
    TwoBits,
}

/// Binary BCH bit error rate after bounded-distance decoding, with `n/m`
/// photon blocks of `m` bits each.
pub fn union_bound_bch(params: &ChannelParams, code: &BchCode, model: BlockErrorModel) -> Result<f64> {
    let pe = check_snr(params)?;
    let m = params.n_bins().trailing_zeros() as usize;
    if !params.n_bins().is_power_of_two() || !code.n().is_multiple_of(m) {
        return Err(Error::Domain(format!("N = {} does not pack into length {}", params.n_bins(), code.n())));
    }
    let blocks = code.n() / m;
    let (ln_p, ln_q) = ln_pq(pe)?;
    let (w, t) = match model {
        BlockErrorModel::OneBit => (1.0, code.t()),
        // Decoding fails once 2i > t.
        BlockErrorModel::TwoBits => (2.0, code.t() / 2),
    };
    Ok(ln_failure_tail(blocks, t, ln_p, ln_q, w, code.n() as f64).exp())
}
