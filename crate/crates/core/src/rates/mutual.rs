//! Mutual information between Alice's bin and Bob's observation.

use super::kernel::{transition_matrix, SoftChannel};
use super::TransitionMatrix;
use crate::channel::ChannelParams;
use crate::numerics::{
    antiderivative_q, antiderivative_q2, entropy_binary, entropy_ternary, gaussian_tail, integrate_breaks,
    integrate_fallible, QuadratureSpec, BETA,
};
use crate::{Error, Result};
use std::f64::consts::PI;

fn plog2p(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// `I(bin_A; bin_B) = H(prior) + sum_i prior_i sum_j p_ij log2 p_ij`.
pub fn mutual_info_hard(params: &ChannelParams) -> Result<f64> {
    Ok(mutual_info_from_matrix(&transition_matrix(params)?))
}

pub(crate) fn mutual_info_from_matrix(t: &TransitionMatrix) -> f64 {
    let cond: f64 =
        t.p.iter().zip(&t.prior.probs).map(|(row, &pi)| pi * row.iter().map(|&p| plog2p(p)).sum::<f64>()).sum();
    t.prior.entropy() + cond
}

/// Uniform-prior approximation keeping only transitions within distance `d`:
/// `log2 N + (1/N) sum_{|i-j| <= d} p_ij log2 p_ij`.
pub fn mutual_info_hard_truncated(params: &ChannelParams, d: usize) -> Result<f64> {
    let t = transition_matrix(params)?;
    Ok(truncated_from_matrix(&t, d))
}

pub(crate) fn truncated_from_matrix(t: &TransitionMatrix, d: usize) -> f64 {
    let n = t.n_bins();
    let mut s = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(d)..n.min(i + d + 1) {
            s += plog2p(t.p[i][j]);
        }
    }
    (n as f64).log2() + s / n as f64
}

/// First-order high-SNR transition law and prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighSnrLaw {
    /// `p_01 = p_{N-1,N-2}`, the edge bins' single neighbour.
    pub p_edge: f64,
    /// `p_{i,i+1} = p_{i,i-1}` for interior bins.
    pub p_interior: f64,
    /// `prior_0 = prior_{N-1}`.
    pub prior_edge: f64,
    /// Prior of every interior bin.
    pub prior_interior: f64,
}

impl HighSnrLaw {
    pub fn new(params: &ChannelParams) -> Self {
        let s = params.sigma();
        let n = params.n_bins() as f64;
        let den = n * (1.0 - 2.0 * BETA * s / n);
        Self {
            p_edge: (s / PI.sqrt()) / (1.0 - BETA * s),
            p_interior: s / PI.sqrt(),
            prior_edge: (1.0 - BETA * s) / den,
            prior_interior: 1.0 / den,
        }
    }
}

/// High-SNR closed form for the hard-output mutual information.
pub fn mutual_info_hard_highsnr(params: &ChannelParams) -> Result<f64> {
    let s = params.sigma();
    let n = params.n_bins() as f64;
    let sb = s / n;
    let den = n * (1.0 - 2.0 * BETA * sb);
    let edge = 1.0 - BETA * s;
    if edge <= 0.0 || 1.0 - 2.0 * BETA * sb <= 0.0 {
        return Err(Error::Domain(format!("high-SNR expansion undefined at sigma = {s}")));
    }
    let law = HighSnrLaw::new(params);
    Ok((n - 2.0 * BETA * s) / den * (n * (1.0 - 2.0 * BETA * sb)).log2()
        - 2.0 * edge / den * edge.log2()
        - 2.0 * edge / den * entropy_binary(law.p_edge)?
        - (n - 2.0) / den * entropy_ternary(law.p_interior)?)
}

/// Five-tap circular approximation of the transition law, from unit-frame
/// integrals `I1 = int Q(v/s)`, `I2 = int Q(v/s)^2`, `I3 = int Q(v/s) Q((1-v)/s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularLaw {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

impl CircularLaw {
    pub fn new(sigma: f64) -> Result<Self> {
        let a = 1.0 / sigma;
        let i1 = antiderivative_q(a, 1.0) - antiderivative_q(a, 0.0);
        let i2 = antiderivative_q2(a, 1.0) - antiderivative_q2(a, 0.0);
        let i3 = integrate_breaks(
            |v| gaussian_tail(v * a) * gaussian_tail((1.0 - v) * a),
            &[0.0, 0.5, 1.0],
            &QuadratureSpec::default(),
        )?;
        let p1 = 2.0 * (i1 - i2 - i3);
        let p2 = 2.0 * i3;
        let p0 = 1.0 - 2.0 * p1 - 2.0 * p2;
        if p0 < 0.0 || p1 < 0.0 {
            return Err(Error::Domain(format!("circular law has negative mass at sigma = {sigma}")));
        }
        Ok(Self { p0, p1, p2 })
    }
}

/// `log2 N + sum_{j=-2..2} p_0j log2 p_0j` for the circular law.
pub fn mutual_info_hard_circular(params: &ChannelParams) -> Result<f64> {
    let c = CircularLaw::new(params.sigma())?;
    Ok(params.bits_per_frame() + plog2p(c.p0) + 2.0 * plog2p(c.p1) + 2.0 * plog2p(c.p2))
}

/// Soft-output mutual information
/// `I(bin_A; Y) = H(prior) - (1/D) int sum_i g_i(y) log2(G(y)/g_i(y)) dy`.
pub fn mutual_info_soft(params: &ChannelParams) -> Result<f64> {
    let ch = SoftChannel::new(params)?;
    Ok(ch.prior().entropy() - soft_equivocation(&ch)?)
}

/// `H(bin_A | Y)` in bits. The integrand is symmetric about `N/2`, so only
/// the left half is integrated.
pub(crate) fn soft_equivocation(ch: &SoftChannel) -> Result<f64> {
    let params = ch.params();
    let n = params.n_bins();
    let half = n as f64 / 2.0;
    let mut pts: Vec<f64> = params.frame_breakpoints().into_iter().filter(|&x| x < half).collect();
    pts.push(half);
    let spec = QuadratureSpec::default().with_tol(1e-10, 1e-9);
    let integral = integrate_fallible(
        |y| {
            let mut g = vec![0.0; n];
            ch.kernel(y, &mut g)?;
            let lt = g.iter().sum::<f64>().log2();
            Ok(g.iter().filter(|&&x| x > 0.0).map(|&x| x * (lt - x.log2())).sum())
        },
        &pts,
        &spec,
    )?;
    Ok(2.0 * integral / ch.validity_integral())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn db(n: usize, g: f64) -> ChannelParams {
        ChannelParams::from_gamma_db(n, g).unwrap()
    }

    #[test]
    fn noiseless_limits() {
        let p = ChannelParams::new(8, 1e-9).unwrap();
        assert!((mutual_info_hard(&p).unwrap() - 3.0).abs() < 1e-4);
        assert!((mutual_info_hard_highsnr(&p).unwrap() - 3.0).abs() < 1e-6);
        assert!((mutual_info_hard_circular(&p).unwrap() - 3.0).abs() < 1e-6);
        let p = ChannelParams::new(8, 1e-7).unwrap();
        assert!((mutual_info_soft(&p).unwrap() - 3.0).abs() < 1e-3);
    }

    #[test]
    fn hard_limit_anchor() {
        let v = mutual_info_hard(&db(8, 12.61)).unwrap();
        assert!((v - 2.0).abs() < 0.005, "{v}");
    }

    #[test]
    fn soft_limit_anchor() {
        let v = mutual_info_soft(&db(8, 10.45)).unwrap();
        assert!((v - 2.0).abs() < 0.01, "{v}");
    }

    #[test]
    fn high_snr_expansion_window() {
        let p = db(8, 15.0);
        let exact = mutual_info_hard(&p).unwrap();
        assert!((mutual_info_hard_highsnr(&p).unwrap() - exact).abs() < 0.01);
        // Past its validity window the expansion drifts; it is only asked to exist.
        assert!(mutual_info_hard_highsnr(&db(8, 5.0)).is_ok());
        let p = ChannelParams::new(8, 0.02).unwrap();
        let exact = mutual_info_hard(&p).unwrap();
        assert!((mutual_info_hard_highsnr(&p).unwrap() - exact).abs() < 1e-4);
    }

    #[test]
    fn truncation_keeps_more_terms_as_width_grows() {
        let t = transition_matrix(&db(8, 10.0)).unwrap();
        let widths: Vec<f64> = (0..8).map(|d| truncated_from_matrix(&t, d)).collect();
        assert!(widths.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert_eq!(truncated_from_matrix(&t, 7), truncated_from_matrix(&t, 100));
    }

    #[test]
    fn circular_law_sums_to_one() {
        let c = CircularLaw::new(0.1).unwrap();
        assert!((c.p0 + 2.0 * c.p1 + 2.0 * c.p2 - 1.0).abs() < 1e-15);
        assert!(c.p2 < c.p1 && c.p1 < c.p0);
    }

    #[test]
    fn hard_is_monotone_and_below_soft() {
        let mut last = 0.0;
        for g in (0..=45).step_by(5) {
            let p = db(4, g as f64);
            let h = mutual_info_hard(&p).unwrap();
            let s = mutual_info_soft(&p).unwrap();
            assert!(h >= last - 1e-9);
            assert!(h <= s + 1e-9, "{g} dB: hard {h} soft {s}");
            last = h;
        }
    }
}
