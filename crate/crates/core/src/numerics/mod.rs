//! Special functions, entropies and deterministic quadrature.
//!
//! Every rate in this crate is built from stacked Gaussian tails, so `Q` is
//! evaluated from `erfc` at machine precision and differences of tails are
//! formed on the side of zero where no cancellation occurs.

mod quadrature;

pub use quadrature::{integrate, integrate_breaks, integrate_fallible, integrate_vec, QuadratureSpec};

use crate::{Error, Result};
use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI, SQRT_2};

/// Below this jitter (in frame-normalized units) products of tail differences
/// leave the normal range, so APPs and LLRs are formed from [`ln_q_diff`].
pub const LOG_SPACE_SIGMA: f64 = 1e-3;

/// `(1 + sqrt 2) / (2 sqrt pi)`, the edge-loss constant of a jittered unit frame.
pub const BETA: f64 = 0.681_037_072_175_310_8;

/// `1/sqrt(2*pi)`.
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Gaussian tail `Q(x) = P(Z > x)` for a standard normal `Z`.
pub fn gaussian_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn gaussian_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Natural log of `Q(x)`, finite for every finite `x`.
pub fn ln_gaussian_tail(x: f64) -> f64 {
    if x < 30.0 {
        return gaussian_tail(x).ln();
    }
    // Asymptotic series; the truncation error is below 1e-9 relative for x >= 30.
    let r = 1.0 / (x * x);
    -0.5 * x * x - (x / FRAC_1_SQRT_2PI).ln() + (1.0 - r + 3.0 * r * r - 15.0 * r * r * r).ln()
}

/// `Q(a) - Q(b)` for `a <= b`, evaluated without cancellation.
pub fn q_diff(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        gaussian_tail(a) - gaussian_tail(b)
    } else if b <= 0.0 {
        gaussian_tail(-b) - gaussian_tail(-a)
    } else {
        1.0 - (gaussian_tail(-a) + gaussian_tail(b))
    }
}

/// Natural log of `Q(a) - Q(b)` for `a < b`.
pub fn ln_q_diff(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        // ln(Q(a) - Q(b)) = ln Q(a) + ln(1 - Q(b)/Q(a))
        let la = ln_gaussian_tail(a);
        let lb = ln_gaussian_tail(b);
        la + (-(lb - la).exp()).ln_1p()
    } else if b <= 0.0 {
        ln_q_diff(-b, -a)
    } else {
        q_diff(a, b).ln()
    }
}

/// Probability that `x + Z*sigma` lands in the unit interval, i.e.
/// `Q(-x/sigma) - Q((1-x)/sigma)`.
///
/// Symmetric about `1/2`: on `[0, 1]` the two tails are summed in an
/// order-independent way so `f_sigma(x) == f_sigma(1 - x)` bit for bit
/// whenever `1 - x` is representable.
pub fn f_sigma(x: f64, sigma: f64) -> f64 {
    if (0.0..=1.0).contains(&x) {
        let a = gaussian_tail(x / sigma);
        let b = gaussian_tail((1.0 - x) / sigma);
        1.0 - (a + b)
    } else {
        q_diff(-x / sigma, (1.0 - x) / sigma)
    }
}

/// Antiderivative of `Q(a x)` in `x`: `x Q(ax) - phi(ax)/a`. Valid for either sign of `a`.
pub fn antiderivative_q(a: f64, x: f64) -> f64 {
    x * gaussian_tail(a * x) - gaussian_pdf(a * x) / a
}

/// Antiderivative of `Q(a x)^2` in `x`. Valid for either sign of `a`.
pub fn antiderivative_q2(a: f64, x: f64) -> f64 {
    let q = gaussian_tail(a * x);
    let sqrt_pi = PI.sqrt();
    x * q * q - SQRT_2 / (a * sqrt_pi) * q * (-0.5 * a * a * x * x).exp()
        + gaussian_tail(SQRT_2 * a * x) / (a * sqrt_pi)
}

fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Binary entropy in bits.
pub fn entropy_binary(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("binary entropy needs x in [0,1], got {x}")));
    }
    Ok(-xlog2x(x) - xlog2x(1.0 - x))
}

/// Symmetric ternary entropy `-(1-2x)log2(1-2x) - 2x log2 x` in bits.
pub fn entropy_ternary(x: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&x) {
        return Err(Error::Domain(format!("ternary entropy needs x in [0,1/2], got {x}")));
    }
    Ok(-xlog2x(1.0 - 2.0 * x) - 2.0 * xlog2x(x))
}

/// Shannon entropy of a probability vector in bits. Zero entries contribute nothing.
pub fn entropy(probs: &[f64]) -> f64 {
    -probs.iter().map(|&p| xlog2x(p)).sum::<f64>()
}

/// Converts nats to bits.
pub fn nats_to_bits(x: f64) -> f64 {
    x / LN_2
}

/// `ln(sum(exp(v)))` without overflow.
pub fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tail_reference_values() {
        assert_eq!(gaussian_tail(0.0), 0.5);
        assert!((gaussian_tail(1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
        assert!((gaussian_tail(10.0) - 7.619_853_024_160_527e-24).abs() < 1e-36);
        assert_eq!(gaussian_tail(-40.0), 1.0);
        assert_eq!(gaussian_tail(40.0), 0.0);
    }

    #[test]
    fn ln_tail_matches_direct_and_extends() {
        for &x in &[-3.0, 0.0, 2.0, 10.0, 25.0] {
            assert!((ln_gaussian_tail(x) - gaussian_tail(x).ln()).abs() < 1e-12);
        }
        // Continuity across the switch to the asymptotic series.
        let below = gaussian_tail(29.999_999).ln();
        assert!((ln_gaussian_tail(30.0) - below).abs() < 1e-3);
        assert!(ln_gaussian_tail(100.0).is_finite());
    }

    #[test]
    fn q_diff_avoids_cancellation() {
        let d = q_diff(-12.0, -11.0);
        let exact = gaussian_tail(11.0) - gaussian_tail(12.0);
        assert!(((d - exact) / exact).abs() < 1e-13);
        assert!((ln_q_diff(-12.0, -11.0) - exact.ln()).abs() < 1e-12);
        assert!((ln_q_diff(40.0, 41.0) - ln_gaussian_tail(40.0)).abs() < 1e-9);
    }

    #[test]
    fn f_sigma_edges_and_centre() {
        assert!((f_sigma(0.0, 0.1) - 0.5).abs() < 1e-10);
        assert!((f_sigma(1.0, 0.1) - 0.5).abs() < 1e-10);
        assert!((f_sigma(0.5, 0.05) - (1.0 - 2.0 * gaussian_tail(10.0))).abs() < 1e-15);
        assert_eq!(f_sigma(0.5, 0.3), f_sigma(1.0 - 0.5, 0.3));
    }

    #[test]
    fn q2_definite_integral_closed_form() {
        let s = 0.1;
        let v = antiderivative_q2(1.0 / s, 1.0) - antiderivative_q2(1.0 / s, 0.0);
        let closed = (SQRT_2 - 1.0) * s / (2.0 * PI.sqrt());
        assert!((v - closed).abs() < 1e-8);
        assert!((v - 0.011_684_7).abs() < 1e-7);
    }

    #[test]
    fn q_definite_integral_matches_quadrature() {
        let s = 0.1;
        let a = 1.0 / s;
        let exact = antiderivative_q(a, 1.0) - antiderivative_q(a, 0.0);
        let q = integrate(|x| gaussian_tail(a * x), 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((exact - q).abs() < 1e-10);
        assert!(antiderivative_q(1.0, 0.0).is_finite());
        assert_eq!(antiderivative_q(1.0, 0.3) - antiderivative_q(1.0, 0.3), 0.0);
    }

    #[test]
    fn constants() {
        assert!((BETA - (1.0 + SQRT_2) / (2.0 * PI.sqrt())).abs() < 1e-16);
        assert!((FRAC_1_SQRT_2PI - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-17);
    }

    #[test]
    fn entropies() {
        assert_eq!(entropy_binary(0.5).unwrap(), 1.0);
        assert_eq!(entropy_binary(0.0).unwrap(), 0.0);
        assert_eq!(entropy_binary(1.0).unwrap(), 0.0);
        assert!((entropy_ternary(1.0 / 3.0).unwrap() - 3f64.log2()).abs() < 1e-15);
        assert!(entropy_binary(1.5).is_err());
        assert!(entropy_ternary(0.6).is_err());
        assert!((entropy(&[0.25; 4]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn log_sum_exp_is_stable() {
        assert!((log_sum_exp(&[-1000.0, -1000.0]) - (-1000.0 + LN_2)).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn tail_reflection(x in -8.0f64..8.0) {
            prop_assert!((gaussian_tail(x) + gaussian_tail(-x) - 1.0).abs() <= 1e-14);
        }

        #[test]
        fn f_sigma_mirror_exact(x in 0.5f64..=1.0, sigma in 1e-4f64..2.0) {
            prop_assert_eq!(f_sigma(x, sigma), f_sigma(1.0 - x, sigma));
            let v = f_sigma(x, sigma);
            // 1 - 2Q(x/sigma) rounds to 1 once the tails drop below half an ulp.
            prop_assert!(v > 0.0 && v <= 1.0);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn antiderivative_q_differentiates_back(a in prop_oneof![-20.0f64..-0.2, 0.2f64..20.0], x in -2.0f64..2.0) {
            let h = 1e-5;
            let d = (antiderivative_q(a, x + h) - antiderivative_q(a, x - h)) / (2.0 * h);
            prop_assert!((d - gaussian_tail(a * x)).abs() < 1e-6);
        }

        #[test]
        fn antiderivative_q2_differentiates_back(a in prop_oneof![-20.0f64..-0.2, 0.2f64..20.0], x in -2.0f64..2.0) {
            let h = 1e-5;
            let d = (antiderivative_q2(a, x + h) - antiderivative_q2(a, x - h)) / (2.0 * h);
            let q = gaussian_tail(a * x);
            prop_assert!((d - q * q).abs() < 1e-6);
        }
    }
}
