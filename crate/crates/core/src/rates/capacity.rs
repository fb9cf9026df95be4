//! Secrecy capacity `I(X; Y)` of the continuous channel on a unit frame.
//!
//! With both frames valid, Alice's position has density `I6(x)/D` where
//! `I6(x) = int_0^1 phi_s(x - u) v(u) du` and `D = int_0^1 v^2`, and Bob's
//! position given Alice's is
//! `phi_{s sqrt 2}(y - x) [Q(-m/s') - Q((1-m)/s')] / I6(x)`, `m = (x+y)/2`, `s' = s/sqrt 2`.

use crate::numerics::{f_sigma, gaussian_pdf, integrate_breaks, integrate_fallible, QuadratureSpec};
use crate::{Error, Result};
use std::f64::consts::{E, PI, SQRT_2};

/// Distance from the edges, in sigmas, beyond which `I6` takes its closed form.
const INTERIOR_SIGMAS: f64 = 10.0;
/// Half-width, in sigmas, of Gaussian windows in the nested integrals.
const WINDOW_SIGMAS: f64 = 14.0;

/// The unit-frame continuous channel at jitter `sigma` (frame-normalized).
#[derive(Debug, Clone)]
pub struct UnitFrameChannel {
    sigma: f64,
    d: f64,
    spec: QuadratureSpec,
}

impl UnitFrameChannel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!("jitter must be positive and finite, got {sigma}")));
        }
        let spec = QuadratureSpec::default();
        let delta = (WINDOW_SIGMAS * sigma).min(0.5);
        let d = integrate_breaks(|u| f_sigma(u, sigma).powi(2), &[0.0, delta, 1.0 - delta, 1.0], &spec)?;
        Ok(Self { sigma, d, spec })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    fn i6(&self, x: f64) -> Result<f64> {
        let s = self.sigma;
        if x >= INTERIOR_SIGMAS * s && 1.0 - x >= INTERIOR_SIGMAS * s {
            return Ok(f_sigma(x, s * SQRT_2));
        }
        let lo = (x - WINDOW_SIGMAS * s).max(0.0);
        let hi = (x + WINDOW_SIGMAS * s).min(1.0);
        let mut pts = vec![lo, hi];
        if lo < x && x < hi {
            pts.insert(1, x);
        }
        integrate_breaks(|u| gaussian_pdf((x - u) / s) / s * f_sigma(u, s), &pts, &self.spec)
    }

    /// Density of Alice's position (equally, Bob's) given both frames valid.
    pub fn input_density(&self, x: f64) -> Result<f64> {
        Ok(self.i6(x)? / self.d)
    }

    /// Density of Bob's position `y` given Alice's position `x`.
    pub fn conditional_density(&self, y: f64, x: f64) -> Result<f64> {
        Ok(self.joint_kernel(x, y) / self.i6(x)?)
    }

    fn joint_kernel(&self, x: f64, y: f64) -> f64 {
        let s = self.sigma;
        let s2 = s * SQRT_2;
        gaussian_pdf((y - x) / s2) / s2 * f_sigma(0.5 * (x + y), s / SQRT_2)
    }

    fn outer_breaks(&self) -> Vec<f64> {
        let e = (20.0 * self.sigma).min(0.5);
        let mut pts = vec![0.0, e, 1.0 - e, 1.0];
        pts.dedup();
        pts
    }

    /// `h(Y | X)` in bits.
    fn conditional_entropy(&self) -> Result<f64> {
        let s = self.sigma;
        let inner_spec = QuadratureSpec::default().with_tol(1e-11, 1e-10);
        let outer_spec = QuadratureSpec::default().with_tol(1e-8, 1e-9);
        integrate_fallible(
            |x| {
                let c = self.i6(x)?;
                if c <= 0.0 {
                    return Ok(0.0);
                }
                let lo = (x - 20.0 * s).max(0.0);
                let hi = (x + 20.0 * s).min(1.0);
                let mut pts = vec![lo, hi];
                if lo < x && x < hi {
                    pts.insert(1, x);
                }
                let inner = integrate_breaks(
                    |y| {
                        let p = self.joint_kernel(x, y) / c;
                        if p > 0.0 {
                            -p * p.log2()
                        } else {
                            0.0
                        }
                    },
                    &pts,
                    &inner_spec,
                )?;
                Ok(c / self.d * inner)
            },
            &self.outer_breaks(),
            &outer_spec,
        )
    }

    /// `h(Y)` in bits.
    fn output_entropy(&self) -> Result<f64> {
        let spec = QuadratureSpec::default().with_tol(1e-10, 1e-10);
        integrate_fallible(
            |y| {
                let p = self.input_density(y)?;
                Ok(if p > 0.0 { -p * p.log2() } else { 0.0 })
            },
            &self.outer_breaks(),
            &spec,
        )
    }

    /// `I(X; Y) = h(Y) - h(Y | X)` in bits.
    pub fn mutual_information(&self) -> Result<f64> {
        Ok(self.output_entropy()? - self.conditional_entropy()?)
    }
}

/// Secrecy capacity `I(X; Y)` in bits per photon at unit-frame jitter
/// `sigma_unit_frame = sigma / N = 1/sqrt(gamma_bar)`.
pub fn secrecy_capacity(sigma_unit_frame: f64) -> Result<f64> {
    UnitFrameChannel::new(sigma_unit_frame)?.mutual_information()
}

/// High-SNR capacity `0.5 log2(gamma_bar / (4 pi e))`.
pub fn secrecy_capacity_highsnr(gamma_bar: f64) -> f64 {
    0.5 * (gamma_bar / (4.0 * PI * E)).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::rng_for;
    use rand::Rng;

    #[test]
    fn conditional_density_normalizes() {
        let ch = UnitFrameChannel::new(0.02).unwrap();
        let spec = QuadratureSpec::default();
        let mut rng = rng_for(5, 0);
        for _ in 0..20 {
            let x: f64 = rng.random();
            let m = integrate_breaks(|y| ch.conditional_density(y, x).unwrap(), &[0.0, x, 1.0], &spec).unwrap();
            assert!((m - 1.0).abs() < 1e-9, "x = {x}: {m}");
        }
        let m = integrate_breaks(|x| ch.input_density(x).unwrap(), &[0.0, 0.3, 0.7, 1.0], &spec).unwrap();
        assert!((m - 1.0).abs() < 1e-9);
    }

    #[test]
    fn highsnr_formula_inversions() {
        assert!((secrecy_capacity_highsnr(4.0 * PI * E * 64.0) - 3.0).abs() < 1e-15);
        assert_eq!(secrecy_capacity_highsnr(4.0 * PI * E), 0.0);
    }

    #[test]
    fn capacity_approaches_log_formula() {
        let g = 4.0 * PI * E * 64.0;
        let c = secrecy_capacity(1.0 / g.sqrt()).unwrap();
        assert!((c - 3.0).abs() < 0.05, "{c}");
    }

    #[test]
    fn rejects_bad_sigma() {
        assert!(UnitFrameChannel::new(0.0).is_err());
    }
}
