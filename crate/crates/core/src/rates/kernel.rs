//! Frame integrals, bin priors, transition law and the soft-output kernel.
//!
//! The soft kernel is `g_i(y) = integral over [0, N) of phi_sigma(y - u) w_i(u) du`.
//! Then `p(y | bin i) = g_i(y) / A_i`, `p(y) = sum_i g_i(y) / D` and
//! `APP(i | y) = g_i(y) / sum_k g_k(y)`, with `A_i = integral of w_i v` and
//! `D = integral of v^2`.

use super::{PriorKind, PriorVector, TransitionMatrix};
use crate::channel::ChannelParams;
use crate::numerics::{gaussian_pdf, integrate_breaks, integrate_vec, ln_q_diff, log_sum_exp, q_diff, QuadratureSpec};
use crate::{Error, Result};
use std::f64::consts::SQRT_2;

/// Distance from the frame edges, in units of sigma, beyond which the kernel
/// uses its closed form. The neglected mass is below `Q(10) < 1e-23`.
const INTERIOR_SIGMAS: f64 = 10.0;
/// Half-width, in units of sigma, of the Gaussian window in kernel quadrature.
const WINDOW_SIGMAS: f64 = 12.0;

fn check_bin(params: &ChannelParams, i: usize) -> Result<()> {
    if i >= params.n_bins() {
        return Err(Error::Domain(format!("bin {i} outside Z_{}", params.n_bins())));
    }
    Ok(())
}

fn check_position(params: &ChannelParams, y: f64) -> Result<()> {
    if !(0.0..=params.n_bins() as f64).contains(&y) {
        return Err(Error::Domain(format!("position {y} outside [0, {}]", params.n_bins())));
    }
    Ok(())
}

/// Fills `w[i] = w_i(u)`, leaving exact zeros for bins more than the
/// Gaussian window away from `u`.
fn bin_captures(params: &ChannelParams, u: f64, w: &mut [f64]) {
    let s = params.sigma();
    let reach = WINDOW_SIGMAS * s + 1.0;
    for (i, wi) in w.iter_mut().enumerate() {
        let c = i as f64 + 0.5;
        *wi = if (c - u).abs() <= reach { params.bin_capture(i, u) } else { 0.0 };
    }
}

/// `P(bin = i | Alice valid) = integral of v over [i, i+1) / integral of v over [0, N)`.
pub fn prior_alice_valid(params: &ChannelParams) -> Result<PriorVector> {
    let spec = QuadratureSpec::default();
    let delta = (WINDOW_SIGMAS * params.sigma()).min(0.5);
    let mass = (0..params.n_bins())
        .map(|i| {
            let a = i as f64;
            integrate_breaks(|u| params.frame_validity(u), &[a, a + delta, a + 1.0 - delta, a + 1.0], &spec)
        })
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = mass.iter().sum();
    Ok(PriorVector { probs: mass.iter().map(|m| m / total).collect(), kind: PriorKind::AliceValid })
}

/// `(A_i, D)`: the frame integrals of `w_i v` and `v^2`.
fn frame_integrals(params: &ChannelParams) -> Result<(Vec<f64>, f64)> {
    let n = params.n_bins();
    let spec = QuadratureSpec::default();
    let out = integrate_vec(
        |u, out| {
            bin_captures(params, u, &mut out[..n]);
            let v = params.frame_validity(u);
            out[..n].iter_mut().for_each(|x| *x *= v);
            out[n] = v * v;
        },
        n + 1,
        &params.frame_breakpoints(),
        &spec,
    )?;
    Ok((out[..n].to_vec(), out[n]))
}

/// `P(bin = i | both valid) = A_i / D`.
pub fn prior_both_valid(params: &ChannelParams) -> Result<PriorVector> {
    let (a, d) = frame_integrals(params)?;
    Ok(PriorVector { probs: a.iter().map(|x| x / d).collect(), kind: PriorKind::BothValid })
}

/// Transition law `p_ij = integral of w_i w_j / A_i`, with the both-valid prior.
pub fn transition_matrix(params: &ChannelParams) -> Result<TransitionMatrix> {
    let n = params.n_bins();
    let spec = QuadratureSpec::default();
    // Layout: upper triangle of w_i w_j (row-major), then A_i, then D.
    let tri = n * (n + 1) / 2;
    let out = integrate_vec(
        |u, out| {
            let mut w = vec![0.0; n];
            bin_captures(params, u, &mut w);
            let v = params.frame_validity(u);
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    out[k] = w[i] * w[j];
                    k += 1;
                }
            }
            for i in 0..n {
                out[tri + i] = w[i] * v;
            }
            out[tri + n] = v * v;
        },
        tri + n + 1,
        &params.frame_breakpoints(),
        &spec,
    )?;
    let a = &out[tri..tri + n];
    let d = out[tri + n];
    let mut p = vec![vec![0.0; n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            p[i][j] = out[k] / a[i];
            p[j][i] = out[k] / a[j];
            k += 1;
        }
    }
    Ok(TransitionMatrix {
        p,
        prior: PriorVector { probs: a.iter().map(|x| x / d).collect(), kind: PriorKind::BothValid },
        params: *params,
    })
}

/// Density of the emission time `U` given Alice's bin, and optionally given
/// that Bob's frame is valid as well.
#[derive(Debug, Clone)]
pub struct UDensity {
    params: ChannelParams,
    bin: usize,
    both_valid: bool,
    norm: f64,
}

impl UDensity {
    pub fn eval(&self, u: f64) -> f64 {
        if !(0.0..self.params.n_bins() as f64).contains(&u) {
            return 0.0;
        }
        let w = self.params.bin_capture(self.bin, u);
        let v = if self.both_valid { self.params.frame_validity(u) } else { 1.0 };
        w * v / self.norm
    }

    /// The normalizing integral.
    pub fn norm(&self) -> f64 {
        self.norm
    }
}

/// `U | bin = i` has density `w_i(u) / integral of w_i` on `[0, N)`; with
/// `both_valid` it is `w_i(u) v(u) / A_i`.
pub fn conditional_u_density(params: &ChannelParams, i: usize, both_valid: bool) -> Result<UDensity> {
    check_bin(params, i)?;
    let spec = QuadratureSpec::default();
    let pts = params.frame_breakpoints();
    let norm = if both_valid {
        integrate_breaks(|u| params.bin_capture(i, u) * params.frame_validity(u), &pts, &spec)?
    } else {
        integrate_breaks(|u| params.bin_capture(i, u), &pts, &spec)?
    };
    Ok(UDensity { params: *params, bin: i, both_valid, norm })
}

/// Soft-output channel with its frame integrals cached.
#[derive(Debug, Clone)]
pub struct SoftChannel {
    params: ChannelParams,
    a: Vec<f64>,
    d: f64,
    spec: QuadratureSpec,
}

impl SoftChannel {
    pub fn new(params: &ChannelParams) -> Result<Self> {
        let (a, d) = frame_integrals(params)?;
        Ok(Self { params: *params, a, d, spec: QuadratureSpec::default() })
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    /// `integral of v^2 = N * P(both valid)`.
    pub fn validity_integral(&self) -> f64 {
        self.d
    }

    /// Both-valid prior `A_i / D`.
    pub fn prior(&self) -> PriorVector {
        PriorVector { probs: self.a.iter().map(|x| x / self.d).collect(), kind: PriorKind::BothValid }
    }

    /// Distance from a frame edge beyond which the kernel has a closed form.
    pub fn edge_width(&self) -> f64 {
        INTERIOR_SIGMAS * self.params.sigma()
    }

    fn is_interior(&self, y: f64) -> bool {
        let s = INTERIOR_SIGMAS * self.params.sigma();
        y >= s && self.params.n_bins() as f64 - y >= s
    }

    /// Kernel values `g_i(y)` for all bins.
    pub fn kernel(&self, y: f64, g: &mut [f64]) -> Result<()> {
        let n = self.params.n_bins();
        let s = self.params.sigma();
        if self.is_interior(y) {
            // Away from the edges the convolution of two Gaussians of width
            // sigma is one of width sigma * sqrt 2.
            let s2 = s * SQRT_2;
            for (i, gi) in g.iter_mut().enumerate() {
                let i = i as f64;
                *gi = q_diff((i - y) / s2, (i + 1.0 - y) / s2);
            }
            return Ok(());
        }
        let lo = (y - WINDOW_SIGMAS * s).max(0.0);
        let hi = (y + WINDOW_SIGMAS * s).min(n as f64);
        let mut pts = vec![lo, hi];
        if lo < y && y < hi {
            pts.push(y);
        }
        pts.extend((1..n).map(|k| k as f64).filter(|&k| lo < k && k < hi));
        pts.sort_by(f64::total_cmp);
        let params = self.params;
        let v = integrate_vec(
            |u, out| {
                bin_captures(&params, u, out);
                let ph = gaussian_pdf((y - u) / s) / s;
                out.iter_mut().for_each(|x| *x *= ph);
            },
            n,
            &pts,
            &self.spec,
        )?;
        g.copy_from_slice(&v);
        Ok(())
    }

    /// `ln g_i(y)`; finite far into the tails where `g_i` underflows, away
    /// from the frame edges.
    pub fn ln_kernel(&self, y: f64, lg: &mut [f64]) -> Result<()> {
        if self.is_interior(y) {
            let s2 = self.params.sigma() * SQRT_2;
            for (i, l) in lg.iter_mut().enumerate() {
                let i = i as f64;
                *l = ln_q_diff((i - y) / s2, (i + 1.0 - y) / s2);
            }
            return Ok(());
        }
        self.kernel(y, lg)?;
        // Bins whose kernel underflowed take the whole-line form: their mass
        // sits between the bin and y, inside the frame, so the truncation
        // at the edge changes it negligibly.
        let s2 = self.params.sigma() * SQRT_2;
        for (i, l) in lg.iter_mut().enumerate() {
            *l = if *l > 0.0 {
                l.ln()
            } else {
                let i = i as f64;
                ln_q_diff((i - y) / s2, (i + 1.0 - y) / s2)
            };
        }
        Ok(())
    }

    /// `p(y | bin i)` given both frames valid.
    pub fn likelihood(&self, i: usize, y: f64) -> Result<f64> {
        check_bin(&self.params, i)?;
        check_position(&self.params, y)?;
        let mut g = vec![0.0; self.params.n_bins()];
        self.kernel(y, &mut g)?;
        Ok(g[i] / self.a[i])
    }

    /// Density of Bob's position given both frames valid.
    pub fn output_density(&self, y: f64) -> Result<f64> {
        check_position(&self.params, y)?;
        let mut g = vec![0.0; self.params.n_bins()];
        self.kernel(y, &mut g)?;
        Ok(g.iter().sum::<f64>() / self.d)
    }

    /// Posterior of Alice's bin given Bob's position.
    pub fn app_bins(&self, y: f64) -> Result<Vec<f64>> {
        check_position(&self.params, y)?;
        let mut g = vec![0.0; self.params.n_bins()];
        self.kernel(y, &mut g)?;
        let total: f64 = g.iter().sum();
        g.iter_mut().for_each(|x| *x /= total);
        Ok(g)
    }

    /// Natural-log posterior of Alice's bin, accurate where [`app_bins`](Self::app_bins) rounds to 0 or 1.
    pub fn ln_app_bins(&self, y: f64) -> Result<Vec<f64>> {
        check_position(&self.params, y)?;
        let mut lg = vec![0.0; self.params.n_bins()];
        self.ln_kernel(y, &mut lg)?;
        let z = log_sum_exp(&lg);
        lg.iter_mut().for_each(|x| *x -= z);
        Ok(lg)
    }
}

/// `p(y | bin i)` given both frames valid. Build a [`SoftChannel`] to evaluate many points.
pub fn likelihood(params: &ChannelParams, i: usize, y: f64) -> Result<f64> {
    SoftChannel::new(params)?.likelihood(i, y)
}

/// Density of Bob's position given both frames valid.
pub fn output_density(params: &ChannelParams, y: f64) -> Result<f64> {
    SoftChannel::new(params)?.output_density(y)
}

/// Posterior of Alice's bin given Bob's position.
pub fn app_bins(params: &ChannelParams, y: f64) -> Result<Vec<f64>> {
    SoftChannel::new(params)?.app_bins(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{entropy, integrate_breaks, BETA};
    use crate::stream::rng_for;
    use rand::Rng;

    fn db(n: usize, g: f64) -> ChannelParams {
        ChannelParams::from_gamma_db(n, g).unwrap()
    }

    fn sym(v: &[f64]) -> f64 {
        v.iter().zip(v.iter().rev()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn alice_prior_reference_rows() {
        let rows: [(f64, [f64; 8], f64); 3] = [
            (10.0, [0.112796, 0.129062, 0.129071, 0.129071, 0.129071, 0.129071, 0.129062, 0.112796], 2.997655),
            (25.0, [0.122885, 0.125705, 0.125705, 0.125705, 0.125705, 0.125705, 0.125705, 0.122885], 2.999931),
            (40.0, [0.124626, 0.125125, 0.125125, 0.125125, 0.125125, 0.125125, 0.125125, 0.124626], 2.999998),
        ];
        for (g, probs, h) in rows {
            let p = prior_alice_valid(&db(8, g)).unwrap();
            for (a, b) in p.probs.iter().zip(probs) {
                assert!((a - b).abs() < 1e-5, "{g} dB: {a} vs {b}");
            }
            assert!((p.entropy() - h).abs() < 1e-5);
        }
        let p = prior_alice_valid(&ChannelParams::new(8, 1e-9).unwrap()).unwrap();
        assert!(p.probs.iter().all(|x| (x - 0.125).abs() < 1e-6));
    }

    #[test]
    fn both_valid_prior_edges_match_expansion() {
        let p = ChannelParams::new(8, 0.01).unwrap();
        let prior = prior_both_valid(&p).unwrap();
        let (s, n) = (p.sigma(), 8.0);
        let edge = (1.0 - BETA * s) / (n * (1.0 - 2.0 * BETA * s / n));
        assert!((prior.probs[0] - edge).abs() < 1e-6);
        assert!((prior.probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(sym(&prior.probs) < 1e-10);
        let flat = prior_both_valid(&ChannelParams::new(8, 1e-9).unwrap()).unwrap();
        assert!(flat.probs.iter().all(|x| (x - 0.125).abs() < 1e-6));
    }

    #[test]
    fn change_of_variable_identity() {
        let p = db(8, 10.0);
        let spec = QuadratureSpec::default();
        for i in 0..8 {
            let a = i as f64;
            let lhs = integrate_breaks(|t| p.frame_validity(t), &[a, a + 0.5, a + 1.0], &spec).unwrap();
            let rhs = conditional_u_density(&p, i, false).unwrap().norm();
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn u_densities_normalize_and_concentrate() {
        let p = db(8, 10.0);
        let spec = QuadratureSpec::default();
        for both in [false, true] {
            for i in 0..8 {
                let d = conditional_u_density(&p, i, both).unwrap();
                let m = integrate_breaks(|u| d.eval(u), &p.frame_breakpoints(), &spec).unwrap();
                assert!((m - 1.0).abs() < 1e-9);
            }
        }
        let p = ChannelParams::new(8, 1e-9).unwrap();
        let d = conditional_u_density(&p, 3, true).unwrap();
        let inside = integrate_breaks(|u| d.eval(u), &[3.0, 3.000_001, 3.999_999, 4.0], &spec).unwrap();
        assert!(inside >= 1.0 - 1e-6);
        assert!(conditional_u_density(&p, 8, true).is_err());
    }

    #[test]
    fn transition_rows_and_symmetry() {
        for (n, g) in [(4, 0.0), (8, 10.0), (8, 25.0), (16, 15.0)] {
            let t = transition_matrix(&db(n, g)).unwrap();
            for i in 0..n {
                assert!((t.p[i].iter().sum::<f64>() - 1.0).abs() < 1e-9);
                for j in 0..n {
                    assert!((t.p[i][j] - t.p[n - 1 - i][n - 1 - j]).abs() < 1e-9);
                }
            }
        }
        let t = transition_matrix(&ChannelParams::new(8, 1e-9).unwrap()).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert!((t.p[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn transition_high_snr_expansion() {
        let p = ChannelParams::new(8, 0.01).unwrap();
        let t = transition_matrix(&p).unwrap();
        let s = p.sigma();
        let p01 = (s / std::f64::consts::PI.sqrt()) / (1.0 - BETA * s);
        assert!((t.p[0][1] - p01).abs() < 1e-6);
        assert!((t.p[0][1] - 0.005_680_6).abs() < 1e-6);
        for i in 0..8usize {
            for j in 0..8usize {
                if i.abs_diff(j) >= 2 {
                    assert!(t.p[i][j] < 1e-8);
                }
            }
        }
    }

    #[test]
    fn likelihood_normalizes_and_mirrors() {
        for g in [10.0, 25.0] {
            let ch = SoftChannel::new(&db(8, g)).unwrap();
            let spec = QuadratureSpec::default().with_tol(1e-11, 1e-10);
            let pts: Vec<f64> = (0..=8).map(|k| k as f64).collect();
            for i in 0..8 {
                let m = integrate_breaks(|y| ch.likelihood(i, y).unwrap(), &pts, &spec).unwrap();
                assert!((m - 1.0).abs() < 1e-8, "bin {i} at {g} dB: {m}");
            }
            for &y in &[0.01, 0.7, 2.3, 4.0, 7.9] {
                for i in 0..8 {
                    let a = ch.likelihood(i, y).unwrap();
                    let b = ch.likelihood(7 - i, 8.0 - y).unwrap();
                    assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn likelihood_shape_changes_with_snr() {
        let flatness = |g: f64| {
            let ch = SoftChannel::new(&db(8, g)).unwrap();
            let c = ch.likelihood(3, 3.5).unwrap();
            let side = 0.5 * (ch.likelihood(3, 3.25).unwrap() + ch.likelihood(3, 3.75).unwrap());
            (c - side) / c
        };
        // Square-topped at 25 dB, visibly rounded at 10 dB (direct evaluation gives 9.7%).
        assert!(flatness(25.0) < 0.05);
        assert!(flatness(10.0) > 0.09);
    }

    #[test]
    fn output_density_consistency() {
        let p = db(8, 10.0);
        let ch = SoftChannel::new(&p).unwrap();
        let prior = ch.prior();
        let mut rng = rng_for(11, 0);
        for _ in 0..20 {
            let y: f64 = rng.random::<f64>() * 8.0;
            let py = ch.output_density(y).unwrap();
            let mix: f64 = (0..8).map(|i| prior.probs[i] * ch.likelihood(i, y).unwrap()).sum();
            assert!((py - mix).abs() < 1e-8);
            assert!((py - ch.output_density(8.0 - y).unwrap()).abs() < 1e-9);
        }
        let spec = QuadratureSpec::default().with_tol(1e-11, 1e-10);
        let pts: Vec<f64> = (0..=8).map(|k| k as f64).collect();
        let total = integrate_breaks(|y| ch.output_density(y).unwrap(), &pts, &spec).unwrap();
        assert!((total - 1.0).abs() < 1e-8);
        let flat = SoftChannel::new(&ChannelParams::new(8, 1e-9).unwrap()).unwrap();
        assert!((flat.output_density(2.5).unwrap() - 0.125).abs() < 1e-6);
    }

    #[test]
    fn app_bins_normalize_and_factorize() {
        let mut rng = rng_for(12, 0);
        for g in [10.0, 25.0, 40.0] {
            let ch = SoftChannel::new(&db(8, g)).unwrap();
            let prior = ch.prior();
            for _ in 0..100 {
                let y: f64 = rng.random::<f64>() * 8.0;
                let app = ch.app_bins(y).unwrap();
                assert!((app.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                let py = ch.output_density(y).unwrap();
                for (i, a) in app.iter().enumerate() {
                    let bayes = prior.probs[i] * ch.likelihood(i, y).unwrap() / py;
                    assert!((a - bayes).abs() < 1e-8);
                }
            }
        }
        let sharp = app_bins(&ChannelParams::new(8, 1e-9).unwrap(), 3.5).unwrap();
        assert!(sharp[3] >= 1.0 - 1e-6);
    }

    #[test]
    fn ln_app_matches_linear() {
        let ch = SoftChannel::new(&db(8, 20.0)).unwrap();
        for &y in &[0.05, 1.5, 3.97, 7.99] {
            let a = ch.app_bins(y).unwrap();
            let l = ch.ln_app_bins(y).unwrap();
            for i in 0..8 {
                if a[i] > 1e-250 {
                    assert!((a[i].ln() - l[i]).abs() < 1e-8 * a[i].ln().abs().max(1.0));
                }
            }
        }
        let tiny = SoftChannel::new(&ChannelParams::new(8, 1e-4).unwrap()).unwrap();
        let l = tiny.ln_app_bins(3.5).unwrap();
        assert!(l[4].is_finite() && l[4] < -1e6);
    }

    #[test]
    fn priors_have_expected_entropy_ordering() {
        let p = db(8, 10.0);
        let a = prior_alice_valid(&p).unwrap();
        let b = prior_both_valid(&p).unwrap();
        assert!(sym(&a.probs) < 1e-10 && sym(&b.probs) < 1e-10);
        assert!(entropy(&b.probs) < entropy(&a.probs));
    }
}
