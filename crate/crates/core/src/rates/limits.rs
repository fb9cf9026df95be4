//! Shannon limits: the SNR at which the channel carries a code's information rate.

use super::mutual::{mutual_info_hard, mutual_info_soft};
use crate::channel::ChannelParams;
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

/// Search range for limits, in dB of `gamma`.
pub const LIMIT_BRACKET_DB: (f64, f64) = (-10.0, 60.0);
const GRID_STEP_DB: f64 = 5.0;
/// Decreases smaller than this along an MI sweep are quadrature noise.
const MONOTONE_SLACK: f64 = 1e-9;

/// A code rate `k/n` with `0 < k < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeRate {
    pub num: u32,
    pub den: u32,
}

impl CodeRate {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || num >= den {
            return Err(Error::Domain(format!("code rate must lie in (0, 1), got {num}/{den}")));
        }
        Ok(Self { num, den })
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for CodeRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for CodeRate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) =
            s.split_once('/').ok_or_else(|| Error::Config(format!("code rate {s:?} is not of the form k/n")))?;
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| Error::Config(format!("code rate {s:?}: {e}")));
        CodeRate::new(parse(a)?, parse(b)?)
    }
}

/// Hard (bin index) or soft (real position) output at Bob.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodingMode {
    Hard,
    Soft,
}

impl DecodingMode {
    pub fn name(self) -> &'static str {
        match self {
            DecodingMode::Hard => "hard",
            DecodingMode::Soft => "soft",
        }
    }

    fn mutual_information(self, params: &ChannelParams) -> Result<f64> {
        match self {
            DecodingMode::Hard => mutual_info_hard(params),
            DecodingMode::Soft => mutual_info_soft(params),
        }
    }
}

impl FromStr for DecodingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hard" => Ok(DecodingMode::Hard),
            "soft" => Ok(DecodingMode::Soft),
            _ => Err(Error::Config(format!("mode must be hard or soft, got {s:?}"))),
        }
    }
}

/// A located Shannon limit.
#[derive(Debug, Clone, PartialEq)]
pub struct ShannonLimit {
    pub n_bins: usize,
    pub rate: CodeRate,
    pub mode: DecodingMode,
    /// Limit in dB of `gamma`.
    pub snr_db: f64,
    /// `sigma / N = 1/sqrt(gamma_bar)` at the limit.
    pub sigma_over_n: f64,
    /// Every `(gamma_db, bits)` evaluation made, sorted by SNR.
    pub evaluations: Vec<(f64, f64)>,
}

/// Solves `I(params) = rate * log2 N` for `gamma` in dB to within `tol_db`.
///
/// A 5 dB grid over [`LIMIT_BRACKET_DB`] is evaluated first and checked for
/// monotonicity; bisection then runs inside the bracketing grid cell.
pub fn shannon_limit_snr(n_bins: usize, rate: CodeRate, mode: DecodingMode, tol_db: f64) -> Result<ShannonLimit> {
    if !(tol_db > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol_db} dB")));
    }
    ChannelParams::new(n_bins, 1.0)?;
    let target = rate.value() * (n_bins as f64).log2();
    let eval = |db: f64| mode.mutual_information(&ChannelParams::from_gamma_db(n_bins, db)?);

    let (lo_db, hi_db) = LIMIT_BRACKET_DB;
    let steps = ((hi_db - lo_db) / GRID_STEP_DB).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| lo_db + k as f64 * GRID_STEP_DB).collect();
    let values = grid.par_iter().map(|&db| eval(db)).collect::<Result<Vec<f64>>>()?;
    let mut cache: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    let key = |db: f64| (db * 1e6).round() as i64;
    for (&db, &v) in grid.iter().zip(&values) {
        cache.insert(key(db), (db, v));
    }
    check_monotone(&cache);

    if values[0] >= target {
        return Err(Error::NoBracket(format!(
            "{} MI at N = {n_bins} already exceeds {target:.4} bits at {lo_db} dB",
            mode.name()
        )));
    }
    let Some(cell) = values.iter().position(|&v| v >= target) else {
        return Err(Error::NoBracket(format!(
            "{} MI at N = {n_bins} stays below {target:.4} bits up to {hi_db} dB",
            mode.name()
        )));
    };
    let (mut lo, mut hi) = (grid[cell - 1], grid[cell]);
    while hi - lo > tol_db {
        let mid = 0.5 * (lo + hi);
        let v = eval(mid)?;
        cache.insert(key(mid), (mid, v));
        if v >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    check_monotone(&cache);
    let snr_db = 0.5 * (lo + hi);
    Ok(ShannonLimit {
        n_bins,
        rate,
        mode,
        snr_db,
        sigma_over_n: 10f64.powf(-snr_db / 20.0) / n_bins as f64,
        evaluations: cache.into_values().collect(),
    })
}

fn check_monotone(cache: &BTreeMap<i64, (f64, f64)>) {
    let vals: Vec<&(f64, f64)> = cache.values().collect();
    for w in vals.windows(2) {
        if w[1].1 < w[0].1 - MONOTONE_SLACK {
            log::warn!(
                "mutual information decreases from {:.12} at {:.3} dB to {:.12} at {:.3} dB",
                w[0].1,
                w[0].0,
                w[1].1,
                w[1].0
            );
        }
    }
}

/// `gamma` in dB at which `0.5 log2(gamma / (4 pi e)) = bits` on a unit frame.
/// Negative `bits` give the backoff operating points.
pub fn gamma_for_capacity_db(bits: f64) -> f64 {
    10.0 * (4.0 * PI * E * 4f64.powf(bits)).log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_rate_parsing() {
        let r: CodeRate = "2/3".parse().unwrap();
        assert_eq!(r, CodeRate::new(2, 3).unwrap());
        assert_eq!(r.to_string(), "2/3");
        assert!("3/3".parse::<CodeRate>().is_err());
        assert!("0/3".parse::<CodeRate>().is_err());
        assert!("half".parse::<CodeRate>().is_err());
    }

    #[test]
    fn backoff_points() {
        assert!((gamma_for_capacity_db(-1.0) - 9.31).abs() < 0.005);
        assert!((gamma_for_capacity_db(-2.0) - 3.29).abs() < 0.005);
    }

    #[test]
    fn hard_limit_n8() {
        let l = shannon_limit_snr(8, CodeRate::new(2, 3).unwrap(), DecodingMode::Hard, 0.01).unwrap();
        assert!((l.snr_db - 12.61).abs() < 0.05, "{}", l.snr_db);
        assert!((l.sigma_over_n - 0.029269).abs() < 2e-4);
        assert!(l.evaluations.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn unreachable_target_has_no_bracket() {
        let r = shannon_limit_snr(2, CodeRate::new(99_999_999, 100_000_000).unwrap(), DecodingMode::Hard, 0.01);
        assert!(matches!(r, Err(Error::NoBracket(_))));
        assert!(shannon_limit_snr(8, CodeRate::new(2, 3).unwrap(), DecodingMode::Hard, 0.0).is_err());
    }
}
