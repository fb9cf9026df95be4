//! Exact information rates of the time-bin channel.
//!
//! Conditioning is always on both frames being valid unless a function says
//! otherwise. With `v(u)` the validity probability of emission time `u` and
//! `w_i(u)` the probability of landing in bin `i`, every quantity here is a
//! ratio of integrals of products of `v` and `w_i` over `[0, N)`.

mod capacity;
mod kernel;
mod limits;
mod mutual;

pub use capacity::{secrecy_capacity, secrecy_capacity_highsnr, UnitFrameChannel};
pub use kernel::{
    app_bins, conditional_u_density, likelihood, output_density, prior_alice_valid, prior_both_valid,
    transition_matrix, SoftChannel, UDensity,
};
pub use limits::{gamma_for_capacity_db, shannon_limit_snr, CodeRate, DecodingMode, ShannonLimit};
pub use mutual::{
    mutual_info_hard, mutual_info_hard_circular, mutual_info_hard_highsnr, mutual_info_hard_truncated,
    mutual_info_soft, CircularLaw, HighSnrLaw,
};

use crate::channel::ChannelParams;
use crate::numerics::entropy;
use crate::{Error, Result};

/// Which SNR a curve is plotted against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrAxis {
    /// `gamma = 1/sigma^2`.
    Gamma,
    /// `gamma_bar = N^2/sigma^2`.
    GammaBar,
}

impl SnrAxis {
    pub fn column_name(self) -> &'static str {
        match self {
            SnrAxis::Gamma => "gamma_db",
            SnrAxis::GammaBar => "gamma_bar_db",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub snr_db: f64,
    pub value: f64,
}

/// Samples of a rate or error-rate quantity, sorted by SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    label: String,
    axis: SnrAxis,
    points: Vec<RatePoint>,
}

impl RateCurve {
    /// Sorts the `(snr_db, value)` pairs; rejects NaN abscissae.
    pub fn new(label: impl Into<String>, axis: SnrAxis, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.iter().any(|p| p.0.is_nan()) {
            return Err(Error::Domain("curve abscissa is NaN".into()));
        }
        let mut points: Vec<RatePoint> =
            points.into_iter().map(|(snr_db, value)| RatePoint { snr_db, value }).collect();
        points.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
        Ok(Self { label: label.into(), axis, points })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn axis(&self) -> SnrAxis {
        self.axis
    }

    pub fn points(&self) -> &[RatePoint] {
        &self.points
    }

    /// SNR at which the curve first crosses `target`, by log-linear
    /// interpolation between samples (log in value). `None` if never crossed.
    pub fn crossing_db(&self, target: f64) -> Option<f64> {
        self.points.windows(2).find_map(|w| {
            let (a, b) = (w[0], w[1]);
            let below = |v: f64| v <= target;
            if below(a.value) == below(b.value) || a.value <= 0.0 || b.value <= 0.0 {
                return None;
            }
            let (la, lb, lt) = (a.value.ln(), b.value.ln(), target.ln());
            Some(a.snr_db + (lt - la) / (lb - la) * (b.snr_db - a.snr_db))
        })
    }
}

/// Which conditioning a prior refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorKind {
    /// `P(bin = i)` given Alice's frame is valid.
    AliceValid,
    /// `P(bin = i)` given both frames are valid.
    BothValid,
}

/// Bin probabilities; symmetric under `i -> N-1-i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorVector {
    pub probs: Vec<f64>,
    pub kind: PriorKind,
}

impl PriorVector {
    /// Entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy(&self.probs)
    }
}

/// Hard-decision channel law `p[i][j] = P(Bob's bin = j | Alice's bin = i)`
/// with the both-valid prior it is paired with.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub p: Vec<Vec<f64>>,
    pub prior: PriorVector,
    pub params: ChannelParams,
}

impl TransitionMatrix {
    pub fn n_bins(&self) -> usize {
        self.p.len()
    }

    /// `1 - sum_i prior_i p_ii`: the symbol error rate over valid frames.
    pub fn error_rate(&self) -> f64 {
        1.0 - (0..self.n_bins()).map(|i| self.prior.probs[i] * self.p[i][i]).sum::<f64>()
    }

    /// Joint law `prior_i p_ij`.
    pub fn joint(&self) -> Vec<Vec<f64>> {
        self.p.iter().zip(&self.prior.probs).map(|(row, &pi)| row.iter().map(|&p| pi * p).collect()).collect()
    }
}
