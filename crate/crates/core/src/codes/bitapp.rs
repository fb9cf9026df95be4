//! Per-bit posteriors of Alice's Gray-labelled bin, fed to binary decoders.
//!
//! Every demapper works in the log domain and reports the LLR `ln(P0/P1)`
//! alongside `p_one`, so that near-certain bits keep their sign and magnitude
//! after `p_one` has rounded to 0 or 1.

use super::gray::gray_bit;
use crate::channel::ChannelParams;
use crate::numerics::log_sum_exp;
use crate::rates::{transition_matrix, HighSnrLaw, SoftChannel};
use crate::{Error, Result};

/// Floor applied to simplified per-bin scores before normalization.
pub const SIMPLIFIED_FLOOR: f64 = 1e-12;

/// `sigma` at or below which the high-SNR transition law is accurate.
pub const HIGHSNR_SIGMA: f64 = 0.02;

/// How a bit posterior was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AppSource {
    /// Marginal of the exact soft-output bin posterior.
    ExactSoft,
    /// Marginal of the small-noise per-bin scores.
    SimplifiedSoft,
    /// Marginal of `prior_i p_ij` given Bob's bin only.
    HardOutput,
}

impl AppSource {
    pub fn name(self) -> &'static str {
        match self {
            AppSource::ExactSoft => "exact",
            AppSource::SimplifiedSoft => "simplified",
            AppSource::HardOutput => "hard",
        }
    }
}

impl std::str::FromStr for AppSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(AppSource::ExactSoft),
            "simplified" => Ok(AppSource::SimplifiedSoft),
            "hard" => Ok(AppSource::HardOutput),
            _ => Err(Error::Config(format!("unknown APP mode {s:?}; expected exact, simplified or hard"))),
        }
    }
}

/// Posterior that one coded bit of Alice's word is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitApp {
    p_one: f64,
    llr: f64,
    source: AppSource,
}

impl BitApp {
    /// From `ln(P0/P1)`; infinite values give a certain bit.
    pub fn from_llr(llr: f64, source: AppSource) -> Self {
        let p_one = if llr >= 0.0 {
            let e = (-llr).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + llr.exp())
        };
        Self { p_one, llr, source }
    }

    /// A certain bit.
    pub fn certain(bit: u8, source: AppSource) -> Self {
        Self::from_llr(if bit & 1 == 0 { f64::INFINITY } else { f64::NEG_INFINITY }, source)
    }

    pub fn p_one(&self) -> f64 {
        self.p_one
    }

    /// `ln(P0/P1)`.
    pub fn llr(&self) -> f64 {
        self.llr
    }

    pub fn source(&self) -> AppSource {
        self.source
    }

    /// Maximum-posterior bit; ties go to 0.
    pub fn hard_bit(&self) -> u8 {
        u8::from(self.llr < 0.0)
    }
}

fn bits_of(params: &ChannelParams) -> Result<u32> {
    let n = params.n_bins();
    if !n.is_power_of_two() {
        return Err(Error::Domain(format!("Gray labelling needs N = 2^m, got N = {n}")));
    }
    Ok(n.trailing_zeros())
}

fn check_m(params: &ChannelParams, m: u32) -> Result<()> {
    let want = bits_of(params)?;
    if m != want {
        return Err(Error::Domain(format!("N = {} carries {want} bits, not {m}", params.n_bins())));
    }
    Ok(())
}

/// Marginalizes log bin scores onto the `m` Gray bits.
fn marginalize(ln_scores: &[f64], m: u32, source: AppSource, out: &mut Vec<BitApp>) {
    out.clear();
    let half = ln_scores.len() / 2;
    let mut zero = Vec::with_capacity(half);
    let mut one = Vec::with_capacity(half);
    for l in 0..m {
        zero.clear();
        one.clear();
        for (i, &s) in ln_scores.iter().enumerate() {
            if gray_bit(i, l, m) == 0 {
                zero.push(s);
            } else {
                one.push(s);
            }
        }
        let (l0, l1) = (log_sum_exp(&zero), log_sum_exp(&one));
        let llr = if l0 == l1 { 0.0 } else { l0 - l1 };
        out.push(BitApp::from_llr(llr, source));
    }
}

fn simplified_scores(sigma: f64, n: usize, y: f64, floor: f64, out: &mut [f64]) {
    let j = (y.floor().max(0.0) as usize).min(n - 1);
    let inv = 1.0 / (2.0 * sigma * sigma);
    let half_exp = |d: f64| 0.5 * (-d * d * inv).exp();
    for (i, s) in out.iter_mut().enumerate() {
        let fi = i as f64;
        let raw = if i == j {
            1.0 - half_exp(y - fi) - half_exp(y - fi - 1.0)
        } else {
            let sign = if j > i { 1.0 } else { -1.0 };
            sign * (half_exp(y - fi - 1.0) - half_exp(y - fi))
        };
        *s = raw.max(floor).ln();
    }
}

fn check_y(params: &ChannelParams, y: f64) -> Result<()> {
    if !(0.0..params.n_bins() as f64).contains(&y) {
        return Err(Error::Domain(format!("position {y} outside [0, {})", params.n_bins())));
    }
    Ok(())
}

/// Exact bit posteriors from the soft-output bin posterior.
pub fn bit_app_exact(params: &ChannelParams, y: f64, m: u32) -> Result<Vec<BitApp>> {
    check_m(params, m)?;
    let ln_app = SoftChannel::new(params)?.ln_app_bins(y)?;
    let mut out = Vec::new();
    marginalize(&ln_app, m, AppSource::ExactSoft, &mut out);
    Ok(out)
}

/// Small-noise bit posteriors with the default floor.
pub fn bit_app_simplified(params: &ChannelParams, y: f64, m: u32) -> Result<Vec<BitApp>> {
    bit_app_simplified_floor(params, y, m, SIMPLIFIED_FLOOR)
}

/// Small-noise bit posteriors; raw bin scores below `floor` are raised to it.
pub fn bit_app_simplified_floor(params: &ChannelParams, y: f64, m: u32, floor: f64) -> Result<Vec<BitApp>> {
    check_m(params, m)?;
    check_y(params, y)?;
    if !(floor > 0.0) {
        return Err(Error::Domain(format!("floor must be positive, got {floor}")));
    }
    let mut s = vec![0.0; params.n_bins()];
    simplified_scores(params.sigma(), params.n_bins(), y, floor, &mut s);
    let mut out = Vec::new();
    marginalize(&s, m, AppSource::SimplifiedSoft, &mut out);
    Ok(out)
}

/// Which transition law the hard demapper uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HardLaw {
    /// Quadrature prior and transition matrix.
    #[default]
    Exact,
    /// First-order high-SNR tridiagonal law; valid for `sigma <= HIGHSNR_SIGMA`.
    HighSnr,
}

fn hard_ln_joint(params: &ChannelParams, law: HardLaw) -> Result<Vec<Vec<f64>>> {
    let n = params.n_bins();
    match law {
        HardLaw::Exact => {
            let t = transition_matrix(params)?;
            Ok(t.joint().into_iter().map(|row| row.into_iter().map(f64::ln).collect()).collect())
        }
        HardLaw::HighSnr => {
            if params.sigma() > HIGHSNR_SIGMA {
                return Err(Error::Domain(format!(
                    "high-SNR law needs sigma <= {HIGHSNR_SIGMA}, got {}",
                    params.sigma()
                )));
            }
            let h = HighSnrLaw::new(params);
            let mut ln = vec![vec![f64::NEG_INFINITY; n]; n];
            for (i, row) in ln.iter_mut().enumerate() {
                let edge = i == 0 || i == n - 1;
                let (prior, p) = if edge { (h.prior_edge, h.p_edge) } else { (h.prior_interior, h.p_interior) };
                let mut stay = 1.0;
                for j in [i.wrapping_sub(1), i + 1] {
                    if j < n {
                        row[j] = (prior * p).ln();
                        stay -= p;
                    }
                }
                row[i] = (prior * stay).ln();
            }
            Ok(ln)
        }
    }
}

/// Hard-output bit posteriors given Bob's bin `j`.
pub fn bit_app_hard(params: &ChannelParams, j: usize, m: u32, law: HardLaw) -> Result<Vec<BitApp>> {
    check_m(params, m)?;
    if j >= params.n_bins() {
        return Err(Error::Domain(format!("bin {j} outside Z_{}", params.n_bins())));
    }
    let ln = hard_ln_joint(params, law)?;
    let col: Vec<f64> = ln.iter().map(|row| row[j]).collect();
    let mut out = Vec::new();
    marginalize(&col, m, AppSource::HardOutput, &mut out);
    Ok(out)
}

/// Grid spacing of the edge table, in units of `sigma`.
pub const EDGE_TABLE_STEP: f64 = 0.01;

/// `ln g_i(y)` tabulated near the left frame edge and mirrored to the right
/// one through `g_i(y) = g_{N-1-i}(N - y)`. Away from both edges the kernel
/// has a closed form and the table is not consulted.
#[derive(Debug, Clone)]
struct EdgeTable {
    n: usize,
    width: f64,
    h: f64,
    /// Row `j` holds `ln g(j h)`.
    rows: Vec<f64>,
}

impl EdgeTable {
    fn new(ch: &SoftChannel) -> Result<Self> {
        let n = ch.params().n_bins();
        let width = ch.edge_width().min(n as f64 / 2.0);
        let h = EDGE_TABLE_STEP * ch.params().sigma();
        let points = (width / h).ceil() as usize + 3;
        let mut rows = vec![0.0; points * n];
        for (j, row) in rows.chunks_mut(n).enumerate() {
            ch.ln_kernel(j as f64 * h, row)?;
        }
        Ok(Self { n, width, h, rows })
    }

    /// Four-point Lagrange interpolation of `ln g(y)` for `y` in `[0, width]`.
    fn left(&self, y: f64, out: &mut [f64]) {
        let points = self.rows.len() / self.n;
        let k = ((y / self.h).floor() as usize).clamp(1, points - 3) - 1;
        let x = y / self.h - k as f64;
        let w = [
            -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0,
            x * (x - 2.0) * (x - 3.0) / 2.0,
            -x * (x - 1.0) * (x - 3.0) / 2.0,
            x * (x - 1.0) * (x - 2.0) / 6.0,
        ];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|q| w[q] * self.rows[(k + q) * self.n + i]).sum();
        }
    }

    /// `ln g(y)` if `y` lies in an edge region.
    fn lookup(&self, y: f64, out: &mut [f64]) -> bool {
        let nf = self.n as f64;
        if y <= self.width {
            self.left(y, out);
            true
        } else if y >= nf - self.width {
            self.left(nf - y, out);
            out.reverse();
            true
        } else {
            false
        }
    }
}

/// Reusable demapper for one channel and one APP source.
///
/// The exact source interpolates the edge-region kernel from a table with
/// spacing `EDGE_TABLE_STEP * sigma`; elsewhere it evaluates the closed form.
#[derive(Debug, Clone)]
pub struct BitDemapper {
    params: ChannelParams,
    source: AppSource,
    m: u32,
    soft: Option<(SoftChannel, EdgeTable)>,
    /// Hard mode: bit posteriors per Bob bin.
    hard: Vec<Vec<BitApp>>,
}

impl BitDemapper {
    pub fn new(params: &ChannelParams, source: AppSource) -> Result<Self> {
        Self::with_hard_law(params, source, HardLaw::Exact)
    }

    pub fn with_hard_law(params: &ChannelParams, source: AppSource, law: HardLaw) -> Result<Self> {
        let m = bits_of(params)?;
        let soft = match source {
            AppSource::ExactSoft => {
                let ch = SoftChannel::new(params)?;
                let table = EdgeTable::new(&ch)?;
                Some((ch, table))
            }
            _ => None,
        };
        let hard = if source == AppSource::HardOutput {
            let ln = hard_ln_joint(params, law)?;
            (0..params.n_bins())
                .map(|j| {
                    let col: Vec<f64> = ln.iter().map(|row| row[j]).collect();
                    let mut out = Vec::new();
                    marginalize(&col, m, source, &mut out);
                    out
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self { params: *params, source, m, soft, hard })
    }

    pub fn source(&self) -> AppSource {
        self.source
    }

    /// Bits per observation.
    pub fn bits(&self) -> u32 {
        self.m
    }

    /// Appends the `m` bit posteriors for Bob's position `y`.
    pub fn demap_into(&self, y: f64, out: &mut Vec<BitApp>) -> Result<()> {
        check_y(&self.params, y)?;
        let n = self.params.n_bins();
        let mut one = Vec::with_capacity(self.m as usize);
        match self.source {
            AppSource::ExactSoft => {
                let (ch, table) = self.soft.as_ref().expect("exact demapper holds its channel");
                let mut lg = vec![0.0; n];
                if !table.lookup(y, &mut lg) {
                    ch.ln_kernel(y, &mut lg)?;
                }
                marginalize(&lg, self.m, self.source, &mut one);
            }
            AppSource::SimplifiedSoft => {
                let mut s = vec![0.0; n];
                simplified_scores(self.params.sigma(), n, y, SIMPLIFIED_FLOOR, &mut s);
                marginalize(&s, self.m, self.source, &mut one);
            }
            AppSource::HardOutput => one.extend_from_slice(&self.hard[self.params.bin_of(y)]),
        }
        out.extend(one);
        Ok(())
    }
}
