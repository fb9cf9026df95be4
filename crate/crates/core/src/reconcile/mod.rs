//! One-way syndrome reconciliation.
//!
//! Alice discloses the syndrome of her raw word; Bob decodes the difference
//! between his own syndrome and hers (algebraic codes) or runs belief
//! propagation toward her syndrome from his soft observations (LDPC).
//!
//! Raw words are built from valid-frame bins: each bin contributes its
//! `m`-bit Gray label, most significant bit first. An RS symbol of width
//! `w` packs `w / m` consecutive photons; binary codes take one bit per
//! position. Both parties are assumed to see the same sequence of valid
//! frames.

pub mod sim;
pub mod transport;
pub mod wire;

use crate::channel::{ChannelParams, SoftObservation};
use crate::codes::{gray_bit, gray_label, ldpc_bp_run, AppSource, BitDemapper, BpConfig, Code, LdpcCode};
use crate::{Error, Result};

/// Alice's public message for one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeMessage {
    pub code_id: String,
    /// Bits per syndrome symbol.
    pub field_width: u32,
    pub syndrome: Vec<u16>,
    /// Photons (valid frames) the block covers.
    pub frame_count: u32,
    pub session_nonce: [u8; 8],
}

/// Bob's outcome for one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconciliationResult {
    pub recovered_word: Vec<u16>,
    pub success: bool,
    /// Bit differences from Alice's word; known only in simulation.
    pub residual_bit_errors: Option<usize>,
    /// Belief-propagation iterations, for LDPC codes.
    pub iterations_used: Option<usize>,
}

impl ReconciliationResult {
    /// Records the bit distance to Alice's word.
    pub fn with_truth(mut self, alice_word: &[u16]) -> Self {
        self.residual_bit_errors = Some(bit_distance(&self.recovered_word, alice_word));
        self
    }
}

/// Hamming distance between two words, counted in bits.
pub fn bit_distance(a: &[u16], b: &[u16]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones() as usize).sum::<usize>() + 16 * a.len().abs_diff(b.len())
}

/// Photons per block for a code at `m` bits per photon.
pub fn photons_per_block(code: &Code, m: u32) -> Result<usize> {
    let bits = code.n() * code.symbol_bits() as usize;
    let sym = code.symbol_bits();
    let fits = if sym > 1 { sym.is_multiple_of(m) } else { bits.is_multiple_of(m as usize) };
    if m == 0 || !fits {
        return Err(Error::Config(format!("{} symbols of {sym} bits do not pack whole {m}-bit photons", code.n())));
    }
    Ok(bits / m as usize)
}

/// Raw word from Alice's or Bob's bins.
pub fn raw_word(code: &Code, bins: &[usize], m: u32) -> Result<Vec<u16>> {
    let photons = photons_per_block(code, m)?;
    if bins.len() != photons {
        return Err(Error::Domain(format!("block needs {photons} photons, got {}", bins.len())));
    }
    let mut bits = Vec::with_capacity(photons * m as usize);
    for &b in bins {
        bits.extend(gray_label(b, m)?);
    }
    let w = code.symbol_bits() as usize;
    Ok(bits.chunks(w).map(|c| c.iter().fold(0u16, |acc, &b| (acc << 1) | b as u16)).collect())
}

/// Public leakage and resulting rate of one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leakage {
    pub bits_disclosed: usize,
    pub photons: usize,
    /// `(n w - bits_disclosed) / photons`, bits per photon.
    pub key_rate: f64,
}

pub fn leakage(code: &Code, m: u32) -> Result<Leakage> {
    let photons = photons_per_block(code, m)?;
    let bits_disclosed = code.leakage_bits();
    let total = code.n() * code.symbol_bits() as usize;
    Ok(Leakage { bits_disclosed, photons, key_rate: (total - bits_disclosed) as f64 / photons as f64 })
}

/// Alice's syndrome message for her raw word.
pub fn alice_emit(raw_word: &[u16], code: &Code, frame_count: u32, session_nonce: [u8; 8]) -> Result<SyndromeMessage> {
    Ok(SyndromeMessage {
        code_id: code.spec().to_string(),
        field_width: code.syndrome_symbol_bits(),
        syndrome: code.syndrome(raw_word)?,
        frame_count,
        session_nonce,
    })
}

fn check_message(msg: &SyndromeMessage, code: &Code) -> Result<()> {
    if msg.code_id != code.spec().to_string() {
        return Err(Error::Config(format!("message is for {}, decoder holds {}", msg.code_id, code.spec())));
    }
    if msg.syndrome.len() != code.syndrome_len() || msg.field_width != code.syndrome_symbol_bits() {
        return Err(Error::MalformedFrame(format!(
            "syndrome of {} x {} bits, expected {} x {}",
            msg.syndrome.len(),
            msg.field_width,
            code.syndrome_len(),
            code.syndrome_symbol_bits()
        )));
    }
    Ok(())
}

/// Bob's algebraic decoding: the difference of syndromes is the syndrome of
/// `bob - alice`, which bounded-distance decoding recovers when its weight
/// is at most `t`. Failures leave Bob's word and report `success = false`.
pub fn bob_reconcile_algebraic(bob_word: &[u16], msg: &SyndromeMessage, code: &Code) -> Result<ReconciliationResult> {
    check_message(msg, code)?;
    let own = code.syndrome(bob_word)?;
    let diff: Vec<u16> = own.iter().zip(&msg.syndrome).map(|(a, b)| a ^ b).collect();
    let decoded = match code {
        Code::Rs(c) => c.decode_syndrome(&diff, true),
        Code::Bch(c) => {
            let bits: Vec<u8> = diff.iter().map(|&b| b as u8).collect();
            c.decode_syndrome(&bits, true).map(|e| e.into_iter().map(u16::from).collect())
        }
        Code::Ldpc(_) => return Err(Error::Config("LDPC codes reconcile with soft decoding".into())),
    };
    Ok(match decoded {
        Ok(e) => ReconciliationResult {
            recovered_word: bob_word.iter().zip(&e).map(|(b, e)| b ^ e).collect(),
            success: true,
            residual_bit_errors: None,
            iterations_used: None,
        },
        Err(Error::DecodeFailure(_)) => ReconciliationResult {
            recovered_word: bob_word.to_vec(),
            success: false,
            residual_bit_errors: None,
            iterations_used: None,
        },
        Err(e) => return Err(e),
    })
}

/// Bob's soft decoding with a prepared demapper.
pub fn bob_reconcile_soft_with(
    observations: &[SoftObservation],
    msg: &SyndromeMessage,
    code: &LdpcCode,
    demapper: &BitDemapper,
    cfg: &BpConfig,
) -> Result<ReconciliationResult> {
    let m = demapper.bits() as usize;
    if observations.len() * m != code.n() {
        return Err(Error::Domain(format!(
            "{} observations of {m} bits do not fill length {}",
            observations.len(),
            code.n()
        )));
    }
    if msg.syndrome.len() != code.m() || msg.field_width != 1 {
        return Err(Error::MalformedFrame(format!("LDPC syndrome must be {} bits", code.m())));
    }
    let mut apps = Vec::with_capacity(code.n());
    for o in observations {
        demapper.demap_into(o.bob_position(), &mut apps)?;
    }
    let target: Vec<u8> = msg.syndrome.iter().map(|&b| b as u8).collect();
    let out = ldpc_bp_run(&apps, &target, code, cfg)?;
    Ok(ReconciliationResult {
        recovered_word: out.word.into_iter().map(u16::from).collect(),
        success: out.converged,
        residual_bit_errors: None,
        iterations_used: Some(out.iterations),
    })
}

/// Bob's soft decoding: bit posteriors per `app_mode`, then BP toward Alice's syndrome.
pub fn bob_reconcile_soft(
    observations: &[SoftObservation],
    msg: &SyndromeMessage,
    code: &LdpcCode,
    params: &ChannelParams,
    app_mode: AppSource,
) -> Result<ReconciliationResult> {
    let demapper = BitDemapper::new(params, app_mode)?;
    let wrapped = Code::Ldpc(code.clone());
    check_message(msg, &wrapped)?;
    bob_reconcile_soft_with(observations, msg, code, &demapper, &BpConfig::default())
}

/// Alice's LDPC raw word from her bins, one bit per position.
pub fn ldpc_word(bins: &[usize], m: u32) -> Vec<u16> {
    bins.iter().flat_map(|&b| (0..m).map(move |l| gray_bit(b, l, m) as u16)).collect()
}
