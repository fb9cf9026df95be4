//! Flooding sum-product decoding against a target syndrome.
//!
//! Check `c` enforces `sum_v x_v = s_c`, so its outgoing messages carry the
//! sign `(-1)^{s_c}`. Messages are LLRs `ln(P0/P1)` clamped to `+-clamp`.

use super::LdpcCode;
use crate::codes::bitapp::BitApp;
use crate::{Error, Result};

/// Decoder limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpConfig {
    pub max_iter: usize,
    /// Bound on every message magnitude.
    pub clamp: f64,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self { max_iter: 100, clamp: 30.0 }
    }
}

/// Result of a decoding run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpOutcome {
    /// Hard decisions after the last iteration.
    pub word: Vec<u8>,
    pub iterations: usize,
    /// Whether `word` has the target syndrome.
    pub converged: bool,
}

/// `ln((1-p)/p)`, clamped to `+-clamp`.
pub fn llr_from_p_one(p: f64, clamp: f64) -> f64 {
    let l = ((1.0 - p) / p).ln();
    if l.is_nan() {
        0.0
    } else {
        l.clamp(-clamp, clamp)
    }
}

fn check_inputs(apps: &[BitApp], target: &[u8], code: &LdpcCode, cfg: &BpConfig) -> Result<()> {
    if apps.len() != code.n() || target.len() != code.m() {
        return Err(Error::Domain(format!(
            "expected {} APPs and {} syndrome bits, got {} and {}",
            code.n(),
            code.m(),
            apps.len(),
            target.len()
        )));
    }
    if cfg.max_iter == 0 || !(cfg.clamp > 0.0) {
        return Err(Error::Config("BP needs max_iter >= 1 and a positive clamp".into()));
    }
    Ok(())
}

/// Runs BP to convergence or `max_iter`, whichever first.
pub fn ldpc_bp_run(apps: &[BitApp], target: &[u8], code: &LdpcCode, cfg: &BpConfig) -> Result<BpOutcome> {
    check_inputs(apps, target, code, cfg)?;
    let n = code.n();
    let clamp = cfg.clamp;
    let t_max = (clamp / 2.0).tanh();
    let channel: Vec<f64> = apps.iter().map(|a| a.llr().clamp(-clamp, clamp)).collect();

    // Edges in check-major order.
    let mut check_start = Vec::with_capacity(code.m() + 1);
    let mut edge_var = Vec::new();
    let mut var_edges: Vec<Vec<u32>> = vec![Vec::with_capacity(code.dv()); n];
    check_start.push(0usize);
    for vars in code.check_vars() {
        for &v in vars {
            var_edges[v as usize].push(edge_var.len() as u32);
            edge_var.push(v);
        }
        check_start.push(edge_var.len());
    }
    // tanh(q_e / 2) of each variable-to-check message.
    let mut tq: Vec<f64> = edge_var.iter().map(|&v| (channel[v as usize] / 2.0).tanh()).collect();
    let mut r = vec![0.0; edge_var.len()];
    let mut word = vec![0u8; n];
    let mut fwd = vec![0.0; code.dc() + 1];

    for iter in 1..=cfg.max_iter {
        for (c, w) in check_start.windows(2).enumerate() {
            let (lo, hi) = (w[0], w[1]);
            let sign = if target[c] & 1 == 1 { -1.0 } else { 1.0 };
            fwd.resize(hi - lo + 1, 0.0);
            fwd[0] = sign;
            for (k, e) in (lo..hi).enumerate() {
                fwd[k + 1] = fwd[k] * tq[e];
            }
            let mut bwd = 1.0;
            for (k, e) in (lo..hi).enumerate().rev() {
                let t = (fwd[k] * bwd).clamp(-t_max, t_max);
                bwd *= tq[e];
                r[e] = 2.0 * t.atanh();
            }
        }
        for v in 0..n {
            let post = channel[v] + var_edges[v].iter().map(|&e| r[e as usize]).sum::<f64>();
            word[v] = u8::from(post < 0.0);
            for &e in &var_edges[v] {
                tq[e as usize] = ((post - r[e as usize]).clamp(-clamp, clamp) / 2.0).tanh();
            }
        }
        let satisfied = check_start
            .windows(2)
            .zip(target)
            .all(|(w, &s)| edge_var[w[0]..w[1]].iter().fold(0u8, |acc, &v| acc ^ word[v as usize]) == s & 1);
        if satisfied {
            return Ok(BpOutcome { word, iterations: iter, converged: true });
        }
    }
    Ok(BpOutcome { word, iterations: cfg.max_iter, converged: false })
}

/// Word with syndrome `target` that BP finds from `apps`.
///
/// Fails with [`Error::DecodeFailure`] when the syndrome is not met within
/// `max_iter` iterations.
pub fn ldpc_bp_decode(apps: &[BitApp], target: &[u8], code: &LdpcCode, cfg: &BpConfig) -> Result<BpOutcome> {
    let out = ldpc_bp_run(apps, target, code, cfg)?;
    if !out.converged {
        return Err(Error::DecodeFailure(format!("syndrome unmet after {} BP iterations", out.iterations)));
    }
    Ok(out)
}
