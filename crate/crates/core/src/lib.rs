//! Channel model, secret-key rates and information-reconciliation codes for
//! time-entanglement QKD with Gaussian detector jitter.
//!
//! Photons are pulse-position modulated into frames of `N` bins. Alice and Bob
//! observe the same emission time through independent Gaussian jitter, quantize
//! it to a bin index, and reconcile their raw keys over a public channel by
//! exchanging syndromes.
//!
//! * [`numerics`]: Gaussian tail, quadrature and entropies.
//! * [`channel`]: the jittered time-bin channel and its uncoded error rate.
//! * [`rates`]: priors, transition laws, mutual informations and Shannon limits.
//! * [`codes`]: finite fields, RS/BCH algebraic decoding, LDPC belief propagation,
//!   bit APPs and union bounds.
//! * [`reconcile`]: the one-way syndrome protocol, in process and over TCP.

// `!(x > 0.0)` guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod codes;
mod error;
pub mod numerics;
pub mod rates;
pub mod reconcile;
pub mod stream;

pub use error::{Error, Result};
