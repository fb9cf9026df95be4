//! Error-correcting codes for syndrome reconciliation: finite fields, RS and
//! binary BCH algebraic decoding, regular LDPC belief propagation, Gray bit
//! posteriors and union bounds.

pub mod bch;
pub mod bitapp;
pub mod bm;
pub mod bounds;
pub mod descriptor;
pub mod gf;
pub mod gray;
pub mod ldpc;
pub mod rs;

pub use bch::BchCode;
pub use bitapp::{
    bit_app_exact, bit_app_hard, bit_app_simplified, bit_app_simplified_floor, AppSource, BitApp, BitDemapper, HardLaw,
    SIMPLIFIED_FLOOR,
};
pub use bm::{berlekamp_massey, bm_decode, ErrorPattern};
pub use bounds::{uncoded_bit_error_rate, union_bound_bch, union_bound_rs, BlockErrorModel};
pub use descriptor::{Code, CodeSpec};
pub use gf::{FieldSpec, GaloisField, Gf};
pub use gray::{gray_bit, gray_code, gray_decode, gray_label, gray_unlabel};
pub use ldpc::{from_alist, ldpc_bp_decode, ldpc_bp_run, llr_from_p_one, to_alist, BpConfig, BpOutcome, LdpcCode};
pub use rs::RsCode;
