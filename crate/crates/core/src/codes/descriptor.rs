//! Code descriptors: a compact id for the wire and a TOML form for files.
//!
//! Ids are `rs-<n>-<k>`, `bch-<n0>-<n>-<t>` (primitive length `n0`) and
//! `ldpc-<n>-<dv>-<dc>-s<seed>`.

use super::bch::BchCode;
use super::gf::FieldSpec;
use super::ldpc::LdpcCode;
use super::rs::RsCode;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Parameters that determine a code completely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CodeSpec {
    Rs { field_width: u32, t: usize },
    Bch { field_width: u32, n: usize, t: usize },
    Ldpc { n: usize, dv: usize, dc: usize, seed: u64 },
}

impl CodeSpec {
    /// RS[63, 43] over GF(64).
    pub const RS63_43: CodeSpec = CodeSpec::Rs { field_width: 6, t: 10 };
    /// BCH[378, 261] shortened from 511.
    pub const BCH378_261: CodeSpec = CodeSpec::Bch { field_width: 9, n: 378, t: 13 };

    /// The (3,9)-regular LDPC code of length `n`.
    pub fn ldpc39(n: usize, seed: u64) -> CodeSpec {
        CodeSpec::Ldpc { n, dv: 3, dc: 9, seed }
    }

    pub fn build(&self) -> Result<Code> {
        Ok(match *self {
            CodeSpec::Rs { field_width, t } => Code::Rs(RsCode::new(FieldSpec::for_width(field_width)?, t)?),
            CodeSpec::Bch { field_width, n, t } => Code::Bch(BchCode::new(FieldSpec::for_width(field_width)?, n, t)?),
            CodeSpec::Ldpc { n, dv, dc, seed } => Code::Ldpc(LdpcCode::construct(n, dv, dc, seed)?),
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CodeSpec::Rs { field_width, t } => {
                let n = (1usize << field_width) - 1;
                write!(f, "rs-{n}-{}", n.saturating_sub(2 * t))
            }
            CodeSpec::Bch { field_width, n, t } => write!(f, "bch-{}-{n}-{t}", (1usize << field_width) - 1),
            CodeSpec::Ldpc { n, dv, dc, seed } => write!(f, "ldpc-{n}-{dv}-{dc}-s{seed}"),
        }
    }
}

fn primitive_width(n0: usize) -> Option<u32> {
    (n0 + 1).is_power_of_two().then(|| (n0 + 1).trailing_zeros())
}

impl FromStr for CodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unrecognized code id {s:?}"));
        let parts: Vec<&str> = s.split('-').collect();
        let num = |x: &str| x.parse::<usize>().map_err(|_| bad());
        match parts.as_slice() {
            ["rs", n, k] => {
                let (n, k) = (num(n)?, num(k)?);
                let w = primitive_width(n).ok_or_else(bad)?;
                if k >= n || (n - k) % 2 != 0 {
                    return Err(bad());
                }
                Ok(CodeSpec::Rs { field_width: w, t: (n - k) / 2 })
            }
            ["bch", n0, n, t] => {
                let w = primitive_width(num(n0)?).ok_or_else(bad)?;
                Ok(CodeSpec::Bch { field_width: w, n: num(n)?, t: num(t)? })
            }
            ["ldpc", n, dv, dc, seed] => {
                let seed = seed.strip_prefix('s').and_then(|x| x.parse().ok()).ok_or_else(bad)?;
                Ok(CodeSpec::Ldpc { n: num(n)?, dv: num(dv)?, dc: num(dc)?, seed })
            }
            _ => Err(bad()),
        }
    }
}

/// A constructed code.
#[derive(Debug, Clone)]
pub enum Code {
    Rs(RsCode),
    Bch(BchCode),
    Ldpc(LdpcCode),
}

impl Code {
    pub fn spec(&self) -> CodeSpec {
        match self {
            Code::Rs(c) => CodeSpec::Rs { field_width: c.field().width(), t: c.t() },
            Code::Bch(c) => CodeSpec::Bch { field_width: c.field().width(), n: c.n(), t: c.t() },
            Code::Ldpc(c) => CodeSpec::Ldpc { n: c.n(), dv: c.dv(), dc: c.dc(), seed: c.seed() },
        }
    }

    /// Length in symbols.
    pub fn n(&self) -> usize {
        match self {
            Code::Rs(c) => c.n(),
            Code::Bch(c) => c.n(),
            Code::Ldpc(c) => c.n(),
        }
    }

    /// Dimension in symbols.
    pub fn k(&self) -> usize {
        match self {
            Code::Rs(c) => c.k(),
            Code::Bch(c) => c.k(),
            Code::Ldpc(c) => c.n() - c.m(),
        }
    }

    /// Bits per code symbol.
    pub fn symbol_bits(&self) -> u32 {
        match self {
            Code::Rs(c) => c.field().width(),
            Code::Bch(_) | Code::Ldpc(_) => 1,
        }
    }

    /// Syndrome length in symbols of `syndrome_symbol_bits` each.
    pub fn syndrome_len(&self) -> usize {
        match self {
            Code::Rs(c) => 2 * c.t(),
            Code::Bch(c) => c.redundancy(),
            Code::Ldpc(c) => c.m(),
        }
    }

    pub fn syndrome_symbol_bits(&self) -> u32 {
        self.symbol_bits()
    }

    /// Public bits per block: `(n - k)` symbols of the code's width.
    pub fn leakage_bits(&self) -> usize {
        self.syndrome_len() * self.syndrome_symbol_bits() as usize
    }

    /// Syndrome of a word given as symbols.
    pub fn syndrome(&self, word: &[u16]) -> Result<Vec<u16>> {
        match self {
            Code::Rs(c) => c.syndrome(word),
            Code::Bch(c) => Ok(c.syndrome(&to_bits(word)?)?.into_iter().map(u16::from).collect()),
            Code::Ldpc(c) => Ok(c.syndrome(&to_bits(word)?)?.into_iter().map(u16::from).collect()),
        }
    }
}

fn to_bits(word: &[u16]) -> Result<Vec<u8>> {
    word.iter()
        .map(|&b| if b <= 1 { Ok(b as u8) } else { Err(Error::Domain(format!("symbol {b} is not a bit"))) })
        .collect()
}
