//! Shortened primitive binary BCH codes.
//!
//! The wire syndrome is the remainder `r(x) mod g(x)` (`n - k` bits). Since
//! `g(alpha^j) = 0` for `j = 1..2t`, the power sums the algebraic decoder
//! needs are recovered by evaluating that remainder.

use super::bm::bm_decode;
use super::gf::{FieldSpec, GaloisField, Gf};
use crate::{Error, Result};

/// Binary BCH code shortened from length `2^w - 1` by fixing the top
/// positions to zero.
#[derive(Debug, Clone)]
pub struct BchCode {
    field: GaloisField,
    primitive_length: usize,
    n: usize,
    k: usize,
    t: usize,
    generator: Vec<u8>,
    generator_mask: u128,
}

impl BchCode {
    pub fn new(spec: FieldSpec, n: usize, t: usize) -> Result<Self> {
        let field = GaloisField::new(spec)?;
        let primitive_length = field.order();
        // Product of the minimal polynomials of alpha^1..alpha^2t.
        let mut seen = vec![false; primitive_length];
        let mut g = vec![1 as Gf];
        for j in 1..=2 * t {
            if seen[j % primitive_length] {
                continue;
            }
            let mut e = j % primitive_length;
            loop {
                seen[e] = true;
                let root = field.alpha_pow(e as i64);
                let mut next = vec![0 as Gf; g.len() + 1];
                for (i, &c) in g.iter().enumerate() {
                    next[i + 1] ^= c;
                    next[i] ^= field.mul(c, root);
                }
                g = next;
                e = (2 * e) % primitive_length;
                if e == j % primitive_length {
                    break;
                }
            }
        }
        if g.iter().any(|&c| c > 1) {
            return Err(Error::ConstructionFailure("generator is not binary".into()));
        }
        let generator: Vec<u8> = g.iter().map(|&c| c as u8).collect();
        let r = generator.len() - 1;
        if r >= 127 {
            return Err(Error::ConstructionFailure(format!("generator degree {r} exceeds 126")));
        }
        let k_primitive = primitive_length - r;
        let shortening = primitive_length
            .checked_sub(n)
            .filter(|&s| s < k_primitive)
            .ok_or_else(|| Error::ConstructionFailure(format!("cannot shorten length {primitive_length} to {n}")))?;
        let generator_mask = generator.iter().enumerate().fold(0u128, |m, (i, &b)| m | ((b as u128) << i));
        Ok(Self { field, primitive_length, n, k: k_primitive - shortening, t, generator, generator_mask })
    }

    /// BCH[378, 261] shortened from length 511, `t = 13`.
    pub fn bch378_261() -> Self {
        Self::new(FieldSpec::GF512, 378, 13).expect("GF(512) BCH parameters are consistent")
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn primitive_length(&self) -> usize {
        self.primitive_length
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Number of syndrome bits, `n - k`.
    pub fn redundancy(&self) -> usize {
        self.generator.len() - 1
    }

    /// Generator coefficients, constant term first.
    pub fn generator(&self) -> &[u8] {
        &self.generator
    }

    fn check_word(&self, word: &[u8]) -> Result<()> {
        if word.len() != self.n || word.iter().any(|&b| b > 1) {
            return Err(Error::Domain(format!("word must be {} bits", self.n)));
        }
        Ok(())
    }

    fn remainder(&self, word: &[u8]) -> u128 {
        let r = self.redundancy();
        let mut reg: u128 = 0;
        for &b in word.iter().rev() {
            reg = (reg << 1) | b as u128;
            if reg >> r & 1 == 1 {
                reg ^= self.generator_mask;
            }
        }
        reg
    }

    /// `word(x) mod g(x)` as `n - k` bits, constant term first.
    pub fn syndrome(&self, word: &[u8]) -> Result<Vec<u8>> {
        self.check_word(word)?;
        let reg = self.remainder(word);
        Ok((0..self.redundancy()).map(|i| (reg >> i & 1) as u8).collect())
    }

    /// Power sums `S_j = rem(alpha^j)`, `j = 1..2t`, from a remainder syndrome.
    pub fn power_sums(&self, remainder: &[u8]) -> Vec<Gf> {
        let coeffs: Vec<Gf> = remainder.iter().map(|&b| b as Gf).collect();
        (1..=2 * self.t).map(|j| self.field.poly_eval(&coeffs, self.field.alpha_pow(j as i64))).collect()
    }

    /// Systematic encoding: message bits at positions `n-k..n`.
    pub fn encode(&self, msg: &[u8]) -> Result<Vec<u8>> {
        if msg.len() != self.k || msg.iter().any(|&b| b > 1) {
            return Err(Error::Domain(format!("message must be {} bits", self.k)));
        }
        let r = self.redundancy();
        let mut word = vec![0u8; self.n];
        word[r..].copy_from_slice(msg);
        let reg = self.remainder(&word);
        for (i, w) in word.iter_mut().take(r).enumerate() {
            *w = (reg >> i & 1) as u8;
        }
        Ok(word)
    }

    /// Error vector whose remainder syndrome is `remainder`.
    pub fn decode_syndrome(&self, remainder: &[u8], guard: bool) -> Result<Vec<u8>> {
        if remainder.len() != self.redundancy() {
            return Err(Error::Domain(format!("syndrome must be {} bits", self.redundancy())));
        }
        let pat = bm_decode(&self.field, &self.power_sums(remainder), self.t, self.n)?;
        if pat.values.iter().any(|&v| v != 1) {
            return Err(Error::DecodeFailure("non-binary error value".into()));
        }
        let mut e = vec![0u8; self.n];
        for &p in &pat.positions {
            e[p] = 1;
        }
        if guard && (pat.positions.len() > self.t || self.syndrome(&e)? != remainder) {
            return Err(Error::DecodeFailure("re-encoding check rejected the correction".into()));
        }
        Ok(e)
    }
}
