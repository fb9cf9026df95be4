//! Primitive narrow-sense Reed–Solomon codes over `GF(2^w)`.

use super::bm::bm_decode;
use super::gf::{FieldSpec, GaloisField, Gf};
use crate::{Error, Result};

/// RS code of length `n = 2^w - 1`, dimension `k = n - 2t`, with zeros
/// `alpha^1, ..., alpha^2t`.
#[derive(Debug, Clone)]
pub struct RsCode {
    field: GaloisField,
    n: usize,
    k: usize,
    t: usize,
    generator: Vec<Gf>,
}

impl RsCode {
    pub fn new(spec: FieldSpec, t: usize) -> Result<Self> {
        let field = GaloisField::new(spec)?;
        let n = field.order();
        if t == 0 || 2 * t >= n {
            return Err(Error::ConstructionFailure(format!("radius {t} invalid for length {n}")));
        }
        let mut generator = vec![1 as Gf];
        for j in 1..=2 * t {
            let root = field.alpha_pow(j as i64);
            let mut next = vec![0 as Gf; generator.len() + 1];
            for (i, &g) in generator.iter().enumerate() {
                next[i + 1] ^= g;
                next[i] ^= field.mul(g, root);
            }
            generator = next;
        }
        Ok(Self { field, n, k: n - 2 * t, t, generator })
    }

    /// RS[63, 43] over GF(64), `t = 10`.
    pub fn rs63_43() -> Self {
        Self::new(FieldSpec::GF64, 10).expect("GF(64) tables are valid")
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
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

    /// Generator polynomial coefficients, constant term first.
    pub fn generator(&self) -> &[Gf] {
        &self.generator
    }

    /// `H[j][i] = alpha^((j+1) i)`; full rank `n - k`.
    pub fn parity_check(&self) -> Vec<Vec<Gf>> {
        (0..2 * self.t).map(|j| (0..self.n).map(|i| self.field.alpha_pow(((j + 1) * i) as i64)).collect()).collect()
    }

    fn check_word(&self, word: &[Gf]) -> Result<()> {
        let q = 1u32 << self.field.width();
        if word.len() != self.n || word.iter().any(|&s| s as u32 >= q) {
            return Err(Error::Domain(format!("word must be {} symbols below {q}", self.n)));
        }
        Ok(())
    }

    /// Power-sum syndrome `S_j = word(alpha^j)`, `j = 1..2t`.
    pub fn syndrome(&self, word: &[Gf]) -> Result<Vec<Gf>> {
        self.check_word(word)?;
        Ok((1..=2 * self.t).map(|j| self.field.poly_eval(word, self.field.alpha_pow(j as i64))).collect())
    }

    /// Systematic encoding: message in positions `n-k..n`, parity below.
    pub fn encode(&self, msg: &[Gf]) -> Result<Vec<Gf>> {
        if msg.len() != self.k {
            return Err(Error::Domain(format!("message must have {} symbols", self.k)));
        }
        let r = self.n - self.k;
        let mut word = vec![0 as Gf; self.n];
        word[r..].copy_from_slice(msg);
        // Remainder of msg(x) x^r by the monic generator.
        let mut rem = word.clone();
        for i in (r..self.n).rev() {
            let c = rem[i];
            if c != 0 {
                for (j, &g) in self.generator.iter().enumerate() {
                    rem[i - r + j] ^= self.field.mul(c, g);
                }
            }
        }
        word[..r].copy_from_slice(&rem[..r]);
        Ok(word)
    }

    /// Error vector with syndrome `syn`. With `guard`, the result is
    /// re-checked against `syn` and the radius, rejecting miscorrections.
    pub fn decode_syndrome(&self, syn: &[Gf], guard: bool) -> Result<Vec<Gf>> {
        let pat = bm_decode(&self.field, syn, self.t, self.n)?;
        let mut e = vec![0 as Gf; self.n];
        for (&p, &v) in pat.positions.iter().zip(&pat.values) {
            e[p] = v;
        }
        if guard {
            let weight = e.iter().filter(|&&x| x != 0).count();
            if weight > self.t || self.syndrome(&e)? != syn {
                return Err(Error::DecodeFailure("re-encoding check rejected the correction".into()));
            }
        }
        Ok(e)
    }
}
