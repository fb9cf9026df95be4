//! Berlekamp–Massey decoding from narrow-sense power-sum syndromes
//! `S_j = r(alpha^j)`, `j = 1..2t`, followed by a Chien search and Forney's formula.

use super::gf::{GaloisField, Gf};
use crate::{Error, Result};

/// Error positions (ascending) and their values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ErrorPattern {
    pub positions: Vec<usize>,
    pub values: Vec<Gf>,
}

/// Shortest LFSR `Lambda(x)` generating the syndrome sequence; returns
/// `(Lambda, L)` with `Lambda[0] = 1`.
pub fn berlekamp_massey(f: &GaloisField, syn: &[Gf]) -> (Vec<Gf>, usize) {
    let mut c = vec![1 as Gf];
    let mut b = vec![1 as Gf];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd: Gf = 1;
    for r in 0..syn.len() {
        let mut d = syn[r];
        for i in 1..=l.min(c.len() - 1) {
            d ^= f.mul(c[i], syn[r - i]);
        }
        if d == 0 {
            m += 1;
            continue;
        }
        let coef = f.mul(d, f.inv(bd).expect("discrepancy base is nonzero"));
        let t = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            c[i + m] ^= f.mul(coef, bi);
        }
        if 2 * l <= r {
            l = r + 1 - l;
            b = t;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    while c.len() > 1 && *c.last().unwrap() == 0 {
        c.pop();
    }
    (c, l)
}

/// Decodes `syn = [S_1, ..., S_2t]` for a code of (possibly shortened) length `n`.
///
/// Fails when the locator degree exceeds `t`, its root count differs from its
/// degree, or a root points past the shortened length.
pub fn bm_decode(f: &GaloisField, syn: &[Gf], t: usize, n: usize) -> Result<ErrorPattern> {
    if syn.len() != 2 * t {
        return Err(Error::Domain(format!("expected {} syndromes, got {}", 2 * t, syn.len())));
    }
    if syn.iter().all(|&s| s == 0) {
        return Ok(ErrorPattern::default());
    }
    let (lambda, l) = berlekamp_massey(f, syn);
    if l > t || lambda.len() != l + 1 {
        return Err(Error::DecodeFailure(format!("locator degree {l} exceeds radius {t}")));
    }
    // Chien search over the full multiplicative group.
    let mut positions = Vec::with_capacity(l);
    for i in 0..f.order() {
        if f.poly_eval(&lambda, f.alpha_pow(-(i as i64))) == 0 {
            positions.push(i);
        }
    }
    if positions.len() != l {
        return Err(Error::DecodeFailure(format!("locator of degree {l} has {} roots", positions.len())));
    }
    if let Some(&p) = positions.iter().find(|&&p| p >= n) {
        return Err(Error::DecodeFailure(format!("error located at {p}, beyond length {n}")));
    }
    // Omega = S(x) Lambda(x) mod x^2t; e = Omega(X^-1) / Lambda'(X^-1).
    let mut omega = vec![0 as Gf; 2 * t];
    for (i, &li) in lambda.iter().enumerate() {
        for j in 0..2 * t - i {
            omega[i + j] ^= f.mul(li, syn[j]);
        }
    }
    let deriv: Vec<Gf> = lambda.iter().enumerate().skip(1).map(|(k, &c)| if k % 2 == 1 { c } else { 0 }).collect();
    let mut values = Vec::with_capacity(l);
    for &p in &positions {
        let xinv = f.alpha_pow(-(p as i64));
        let den = f.poly_eval(&deriv, xinv);
        if den == 0 {
            return Err(Error::DecodeFailure("repeated locator root".into()));
        }
        values.push(f.div(f.poly_eval(&omega, xinv), den)?);
    }
    Ok(ErrorPattern { positions, values })
}
