//! Binary extension fields `GF(2^w)` via log/antilog tables.

use crate::{Error, Result};

/// `GF(2^w)` defined by a primitive polynomial, given as a bitmask including
/// the `x^w` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSpec {
    pub extension_degree: u32,
    pub primitive_polynomial: u32,
}

impl FieldSpec {
    /// `GF(64)` with `x^6 + x + 1`.
    pub const GF64: FieldSpec = FieldSpec { extension_degree: 6, primitive_polynomial: 0x43 };
    /// `GF(512)` with `x^9 + x^4 + 1`.
    pub const GF512: FieldSpec = FieldSpec { extension_degree: 9, primitive_polynomial: 0x211 };

    /// The numerically least primitive polynomial of degree `w`, for `2 <= w <= 12`.
    pub fn for_width(w: u32) -> Result<FieldSpec> {
        const POLYS: [u32; 11] = [0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11d, 0x211, 0x409, 0x805, 0x1053];
        let poly = (2..=12)
            .contains(&w)
            .then(|| POLYS[(w - 2) as usize])
            .ok_or_else(|| Error::Config(format!("no tabulated primitive polynomial of degree {w}")))?;
        Ok(FieldSpec { extension_degree: w, primitive_polynomial: poly })
    }
}

/// Field element; only the low `w` bits are used.
pub type Gf = u16;

#[derive(Debug, Clone)]
pub struct GaloisField {
    spec: FieldSpec,
    order: usize,
    exp: Vec<Gf>,
    log: Vec<u16>,
}

impl GaloisField {
    /// Builds the tables, failing unless the polynomial has degree `w` and
    /// `x` has multiplicative order `2^w - 1`.
    pub fn new(spec: FieldSpec) -> Result<Self> {
        let w = spec.extension_degree;
        if !(2..=15).contains(&w) || spec.primitive_polynomial >> w != 1 {
            return Err(Error::ConstructionFailure(format!(
                "polynomial {:#x} is not of degree {w}",
                spec.primitive_polynomial
            )));
        }
        let q = 1usize << w;
        let order = q - 1;
        let mut exp = vec![0; 2 * order];
        let mut log = vec![0; q];
        let mut x: u32 = 1;
        for (k, e) in exp.iter_mut().take(order).enumerate() {
            if k > 0 && x == 1 {
                return Err(Error::ConstructionFailure(format!(
                    "polynomial {:#x} is not primitive: x has order {k}",
                    spec.primitive_polynomial
                )));
            }
            *e = x as Gf;
            log[x as usize] = k as u16;
            x <<= 1;
            if x >> w != 0 {
                x ^= spec.primitive_polynomial;
            }
        }
        if x != 1 {
            return Err(Error::ConstructionFailure(format!(
                "polynomial {:#x} is reducible",
                spec.primitive_polynomial
            )));
        }
        for k in order..2 * order {
            exp[k] = exp[k - order];
        }
        Ok(Self { spec, order, exp, log })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// Bits per element.
    pub fn width(&self) -> u32 {
        self.spec.extension_degree
    }

    /// Multiplicative group order `2^w - 1`.
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn add(&self, a: Gf, b: Gf) -> Gf {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    pub fn inv(&self, a: Gf) -> Result<Gf> {
        if a == 0 {
            return Err(Error::Domain("zero has no inverse".into()));
        }
        Ok(self.exp[(self.order - self.log[a as usize] as usize) % self.order])
    }

    pub fn div(&self, a: Gf, b: Gf) -> Result<Gf> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `alpha^e` for any integer exponent.
    #[inline]
    pub fn alpha_pow(&self, e: i64) -> Gf {
        self.exp[e.rem_euclid(self.order as i64) as usize]
    }

    /// Discrete log base alpha; `None` for zero.
    pub fn log(&self, a: Gf) -> Option<usize> {
        (a != 0).then(|| self.log[a as usize] as usize)
    }

    pub fn pow(&self, a: Gf, e: i64) -> Gf {
        match self.log(a) {
            None => {
                if e == 0 {
                    1
                } else {
                    0
                }
            }
            Some(l) => self.alpha_pow(l as i64 * e),
        }
    }

    /// Evaluates `sum_i c[i] x^i` by Horner's rule.
    pub fn poly_eval(&self, c: &[Gf], x: Gf) -> Gf {
        c.iter().rev().fold(0, |acc, &ci| self.mul(acc, x) ^ ci)
    }
}
