//! Binary-reflected Gray labelling of bins, most significant bit first.

use crate::{Error, Result};

/// Gray code of `i` as an integer.
pub fn gray_code(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Inverse of [`gray_code`].
pub fn gray_decode(mut g: usize) -> usize {
    let mut i = g;
    while g > 0 {
        g >>= 1;
        i ^= g;
    }
    i
}

/// The `m` bits of the Gray label of bin `i`, most significant first.
pub fn gray_label(i: usize, m: u32) -> Result<Vec<u8>> {
    if m == 0 || m > 16 || i >> m != 0 {
        return Err(Error::Domain(format!("bin {i} has no {m}-bit label")));
    }
    let g = gray_code(i);
    Ok((0..m).rev().map(|b| ((g >> b) & 1) as u8).collect())
}

/// Bin index whose Gray label is `bits`.
pub fn gray_unlabel(bits: &[u8]) -> usize {
    gray_decode(bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as usize))
}

/// Bit `l` (0 = most significant) of the `m`-bit Gray label of `i`.
#[inline]
pub fn gray_bit(i: usize, l: u32, m: u32) -> u8 {
    ((gray_code(i) >> (m - 1 - l)) & 1) as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_labels() {
        assert_eq!(gray_label(0, 3).unwrap(), vec![0, 0, 0]);
        assert_eq!(gray_label(1, 3).unwrap(), vec![0, 0, 1]);
        assert_eq!(gray_label(2, 3).unwrap(), vec![0, 1, 1]);
        assert_eq!(gray_label(7, 3).unwrap(), vec![1, 0, 0]);
        assert!(gray_label(8, 3).is_err());
    }

    #[test]
    fn round_trip_and_adjacency_exhaustive() {
        for m in 1..=6u32 {
            for i in 0..(1usize << m) {
                let l = gray_label(i, m).unwrap();
                assert_eq!(gray_unlabel(&l), i);
                for b in 0..m {
                    assert_eq!(gray_bit(i, b, m), l[b as usize]);
                }
                if i + 1 < 1 << m {
                    let n = gray_label(i + 1, m).unwrap();
                    assert_eq!(l.iter().zip(&n).filter(|(a, b)| a != b).count(), 1);
                }
            }
        }
    }
}
