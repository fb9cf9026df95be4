//! SNR sweep and list arguments.

use std::str::FromStr;

/// A sorted, non-empty list of SNR points in dB.
///
/// Accepts `start:stop:step` (inclusive of `stop` up to rounding) or a
/// comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrGrid(pub Vec<f64>);

impl FromStr for SnrGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("{x:?} is not a number"));
        let points = if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [a, b, step] = parts.as_slice() else {
                return Err(format!("expected start:stop:step, got {s:?}"));
            };
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a || !a.is_finite() || !b.is_finite() {
                return Err(format!("sweep {s:?} needs start <= stop and a positive step"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            if count > 100_000 {
                return Err(format!("sweep {s:?} has {count} points"));
            }
            // Round to the step's resolution so 0.1 steps print cleanly.
            (0..count).map(|k| ((a + k as f64 * step) * 1e9).round() / 1e9).collect()
        } else {
            s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
        };
        if points.is_empty() || points.iter().any(|x| !x.is_finite()) {
            return Err("sweep is empty".into());
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(format!("sweep {s:?} is not strictly increasing"));
        }
        Ok(SnrGrid(points))
    }
}

/// Comma-separated positive integers.
#[derive(Debug, Clone, PartialEq)]
pub struct UsizeList(pub Vec<usize>);

impl FromStr for UsizeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = s
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| format!("{x:?} is not a positive integer")))
            .collect::<Result<Vec<_>, _>>()?;
        if v.is_empty() || v.contains(&0) {
            return Err("list must hold positive integers".into());
        }
        Ok(UsizeList(v))
    }
}
