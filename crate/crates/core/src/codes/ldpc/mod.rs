//! Regular binary LDPC codes: construction, syndrome and belief propagation.

mod alist;
mod bp;
mod construct;

pub use alist::{from_alist, to_alist};
pub use bp::{ldpc_bp_decode, ldpc_bp_run, llr_from_p_one, BpConfig, BpOutcome};

use crate::{Error, Result};

/// A `(dv, dc)`-regular parity-check matrix stored as both adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdpcCode {
    n: usize,
    dv: usize,
    dc: usize,
    seed: u64,
    check_vars: Vec<Vec<u32>>,
    var_checks: Vec<Vec<u32>>,
}

impl LdpcCode {
    /// Builds a code from the variable list of each check; fails unless the
    /// graph is simple and `(dv, dc)`-regular.
    pub fn from_checks(n: usize, check_vars: Vec<Vec<u32>>, seed: u64) -> Result<Self> {
        let mut var_checks = vec![Vec::new(); n];
        for (c, vars) in check_vars.iter().enumerate() {
            for &v in vars {
                let v = v as usize;
                if v >= n {
                    return Err(Error::ConstructionFailure(format!("check {c} names variable {v} >= {n}")));
                }
                if var_checks[v].last() == Some(&(c as u32)) {
                    return Err(Error::ConstructionFailure(format!("duplicate edge ({c}, {v})")));
                }
                var_checks[v].push(c as u32);
            }
        }
        let dc = check_vars.first().map_or(0, Vec::len);
        let dv = var_checks.first().map_or(0, Vec::len);
        if dv == 0 || check_vars.iter().any(|r| r.len() != dc) || var_checks.iter().any(|c| c.len() != dv) {
            return Err(Error::ConstructionFailure("parity-check matrix is not regular".into()));
        }
        let mut check_vars = check_vars;
        check_vars.iter_mut().for_each(|r| r.sort_unstable());
        Ok(Self { n, dv, dc, seed, check_vars, var_checks })
    }

    /// Progressive-edge-growth construction; see [`construct`](self).
    pub fn construct(n: usize, dv: usize, dc: usize, seed: u64) -> Result<Self> {
        construct::peg(n, dv, dc, seed)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of checks, `n dv / dc`.
    pub fn m(&self) -> usize {
        self.check_vars.len()
    }

    pub fn dv(&self) -> usize {
        self.dv
    }

    pub fn dc(&self) -> usize {
        self.dc
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Design rate `1 - dv/dc`.
    pub fn rate(&self) -> f64 {
        1.0 - self.m() as f64 / self.n as f64
    }

    pub fn check_vars(&self) -> &[Vec<u32>] {
        &self.check_vars
    }

    pub fn var_checks(&self) -> &[Vec<u32>] {
        &self.var_checks
    }

    /// `H w` over GF(2).
    pub fn syndrome(&self, word: &[u8]) -> Result<Vec<u8>> {
        if word.len() != self.n {
            return Err(Error::Domain(format!("word must be {} bits, got {}", self.n, word.len())));
        }
        Ok(self.check_vars.iter().map(|vars| vars.iter().fold(0u8, |acc, &v| acc ^ (word[v as usize] & 1))).collect())
    }

    /// Whether two checks share two variables.
    pub fn has_four_cycle(&self) -> bool {
        let mut mark = vec![usize::MAX; self.n];
        for v in 0..self.n {
            for &c in &self.var_checks[v] {
                for &u in &self.check_vars[c as usize] {
                    let u = u as usize;
                    if u == v {
                        continue;
                    }
                    if mark[u] == v {
                        return true;
                    }
                    mark[u] = v;
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_checks_validates() {
        let ok = LdpcCode::from_checks(4, vec![vec![0, 1], vec![2, 3], vec![0, 2], vec![1, 3]], 0).unwrap();
        assert_eq!((ok.dv(), ok.dc(), ok.m()), (2, 2, 4));
        assert!(!ok.has_four_cycle());
        assert!(LdpcCode::from_checks(4, vec![vec![0, 1, 2], vec![3]], 0).is_err());
        assert!(LdpcCode::from_checks(2, vec![vec![0, 5]], 0).is_err());
    }

    #[test]
    fn four_cycle_detection() {
        // Checks {0,1} and {0,1} share two variables.
        let c = LdpcCode::from_checks(2, vec![vec![0, 1], vec![0, 1]], 0).unwrap();
        assert!(c.has_four_cycle());
        let c = LdpcCode::from_checks(3, vec![vec![0, 1], vec![1, 2], vec![2, 0]], 0).unwrap();
        assert!(!c.has_four_cycle());
    }
}
