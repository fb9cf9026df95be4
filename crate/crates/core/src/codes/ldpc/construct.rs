//! Progressive edge growth for regular codes.
//!
//! Variables are processed in order; each new edge goes to an unsaturated
//! check (degree below `dc`) that is unreachable from the variable, or else
//! at the greatest depth of the breadth-first tree rooted there. Ties go to
//! the lowest degree, then to a seeded random choice. Since every check is
//! capped at `dc` and `n dv = m dc`, the result is exactly regular. Graphs
//! that still contain a 4-cycle are rejected and rebuilt from a derived stream.

use super::LdpcCode;
use crate::stream::rng_for;
use crate::{Error, Result};
use rand::Rng;

/// Rebuilds attempted before giving up.
pub const MAX_ATTEMPTS: u64 = 32;

pub(super) fn peg(n: usize, dv: usize, dc: usize, seed: u64) -> Result<LdpcCode> {
    if dv == 0 || dc == 0 || n == 0 || !(n * dv).is_multiple_of(dc) {
        return Err(Error::ConstructionFailure(format!("n dv = {n} x {dv} is not a multiple of dc = {dc}")));
    }
    let m = n * dv / dc;
    if dv > m {
        return Err(Error::ConstructionFailure(format!("{dv} edges per variable but only {m} checks")));
    }
    let mut last = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        match grow(n, m, dv, dc, seed, attempt) {
            Some(checks) => {
                let code = LdpcCode::from_checks(n, checks, seed)?;
                if !code.has_four_cycle() {
                    return Ok(code);
                }
                last = "4-cycle remained".into();
            }
            None => last = "ran out of unsaturated checks".into(),
        }
        log::debug!("edge growth attempt {attempt} for n = {n} rejected: {last}");
    }
    Err(Error::ConstructionFailure(format!(
        "no 4-cycle-free ({dv},{dc}) graph at n = {n} after {MAX_ATTEMPTS} attempts: {last}"
    )))
}

fn grow(n: usize, m: usize, dv: usize, dc: usize, seed: u64, attempt: u64) -> Option<Vec<Vec<u32>>> {
    let mut rng = rng_for(seed, attempt);
    let mut check_vars: Vec<Vec<u32>> = vec![Vec::with_capacity(dc); m];
    let mut var_checks: Vec<Vec<u32>> = vec![Vec::with_capacity(dv); n];
    // BFS scratch: depth stamp per check and per variable, keyed by a visit id.
    let mut check_seen = vec![usize::MAX; m];
    let mut var_seen = vec![usize::MAX; n];
    let mut visit = 0usize;
    let mut unsaturated = m;
    let mut candidates: Vec<u32> = Vec::new();

    for v in 0..n {
        for k in 0..dv {
            candidates.clear();
            if k == 0 {
                candidates.extend((0..m as u32).filter(|&c| check_vars[c as usize].len() < dc));
            } else {
                visit += 1;
                let mut frontier: Vec<u32> = var_checks[v].clone();
                var_seen[v] = visit;
                let mut reached_open = 0usize;
                for &c in &frontier {
                    check_seen[c as usize] = visit;
                    if check_vars[c as usize].len() < dc {
                        reached_open += 1;
                    }
                }
                let mut last_layer = frontier.clone();
                while !frontier.is_empty() && reached_open < unsaturated {
                    last_layer = frontier.clone();
                    let mut next = Vec::new();
                    for &c in &frontier {
                        for &u in &check_vars[c as usize] {
                            if var_seen[u as usize] == visit {
                                continue;
                            }
                            var_seen[u as usize] = visit;
                            for &c2 in &var_checks[u as usize] {
                                if check_seen[c2 as usize] != visit {
                                    check_seen[c2 as usize] = visit;
                                    if check_vars[c2 as usize].len() < dc {
                                        reached_open += 1;
                                    }
                                    next.push(c2);
                                }
                            }
                        }
                    }
                    frontier = next;
                }
                if reached_open < unsaturated {
                    // Some open checks are unreachable: those are the candidates.
                    candidates.extend(
                        (0..m as u32).filter(|&c| check_seen[c as usize] != visit && check_vars[c as usize].len() < dc),
                    );
                } else {
                    // All open checks reached; take the open ones from the deepest layer.
                    let deepest = if frontier.is_empty() { &last_layer } else { &frontier };
                    candidates.extend(
                        deepest
                            .iter()
                            .copied()
                            .filter(|&c| check_vars[c as usize].len() < dc && !var_checks[v].contains(&c)),
                    );
                }
            }
            if candidates.is_empty() {
                return None;
            }
            let min_deg = candidates.iter().map(|&c| check_vars[c as usize].len()).min()?;
            candidates.retain(|&c| check_vars[c as usize].len() == min_deg);
            let c = candidates[rng.random_range(0..candidates.len())];
            check_vars[c as usize].push(v as u32);
            var_checks[v].push(c);
            if check_vars[c as usize].len() == dc {
                unsaturated -= 1;
            }
        }
    }
    Some(check_vars)
}
