//! MacKay's alist text format for sparse parity-check matrices.

use super::LdpcCode;
use crate::{Error, Result};
use std::fmt::Write;

/// Serializes the parity-check matrix; indices are 1-based and lists are
/// zero-padded to the maximum weight.
pub fn to_alist(code: &LdpcCode) -> String {
    let (n, m) = (code.n(), code.m());
    let mut s = String::new();
    let row = |s: &mut String, items: &mut dyn Iterator<Item = String>| {
        let line: Vec<String> = items.collect();
        let _ = writeln!(s, "{}", line.join(" "));
    };
    let _ = writeln!(s, "{n} {m}");
    let _ = writeln!(s, "{} {}", code.dv(), code.dc());
    row(&mut s, &mut code.var_checks().iter().map(|c| c.len().to_string()));
    row(&mut s, &mut code.check_vars().iter().map(|r| r.len().to_string()));
    for checks in code.var_checks() {
        let mut sorted = checks.clone();
        sorted.sort_unstable();
        row(&mut s, &mut sorted.iter().map(|c| (c + 1).to_string()));
    }
    for vars in code.check_vars() {
        row(&mut s, &mut vars.iter().map(|v| (v + 1).to_string()));
    }
    s
}

/// Parses an alist matrix; fails unless it is regular and its column and
/// row lists describe the same graph.
pub fn from_alist(text: &str, seed: u64) -> Result<LdpcCode> {
    let bad = |what: &str| Error::MalformedFrame(format!("alist: {what}"));
    let mut tok = text.split_ascii_whitespace().map(|t| t.parse::<usize>().map_err(|_| bad("non-integer token")));
    let mut next = || tok.next().unwrap_or_else(|| Err(bad("unexpected end of input")));
    let (n, m) = (next()?, next()?);
    let (max_col, max_row) = (next()?, next()?);
    let col_w: Vec<usize> = (0..n).map(|_| next()).collect::<Result<_>>()?;
    let row_w: Vec<usize> = (0..m).map(|_| next()).collect::<Result<_>>()?;
    let mut cols = Vec::with_capacity(n);
    for &w in &col_w {
        let entries: Vec<usize> = (0..max_col).map(|_| next()).collect::<Result<_>>()?;
        let (live, pad) = entries.split_at(w.min(max_col));
        if w > max_col || live.iter().any(|&c| c == 0 || c > m) || pad.iter().any(|&c| c != 0) {
            return Err(bad("column list inconsistent with its weight"));
        }
        cols.push(live.iter().map(|&c| c as u32 - 1).collect::<Vec<u32>>());
    }
    let mut checks = Vec::with_capacity(m);
    for &w in &row_w {
        let entries: Vec<usize> = (0..max_row).map(|_| next()).collect::<Result<_>>()?;
        let (live, pad) = entries.split_at(w.min(max_row));
        if w > max_row || live.iter().any(|&v| v == 0 || v > n) || pad.iter().any(|&v| v != 0) {
            return Err(bad("row list inconsistent with its weight"));
        }
        checks.push(live.iter().map(|&v| v as u32 - 1).collect::<Vec<u32>>());
    }
    let code = LdpcCode::from_checks(n, checks, seed)?;
    for (v, listed) in cols.iter_mut().enumerate() {
        listed.sort_unstable();
        let mut actual = code.var_checks()[v].clone();
        actual.sort_unstable();
        if *listed != actual {
            return Err(bad("column and row lists disagree"));
        }
    }
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = LdpcCode::construct(180, 3, 9, 4).unwrap();
        let text = to_alist(&c);
        let back = from_alist(&text, 4).unwrap();
        assert_eq!(back, c);
        assert!(text.starts_with("180 60\n3 9\n"));
    }

    #[test]
    fn rejects_inconsistent_input() {
        let c = LdpcCode::construct(180, 3, 9, 4).unwrap();
        let text = to_alist(&c);
        assert!(from_alist(&text[..text.len() / 2], 4).is_err());
        // Swap one column entry so the two views disagree.
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let first_col: Vec<u32> = lines[4].split(' ').map(|x| x.parse().unwrap()).collect();
        let other = (1..=60).find(|x| !first_col.contains(x)).unwrap();
        lines[4] = format!("{} {} {}", first_col[0], first_col[1], other);
        assert!(from_alist(&lines.join("\n"), 4).is_err());
        assert!(from_alist("2 1\n1 2\n1 x", 0).is_err());
    }
}
