//! Homology classes on the command line: `a1+a2+2a3`, `b2-3a1`, or `[1,0,1,0]`.
//!
//! `aᵢ` and `bᵢ` are the standard symplectic basis vectors `e_{i-1}` and `f_{i-1}`.

use anyhow::{anyhow, bail, Result};
use cyclelab_core::symplectic::{axpy, e, f, HVec};
use num_bigint::BigInt;
use num_traits::Zero;

pub fn parse_class(text: &str, g: usize) -> Result<HVec> {
    let t = text.trim();
    if t.starts_with('[') {
        let v: Vec<i64> = serde_json::from_str(t).map_err(|err| anyhow!("bad class {t:?}: {err}"))?;
        if v.len() != 2 * g {
            bail!("class {t:?} has length {}, expected {}", v.len(), 2 * g);
        }
        return Ok(v.into_iter().map(BigInt::from).collect());
    }
    let mut x = vec![BigInt::zero(); 2 * g];
    let compact: String = t.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        bail!("empty class expression");
    }
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'+' => (1, &rest[1..]),
            b'-' => (-1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let term = &body[..end];
        rest = &body[end..];
        let letter = term
            .find(['a', 'b'])
            .ok_or_else(|| anyhow!("term {term:?} lacks a basis letter a or b"))?;
        let coef: i64 = match &term[..letter] {
            "" => 1,
            c => c.trim_end_matches('*').parse().map_err(|_| anyhow!("bad coefficient in {term:?}"))?,
        };
        let idx: usize = term[letter + 1..]
            .parse()
            .map_err(|_| anyhow!("bad index in {term:?}"))?;
        if idx == 0 || idx > g {
            bail!("index {idx} in {term:?} out of range 1..={g}");
        }
        let basis = if &term[letter..=letter] == "a" { e(g, idx - 1) } else { f(g, idx - 1) };
        x = axpy(&x, &BigInt::from(sign * coef), &basis);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> HVec {
        v.iter().map(|&k| BigInt::from(k)).collect()
    }

    #[test]
    fn expressions() {
        assert_eq!(parse_class("a1+a2+2a3", 3).unwrap(), ints(&[1, 0, 1, 0, 2, 0]));
        assert_eq!(parse_class("b2 - 3a1", 2).unwrap(), ints(&[-3, 0, 0, 1]));
        assert_eq!(parse_class("-a1+2*b1", 1).unwrap(), ints(&[-1, 2]));
        assert_eq!(parse_class("[1,0,0,1]", 2).unwrap(), ints(&[1, 0, 0, 1]));
        assert!(parse_class("a4", 3).is_err());
        assert!(parse_class("2", 3).is_err());
        assert!(parse_class("[1,0]", 3).is_err());
    }
}
