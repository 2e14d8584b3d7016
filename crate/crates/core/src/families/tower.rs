//! Tower-height number encodings `μ_h(n)`, the strings `v_h` and `w_h`, and
//! their decoders.

use crate::error::{Error, Result};
use crate::evaluator::SetAssignment;
use crate::formula::Letter;
use crate::guard::Guards;
use crate::structures::LabeledString;
use std::collections::BTreeSet;

/// `Tower(0) = 1`, `Tower(h+1) = 2^Tower(h)`; `None` once it leaves `u64`.
pub fn tower(h: u32) -> Option<u64> {
    let mut t: u64 = 1;
    for _ in 0..h {
        if t >= 64 {
            return None;
        }
        t = 1 << t;
    }
    Some(t)
}

/// Length `L(n)` of the binary representation of `n - 1`, with `L(0) = 0`.
pub fn bit_length(n: u64) -> u32 {
    match n {
        0 => 0,
        1 => 1,
        _ => 64 - (n - 1).leading_zeros(),
    }
}

/// Bit `i` of `n`.
pub fn bit(i: u32, n: u64) -> bool {
    i < 64 && (n >> i) & 1 == 1
}

/// Reverse binary representation of `n` with exactly `width` digits.
pub fn bin(width: u32, n: u64) -> Vec<bool> {
    (0..width).map(|i| bit(i, n)).collect()
}

fn check_height(h: u32) -> Result<()> {
    if h == 0 {
        return Err(Error::Precondition("encodings start at height 1".into()));
    }
    Ok(())
}

/// The letters of `μ_h(n)`.
pub fn mu_letters(h: u32, n: u64) -> Result<Vec<Letter>> {
    check_height(h)?;
    let mut out = vec![Letter::Open(h)];
    if n > 0 {
        for i in 0..bit_length(n) {
            if h > 1 {
                out.extend(mu_letters(h - 1, u64::from(i))?);
            }
            out.push(Letter::bit(bit(i, n - 1)));
        }
    }
    out.push(Letter::Close(h));
    Ok(out)
}

pub fn mu(h: u32, n: u64) -> Result<LabeledString> {
    LabeledString::new(h, mu_letters(h, n)?)
}

/// Length of `μ_h(n)` without building it.
pub fn mu_len(h: u32, n: u64) -> u128 {
    let l = bit_length(n);
    if h <= 1 {
        return 2 + u128::from(l);
    }
    2 + (0..l).map(|i| mu_len(h - 1, u64::from(i)) + 1).sum::<u128>()
}

/// Decodes the `μ_h` block starting at `letters[0]`, returning the number and
/// the block length. Only canonical encodings are accepted.
pub fn decode_mu(h: u32, letters: &[Letter]) -> Result<(u64, usize)> {
    check_height(h)?;
    let bad = |at: usize, what: &str| Error::parse(at, format!("not a μ_{h} block: {what}"));
    if letters.first() != Some(&Letter::Open(h)) {
        return Err(bad(0, "missing opening tag"));
    }
    let mut pos = 1;
    let mut bits = Vec::new();
    loop {
        match letters.get(pos) {
            Some(Letter::Close(c)) if *c == h => {
                pos += 1;
                break;
            }
            None => return Err(bad(pos, "unterminated")),
            Some(_) => {
                if h > 1 {
                    let (index, len) = decode_mu(h - 1, &letters[pos..])
                        .map_err(|_| bad(pos, "malformed sub-block"))?;
                    if index != bits.len() as u64 {
                        return Err(bad(pos, "sub-block index out of sequence"));
                    }
                    pos += len;
                }
                match letters.get(pos) {
                    Some(Letter::Zero) => bits.push(false),
                    Some(Letter::One) => bits.push(true),
                    _ => return Err(bad(pos, "expected a bit")),
                }
                pos += 1;
                if bits.len() > 64 {
                    return Err(bad(pos, "more than 64 bits"));
                }
            }
        }
    }
    if bits.is_empty() {
        return Ok((0, pos));
    }
    let pred = bits
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
    let n = pred
        .checked_add(1)
        .ok_or_else(|| bad(pos, "value overflows"))?;
    if bit_length(n) as usize != bits.len() {
        return Err(bad(pos, "non-canonical bit length"));
    }
    Ok((n, pos))
}

/// Start positions of the `μ_level` blocks of `s`, with their decoded values.
pub fn block_values(s: &LabeledString, level: u32) -> Result<Vec<(usize, u64)>> {
    s.positions_of(Letter::Open(level))
        .into_iter()
        .map(|p| decode_mu(level, &s.letters[p..]).map(|(n, _)| (p, n)))
        .collect()
}

fn check_materializable(h: u32, guards: &Guards) -> Result<u64> {
    check_height(h)?;
    if h > guards.tower_height {
        return Err(Error::guard(format!(
            "tower strings of height {h} exceed the guard of {}",
            guards.tower_height
        )));
    }
    tower(h).ok_or_else(|| Error::guard("tower value overflows"))
}

/// `v_h = T(h+1) μ_h(0) dot μ_h(1) dot .. μ_h(H-1) dot E(h+1)` with `H = Tower(h)`.
pub fn v_h(h: u32, guards: &Guards) -> Result<LabeledString> {
    let big_h = check_materializable(h, guards)?;
    let mut letters = vec![Letter::Open(h + 1)];
    for n in 0..big_h {
        letters.extend(mu_letters(h, n)?);
        letters.push(Letter::Dot);
    }
    letters.push(Letter::Close(h + 1));
    LabeledString::new(h, letters)
}

/// `2^H` copies of `v_h`.
pub fn w_h(h: u32, guards: &Guards) -> Result<LabeledString> {
    let big_h = check_materializable(h, guards)?;
    Ok(v_h(h, guards)?.repeat(1usize << big_h))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerStrings {
    pub v: LabeledString,
    pub w: LabeledString,
}

pub fn build_vh_wh(h: u32, guards: &Guards) -> Result<TowerStrings> {
    Ok(TowerStrings {
        v: v_h(h, guards)?,
        w: w_h(h, guards)?,
    })
}

/// `|v_h|` computed arithmetically; `None` when `Tower(h)` is too large to sum.
pub fn v_len(h: u32) -> Option<u128> {
    let big_h = tower(h)?;
    if big_h > 1 << 20 {
        return None;
    }
    Some(2 + (0..big_h).map(|n| mu_len(h, n) + 1).sum::<u128>())
}

/// `ℓ(h) = |w_h| - 1`, when it fits in 128 bits.
pub fn ell(h: u32) -> Option<u128> {
    check_height(h).ok()?;
    let big_h = tower(h)?;
    let copies = 1u128.checked_shl(u32::try_from(big_h).ok()?).filter(|_| big_h < 128)?;
    copies.checked_mul(v_len(h)?).map(|l| l - 1)
}

/// The canonical `H`-numbering of `w_h`: copy `c` carries `BIN_H(c)` on its
/// dots, and `X` collects the dots carrying 1.
pub fn canonical_numbering(h: u32, guards: &Guards) -> Result<BTreeSet<usize>> {
    let big_h = check_materializable(h, guards)?;
    let w = w_h(h, guards)?;
    let dots = w.positions_of(Letter::Dot);
    let per_copy = big_h as usize;
    Ok(dots
        .iter()
        .enumerate()
        .filter(|(k, _)| bit((k % per_copy) as u32, (k / per_copy) as u64))
        .map(|(_, &p)| p)
        .collect())
}

/// Witness sets for the string-free sentence over `A_ℓ(h)`: one set per letter
/// of the dotted alphabet holding that letter's positions in `w_h`, plus the
/// canonical numbering.
pub fn canonical_letter_witness(h: u32, guards: &Guards) -> Result<SetAssignment> {
    let w = w_h(h, guards)?;
    let mut out = SetAssignment::new();
    for l in crate::formula::dotted_alphabet(h) {
        out.insert(l.set_name(), w.positions_of(l).into_iter().collect());
    }
    out.insert(super::strings::NUMBERING_SET.to_string(), canonical_numbering(h, guards)?);
    Ok(out)
}
