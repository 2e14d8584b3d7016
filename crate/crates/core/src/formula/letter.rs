use crate::error::{Error, Result};
use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// A letter of the tower alphabets: bits, opening tags `T<i>`, closing tags
/// `E<i>` and the separator `dot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Zero,
    One,
    Open(u32),
    Close(u32),
    Dot,
}

impl Letter {
    /// The bit letter for `b`.
    pub fn bit(b: bool) -> Letter {
        if b {
            Letter::One
        } else {
            Letter::Zero
        }
    }

    /// Tag level of an opening or closing tag.
    pub fn level(self) -> Option<u32> {
        match self {
            Letter::Open(i) | Letter::Close(i) => Some(i),
            _ => None,
        }
    }

    /// Name of the set variable standing for this letter when strings are
    /// encoded over a pure linear order.
    pub fn set_name(self) -> String {
        match self {
            Letter::Zero => "P0".to_string(),
            Letter::One => "P1".to_string(),
            Letter::Open(i) => format!("PT{i}"),
            Letter::Close(i) => format!("PE{i}"),
            Letter::Dot => "PDOT".to_string(),
        }
    }
}

/// The alphabet `{0, 1, T1, E1, .., Th, Eh}`.
pub fn tag_alphabet(h: u32) -> Vec<Letter> {
    let mut out = vec![Letter::Zero, Letter::One];
    for i in 1..=h {
        out.push(Letter::Open(i));
        out.push(Letter::Close(i));
    }
    out
}

/// The dotted alphabet for height `h`: tags up to `h + 1` plus `dot`.
pub fn dotted_alphabet(h: u32) -> Vec<Letter> {
    let mut out = tag_alphabet(h + 1);
    out.push(Letter::Dot);
    out
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Zero => f.write_str("0"),
            Letter::One => f.write_str("1"),
            Letter::Open(i) => write!(f, "T{i}"),
            Letter::Close(i) => write!(f, "E{i}"),
            Letter::Dot => f.write_str("dot"),
        }
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse(0, format!("unknown letter `{s}`"));
        match s {
            "0" => Ok(Letter::Zero),
            "1" => Ok(Letter::One),
            "dot" => Ok(Letter::Dot),
            _ => {
                let (kind, digits) = s.split_at(s.len().min(1));
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                if digits.starts_with('0') {
                    return Err(bad());
                }
                let level: u32 = digits.parse().map_err(|_| bad())?;
                match kind {
                    "T" => Ok(Letter::Open(level)),
                    "E" => Ok(Letter::Close(level)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for l in dotted_alphabet(3) {
            assert_eq!(l.to_string().parse::<Letter>().unwrap(), l);
        }
    }

    #[test]
    fn rejects_junk() {
        for s in ["", "T", "T0", "X1", "E01", "2", "dots"] {
            assert!(s.parse::<Letter>().is_err(), "{s}");
        }
    }

    #[test]
    fn dotted_alphabet_size() {
        // {0,1} + 2(h+1) tags + dot
        assert_eq!(dotted_alphabet(1).len(), 7);
        assert_eq!(dotted_alphabet(2).len(), 9);
    }
}
