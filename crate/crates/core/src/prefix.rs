//! Finite binary approximations of reals.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};

/// A finite initial segment of a real, indexed from 0.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Prefix {
    bits: Vec<bool>,
}

impl Prefix {
    pub fn new(bits: Vec<bool>) -> Self {
        Prefix { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Prefix { bits: vec![false; len] }
    }

    pub fn ones(len: usize) -> Self {
        Prefix { bits: vec![true; len] }
    }

    /// The characteristic prefix of `members` restricted to `[0, len)`.
    pub fn from_members(len: usize, members: impl IntoIterator<Item = usize>) -> Self {
        let mut p = Prefix::zeros(len);
        for m in members {
            if m < len {
                p.bits[m] = true;
            }
        }
        p
    }

    /// Parses a string of `0`/`1` characters.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        s.bytes()
            .enumerate()
            .map(|(i, b)| match b {
                b'0' => Ok(false),
                b'1' => Ok(true),
                _ => Err(LabError::parse(
                    "bitstring",
                    Some(i),
                    format!("unexpected character {:?}", b as char),
                )),
            })
            .collect::<Result<Vec<_>>>()
            .map(Prefix::new)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Panics when `n` is out of range.
    pub fn bit(&self, n: usize) -> bool {
        self.bits[n]
    }

    pub fn get(&self, n: usize) -> Option<bool> {
        self.bits.get(n).copied()
    }

    pub fn set(&mut self, n: usize, v: bool) {
        self.bits[n] = v;
    }

    pub fn push(&mut self, v: bool) {
        self.bits.push(v);
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self, range: Range<usize>) -> usize {
        self.bits[range].iter().filter(|b| **b).count()
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i)
    }

    pub fn truncate(&self, len: usize) -> Prefix {
        Prefix::new(self.bits[..len.min(self.len())].to_vec())
    }

    /// True when `self` is an initial segment of `other`.
    pub fn is_prefix_of(&self, other: &Prefix) -> bool {
        self.len() <= other.len() && other.bits[..self.len()] == self.bits[..]
    }

    /// `ones[n]` is the number of ones strictly below `n`, for `n <= len`.
    pub fn cumulative_ones(&self) -> Vec<u64> {
        let mut acc = Vec::with_capacity(self.len() + 1);
        let mut c = 0u64;
        acc.push(0);
        for b in &self.bits {
            c += u64::from(*b);
            acc.push(c);
        }
        acc
    }

    /// Hex packing, most significant bit first within each byte; trailing
    /// padding bits are zero.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.len().div_ceil(4));
        for chunk in self.bits.chunks(8) {
            let mut byte = 0u8;
            for (i, b) in chunk.iter().enumerate() {
                if *b {
                    byte |= 0x80 >> i;
                }
            }
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    pub fn from_hex(len: usize, hex: &str) -> Result<Self> {
        let hex = hex.as_bytes();
        if !hex.len().is_multiple_of(2) {
            return Err(LabError::parse(
                "prefix hex",
                Some(hex.len()),
                "odd number of hex digits",
            ));
        }
        let need = len.div_ceil(8);
        if hex.len() / 2 != need {
            return Err(LabError::parse(
                "prefix hex",
                Some(hex.len().min(need * 2)),
                format!("length {len} needs {need} bytes, found {}", hex.len() / 2),
            ));
        }
        let digit = |i: usize| -> Result<u8> {
            let c = hex[i] as char;
            c.to_digit(16)
                .map(|d| d as u8)
                .ok_or_else(|| LabError::parse("prefix hex", Some(i), format!("invalid hex digit {c:?}")))
        };
        let mut bits = Vec::with_capacity(len);
        for byte_idx in 0..need {
            let byte = (digit(2 * byte_idx)? << 4) | digit(2 * byte_idx + 1)?;
            for i in 0..8 {
                if bits.len() == len {
                    if byte & (0x80 >> i) != 0 {
                        return Err(LabError::parse(
                            "prefix hex",
                            Some(2 * byte_idx),
                            "nonzero padding bits past declared length",
                        ));
                    }
                } else {
                    bits.push(byte & (0x80 >> i) != 0);
                }
            }
        }
        Ok(Prefix::new(bits))
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prefix({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct PrefixWire {
    len: usize,
    hex: String,
}

impl Serialize for Prefix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PrefixWire {
            len: self.len(),
            hex: self.to_hex(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Prefix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = PrefixWire::deserialize(d)?;
        Prefix::from_hex(w.len, &w.hex).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter rendering a prefix as a plain `0`/`1` string.
pub mod as_bitstring {
    use super::Prefix;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Prefix, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(p)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Prefix, D::Error> {
        let s = String::deserialize(d)?;
        Prefix::from_bitstring(&s).map_err(serde::de::Error::custom)
    }
}
