//! Partial oracles: finite sets of `(input, value, delay)` triples.
//!
//! A query at input `n` with delay budget `b` converges when the oracle holds
//! an entry for `n` whose delay is at most `b`. Oracles here always describe a
//! single real, so each input carries at most one entry.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};
use crate::prefix::Prefix;

/// Delay budget meaning "wait forever".
pub const UNBOUNDED: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OracleEntry {
    pub input: u64,
    pub value: bool,
    pub delay: u64,
}

impl OracleEntry {
    pub fn new(input: u64, value: bool, delay: u64) -> Self {
        OracleEntry { input, value, delay }
    }
}

impl Serialize for OracleEntry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.input, u8::from(self.value), self.delay).serialize(s)
    }
}

impl<'de> Deserialize<'de> for OracleEntry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (input, value, delay) = <(u64, u8, u64)>::deserialize(d)?;
        let value = match value {
            0 => false,
            1 => true,
            v => return Err(serde::de::Error::custom(format!("oracle value {v} is not a bit"))),
        };
        Ok(OracleEntry { input, value, delay })
    }
}

/// Result of asking an oracle about one input within a delay budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Query {
    Converged(bool),
    Pending,
}

/// Read access shared by every oracle representation.
pub trait OracleView {
    /// The `(value, delay)` stored for `n`, if any.
    fn lookup(&self, n: u64) -> Option<(bool, u64)>;

    fn query(&self, n: u64, budget: u64) -> Query {
        match self.lookup(n) {
            Some((v, l)) if l <= budget => Query::Converged(v),
            _ => Query::Pending,
        }
    }
}

/// A finite partial oracle, optionally tagged with the prefix it describes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialOracle {
    entries: BTreeMap<u64, (bool, u64)>,
    target: Option<Prefix>,
}

impl PartialOracle {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an oracle from raw triples. Two entries for the same input are
    /// rejected unless they are the identical triple.
    pub fn from_entries(entries: impl IntoIterator<Item = OracleEntry>) -> Result<Self> {
        let mut o = PartialOracle::new();
        for e in entries {
            o.insert(e)?;
        }
        Ok(o)
    }

    /// The oracle that answers every bit of `p` immediately.
    pub fn total(p: &Prefix) -> Self {
        let entries = (0..p.len()).map(|n| (n as u64, (p.bit(n), 0))).collect();
        PartialOracle {
            entries,
            target: Some(p.clone()),
        }
    }

    /// Attaches the real this oracle purports to describe, checking every
    /// entry against it.
    pub fn with_target(mut self, target: Prefix) -> Result<Self> {
        for (&n, &(v, _)) in &self.entries {
            check_target(&target, n, v)?;
        }
        self.target = Some(target);
        Ok(self)
    }

    pub fn target(&self) -> Option<&Prefix> {
        self.target.as_ref()
    }

    pub fn insert(&mut self, e: OracleEntry) -> Result<()> {
        if let Some(t) = &self.target {
            check_target(t, e.input, e.value)?;
        }
        match self.entries.get(&e.input) {
            Some(&(v, l)) if v == e.value && l == e.delay => Ok(()),
            Some(&(v, l)) => Err(LabError::parse(
                "partial oracle",
                None,
                format!(
                    "conflicting entries for input {}: ({}, {}) and ({}, {})",
                    e.input,
                    u8::from(v),
                    l,
                    u8::from(e.value),
                    e.delay
                ),
            )),
            None => {
                self.entries.insert(e.input, (e.value, e.delay));
                Ok(())
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = OracleEntry> + '_ {
        self.entries
            .iter()
            .map(|(&input, &(value, delay))| OracleEntry { input, value, delay })
    }

    pub fn domain(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.entries.contains_key(&n)
    }

    pub fn max_delay(&self) -> u64 {
        self.entries.values().map(|&(_, l)| l).max().unwrap_or(0)
    }

    /// Entries with delay at most `stage`, as a plain partial function.
    pub fn converged_by(&self, stage: u64) -> BTreeMap<u64, bool> {
        self.entries
            .iter()
            .filter(|(_, &(_, l))| l <= stage)
            .map(|(&n, &(v, _))| (n, v))
            .collect()
    }

    /// The entries with inputs below `len`.
    pub fn restrict(&self, len: u64) -> PartialOracle {
        PartialOracle {
            entries: self.entries.range(..len).map(|(&k, &v)| (k, v)).collect(),
            target: self.target.clone(),
        }
    }

    /// Same partial function, delays replaced by `delay(n)`.
    pub fn with_delays(&self, mut delay: impl FnMut(u64) -> u64) -> PartialOracle {
        PartialOracle {
            entries: self.entries.iter().map(|(&n, &(v, _))| (n, (v, delay(n)))).collect(),
            target: self.target.clone(),
        }
    }
}

fn check_target(t: &Prefix, n: u64, v: bool) -> Result<()> {
    match t.get(n as usize) {
        Some(b) if b == v => Ok(()),
        Some(_) => Err(LabError::invariant(
            "partial oracle",
            format!("entry at {n} disagrees with the declared target"),
        )),
        None => Err(LabError::invariant(
            "partial oracle",
            format!("entry at {n} lies beyond the declared target of length {}", t.len()),
        )),
    }
}

impl OracleView for PartialOracle {
    fn lookup(&self, n: u64) -> Option<(bool, u64)> {
        self.entries.get(&n).copied()
    }
}

/// Single oracle query with an explicit delay budget.
pub fn oracle_query(o: &impl OracleView, n: u64, budget: u64) -> Query {
    o.query(n, budget)
}

/// Whether two oracles present the same partial function, delays ignored.
pub fn agrees(a: &PartialOracle, b: &PartialOracle) -> bool {
    a.entries.len() == b.entries.len()
        && a.entries
            .iter()
            .zip(&b.entries)
            .all(|((n1, (v1, _)), (n2, (v2, _)))| n1 == n2 && v1 == v2)
}

/// Whether `big` answers every input `small` answers, with the same values.
pub fn extends(big: &PartialOracle, small: &PartialOracle) -> bool {
    small
        .entries
        .iter()
        .all(|(n, (v, _))| matches!(big.entries.get(n), Some((w, _)) if w == v))
}

#[derive(Serialize, Deserialize)]
struct OracleWire {
    entries: Vec<OracleEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<Prefix>,
}

impl Serialize for PartialOracle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OracleWire {
            entries: self.entries().collect(),
            target: self.target.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartialOracle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = OracleWire::deserialize(d)?;
        let mut o = PartialOracle::from_entries(w.entries).map_err(serde::de::Error::custom)?;
        if let Some(t) = w.target {
            o = o.with_target(t).map_err(serde::de::Error::custom)?;
        }
        Ok(o)
    }
}

/// A partial oracle of explicit length `m`: every input lies below `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FiniteWire", into = "FiniteWire")]
pub struct FinitePartialOracle {
    length: u64,
    oracle: PartialOracle,
}

#[derive(Serialize, Deserialize)]
struct FiniteWire {
    length: u64,
    entries: Vec<OracleEntry>,
}

impl TryFrom<FiniteWire> for FinitePartialOracle {
    type Error = LabError;
    fn try_from(w: FiniteWire) -> Result<Self> {
        FinitePartialOracle::new(w.length, PartialOracle::from_entries(w.entries)?)
    }
}

impl From<FinitePartialOracle> for FiniteWire {
    fn from(f: FinitePartialOracle) -> Self {
        FiniteWire {
            length: f.length,
            entries: f.oracle.entries().collect(),
        }
    }
}

impl FinitePartialOracle {
    pub fn new(length: u64, oracle: PartialOracle) -> Result<Self> {
        if let Some(n) = oracle.domain().find(|&n| n >= length) {
            return Err(LabError::invariant(
                "finite partial oracle",
                format!("input {n} is not below the length {length}"),
            ));
        }
        Ok(FinitePartialOracle { length, oracle })
    }

    pub fn empty(length: u64) -> Self {
        FinitePartialOracle {
            length,
            oracle: PartialOracle::new(),
        }
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn oracle(&self) -> &PartialOracle {
        &self.oracle
    }

    pub fn into_oracle(self) -> PartialOracle {
        self.oracle
    }

    /// Size of the domain.
    pub fn domain_size(&self) -> u64 {
        self.oracle.len() as u64
    }

    /// Domain size of the restriction to inputs below `n`.
    pub fn domain_below(&self, n: u64) -> u64 {
        self.oracle.entries.range(..n).count() as u64
    }

    /// `self ↾ n` for `n <= length`.
    pub fn restrict(&self, n: u64) -> Result<FinitePartialOracle> {
        if n > self.length {
            return Err(LabError::pre(
                "FinitePartialOracle::restrict",
                format!("{n} exceeds length {}", self.length),
            ));
        }
        Ok(FinitePartialOracle {
            length: n,
            oracle: self.oracle.restrict(n),
        })
    }

    pub fn insert(&mut self, e: OracleEntry) -> Result<()> {
        if e.input >= self.length {
            return Err(LabError::invariant(
                "finite partial oracle",
                format!("input {} is not below the length {}", e.input, self.length),
            ));
        }
        self.oracle.insert(e)
    }
}

impl OracleView for FinitePartialOracle {
    fn lookup(&self, n: u64) -> Option<(bool, u64)> {
        self.oracle.lookup(n)
    }
}

/// `X_{k,l}`: answers the bits of `base` on `[low, high)` immediately and
/// never answers anywhere else. `high = None` means no upper cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedOracle<'a> {
    base: &'a Prefix,
    low: u64,
    high: Option<u64>,
}

impl<'a> MaskedOracle<'a> {
    pub fn new(base: &'a Prefix, low: u64, high: Option<u64>) -> Result<Self> {
        if let Some(h) = high {
            if low > h {
                return Err(LabError::pre(
                    "MaskedOracle::new",
                    format!("low {low} exceeds high {h}"),
                ));
            }
        }
        Ok(MaskedOracle { base, low, high })
    }

    pub fn low(&self) -> u64 {
        self.low
    }

    pub fn high(&self) -> Option<u64> {
        self.high
    }

    pub fn in_window(&self, n: u64) -> bool {
        n >= self.low && self.high.is_none_or(|h| n < h) && (n as usize) < self.base.len()
    }

    pub fn to_partial(&self) -> PartialOracle {
        let entries = (self.low..self.base.len() as u64)
            .filter(|&n| self.in_window(n))
            .map(|n| (n, (self.base.bit(n as usize), 0)))
            .collect();
        PartialOracle {
            entries,
            target: Some(self.base.clone()),
        }
    }
}

impl OracleView for MaskedOracle<'_> {
    fn lookup(&self, n: u64) -> Option<(bool, u64)> {
        self.in_window(n).then(|| (self.base.bit(n as usize), 0))
    }
}
