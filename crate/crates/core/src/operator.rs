//! Time-independent functionals as enumeration-operator axiom tables.
//!
//! An axiom `(D, n, x, s)` says: from stage `s` on, any oracle presenting the
//! finite partial function `D` makes the functional output `x` on input `n`.
//! Outputs depend only on the partial function the oracle presents, never on
//! the order in which it is presented, and a table may assign both outputs to
//! the same input.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};
use crate::oracle::{MaskedOracle, OracleView};

/// A finite partial function from oracle inputs to bits.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fragment(BTreeMap<u64, bool>);

impl Fragment {
    pub fn empty() -> Self {
        Fragment::default()
    }

    /// Rejects pairs that assign two values to one input.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, bool)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, v) in pairs {
            if let Some(&w) = map.get(&n) {
                if w != v {
                    return Err(LabError::invariant(
                        "fragment",
                        format!("input {n} assigned both values"),
                    ));
                }
            }
            map.insert(n, v);
        }
        Ok(Fragment(map))
    }

    pub fn single(n: u64, v: bool) -> Self {
        Fragment(BTreeMap::from([(n, v)]))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, bool)> + '_ {
        self.0.iter().map(|(&n, &v)| (n, v))
    }

    pub fn inputs(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.keys().copied()
    }

    pub fn get(&self, n: u64) -> Option<bool> {
        self.0.get(&n).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min_input(&self) -> Option<u64> {
        self.0.keys().next().copied()
    }

    pub fn max_input(&self) -> Option<u64> {
        self.0.keys().next_back().copied()
    }

    /// Whether every input lies in `[low, high)`; `high = None` is unbounded.
    pub fn within(&self, low: u64, high: Option<u64>) -> bool {
        self.min_input().is_none_or(|m| m >= low) && self.max_input().is_none_or(|m| high.is_none_or(|h| m < h))
    }

    /// Whether the oracle presents this fragment with every delay `<= stage`.
    pub fn presented_by(&self, o: &impl OracleView, stage: u64) -> bool {
        self.0
            .iter()
            .all(|(&n, &v)| matches!(o.lookup(n), Some((w, l)) if w == v && l <= stage))
    }

    pub fn compatible(&self, other: &Fragment) -> bool {
        self.iter().all(|(n, v)| other.get(n).is_none_or(|w| w == v))
    }

    /// The union of two compatible fragments.
    pub fn merge(&self, other: &Fragment) -> Option<Fragment> {
        if !self.compatible(other) {
            return None;
        }
        let mut map = self.0.clone();
        map.extend(other.iter());
        Some(Fragment(map))
    }
}

impl Serialize for Fragment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(u64, u8)> = self.iter().map(|(n, v)| (n, u8::from(v))).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fragment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(u64, u8)>::deserialize(d)?;
        let pairs = pairs
            .into_iter()
            .map(|(n, v)| match v {
                0 => Ok((n, false)),
                1 => Ok((n, true)),
                v => Err(serde::de::Error::custom(format!("fragment value {v} is not a bit"))),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Fragment::from_pairs(pairs).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Axiom {
    pub fragment: Fragment,
    pub input: u64,
    #[serde(with = "bit_as_int")]
    pub output: bool,
    #[serde(default)]
    pub stage: u64,
}

mod bit_as_int {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(serde::de::Error::custom(format!("output {v} is not a bit"))),
        }
    }
}

impl Axiom {
    pub fn new(fragment: Fragment, input: u64, output: bool, stage: u64) -> Self {
        Axiom {
            fragment,
            input,
            output,
            stage,
        }
    }

    /// Whether this axiom fires on input `n` against `o` at `stage`.
    pub fn applies(&self, o: &impl OracleView, n: u64, stage: u64) -> bool {
        self.input == n && self.stage <= stage && self.fragment.presented_by(o, stage)
    }
}

/// The set of outputs a functional produced on one input: a subset of {0, 1}.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outputs(u8);

impl Outputs {
    pub const NONE: Outputs = Outputs(0);
    pub const ZERO: Outputs = Outputs(1);
    pub const ONE: Outputs = Outputs(2);
    pub const BOTH: Outputs = Outputs(3);

    pub fn of(v: bool) -> Self {
        if v {
            Outputs::ONE
        } else {
            Outputs::ZERO
        }
    }

    pub fn insert(&mut self, v: bool) {
        self.0 |= Outputs::of(v).0;
    }

    pub fn contains(self, v: bool) -> bool {
        self.0 & Outputs::of(v).0 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_multivalued(self) -> bool {
        self.0 == 3
    }

    pub fn is_subset(self, other: Outputs) -> bool {
        self.0 & !other.0 == 0
    }

    /// The unique output, if exactly one.
    pub fn single(self) -> Option<bool> {
        match self.0 {
            1 => Some(false),
            2 => Some(true),
            _ => None,
        }
    }

    /// The least output, if any.
    pub fn first(self) -> Option<bool> {
        if self.contains(false) {
            Some(false)
        } else if self.contains(true) {
            Some(true)
        } else {
            None
        }
    }

    pub fn iter(self) -> impl Iterator<Item = bool> {
        [false, true].into_iter().filter(move |&v| self.contains(v))
    }
}

impl std::ops::BitOr for Outputs {
    type Output = Outputs;
    fn bitor(self, rhs: Outputs) -> Outputs {
        Outputs(self.0 | rhs.0)
    }
}

impl fmt::Debug for Outputs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(u8::from)).finish()
    }
}

impl Serialize for Outputs {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<u8> = self.iter().map(u8::from).collect();
        v.serialize(s)
    }
}

/// A finite axiom table.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumOperator {
    pub axioms: Vec<Axiom>,
}

impl EnumOperator {
    pub fn new(axioms: Vec<Axiom>) -> Self {
        EnumOperator { axioms }
    }

    pub fn empty() -> Self {
        EnumOperator::default()
    }

    pub fn push(&mut self, a: Axiom) {
        self.axioms.push(a);
    }

    /// Concatenates two tables.
    pub fn union(&self, other: &EnumOperator) -> EnumOperator {
        let mut axioms = self.axioms.clone();
        axioms.extend(other.axioms.iter().cloned());
        EnumOperator { axioms }
    }

    pub fn axioms_for(&self, n: u64) -> impl Iterator<Item = &Axiom> + '_ {
        self.axioms.iter().filter(move |a| a.input == n)
    }

    pub fn inputs(&self) -> std::collections::BTreeSet<u64> {
        self.axioms.iter().map(|a| a.input).collect()
    }

    /// Largest oracle input mentioned by any axiom.
    pub fn max_fragment_input(&self) -> Option<u64> {
        self.axioms.iter().filter_map(|a| a.fragment.max_input()).max()
    }

    pub fn max_stage(&self) -> u64 {
        self.axioms.iter().map(|a| a.stage).max().unwrap_or(0)
    }
}

/// Every output some stage-eligible axiom for `n` yields against `o`.
pub fn eval_op(op: &EnumOperator, o: &impl OracleView, n: u64, stage: u64) -> Outputs {
    let mut out = Outputs::NONE;
    for a in op.axioms_for(n) {
        if a.stage <= stage && a.fragment.presented_by(o, stage) {
            out.insert(a.output);
            if out == Outputs::BOTH {
                break;
            }
        }
    }
    out
}

pub fn is_multivalued(op: &EnumOperator, o: &impl OracleView, n: u64, stage: u64) -> bool {
    eval_op(op, o, n, stage).is_multivalued()
}

pub fn eval_masked(op: &EnumOperator, m: &MaskedOracle<'_>, n: u64, stage: u64) -> Outputs {
    eval_op(op, m, n, stage)
}

/// Small operators used throughout the examples, tests and benchmarks.
pub mod catalog {
    use super::*;

    /// Outputs `v` on `n` unconditionally from stage `stage`.
    pub fn constant(n: u64, v: bool, stage: u64) -> EnumOperator {
        EnumOperator::new(vec![Axiom::new(Fragment::empty(), n, v, stage)])
    }

    /// One axiom `({pos -> 1}, n, 1)`.
    pub fn single_bit(n: u64, pos: u64) -> EnumOperator {
        EnumOperator::new(vec![Axiom::new(Fragment::single(pos, true), n, true, 0)])
    }

    /// Copies oracle bit `pos` to the output.
    pub fn bit_copy(n: u64, pos: u64) -> EnumOperator {
        EnumOperator::new(vec![
            Axiom::new(Fragment::single(pos, false), n, false, 0),
            Axiom::new(Fragment::single(pos, true), n, true, 0),
        ])
    }

    /// Halts with output `v` as soon as any bit in `positions` is seen,
    /// whatever its value.
    pub fn every_bit_fires(n: u64, positions: impl IntoIterator<Item = u64>, v: bool) -> EnumOperator {
        let mut op = EnumOperator::empty();
        for m in positions {
            op.push(Axiom::new(Fragment::single(m, false), n, v, 0));
            op.push(Axiom::new(Fragment::single(m, true), n, v, 0));
        }
        op
    }

    /// Even positions copy their bit, odd positions output its negation.
    pub fn parity(n: u64, positions: impl IntoIterator<Item = u64>) -> EnumOperator {
        let mut op = EnumOperator::empty();
        for m in positions {
            let flip = m % 2 == 1;
            op.push(Axiom::new(Fragment::single(m, false), n, flip, 0));
            op.push(Axiom::new(Fragment::single(m, true), n, !flip, 0));
        }
        op
    }

    /// Bit `b` is copied, bit `b + 1` is negated: multivalued exactly when
    /// the two bits are equal.
    pub fn xor_contradiction(n: u64, b: u64) -> EnumOperator {
        EnumOperator::new(vec![
            Axiom::new(Fragment::single(b, false), n, false, 0),
            Axiom::new(Fragment::single(b, true), n, true, 0),
            Axiom::new(Fragment::single(b + 1, false), n, true, 0),
            Axiom::new(Fragment::single(b + 1, true), n, false, 0),
        ])
    }

    /// One independent copy of [`xor_contradiction`] per 2-bit tile
    /// `[start + 2t, start + 2t + 2)`, `t < tiles`.
    pub fn tiled_xor(n: u64, start: u64, tiles: u64) -> EnumOperator {
        (0..tiles).fold(EnumOperator::empty(), |acc, t| {
            acc.union(&xor_contradiction(n, start + 2 * t))
        })
    }

    /// Floor `i` occupies `[start + i*width, start + (i+1)*width)` and fires
    /// (output `v`) when every bit of it is 1, so each floor halts with
    /// measure `2^-width`.
    pub fn all_ones_floors(n: u64, start: u64, width: u64, floors: u64, v: bool) -> EnumOperator {
        let mut op = EnumOperator::empty();
        for i in 0..floors {
            let lo = start + i * width;
            let frag = Fragment::from_pairs((lo..lo + width).map(|m| (m, true))).expect("distinct inputs");
            op.push(Axiom::new(frag, n, v, 0));
        }
        op
    }
}
