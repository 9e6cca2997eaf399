//! Coding maps between reducibility notions, row extraction, agreement sets
//! and the asymmetric join.
//!
//! `R(X)` puts bit `n` of `X` at every position `(2k+1)·2^n`; `R̃(X)` puts it
//! on the whole block `[2^n, 2^(n+1))`. Position 0 carries no code in either
//! image and is fixed to 0.

use serde::Serialize;

use crate::density::Block;
use crate::error::{LabError, Result};
use crate::oracle::{OracleEntry, PartialOracle};
use crate::prefix::Prefix;

/// Outcome of reading one source bit out of a coded oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoded {
    Value(bool),
    Undetermined,
    /// Two converged witnesses disagree: the oracle is not an image.
    Conflict,
}

/// The source bit index coded at position `m >= 1` of `R(X)`.
pub fn r_source_index(m: usize) -> usize {
    m.trailing_zeros() as usize
}

/// Source bits a prefix of length `out_len` of either image needs.
fn source_bits_needed(out_len: usize) -> usize {
    if out_len <= 1 {
        0
    } else {
        Block::containing(out_len - 1).expect("out_len - 1 >= 1").index() as usize + 1
    }
}

pub fn encode_r(x: &Prefix, out_len: usize) -> Result<Prefix> {
    if source_bits_needed(out_len) > x.len() {
        return Err(LabError::pre(
            "encode_R",
            format!(
                "{out_len} image bits need {} source bits, have {}",
                source_bits_needed(out_len),
                x.len()
            ),
        ));
    }
    let mut out = Prefix::zeros(out_len);
    for m in 1..out_len {
        out.set(m, x.bit(r_source_index(m)));
    }
    Ok(out)
}

pub fn encode_rtilde(x: &Prefix, out_len: usize) -> Result<Prefix> {
    if source_bits_needed(out_len) > x.len() {
        return Err(LabError::pre(
            "encode_Rtilde",
            format!(
                "{out_len} image bits need {} source bits, have {}",
                source_bits_needed(out_len),
                x.len()
            ),
        ));
    }
    let mut out = Prefix::zeros(out_len);
    for m in 1..out_len {
        out.set(m, x.bit(Block::containing(m).expect("m >= 1").index() as usize));
    }
    Ok(out)
}

fn vote(values: impl Iterator<Item = bool>) -> Decoded {
    let mut seen = None;
    for v in values {
        match seen {
            None => seen = Some(v),
            Some(w) if w != v => return Decoded::Conflict,
            Some(_) => {}
        }
    }
    seen.map_or(Decoded::Undetermined, Decoded::Value)
}

/// Reads source bit `n` from an oracle for `R(X)` by scanning the witnesses
/// `(2k+1)·2^n` for `k < witness_cap`.
pub fn decode_r_vote(y: &PartialOracle, n: u32, witness_cap: u64) -> Decoded {
    let step = 1u64 << n;
    vote((0..witness_cap).filter_map(|k| {
        let m = (2 * k + 1).checked_mul(step)?;
        y.entries().find(|e| e.input == m).map(|e| e.value)
    }))
}

/// Reads source bit `n` from an oracle for `R̃(X)`: any converged position of
/// the block `[2^n, 2^(n+1))` is a witness.
pub fn generic_to_cofinite(y: &PartialOracle, n: u32) -> Decoded {
    let b = Block(n);
    vote(
        y.entries()
            .filter(|e| (b.start() as u64..b.end() as u64).contains(&e.input))
            .map(|e| e.value),
    )
}

/// Spreads every converged source bit `n` over `[2^n, 2^(n+1)) ∩ [0, out_len)`
/// with the same value and delay.
pub fn cofinite_to_generic(x: &PartialOracle, out_len: usize) -> PartialOracle {
    let mut out = Vec::new();
    for e in x.entries() {
        if e.input >= usize::BITS as u64 - 1 {
            continue;
        }
        let b = Block(e.input as u32);
        for m in b.start()..b.end().min(out_len) {
            out.push(OracleEntry::new(m as u64, e.value, e.delay));
        }
    }
    PartialOracle::from_entries(out).expect("blocks are disjoint")
}

/// Number of row-`k` bits available from a source of length `len`.
pub fn row_len(len: usize, k: u32) -> usize {
    // (2n+1)2^k <= len - 1  <=>  2n+1 <= (len - 1) >> k
    if len == 0 || k >= usize::BITS {
        return 0;
    }
    ((len - 1) >> k).div_ceil(2)
}

/// `X_k = {n : (2n+1)·2^k ∈ X}`, the first `len` bits.
pub fn row(x: &Prefix, k: u32, len: usize) -> Result<Prefix> {
    let avail = row_len(x.len(), k);
    if len > avail {
        return Err(LabError::pre(
            "row",
            format!("row {k} has only {avail} bits available, asked {len}"),
        ));
    }
    Ok(Prefix::new((0..len).map(|n| x.bit((2 * n + 1) << k)).collect()))
}

/// Every available bit of row `k`.
pub fn row_full(x: &Prefix, k: u32) -> Prefix {
    row(x, k, row_len(x.len(), k)).expect("length computed from source")
}

/// `A_{=i} = {n : kn + i ∈ A}`, the first `len` bits.
pub fn row_mod(x: &Prefix, k: usize, i: usize, len: usize) -> Result<Prefix> {
    if k == 0 || i >= k {
        return Err(LabError::pre(
            "row_mod",
            format!("need 0 <= i < k, got k = {k}, i = {i}"),
        ));
    }
    if len > 0 && k * (len - 1) + i >= x.len() {
        return Err(LabError::pre(
            "row_mod",
            format!("bit {} of residue row needs source bit {}", len - 1, k * (len - 1) + i),
        ));
    }
    Ok(Prefix::new((0..len).map(|n| x.bit(k * n + i)).collect()))
}

/// Every available bit of residue row `i` mod `k`.
pub fn row_mod_full(x: &Prefix, k: usize, i: usize) -> Result<Prefix> {
    let len = if x.len() > i { (x.len() - i).div_ceil(k) } else { 0 };
    row_mod(x, k, i, len)
}

/// Inverse of [`row_mod`]: interleaves `k` residue rows into one prefix of
/// length `len`.
pub fn interleave_mod(rows: &[Prefix], len: usize) -> Result<Prefix> {
    let k = rows.len();
    if k == 0 {
        return Err(LabError::pre("interleave_mod", "no rows"));
    }
    let mut out = Prefix::zeros(len);
    for m in 0..len {
        let b = rows[m % k]
            .get(m / k)
            .ok_or_else(|| LabError::pre("interleave_mod", format!("row {} too short for position {m}", m % k)))?;
        out.set(m, b);
    }
    Ok(out)
}

/// `{n : X(n) = B(n)}`.
pub fn agreement_set(x: &Prefix, b: &Prefix) -> Result<Prefix> {
    if x.len() != b.len() {
        return Err(LabError::pre(
            "agreement_set",
            format!("length mismatch {} vs {}", x.len(), b.len()),
        ));
    }
    Ok(Prefix::new(
        x.bits().iter().zip(b.bits()).map(|(p, q)| p == q).collect(),
    ))
}

/// `{2^n : n ∈ B} ∪ (C ∖ {2^n : n ∈ ω})`.
pub fn asymmetric_join(b: &Prefix, c: &Prefix, out_len: usize) -> Result<Prefix> {
    let mut out = Prefix::zeros(out_len);
    for m in 0..out_len {
        let v = if m.is_power_of_two() {
            let n = m.trailing_zeros() as usize;
            b.get(n)
                .ok_or_else(|| LabError::pre("asymmetric_join", format!("position {m} needs bit {n} of B")))?
        } else {
            c.get(m)
                .ok_or_else(|| LabError::pre("asymmetric_join", format!("position {m} needs bit {m} of C")))?
        };
        out.set(m, v);
    }
    Ok(out)
}
