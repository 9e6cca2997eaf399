//! Asymptotic-density computations over finite prefixes.
//!
//! Density-1 is a limit property and is never asserted here. What can be
//! checked on a prefix is the block structure: the dyadic blocks
//! `P_i = [2^i, 2^(i+1))`, which blocks have a gap of a given size, and the
//! exact density bounds that the gap census implies.

use std::ops::Range;

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::prefix::Prefix;
use crate::ratio::Ratio;

/// The dyadic block `[2^i, 2^(i+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Block(pub u32);

impl Block {
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn start(self) -> usize {
        1usize << self.0
    }

    pub fn end(self) -> usize {
        1usize << (self.0 + 1)
    }

    pub fn range(self) -> Range<usize> {
        self.start()..self.end()
    }

    pub fn width(self) -> usize {
        self.start()
    }

    /// The block containing `n`; `None` for 0, which lies in no block.
    pub fn containing(n: usize) -> Option<Block> {
        (n > 0).then(|| Block(usize::BITS - 1 - n.leading_zeros()))
    }
}

/// Index of the last block lying entirely inside a prefix of length `len`.
pub fn last_complete_block(len: usize) -> Option<u32> {
    (len >= 2).then(|| usize::BITS - 1 - len.leading_zeros() - 1)
}

/// `|{k < n : p(k) = 1}| / n`.
pub fn density_at(p: &Prefix, n: usize) -> Result<Ratio> {
    if n == 0 || n > p.len() {
        return Err(LabError::pre(
            "density_at",
            format!("need 0 < n <= {}, got n = {n}", p.len()),
        ));
    }
    Ok(Ratio::frac(p.count_ones(0..n) as u64, n as u64))
}

fn gap_threshold(i: u32, e: u32) -> usize {
    (1usize << i) - (1usize << (i - e))
}

fn check_block(op: &'static str, p: &Prefix, i: u32, e: u32) -> Result<()> {
    if e > i {
        return Err(LabError::pre(
            op,
            format!("gap exponent e = {e} exceeds block index i = {i}"),
        ));
    }
    if i >= usize::BITS - 1 || p.len() < Block(i).end() {
        return Err(LabError::pre(
            op,
            format!("prefix of length {} does not cover block P_{i}", p.len()),
        ));
    }
    Ok(())
}

/// Whether `p` has a gap of size `2^-e` at `P_i`: at most `2^i - 2^(i-e)`
/// ones inside the block.
pub fn has_gap(p: &Prefix, i: u32, e: u32) -> Result<bool> {
    check_block("has_gap", p, i, e)?;
    Ok(p.count_ones(Block(i).range()) <= gap_threshold(i, e))
}

/// Every block index `i` in `[e, i_max]` at which `p` has a gap of size
/// `2^-e`, ascending.
pub fn gap_census(p: &Prefix, e: u32, i_max: u32) -> Result<Vec<u32>> {
    if e > i_max {
        return Err(LabError::pre("gap_census", format!("e = {e} exceeds i_max = {i_max}")));
    }
    check_block("gap_census", p, i_max, e)?;
    let cum = p.cumulative_ones();
    Ok((e..=i_max)
        .filter(|&i| {
            let b = Block(i);
            (cum[b.end()] - cum[b.start()]) as usize <= gap_threshold(i, e)
        })
        .collect())
}

/// Outcome of checking both directions of the gap lemma on one prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapBoundReport {
    pub e: u32,
    pub j: u32,
    /// Blocks with a gap of size `2^-e`, each paired with the density at the
    /// end of the block.
    pub gapped_blocks: Vec<(u32, Ratio)>,
    /// Gapped blocks whose end density exceeds `1 - 2^(-e-1)`.
    pub forward_violations: Vec<u32>,
    /// The scanned horizon `[2^(j+e+1), end]` for the zero-count bound.
    pub reverse_window: Option<(usize, usize)>,
    /// Positions `n` where the zeros below `n` exceed `3n·2^-e`.
    pub reverse_violations: Vec<usize>,
}

impl GapBoundReport {
    pub fn holds(&self) -> bool {
        self.forward_violations.is_empty() && self.reverse_violations.is_empty()
    }
}

/// Checks, with exact integer arithmetic, that
///
/// * every block with a gap of size `2^-e` ends at density at most
///   `1 - 2^(-e-1)`, and
/// * when no block above `j` has such a gap, every `n` from `2^(j+e+1)` up to
///   the end of the last complete block has at most `3n·2^-e` zeros below it.
///
/// A trailing partial block is outside the scanned horizon: its occupancy is
/// not constrained by the census.
pub fn verify_gap_density_bounds(p: &Prefix, e: u32, j: u32) -> Result<GapBoundReport> {
    const OP: &str = "verify_gap_density_bounds";
    let start_exp = j + e + 1;
    if start_exp >= usize::BITS - 1 || p.len() < (1usize << start_exp) {
        return Err(LabError::pre(
            OP,
            format!(
                "prefix of length {} is shorter than 2^(j+e+1) with j = {j}, e = {e}",
                p.len()
            ),
        ));
    }
    // start_exp >= 1 so the prefix has at least one complete block
    let i_max = last_complete_block(p.len()).expect("length >= 2");
    let cum = p.cumulative_ones();
    let census: Vec<u32> = if e <= i_max {
        (e..=i_max)
            .filter(|&i| {
                let b = Block(i);
                (cum[b.end()] - cum[b.start()]) as usize <= gap_threshold(i, e)
            })
            .collect()
    } else {
        Vec::new()
    };
    if let Some(&bad) = census.iter().find(|&&i| i > j) {
        return Err(LabError::pre(
            OP,
            format!("block P_{bad} has a gap of size 2^-{e} above j = {j}"),
        ));
    }

    let mut gapped_blocks = Vec::with_capacity(census.len());
    let mut forward_violations = Vec::new();
    for &i in &census {
        let end = Block(i).end();
        let ones = cum[end] as u128;
        // ones / end <= 1 - 2^(-e-1)  <=>  ones * 2^(e+1) <= (2^(e+1) - 1) * end
        let scale = 1u128 << (e + 1);
        if ones * scale > (scale - 1) * end as u128 {
            forward_violations.push(i);
        }
        gapped_blocks.push((i, Ratio::frac(ones as u64, end as u64)));
    }

    let lo = 1usize << start_exp;
    let hi = Block(i_max).end();
    let mut reverse_violations = Vec::new();
    let reverse_window = (lo <= hi).then_some((lo, hi));
    if lo <= hi {
        for (n, &ones) in cum.iter().enumerate().take(hi + 1).skip(lo) {
            let zeros = (n as u128) - ones as u128;
            if zeros << e > 3 * n as u128 {
                reverse_violations.push(n);
            }
        }
    }
    Ok(GapBoundReport {
        e,
        j,
        gapped_blocks,
        forward_violations,
        reverse_window,
        reverse_violations,
    })
}
