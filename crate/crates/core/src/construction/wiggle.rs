//! Wiggle trees: at block `n` every node picks one position of
//! `[2^n, 2^(n+1))` left free and forces the rest of the block to 1.
//!
//! Tree strings are 1-based: a string of length `L` has positions
//! `1..=L`, so the level-`n` nodes have length `2^n - 1` and their two
//! extensions decide exactly the block `P_n`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coding::{row_full, row_len};
use crate::density::Block;
use crate::error::{LabError, Result};
use crate::prefix::Prefix;
use crate::ratio::Ratio;

pub const MAX_BLOCKS: u32 = 12;

/// A 1-based binary string. Stored position-indexed with a dummy bit at
/// index 0.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeString(Prefix);

impl TreeString {
    pub fn empty() -> Self {
        TreeString(Prefix::zeros(1))
    }

    /// Reads positions `1..` from `p`; bit 0 of `p` is discarded.
    pub fn from_positions(p: &Prefix) -> Self {
        let mut bits = p.bits().to_vec();
        if bits.is_empty() {
            bits.push(false);
        }
        bits[0] = false;
        TreeString(Prefix::new(bits))
    }

    /// `s[0]` is position 1.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let p = Prefix::from_bitstring(s)?;
        let mut bits = vec![false];
        bits.extend_from_slice(p.bits());
        Ok(TreeString(Prefix::new(bits)))
    }

    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Panics for position 0 or past the end.
    pub fn bit(&self, pos: usize) -> bool {
        assert!(pos >= 1, "tree strings have no position 0");
        self.0.bit(pos)
    }

    pub fn push(&mut self, b: bool) {
        self.0.push(b);
    }

    pub fn truncate(&self, len: usize) -> TreeString {
        TreeString(self.0.truncate(len + 1))
    }

    pub fn is_prefix_of(&self, other: &TreeString) -> bool {
        self.0.is_prefix_of(&other.0)
    }

    /// Position-indexed view; index 0 is always 0.
    pub fn as_positions(&self) -> &Prefix {
        &self.0
    }
}

impl fmt::Display for TreeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0.bits()[1..] {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for TreeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeString({self})")
    }
}

impl Serialize for TreeString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TreeString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        TreeString::from_bitstring(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// The `2^n` nodes of length `2^n - 1`, in lexicographic order, with the
/// position each one leaves free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WiggleLevel {
    pub block: u32,
    pub nodes: Vec<TreeString>,
    pub selections: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WiggleTree {
    pub blocks: u32,
    pub levels: Vec<WiggleLevel>,
    /// Nodes of length `2^blocks - 1`, sorted.
    pub leaves: Vec<TreeString>,
}

/// The `i`-th node of block `n` (lexicographic order) frees `2^n + i`.
pub fn default_selector(n: u32, i: usize, _node: &TreeString) -> usize {
    (1usize << n) + i
}

pub fn build_wiggle_tree(
    blocks: u32,
    mut selector: impl FnMut(u32, usize, &TreeString) -> usize,
) -> Result<WiggleTree> {
    if blocks > MAX_BLOCKS {
        return Err(LabError::cap(
            "build_wiggle_tree",
            "blocks",
            MAX_BLOCKS as usize,
            blocks as usize,
        ));
    }
    let mut levels = Vec::with_capacity(blocks as usize);
    let mut nodes = vec![TreeString::empty()];
    for n in 0..blocks {
        let block = Block(n);
        let mut used = BTreeSet::new();
        let mut selections = Vec::with_capacity(nodes.len());
        let mut next = Vec::with_capacity(2 * nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            let m = selector(n, i, node);
            if !block.range().contains(&m) {
                return Err(LabError::pre(
                    "build_wiggle_tree",
                    format!(
                        "selection {m} for node {node} lies outside [{}, {})",
                        block.start(),
                        block.end()
                    ),
                ));
            }
            if !used.insert(m) {
                return Err(LabError::invariant(
                    "build_wiggle_tree",
                    format!("block {n} selects {m} twice"),
                ));
            }
            selections.push(m);
            for b in [false, true] {
                let mut tau = node.clone();
                for pos in block.range() {
                    tau.push(if pos == m { b } else { true });
                }
                next.push(tau);
            }
        }
        next.sort();
        levels.push(WiggleLevel {
            block: n,
            nodes: std::mem::replace(&mut nodes, next),
            selections,
        });
    }
    Ok(WiggleTree {
        blocks,
        levels,
        leaves: nodes,
    })
}

fn any_extends(sorted: &[TreeString], sigma: &TreeString) -> bool {
    let i = sorted.partition_point(|l| l < sigma);
    sorted.get(i).is_some_and(|l| sigma.is_prefix_of(l))
}

impl WiggleTree {
    /// Length of the leaves, `2^blocks - 1`.
    pub fn depth(&self) -> usize {
        (1usize << self.blocks) - 1
    }

    pub fn contains(&self, sigma: &TreeString) -> bool {
        sigma.len() <= self.depth() && any_extends(&self.leaves, sigma)
    }

    pub fn nodes_of_length(&self, len: usize) -> BTreeSet<TreeString> {
        self.leaves
            .iter()
            .map(|l| l.truncate(len))
            .filter(|t| t.len() == len)
            .collect()
    }
}

/// A wiggle tree with at most one diagonal cut: strings of length at least
/// `s_i` must avoid `v` at position `n_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrunedTree {
    base: WiggleTree,
    cut: Option<(usize, bool, usize)>,
    survivors: Vec<TreeString>,
}

impl PrunedTree {
    pub fn unpruned(base: WiggleTree) -> Self {
        let survivors = base.leaves.clone();
        PrunedTree {
            base,
            cut: None,
            survivors,
        }
    }

    pub fn base(&self) -> &WiggleTree {
        &self.base
    }

    /// `(n_i, v, s_i)` when a cut applies.
    pub fn cut(&self) -> Option<(usize, bool, usize)> {
        self.cut
    }

    pub fn depth(&self) -> usize {
        self.base.depth()
    }

    fn keeps(&self, sigma: &TreeString) -> bool {
        match self.cut {
            Some((n_i, v, s_i)) => sigma.len() < s_i || sigma.bit(n_i) != v,
            None => true,
        }
    }

    /// Node membership, dead ends included.
    pub fn contains(&self, sigma: &TreeString) -> bool {
        self.base.contains(sigma) && self.keeps(sigma)
    }

    /// Whether some surviving depth-cap path extends `sigma`.
    pub fn extendible(&self, sigma: &TreeString) -> bool {
        sigma.len() <= self.depth() && any_extends(&self.survivors, sigma)
    }

    /// Depth-cap paths that survive the cut.
    pub fn paths(&self) -> &[TreeString] {
        &self.survivors
    }

    /// `profile[r]` is the least number of agreeing positions `1..r` over all
    /// pairs of surviving paths, for `r <= depth + 1`.
    pub fn min_pair_agreement_profile(&self) -> Vec<usize> {
        let d = self.depth();
        let mut best = vec![usize::MAX; d + 2];
        best[0] = 0;
        best[1] = 0;
        for (i, a) in self.survivors.iter().enumerate() {
            for b in &self.survivors[i..] {
                let mut agree = 0;
                for pos in 1..=d {
                    agree += usize::from(a.bit(pos) == b.bit(pos));
                    let slot = &mut best[pos + 1];
                    *slot = (*slot).min(agree);
                }
            }
        }
        best
    }
}

/// `halt = Some((n_i, v))` records that the diagonalized functional gave
/// `v` on `n_i`; any `v` other than 0 or 1 leaves the tree unchanged.
pub fn diagonal_prune(w: &WiggleTree, halt: Option<(usize, u64)>, s_i: usize) -> Result<PrunedTree> {
    let Some((n_i, v)) = halt else {
        return Ok(PrunedTree::unpruned(w.clone()));
    };
    if n_i == 0 {
        return Err(LabError::pre("diagonal_prune", "tree strings have no position 0"));
    }
    if s_i <= n_i {
        return Err(LabError::pre(
            "diagonal_prune",
            format!("need s_i > n_i, got s_i = {s_i}, n_i = {n_i}"),
        ));
    }
    if v > 1 {
        return Ok(PrunedTree::unpruned(w.clone()));
    }
    let cut = (n_i, v == 1, s_i);
    let mut t = PrunedTree {
        base: w.clone(),
        cut: Some(cut),
        survivors: Vec::new(),
    };
    t.survivors = w.leaves.iter().filter(|l| t.keeps(l)).cloned().collect();
    Ok(t)
}

/// Whether every row `σ_k = {n : (2n+1)2^k ∈ σ}` extends to a path of tree
/// `k`. Row position 0 has no tree counterpart and is unconstrained.
pub fn combined_tree_member(sigma: &Prefix, trees: &[PrunedTree]) -> Result<bool> {
    for k in 0u32.. {
        if row_len(sigma.len(), k) == 0 {
            break;
        }
        let tree = trees
            .get(k as usize)
            .ok_or_else(|| LabError::pre("combined_tree_member", format!("no tree supplied for row {k}")))?;
        let row = TreeString::from_positions(&row_full(sigma, k));
        if row.len() > tree.depth() {
            return Err(LabError::pre(
                "combined_tree_member",
                format!("row {k} has length {} beyond tree depth {}", row.len(), tree.depth()),
            ));
        }
        if !tree.extendible(&row) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `max_k n_k 2^k` over the supplied per-row thresholds, `l = thresholds.len()`.
pub fn agreement_threshold(epsilon: &Ratio, thresholds: &[u64]) -> Result<u64> {
    let l = thresholds.len() as u32;
    if l == 0 || l > 62 {
        return Err(LabError::pre(
            "agreement_threshold",
            format!("need 1..=62 row thresholds, got {l}"),
        ));
    }
    if Ratio::dyadic(l) * Ratio::frac(2, 1) >= *epsilon {
        return Err(LabError::pre(
            "agreement_threshold",
            format!("2^-{l} is not below epsilon/2 for epsilon = {epsilon}"),
        ));
    }
    thresholds
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            n.checked_mul(1u64 << k)
                .ok_or_else(|| LabError::pre("agreement_threshold", format!("n_{k} * 2^{k} overflows")))
        })
        .try_fold(0, |acc, x| x.map(|x| acc.max(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> TreeString {
        TreeString::from_bitstring(s).unwrap()
    }

    #[test]
    fn smallest_trees() {
        let w = build_wiggle_tree(1, default_selector).unwrap();
        assert_eq!(w.levels[0].selections, vec![1]);
        assert_eq!(w.leaves, vec![ts("0"), ts("1")]);

        let w = build_wiggle_tree(2, |_, _, node| {
            if node.is_empty() {
                1
            } else if node.bit(1) {
                3
            } else {
                2
            }
        })
        .unwrap();
        assert_eq!(w.leaves.len(), 4);
        // node "0" frees position 2 and forces position 3
        let from_zero: Vec<_> = w.leaves.iter().filter(|l| !l.bit(1)).map(|l| l.to_string()).collect();
        assert_eq!(from_zero, vec!["001", "011"]);
    }

    #[test]
    fn level_counts_and_path_shape() {
        for n in 0..=4 {
            let w = build_wiggle_tree(n, default_selector).unwrap();
            for k in 0..=n {
                assert_eq!(w.nodes_of_length((1 << k) - 1).len(), 1 << k);
            }
            for leaf in &w.leaves {
                for b in 0..n {
                    let zeros = Block(b).range().filter(|&p| !leaf.bit(p)).count();
                    assert!(zeros <= 1);
                }
            }
            for pos in 1..=w.depth() {
                assert!(w.leaves.iter().any(|l| l.bit(pos)));
                assert!(w.leaves.iter().any(|l| !l.bit(pos)));
            }
        }
    }

    #[test]
    fn repeated_selection_is_rejected() {
        assert!(matches!(
            build_wiggle_tree(2, |n, _, _| 1 << n),
            Err(LabError::Invariant { .. })
        ));
        assert!(matches!(
            build_wiggle_tree(2, |_, _, _| 0),
            Err(LabError::Precondition { .. })
        ));
    }

    #[test]
    fn prune_examples() {
        let w = build_wiggle_tree(3, default_selector).unwrap();
        assert_eq!(diagonal_prune(&w, None, 4).unwrap(), PrunedTree::unpruned(w.clone()));
        assert_eq!(
            diagonal_prune(&w, Some((2, 7)), 4).unwrap(),
            PrunedTree::unpruned(w.clone())
        );
        let p = diagonal_prune(&w, Some((2, 1)), 4).unwrap();
        assert!(!p.paths().is_empty());
        assert!(p.paths().iter().all(|l| !l.bit(2)));
        for len in 0..=p.depth() {
            assert!(w.nodes_of_length(len).iter().any(|s| p.contains(s)), "length {len}");
        }
        assert!(p.contains(&ts("11")), "short nodes stay even when dead");
        assert!(!p.extendible(&ts("11")) || w.leaves.iter().any(|l| ts("11").is_prefix_of(l) && !l.bit(2)));
        assert!(diagonal_prune(&w, Some((4, 0)), 4).is_err());
    }

    #[test]
    fn combined_membership() {
        let w = build_wiggle_tree(3, default_selector).unwrap();
        let trees = vec![PrunedTree::unpruned(w); 4];
        assert!(combined_tree_member(&Prefix::zeros(0), &trees).unwrap());
        // row 0 reads positions 1, 3, 5, 7: tree positions 1, 2, 3 = 0, 0, 0
        // but block [2, 4) can hold at most one zero
        let bad = Prefix::from_members(8, [0, 2, 4, 6]);
        assert!(!combined_tree_member(&bad, &trees).unwrap());
        assert!(combined_tree_member(&Prefix::ones(16), &trees).unwrap());
        assert!(combined_tree_member(&Prefix::ones(16), &trees[..2]).is_err());
        assert!(
            combined_tree_member(&Prefix::ones(32), &trees).is_err(),
            "row 0 beyond depth"
        );
    }

    #[test]
    fn threshold_examples() {
        let half = Ratio::frac(1, 2);
        assert_eq!(agreement_threshold(&half, &[1, 1, 1]).unwrap(), 4);
        assert_eq!(agreement_threshold(&Ratio::frac(2, 1), &[10]).unwrap(), 10);
        assert_eq!(agreement_threshold(&half, &[8, 4, 2]).unwrap(), 8);
        assert!(agreement_threshold(&half, &[1, 1]).is_err(), "2^-2 is not below 1/4");
    }

    #[test]
    fn agreement_profile_small() {
        let w = build_wiggle_tree(2, default_selector).unwrap();
        let prof = PrunedTree::unpruned(w).min_pair_agreement_profile();
        // paths 0 11, 0 ?1..: positions 1..3; worst pair differs at 1 and in block 1
        assert_eq!(prof.len(), 5);
        assert_eq!(prof[2], 0);
        assert_eq!(prof[4], 0);
    }

    #[test]
    fn tree_string_json() {
        let s = ts("0110");
        assert_eq!(serde_json::to_string(&s).unwrap(), "\"0110\"");
        assert_eq!(s.len(), 4);
        assert!(s.bit(2));
    }
}
