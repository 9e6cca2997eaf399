//! The chain `U_0 ⊇ U_1 ⊇ …` of reals that halt for `i` independent reasons.
//!
//! `k_{X,0} = k`. If `X ∈ U_i`, it joins `U_{i+1}` when some axiom for `n`
//! with fragment inside `[k_{X,i}, ∞)` applies to `X`; then `k_{X,i+1}` is
//! the least bound, over those axioms, exceeding both the axiom's stage and
//! every bit it reads (and never below `k_{X,i}`).

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::operator::EnumOperator;
use crate::ratio::Ratio;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainLevel {
    pub i: u32,
    /// Reals in `U_i`, out of `2^relevant_bits`.
    pub count: u64,
    pub measure: Ratio,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UChain {
    pub n: u64,
    pub k: u64,
    pub relevant_bits: usize,
    pub levels: Vec<ChainLevel>,
}

/// `μ(U_i)` for `i <= depth`, by running every assignment to the bits the
/// axioms for `n` read at or above `k`. `stage` caps which axioms count.
pub fn build_u_chain(op: &EnumOperator, n: u64, k: u64, depth: u32, stage: u64, bit_cap: usize) -> Result<UChain> {
    if depth == 0 {
        return Err(LabError::pre("build_U_chain", "depth must be at least 1"));
    }
    let axioms: Vec<_> = op
        .axioms_for(n)
        .filter(|a| a.stage <= stage && a.fragment.within(k, None))
        .collect();
    let bits: Vec<u64> = axioms
        .iter()
        .flat_map(|a| a.fragment.inputs())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if bits.len() > bit_cap.min(40) {
        return Err(LabError::cap("build_U_chain", "relevant bits", bit_cap, bits.len()));
    }
    // (low bound of fragment, next k, mask, value) per axiom
    let packed: Vec<(u64, u64, u64, u64)> = axioms
        .iter()
        .map(|a| {
            let (mask, val) = a.fragment.iter().fold((0u64, 0u64), |(m, v), (p, b)| {
                let i = bits.binary_search(&p).expect("collected above");
                (m | 1 << i, v | u64::from(b) << i)
            });
            let lo = a.fragment.min_input().unwrap_or(u64::MAX);
            let next = (a.stage.saturating_add(1)).max(a.fragment.max_input().map_or(0, |m| m + 1));
            (lo, next, mask, val)
        })
        .collect();
    let mut counts = vec![0u64; depth as usize + 1];
    for x in 0u64..1 << bits.len() {
        let mut cur = k;
        let mut reached = 0u32;
        counts[0] += 1;
        while reached < depth {
            let next = packed
                .iter()
                .filter(|&&(lo, _, m, v)| (lo == u64::MAX || lo >= cur) && x & m == v)
                .map(|&(_, nx, _, _)| nx.max(cur))
                .min();
            match next {
                Some(nx) => {
                    cur = nx;
                    reached += 1;
                    counts[reached as usize] += 1;
                }
                None => break,
            }
        }
    }
    let r = bits.len() as u32;
    Ok(UChain {
        n,
        k,
        relevant_bits: bits.len(),
        levels: counts
            .into_iter()
            .enumerate()
            .map(|(i, count)| ChainLevel {
                i: i as u32,
                count,
                measure: Ratio::cylinder_count(count, r),
            })
            .collect(),
    })
}

impl UChain {
    pub fn measure(&self, i: u32) -> &Ratio {
        &self.levels[i as usize].measure
    }
}
