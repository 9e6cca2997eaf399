//! String coding, bad strings and the searches built on them.

use num_bigint::BigUint;
use serde::Serialize;

use super::Halting;
use crate::error::{LabError, Result};
use crate::operator::{eval_masked, EnumOperator};
use crate::oracle::{MaskedOracle, PartialOracle, UNBOUNDED};
use crate::prefix::Prefix;

/// Length-lex code: `σ ↦ 2^|σ| + (σ read as a binary number)`, so the
/// strings of length `i` fill `P_i` and the empty string gets 1.
pub fn string_code(sigma: &Prefix) -> Result<u64> {
    if sigma.len() > 62 {
        return Err(LabError::pre(
            "string_code",
            format!("strings longer than 62 bits do not fit, got {}", sigma.len()),
        ));
    }
    Ok(sigma.bits().iter().fold(1u64, |acc, &b| (acc << 1) | u64::from(b)))
}

pub fn string_decode(code: u64) -> Result<Prefix> {
    if code == 0 {
        return Err(LabError::pre("string_decode", "code 0 names no string"));
    }
    let len = 63 - code.leading_zeros() as usize;
    Ok(Prefix::new((0..len).rev().map(|i| code >> i & 1 == 1).collect()))
}

/// Codes below `2^(max_len+1)` of strings that are not initial segments of `a`.
pub fn bad_strings(a: &Prefix, max_len: usize) -> Result<Prefix> {
    if max_len > a.len() {
        return Err(LabError::pre(
            "bad_strings",
            format!("max_len {max_len} exceeds |a| = {}", a.len()),
        ));
    }
    if max_len > 26 {
        return Err(LabError::cap("bad_strings", "max_len", 26, max_len));
    }
    let mut out = Prefix::ones(1usize << (max_len + 1));
    out.set(0, false);
    for l in 0..=max_len {
        out.set(string_code(&a.truncate(l))? as usize, false);
    }
    Ok(out)
}

/// Halts with 1 once `o` has converged, by `stage`, to a value that refutes
/// `σ` as an initial segment.
pub fn bad_string_reduce(o: &PartialOracle, sigma: &Prefix, stage: u64) -> Halting {
    let conv = o.converged_by(stage);
    let refuted = conv
        .range(..sigma.len() as u64)
        .any(|(&n, &v)| sigma.bit(n as usize) != v);
    if refuted {
        Halting::Halts1
    } else {
        Halting::Pending
    }
}

/// Length-`i` strings consistent with every entry of `o` below `i`.
pub fn agreeing_strings_count(o: &PartialOracle, i: u64) -> BigUint {
    let fixed = o.domain().filter(|&n| n < i).count() as u64;
    BigUint::from(1u8) << (i - fixed)
}

/// No member of `w_e` is an initial segment of `x`.
pub fn pi01_consistent(w_e: &[Prefix], x: &Prefix) -> bool {
    !w_e.iter().any(|s| s.is_prefix_of(x))
}

/// Keeps the odd rows: `(2n+1)2^i ∈ Y` iff `(2n+1)2^(2i+1) ∈ X`.
pub fn extract_y(x: &Prefix, out_len: usize) -> Result<Prefix> {
    let mut out = Prefix::zeros(out_len);
    for m in 1..out_len {
        let i = m.trailing_zeros();
        let src = m
            .checked_mul(1usize << (i + 1))
            .filter(|&s| s < x.len())
            .ok_or_else(|| LabError::pre("extract_Y", format!("position {m} needs source bit {m}·2^{}", i + 1)))?;
        out.set(m, x.bit(src));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiHit {
    pub value: bool,
    #[serde(with = "crate::prefix::as_bitstring")]
    pub witness: Prefix,
}

pub const MAX_PSI_LENGTH: usize = 24;

/// First string `X` in length-lex order (lengths up to `length_cap`) such
/// that `op` halts on `n` when shown only `X` above `m`.
pub fn oneg_psi_search(op: &EnumOperator, m: u64, n: u64, length_cap: usize) -> Result<Option<PsiHit>> {
    if length_cap > MAX_PSI_LENGTH {
        return Err(LabError::cap(
            "oneg_psi_search",
            "length_cap",
            MAX_PSI_LENGTH,
            length_cap,
        ));
    }
    for len in 0..=length_cap {
        let mut x = Prefix::zeros(len);
        for v in 0u64..1 << len {
            for i in 0..len {
                x.set(i, v >> (len - 1 - i) & 1 == 1);
            }
            let masked = MaskedOracle::new(&x, m, None)?;
            if let Some(value) = eval_masked(op, &masked, n, UNBOUNDED).first() {
                return Ok(Some(PsiHit { value, witness: x }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::row;
    use crate::density::Block;
    use crate::operator::{catalog, Axiom, Fragment};
    use crate::oracle::OracleEntry;
    use proptest::prelude::*;

    fn bits(s: &str) -> Prefix {
        Prefix::from_bitstring(s).unwrap()
    }

    #[test]
    fn code_examples() {
        assert_eq!(string_code(&bits("")).unwrap(), 1);
        assert_eq!(string_code(&bits("0")).unwrap(), 2);
        assert_eq!(string_code(&bits("1")).unwrap(), 3);
        let codes: Vec<_> = ["00", "01", "10", "11"]
            .iter()
            .map(|s| string_code(&bits(s)).unwrap())
            .collect();
        assert_eq!(codes, vec![4, 5, 6, 7]);
        assert!(string_decode(0).is_err());
    }

    #[test]
    fn code_is_block_aligned_bijection() {
        for code in 1u64..2048 {
            let s = string_decode(code).unwrap();
            assert_eq!(string_code(&s).unwrap(), code);
            assert!(Block(s.len() as u32).range().contains(&(code as usize)));
        }
    }

    #[test]
    fn bad_string_examples() {
        let b = bad_strings(&Prefix::zeros(4), 1).unwrap();
        assert!(b.bit(3) && !b.bit(2));
        let a = bits("1011001");
        let b = bad_strings(&a, 6).unwrap();
        for i in 0..=6u32 {
            assert_eq!(b.count_ones(Block(i).range()), (1 << i) - 1);
        }
        let good: Vec<Prefix> = (1..b.len())
            .filter(|&c| !b.bit(c))
            .map(|c| string_decode(c as u64).unwrap())
            .collect();
        for w in good.windows(2) {
            assert!(w[0].is_prefix_of(&w[1]));
        }
        assert!(bad_strings(&a, 8).is_err());
    }

    #[test]
    fn reduce_examples() {
        let o = PartialOracle::from_entries([OracleEntry::new(1, false, 0)]).unwrap();
        assert_eq!(bad_string_reduce(&o, &bits("01"), 0), Halting::Halts1);
        assert_eq!(bad_string_reduce(&o, &bits("00"), 0), Halting::Pending);
        assert_eq!(
            bad_string_reduce(&PartialOracle::new(), &bits("0110"), UNBOUNDED),
            Halting::Pending
        );
        let late = PartialOracle::from_entries([OracleEntry::new(1, false, 3)]).unwrap();
        assert_eq!(bad_string_reduce(&late, &bits("01"), 2), Halting::Pending);
    }

    #[test]
    fn counting_examples() {
        assert_eq!(agreeing_strings_count(&PartialOracle::new(), 5), BigUint::from(32u8));
        let two = PartialOracle::from_entries([
            OracleEntry::new(0, true, 0),
            OracleEntry::new(3, false, 9),
            OracleEntry::new(7, true, 0),
        ])
        .unwrap();
        assert_eq!(agreeing_strings_count(&two, 5), BigUint::from(8u8));
        assert_eq!(
            agreeing_strings_count(&PartialOracle::total(&Prefix::zeros(5)), 5),
            BigUint::from(1u8)
        );
    }

    #[test]
    fn pi01_examples() {
        assert!(pi01_consistent(&[], &bits("0101")));
        assert!(!pi01_consistent(&[bits("0")], &bits("0000")));
        let x = bits("1001");
        let others: Vec<_> = ["00", "01", "11"].iter().map(|s| bits(s)).collect();
        assert!(pi01_consistent(&others, &x));
    }

    #[test]
    fn extract_examples() {
        assert_eq!(extract_y(&Prefix::zeros(64), 8).unwrap(), Prefix::zeros(8));
        let x = Prefix::from_members(64, [8]);
        assert_eq!(extract_y(&x, 4).unwrap(), Prefix::from_members(4, [2]));
        assert!(extract_y(&x, 9).is_err());
    }

    #[test]
    fn psi_examples() {
        let hit = oneg_psi_search(&catalog::constant(0, true, 0), 0, 0, 4)
            .unwrap()
            .unwrap();
        assert_eq!(
            hit,
            PsiHit {
                value: true,
                witness: bits("")
            }
        );
        let op = EnumOperator::new(vec![
            Axiom::new(Fragment::single(5, false), 0, true, 0),
            Axiom::new(Fragment::single(5, true), 0, true, 0),
        ]);
        let hit = oneg_psi_search(&op, 3, 0, 8).unwrap().unwrap();
        assert_eq!((hit.value, hit.witness.len()), (true, 6));
        assert_eq!(oneg_psi_search(&EnumOperator::empty(), 0, 0, 6).unwrap(), None);
        // bit 1 is masked away below m = 2
        assert_eq!(oneg_psi_search(&catalog::single_bit(0, 1), 2, 0, 6).unwrap(), None);
        assert!(oneg_psi_search(&op, 0, 0, 30).is_err());
    }

    proptest! {
        #[test]
        fn extract_then_row_matches_odd_row(bits in proptest::collection::vec(any::<bool>(), 256), i in 0u32..3) {
            let x = Prefix::new(bits);
            let y = extract_y(&x, 16).unwrap();
            let shared = crate::coding::row_len(16, i).min(crate::coding::row_len(256, 2 * i + 1));
            prop_assert_eq!(row(&y, i, shared).unwrap(), row(&x, 2 * i + 1, shared).unwrap());
        }

        #[test]
        fn reduce_halts_only_on_bad_codes(a in proptest::collection::vec(any::<bool>(), 8), s in proptest::collection::vec(any::<bool>(), 0..8), keep in any::<u8>()) {
            let a = Prefix::new(a);
            let sigma = Prefix::new(s);
            let o = PartialOracle::from_entries((0..8u64).filter(|i| keep >> i & 1 == 1).map(|i| OracleEntry::new(i, a.bit(i as usize), 0)))
                .unwrap()
                .with_target(a.clone())
                .unwrap();
            if bad_string_reduce(&o, &sigma, UNBOUNDED).halts() {
                let b = bad_strings(o.target().unwrap(), 8).unwrap();
                prop_assert!(b.bit(string_code(&sigma).unwrap() as usize));
            }
        }
    }
}
