//! Parsing of operator specs, oracle strings and input files.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use glab_core::operator::catalog;
use glab_core::{EnumOperator, LabError, OracleEntry, PartialOracle, Prefix};
use serde::de::DeserializeOwned;

use crate::cli::OpSource;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn bits(s: &str) -> Result<Prefix> {
    Ok(Prefix::from_bitstring(s)?)
}

/// `0`/`1` set the bit with delay 0, `?` leaves the position out.
pub fn partial_oracle(s: &str) -> Result<PartialOracle> {
    let mut entries = Vec::new();
    for (i, c) in s.bytes().enumerate() {
        match c {
            b'0' | b'1' => entries.push(OracleEntry::new(i as u64, c == b'1', 0)),
            b'?' => {}
            _ => {
                return Err(LabError::Parse {
                    context: "oracle string",
                    offset: Some(i),
                    detail: format!("unexpected character {:?}", c as char),
                }
                .into())
            }
        }
    }
    Ok(PartialOracle::from_entries(entries)?)
}

pub fn operator(src: &OpSource, n: u64) -> Result<EnumOperator> {
    match (&src.op, &src.catalog) {
        (Some(path), None) => read_json(path),
        (None, Some(spec)) => catalog_op(spec, n),
        _ => Err(LabError::Precondition {
            op: "operator",
            detail: "give exactly one of --op or --catalog".into(),
        }
        .into()),
    }
}

fn num(s: &str) -> Result<u64> {
    s.parse().map_err(|e| anyhow!(spec_err(&format!("{s:?}: {e}"))))
}

fn bit(s: &str) -> Result<bool> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(spec_err(&format!("{s:?} is not a bit")).into()),
    }
}

fn range(s: &str) -> Result<std::ops::Range<u64>> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| spec_err(&format!("{s:?} is not a range A..B")))?;
    Ok(num(a)?..num(b)?)
}

fn spec_err(detail: &str) -> LabError {
    LabError::Parse {
        context: "catalog spec",
        offset: None,
        detail: detail.to_string(),
    }
}

pub fn catalog_op(spec: &str, n: u64) -> Result<EnumOperator> {
    let parts: Vec<&str> = spec.split(':').collect();
    let op = match parts[..] {
        ["empty"] => EnumOperator::empty(),
        ["constant", v] => catalog::constant(n, bit(v)?, 0),
        ["constant", v, s] => catalog::constant(n, bit(v)?, num(s)?),
        ["single-bit", m] => catalog::single_bit(n, num(m)?),
        ["bit-copy", m] => catalog::bit_copy(n, num(m)?),
        ["every-bit", r] => catalog::every_bit_fires(n, range(r)?, false),
        ["every-bit", r, v] => catalog::every_bit_fires(n, range(r)?, bit(v)?),
        ["parity", r] => catalog::parity(n, range(r)?),
        ["xor", b] => catalog::xor_contradiction(n, num(b)?),
        ["tiled-xor", start, tiles] => catalog::tiled_xor(n, num(start)?, num(tiles)?),
        ["all-ones-floors", start, w, f] => catalog::all_ones_floors(n, num(start)?, num(w)?, num(f)?, true),
        ["all-ones-floors", start, w, f, v] => catalog::all_ones_floors(n, num(start)?, num(w)?, num(f)?, bit(v)?),
        _ => bail!(spec_err(&format!("unknown operator {spec:?}"))),
    };
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use glab_core::OracleView;

    #[test]
    fn oracle_strings() {
        let o = partial_oracle("1?0").unwrap();
        assert_eq!(o.lookup(0), Some((true, 0)));
        assert_eq!(o.lookup(1), None);
        assert_eq!(o.lookup(2), Some((false, 0)));
        let e = partial_oracle("01x").unwrap_err();
        assert!(matches!(
            e.downcast_ref::<LabError>(),
            Some(LabError::Parse { offset: Some(2), .. })
        ));
    }

    #[test]
    fn catalog_specs() {
        assert_eq!(catalog_op("parity:0..4", 0).unwrap(), catalog::parity(0, 0..4));
        assert_eq!(catalog_op("constant:1:3", 2).unwrap(), catalog::constant(2, true, 3));
        assert!(catalog_op("parity:4", 0).is_err());
        assert!(catalog_op("nope", 0).is_err());
    }
}
