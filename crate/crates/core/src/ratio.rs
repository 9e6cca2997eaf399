//! Exact rationals for densities, measures and thresholds.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};

/// An arbitrary-precision rational, always in lowest terms with a positive
/// denominator. Renders as `p/q`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ratio(BigRational);

impl Ratio {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(LabError::pre("Ratio::new", "zero denominator"));
        }
        Ok(Ratio(BigRational::new(numer.into(), denom)))
    }

    /// `numer / denom` for a nonzero `denom`; panics otherwise.
    pub fn frac(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "Ratio::frac with zero denominator");
        Ratio(BigRational::new(numer.into(), denom.into()))
    }

    pub fn zero() -> Self {
        Ratio(BigRational::zero())
    }

    pub fn one() -> Self {
        Ratio(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Ratio(BigRational::from_integer(n.into()))
    }

    /// `2^-k`.
    pub fn dyadic(k: u32) -> Self {
        Ratio(BigRational::new(BigInt::one(), BigInt::one() << k))
    }

    /// `count / 2^bits`, the measure of `count` cylinders of depth `bits`.
    pub fn cylinder_count(count: u64, bits: u32) -> Self {
        Ratio(BigRational::new(count.into(), BigInt::one() << bits))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_unit_interval(&self) -> bool {
        !self.0.is_negative() && self.0 <= BigRational::one()
    }

    /// `1 - self`.
    pub fn complement(&self) -> Self {
        Ratio(BigRational::one() - &self.0)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = BigRational::one();
        for _ in 0..exp {
            acc *= &self.0;
        }
        Ratio(acc)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Ratio {
    fn from(r: BigRational) -> Self {
        Ratio(r)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl std::ops::$tr<&Ratio> for &Ratio {
            type Output = Ratio;
            fn $method(self, rhs: &Ratio) -> Ratio {
                Ratio(std::ops::$tr::$method(&self.0, &rhs.0))
            }
        }
        impl std::ops::$tr for Ratio {
            type Output = Ratio;
            fn $method(self, rhs: Ratio) -> Ratio {
                Ratio(std::ops::$tr::$method(self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl std::iter::Sum for Ratio {
    fn sum<I: Iterator<Item = Ratio>>(iter: I) -> Self {
        iter.fold(Ratio::zero(), |a, b| a + b)
    }
}

impl PartialEq<BigRational> for Ratio {
    fn eq(&self, other: &BigRational) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<BigRational> for Ratio {
    fn partial_cmp(&self, other: &BigRational) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Ratio {
    type Err = LabError;

    /// Accepts `p/q` or a bare integer `p`. Decimals are rejected.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |detail: &str| LabError::parse("ratio", None, format!("{detail}: {s:?}"));
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: BigInt = p.parse().map_err(|_| bad("bad numerator"))?;
        let q: BigInt = q.parse().map_err(|_| bad("bad denominator"))?;
        if q.is_zero() {
            return Err(bad("zero denominator"));
        }
        Ok(Ratio(BigRational::new(p, q)))
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
