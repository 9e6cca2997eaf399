//! Exact finitary machinery for experiments on generic and coarse
//! computability: asymptotic-density gap censuses, partial oracles and
//! time-independent functionals, coding maps between reducibilities, stage
//! simulators for marker and tree constructions, exact cylinder-measure
//! towers, and a forcing poset of finite partial oracles.
//!
//! No floating point is used anywhere; densities and measures are [`Ratio`]s.

pub mod coding;
pub mod construction;
pub mod density;
pub mod error;
pub mod forcing;
pub mod measure;
pub mod operator;
pub mod oracle;
pub mod prefix;
pub mod ratio;
pub mod trace;

pub use error::{LabError, Result};
pub use operator::{Axiom, EnumOperator, Fragment, Outputs};
pub use oracle::{FinitePartialOracle, MaskedOracle, OracleEntry, OracleView, PartialOracle, Query, UNBOUNDED};
pub use prefix::Prefix;
pub use ratio::Ratio;
