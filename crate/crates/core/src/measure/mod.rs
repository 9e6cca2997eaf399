//! Exact measures of halting, output and multivalued events, and the
//! structures built from them.

pub mod chain;
pub mod engine;
pub mod towers;

pub use chain::{build_u_chain, ChainLevel, UChain};
pub use engine::{
    halting_event, halting_measure, mu_monotonicity_check, multivalued_event, multivalued_measure, output_event,
    output_measure, Event, MeasureEngine, MeasureQuery, Method, MonotonicityReport, Window, DEFAULT_BIT_CAP,
    DEFAULT_IE_CAP,
};
pub use towers::{
    lemma_checks, Case1Step, Classification, FloorReport, LemmaChecks, Thresholds, Tower, TowerKind, TowerLab,
    TowerOutcome, Vote, WidthRule,
};
