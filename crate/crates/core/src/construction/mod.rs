//! Stage-by-stage simulators for tree and marker constructions.

pub mod markers;
pub mod strings;
pub mod wiggle;

use serde::{Deserialize, Serialize};

pub use markers::{
    phi_common, phi_of, run_marker_construction, run_marker_construction_redirected, tilde_phi, tilde_phi_exhaustive,
    CeSchedule, Marker, MarkerConfig, MarkerTrace, StrategyStep, TreeBound, Zone,
};
pub use strings::{
    agreeing_strings_count, bad_string_reduce, bad_strings, extract_y, oneg_psi_search, pi01_consistent, string_code,
    string_decode, PsiHit,
};
pub use wiggle::{
    agreement_threshold, build_wiggle_tree, combined_tree_member, default_selector, diagonal_prune, PrunedTree,
    TreeString, WiggleLevel, WiggleTree,
};

/// Result of a one-sided (halt-on-1 or wait) procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Halting {
    Halts1,
    Pending,
}

impl Halting {
    pub fn halts(self) -> bool {
        self == Halting::Halts1
    }
}
