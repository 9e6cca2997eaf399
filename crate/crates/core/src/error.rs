use thiserror::Error;

/// Errors produced by the lab's core operations.
///
/// Every variant carries the name of the operation (or input) that failed so
/// that drivers can surface module context without re-wrapping.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error("{op}: precondition violated: {detail}")]
    Precondition { op: &'static str, detail: String },

    #[error("parse error in {context}{}: {detail}", offset.map(|o| format!(" at byte {o}")).unwrap_or_default())]
    Parse {
        context: &'static str,
        offset: Option<usize>,
        detail: String,
    },

    #[error("{op}: resource cap `{cap}` exceeded ({needed} > {limit})")]
    ResourceCap {
        op: &'static str,
        cap: &'static str,
        limit: usize,
        needed: usize,
    },

    #[error("{op}: invariant violated: {detail}")]
    Invariant { op: &'static str, detail: String },
}

impl LabError {
    pub(crate) fn pre(op: &'static str, detail: impl Into<String>) -> Self {
        LabError::Precondition {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn cap(op: &'static str, cap: &'static str, limit: usize, needed: usize) -> Self {
        LabError::ResourceCap { op, cap, limit, needed }
    }

    pub(crate) fn invariant(op: &'static str, detail: impl Into<String>) -> Self {
        LabError::Invariant {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn parse(context: &'static str, offset: Option<usize>, detail: impl Into<String>) -> Self {
        LabError::Parse {
            context,
            offset,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
