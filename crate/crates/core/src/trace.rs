//! Versioned envelopes for traces written by drivers.

use serde::Serialize;

use crate::error::LabError;

pub const SCHEMA_VERSION: u32 = 1;

/// Run metadata kept apart from the body. Holds no timestamps, so equal
/// inputs give byte-identical documents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub reason: String,
    pub cap: Option<&'static str>,
}

impl From<&LabError> for Truncation {
    fn from(e: &LabError) -> Self {
        Truncation {
            reason: e.to_string(),
            cap: match e {
                LabError::ResourceCap { cap, .. } => Some(cap),
                _ => None,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceDoc<T> {
    pub schema_version: u32,
    pub header: Header,
    pub body: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated: Option<Truncation>,
}

impl<T: Serialize> TraceDoc<T> {
    pub fn new(header: Header, body: T) -> Self {
        TraceDoc {
            schema_version: SCHEMA_VERSION,
            header,
            body,
            truncated: None,
        }
    }

    pub fn truncated(mut self, why: &LabError) -> Self {
        self.truncated = Some(why.into());
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace bodies serialize");
        s.push('\n');
        s
    }
}
