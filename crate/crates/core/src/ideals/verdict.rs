use std::fmt;

use serde::{Deserialize, Serialize};

use super::sets::SetDescriptor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Member,
    NotMember,
    Inconclusive,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Member => "member",
            Outcome::NotMember => "not_member",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One sample of a prefix statistic: a density, a partial sum, ...
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub n: u64,
    pub value: String,
}

/// Three-valued answer. `Member` and `NotMember` always carry the name of
/// the rule that justified them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TracePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<SetDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    fn with(outcome: Outcome) -> Self {
        Verdict { outcome, certificate: None, cutoff: None, trace: vec![], counterexample: None, note: None }
    }

    pub fn member(certificate: impl Into<String>) -> Self {
        Verdict { certificate: Some(certificate.into()), ..Self::with(Outcome::Member) }
    }

    pub fn not_member(certificate: impl Into<String>) -> Self {
        Verdict { certificate: Some(certificate.into()), ..Self::with(Outcome::NotMember) }
    }

    pub fn inconclusive(note: impl Into<String>) -> Self {
        Verdict { note: Some(note.into()), ..Self::with(Outcome::Inconclusive) }
    }

    pub fn with_cutoff(mut self, cutoff: u64) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn with_trace(mut self, trace: Vec<TracePoint>) -> Self {
        self.trace = trace;
        self
    }

    pub fn with_counterexample(mut self, s: SetDescriptor) -> Self {
        self.counterexample = Some(s);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_member(&self) -> bool {
        self.outcome == Outcome::Member
    }

    pub fn is_not_member(&self) -> bool {
        self.outcome == Outcome::NotMember
    }
}
