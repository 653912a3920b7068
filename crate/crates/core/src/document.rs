//! The record type that flows through every curation stage.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Keep,
    Drop,
    Modified,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Keep => "KEEP",
            Verdict::Drop => "DROP",
            Verdict::Modified => "MODIFIED",
        }
    }

    /// `Modified` documents continue down the pipeline.
    pub fn is_kept(self) -> bool {
        !matches!(self, Verdict::Drop)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One stage's ruling on one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageDecision {
    pub stage: String,
    pub verdict: Verdict,
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

impl StageDecision {
    pub fn new(stage: &str, verdict: Verdict, reason: impl Into<String>) -> Self {
        StageDecision {
            stage: stage.into(),
            verdict,
            reason: reason.into(),
            score: None,
        }
    }

    pub fn keep(stage: &str, reason: impl Into<String>) -> Self {
        Self::new(stage, Verdict::Keep, reason)
    }

    pub fn drop(stage: &str, reason: impl Into<String>) -> Self {
        Self::new(stage, Verdict::Drop, reason)
    }

    pub fn modified(stage: &str, reason: impl Into<String>) -> Self {
        Self::new(stage, Verdict::Modified, reason)
    }

    pub fn with_score(mut self, score: f64) -> Self {
        self.score = Some(score);
        self
    }
}

/// A single text record.
///
/// `extra` carries any record keys outside the reserved `id`/`text`/`lang`/`meta`
/// set, stored as their raw serialized form so they survive a read/write cycle
/// untouched.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub lang: Option<String>,
    pub meta: BTreeMap<String, String>,
    pub extra: BTreeMap<String, String>,
    pub trail: Vec<StageDecision>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            ..Default::default()
        }
    }

    pub fn with_lang(mut self, lang: impl Into<String>) -> Self {
        self.lang = Some(lang.into());
        self
    }

    pub fn record(&mut self, decision: StageDecision) {
        self.trail.push(decision);
    }

    /// Verdict of the most recent stage, if any stage has run.
    pub fn last_verdict(&self) -> Option<Verdict> {
        self.trail.last().map(|d| d.verdict)
    }
}
