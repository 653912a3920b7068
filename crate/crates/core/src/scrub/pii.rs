//! Pattern-based PII detection and redaction.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use regex_automata::meta::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const STAGE: &str = "pii";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PiiCategory {
    Email,
    Phone,
    IdNumber,
    UrlWithUserinfo,
}

impl PiiCategory {
    pub const ALL: [PiiCategory; 4] = [
        PiiCategory::Email,
        PiiCategory::Phone,
        PiiCategory::IdNumber,
        PiiCategory::UrlWithUserinfo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PiiCategory::Email => "EMAIL",
            PiiCategory::Phone => "PHONE",
            PiiCategory::IdNumber => "ID_NUMBER",
            PiiCategory::UrlWithUserinfo => "URL_WITH_USERINFO",
        }
    }

    pub fn placeholder(self) -> &'static str {
        match self {
            PiiCategory::Email => "<EMAIL>",
            PiiCategory::Phone => "<PHONE>",
            PiiCategory::IdNumber => "<ID>",
            PiiCategory::UrlWithUserinfo => "<URL>",
        }
    }
}

impl fmt::Display for PiiCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for PiiCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PiiCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(alloc::format!("unknown PII category {s:?}")))
    }
}

/// A detected span, in scalar offsets `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiiSpan {
    pub start: usize,
    pub end: usize,
    pub category: PiiCategory,
    pub text: String,
}

/// Patterns used when no pattern file is supplied.
pub fn default_patterns() -> Vec<(PiiCategory, Vec<String>)> {
    let p = |items: &[&str]| items.iter().map(|s| String::from(*s)).collect::<Vec<_>>();
    alloc::vec![
        (
            PiiCategory::Email,
            p(&[r"[A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(?:\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,}"]),
        ),
        (
            PiiCategory::Phone,
            p(&[
                r"\+[0-9]{1,3}[\-. ]?[0-9]{6,14}",
                r"(?:\+|(?-u:\b))[0-9]{1,3}[\-. ][0-9]{3,5}[\-. ][0-9]{3,5}(?:[\-. ][0-9]{3,5})?(?-u:\b)",
                r"\([0-9]{2,5}\)[\-. ]?[0-9]{3,4}[\-. ]?[0-9]{4}",
                r"(?-u:\b)[6-9][0-9]{9}(?-u:\b)",
            ]),
        ),
        (
            PiiCategory::IdNumber,
            p(&[
                // SSN-style, Aadhaar-style, card numbers, PAN-style.
                r"(?-u:\b)[0-9]{3}-[0-9]{2}-[0-9]{4}(?-u:\b)",
                r"(?-u:\b)[0-9]{4}(?:[ \-]?[0-9]{4}){3}(?-u:\b)",
                r"(?-u:\b)[2-9][0-9]{3}[ \-][0-9]{4}[ \-][0-9]{4}(?-u:\b)",
                r"(?-u:\b)[A-Z]{5}[0-9]{4}[A-Z](?-u:\b)",
            ]),
        ),
        (
            PiiCategory::UrlWithUserinfo,
            p(&[r"[A-Za-z][A-Za-z0-9+.\-]*://[^\s/@:]+(?::[^\s/@]*)?@[^\s]+"]),
        ),
    ]
}

#[derive(Debug, Clone)]
pub struct PiiDetector {
    categories: Vec<(PiiCategory, Regex)>,
}

impl PiiDetector {
    pub fn new(patterns: &[(PiiCategory, Vec<String>)]) -> Result<Self> {
        let mut categories = Vec::with_capacity(patterns.len());
        for (category, pats) in patterns {
            if pats.is_empty() {
                continue;
            }
            let re = Regex::new_many(pats)
                .map_err(|e| Error::Pattern(alloc::format!("{category}: {e}")))?;
            categories.push((*category, re));
        }
        Ok(PiiDetector { categories })
    }

    pub fn categories(&self) -> impl Iterator<Item = PiiCategory> + '_ {
        self.categories.iter().map(|(c, _)| *c)
    }

    /// All matches, overlaps resolved longest first (ties by earliest start,
    /// then category order), returned sorted by start.
    pub fn detect(&self, text: &str) -> Vec<PiiSpan> {
        let mut found: Vec<(usize, usize, usize)> = Vec::new();
        for (ci, (_, re)) in self.categories.iter().enumerate() {
            for m in re.find_iter(text) {
                if m.start() < m.end() {
                    found.push((m.start(), m.end(), ci));
                }
            }
        }
        found.sort_by(|a, b| {
            (b.1 - b.0)
                .cmp(&(a.1 - a.0))
                .then(a.0.cmp(&b.0))
                .then(a.2.cmp(&b.2))
        });
        let mut accepted: Vec<(usize, usize, usize)> = Vec::new();
        for span in found {
            if accepted.iter().all(|a| span.1 <= a.0 || a.1 <= span.0) {
                accepted.push(span);
            }
        }
        accepted.sort();
        // Convert byte offsets to scalar offsets in one pass.
        let mut spans = Vec::with_capacity(accepted.len());
        let mut scalar = 0;
        let mut byte = 0;
        let mut to_scalar = |target: usize| {
            scalar += text[byte..target].chars().count();
            byte = target;
            scalar
        };
        for (s, e, ci) in accepted {
            let start = to_scalar(s);
            let end = to_scalar(e);
            spans.push(PiiSpan {
                start,
                end,
                category: self.categories[ci].0,
                text: String::from(&text[s..e]),
            });
        }
        spans
    }
}

impl Default for PiiDetector {
    fn default() -> Self {
        PiiDetector::new(&default_patterns()).expect("default patterns compile")
    }
}

/// Detects with the default pattern set.
pub fn detect_pii(text: &str) -> Vec<PiiSpan> {
    PiiDetector::default().detect(text)
}

/// Replaces each span with its category placeholder.
///
/// Spans may be given in any order but must be in bounds, non-empty,
/// non-overlapping, and carry the text they cover.
pub fn redact_pii(text: &str, spans: &[PiiSpan]) -> Result<String> {
    let mut ordered: Vec<&PiiSpan> = spans.iter().collect();
    ordered.sort_by_key(|s| (s.start, s.end));
    let offsets: Vec<usize> = text
        .char_indices()
        .map(|(b, _)| b)
        .chain([text.len()])
        .collect();
    let len = offsets.len() - 1;
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for span in ordered {
        if span.start >= span.end || span.end > len {
            return Err(Error::InvalidSpan(alloc::format!(
                "[{}, {}) in text of {len} scalars",
                span.start,
                span.end
            )));
        }
        if span.start < cursor {
            return Err(Error::InvalidSpan(alloc::format!(
                "[{}, {}) overlaps a previous span",
                span.start,
                span.end
            )));
        }
        let (bs, be) = (offsets[span.start], offsets[span.end]);
        if text[bs..be] != span.text {
            return Err(Error::InvalidSpan(alloc::format!(
                "[{}, {}) covers {:?}, span says {:?}",
                span.start,
                span.end,
                &text[bs..be],
                span.text
            )));
        }
        out.push_str(&text[offsets[cursor]..bs]);
        out.push_str(span.category.placeholder());
        cursor = span.end;
    }
    out.push_str(&text[offsets[cursor]..]);
    Ok(out)
}
