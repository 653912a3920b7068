//! PII redaction and code/math filtering.

mod codemath;
mod pii;

pub use codemath::*;
pub use pii::{
    default_patterns, detect_pii, redact_pii, PiiCategory, PiiDetector, PiiSpan, STAGE as PII_STAGE,
};
