use crate::document::StageDecision;
use crate::quality::{identify_language, LangProfile};

use super::judge::InstructionPair;

pub const LANGUAGE_RULE_STAGE: &str = "language_rule";
pub const ALLOWED_LANGUAGES: [&str; 2] = ["hin", "eng"];

/// KEEP iff prompt and completion are each identified as Hindi or English
/// with confidence at or above `threshold`.
pub fn language_rule_filter(
    pair: &InstructionPair,
    profiles: &[LangProfile],
    threshold: f64,
) -> StageDecision {
    let p = identify_language(profiles, &pair.prompt, threshold);
    let c = identify_language(profiles, &pair.completion, threshold);
    let reason = alloc::format!("prompt={} completion={}", p.lang, c.lang);
    let allowed = |lang: &str| ALLOWED_LANGUAGES.contains(&lang);
    if allowed(&p.lang) && allowed(&c.lang) {
        StageDecision::keep(LANGUAGE_RULE_STAGE, reason)
    } else {
        StageDecision::drop(LANGUAGE_RULE_STAGE, reason)
    }
}
