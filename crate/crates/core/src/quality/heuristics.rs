//! Word-count and mean-word-length document filters.

use serde::{Deserialize, Serialize};

use crate::document::{Document, StageDecision};
use crate::error::{Error, Result};
use crate::text::words;

pub const WORD_COUNT_STAGE: &str = "word_count";
pub const MEAN_WORD_LENGTH_STAGE: &str = "mean_word_length";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeuristicConfig {
    pub min_words: usize,
    /// `None` leaves the word count unbounded above.
    pub max_words: Option<usize>,
    pub min_mean_word_len: f64,
    pub max_mean_word_len: f64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            min_words: 50,
            max_words: Some(100_000),
            min_mean_word_len: 2.0,
            max_mean_word_len: 15.0,
        }
    }
}

impl HeuristicConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_words.is_some_and(|max| max < self.min_words) {
            return Err(Error::Config("min_words exceeds max_words".into()));
        }
        if !(self.min_mean_word_len >= 0.0 && self.min_mean_word_len <= self.max_mean_word_len) {
            return Err(Error::Config(
                "mean word length bounds must satisfy 0 <= min <= max".into(),
            ));
        }
        Ok(())
    }
}

/// KEEP iff the whitespace-delimited word count lies in `[min_words, max_words]`.
pub fn word_count_filter(doc: &Document, cfg: &HeuristicConfig) -> StageDecision {
    let count = words(&doc.text).count();
    let in_range = count >= cfg.min_words && cfg.max_words.is_none_or(|max| count <= max);
    let reason = alloc::format!("count={count}");
    let decision = if in_range {
        StageDecision::keep(WORD_COUNT_STAGE, reason)
    } else {
        StageDecision::drop(WORD_COUNT_STAGE, reason)
    };
    decision.with_score(count as f64)
}

/// Mean scalars per word; `None` for a document without words.
pub fn mean_word_length(text: &str) -> Option<f64> {
    let (n, total) = words(text).fold((0usize, 0usize), |(n, total), w| {
        (n + 1, total + w.chars().count())
    });
    (n > 0).then(|| total as f64 / n as f64)
}

/// KEEP iff the mean word length, in Unicode scalars, lies in the configured
/// bounds. Documents with no words are dropped.
pub fn mean_word_length_filter(doc: &Document, cfg: &HeuristicConfig) -> StageDecision {
    let Some(mean) = mean_word_length(&doc.text) else {
        return StageDecision::drop(MEAN_WORD_LENGTH_STAGE, "empty");
    };
    let reason = alloc::format!("mean={mean:.2}");
    let decision = if mean >= cfg.min_mean_word_len && mean <= cfg.max_mean_word_len {
        StageDecision::keep(MEAN_WORD_LENGTH_STAGE, reason)
    } else {
        StageDecision::drop(MEAN_WORD_LENGTH_STAGE, reason)
    };
    decision.with_score(mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::Verdict;
    use alloc::string::String;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn n_words(n: usize) -> Document {
        let text: Vec<String> = (0..n).map(|i| alloc::format!("w{i}")).collect();
        Document::new("d", text.join(" "))
    }

    #[test]
    fn word_count_bounds() {
        let cfg = HeuristicConfig::default();
        let d = word_count_filter(&Document::new("d", "a b c"), &cfg);
        assert_eq!(d.verdict, Verdict::Drop);
        assert_eq!(d.reason, "count=3");
        assert_eq!(word_count_filter(&n_words(60), &cfg).verdict, Verdict::Keep);
        assert_eq!(word_count_filter(&n_words(50), &cfg).verdict, Verdict::Keep);
        assert_eq!(word_count_filter(&n_words(49), &cfg).verdict, Verdict::Drop);
        let capped = HeuristicConfig {
            min_words: 0,
            max_words: Some(10),
            ..cfg.clone()
        };
        assert_eq!(
            word_count_filter(&n_words(10), &capped).verdict,
            Verdict::Keep
        );
        assert_eq!(
            word_count_filter(&n_words(11), &capped).verdict,
            Verdict::Drop
        );
        let open = HeuristicConfig {
            max_words: None,
            ..cfg
        };
        assert_eq!(
            word_count_filter(&n_words(200_000), &open).verdict,
            Verdict::Keep
        );
    }

    #[test]
    fn mean_length_counts_scalars() {
        assert_eq!(mean_word_length("ab cd"), Some(2.0));
        // न म स ् त े = 6 scalars, ज ी = 2
        assert_eq!(mean_word_length("नमस्ते जी"), Some(4.0));
        assert_eq!(mean_word_length(" \n"), None);
    }

    #[test]
    fn mean_length_filter_verdicts() {
        let cfg = HeuristicConfig::default();
        let long = Document::new("d", "a".repeat(200));
        assert_eq!(mean_word_length_filter(&long, &cfg).verdict, Verdict::Drop);
        let empty = mean_word_length_filter(&Document::new("d", ""), &cfg);
        assert_eq!(
            (empty.verdict, empty.reason.as_str()),
            (Verdict::Drop, "empty")
        );
        let ok = mean_word_length_filter(&Document::new("d", "नमस्ते जी"), &cfg);
        assert_eq!(ok.verdict, Verdict::Keep);
        assert_eq!(ok.score, Some(4.0));
    }

    #[test]
    fn config_validation() {
        assert!(HeuristicConfig::default().validate().is_ok());
        let bad = HeuristicConfig {
            min_words: 10,
            max_words: Some(5),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = HeuristicConfig {
            min_mean_word_len: 20.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn filters_are_pure(text in "\\PC{0,200}", min in 0usize..20) {
            let cfg = HeuristicConfig { min_words: min, ..Default::default() };
            let doc = Document::new("d", text);
            prop_assert_eq!(word_count_filter(&doc, &cfg), word_count_filter(&doc, &cfg));
            prop_assert_eq!(mean_word_length_filter(&doc, &cfg), mean_word_length_filter(&doc, &cfg));
        }
    }
}
