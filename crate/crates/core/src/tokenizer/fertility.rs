//! Tokens-per-word measurement.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use super::model::TokenizerModel;
use crate::document::Document;
use crate::error::{Error, Result};
use crate::text::word_count;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LangFertility {
    pub words: u64,
    pub tokens: u64,
    pub fertility: f64,
}

/// Fertility of one tokenizer on one language-tagged corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FertilityReport {
    pub corpus_id: String,
    pub tokenizer_id: String,
    pub languages: BTreeMap<String, LangFertility>,
    /// Languages that had documents but no words.
    pub omitted: Vec<String>,
}

impl FertilityReport {
    pub fn get(&self, lang: &str) -> Option<f64> {
        self.languages.get(lang).map(|l| l.fertility)
    }

    /// Per-language fertility values.
    pub fn values(&self) -> BTreeMap<String, f64> {
        self.languages
            .iter()
            .map(|(k, v)| (k.clone(), v.fertility))
            .collect()
    }
}

/// Accumulates word and token counts per language.
pub struct FertilityCounter<'m, 't> {
    model: &'m TokenizerModel,
    cache: HashMap<&'t str, usize>,
    totals: BTreeMap<String, (u64, u64)>,
}

impl<'m, 't> FertilityCounter<'m, 't> {
    pub fn new(model: &'m TokenizerModel) -> Self {
        FertilityCounter {
            model,
            cache: HashMap::new(),
            totals: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, lang: &str, text: &'t str) {
        let words = word_count(text) as u64;
        let tokens = self.model.count_tokens_cached(text, &mut self.cache) as u64;
        let entry = self.totals.entry(lang.into()).or_default();
        entry.0 += words;
        entry.1 += tokens;
    }

    pub fn finish(self, corpus_id: &str, tokenizer_id: &str) -> FertilityReport {
        let mut languages = BTreeMap::new();
        let mut omitted = Vec::new();
        for (lang, (words, tokens)) in self.totals {
            if words == 0 {
                log::warn!("language {lang} has no words; omitted from fertility report");
                omitted.push(lang);
                continue;
            }
            languages.insert(
                lang,
                LangFertility {
                    words,
                    tokens,
                    fertility: tokens as f64 / words as f64,
                },
            );
        }
        FertilityReport {
            corpus_id: corpus_id.into(),
            tokenizer_id: tokenizer_id.into(),
            languages,
            omitted,
        }
    }
}

/// Total tokens over total words, per language. Byte-fallback tokens count.
/// Every document must carry a language tag.
pub fn fertility<'t>(
    model: &TokenizerModel,
    corpus: impl IntoIterator<Item = &'t Document>,
    corpus_id: &str,
    tokenizer_id: &str,
) -> Result<FertilityReport> {
    let mut counter = FertilityCounter::new(model);
    for doc in corpus {
        let lang = doc.lang.as_deref().ok_or_else(|| {
            Error::Config(alloc::format!("document {} has no language tag", doc.id))
        })?;
        counter.add(lang, &doc.text);
    }
    Ok(counter.finish(corpus_id, tokenizer_id))
}
