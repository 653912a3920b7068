//! Character n-gram profile language identification.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::words;

pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_PROFILE_SIZE: usize = 400;
pub const DEFAULT_THRESHOLD: f64 = 0.65;
pub const UNKNOWN: &str = "unknown";

/// Top-K n-gram relative frequencies for one language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LangProfile {
    pub lang: String,
    pub order: usize,
    /// (n-gram, frequency), most frequent first; frequencies sum to one.
    pub grams: Vec<(String, f64)>,
}

impl LangProfile {
    fn norm(&self) -> f64 {
        libm::sqrt(self.grams.iter().map(|(_, f)| f * f).sum())
    }
}

/// Lowercased n-grams of each word padded with one space on both sides; a
/// padded word shorter than `order` counts as a single gram.
pub fn ngram_counts(text: &str, order: usize) -> HashMap<String, u64> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    let order = order.max(1);
    let mut padded: Vec<char> = Vec::new();
    for word in words(text) {
        padded.clear();
        padded.push(' ');
        padded.extend(word.chars().flat_map(char::to_lowercase));
        padded.push(' ');
        if padded.len() < order {
            *counts.entry(padded.iter().collect()).or_default() += 1;
        } else {
            for w in padded.windows(order) {
                *counts.entry(w.iter().collect()).or_default() += 1;
            }
        }
    }
    counts
}

/// Builds one profile per language from its training texts.
pub fn train_langid<S: AsRef<str>>(
    corpora: &BTreeMap<String, Vec<S>>,
    order: usize,
    top_k: usize,
) -> Result<Vec<LangProfile>> {
    if order == 0 || top_k == 0 {
        return Err(Error::Config(
            "n-gram order and profile size must be positive".into(),
        ));
    }
    let mut profiles = Vec::with_capacity(corpora.len());
    for (lang, texts) in corpora {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for text in texts {
            for (g, c) in ngram_counts(text.as_ref(), order) {
                *counts.entry(g).or_default() += c;
            }
        }
        if counts.is_empty() {
            return Err(Error::Empty(alloc::format!(
                "language-id corpus for {lang}"
            )));
        }
        let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
        ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(top_k);
        let total: u64 = ranked.iter().map(|(_, c)| c).sum();
        let grams = ranked
            .into_iter()
            .map(|(g, c)| (g, c as f64 / total as f64))
            .collect();
        profiles.push(LangProfile {
            lang: lang.clone(),
            order,
            grams,
        });
    }
    Ok(profiles)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LangGuess {
    /// Best language, or [`UNKNOWN`] when confidence is below the threshold.
    pub lang: String,
    /// Highest-scoring profile regardless of the threshold.
    pub best: Option<String>,
    pub confidence: f64,
    /// Cosine similarity per profile, in profile order.
    pub similarities: Vec<(String, f64)>,
}

impl LangGuess {
    pub fn is_unknown(&self) -> bool {
        self.lang == UNKNOWN
    }
}

/// Scores `text` against every profile by cosine similarity of n-gram
/// frequency vectors.
///
/// Confidence is the winner's margin over the runner-up, normalized by the
/// winner's similarity: `(s1 - s2) / s1`, or 0 when nothing matches. Texts
/// whose confidence falls below `threshold` are labeled [`UNKNOWN`].
pub fn identify_language(profiles: &[LangProfile], text: &str, threshold: f64) -> LangGuess {
    let order = profiles.first().map_or(DEFAULT_ORDER, |p| p.order);
    let counts = ngram_counts(text, order);
    let doc_norm = libm::sqrt(counts.values().map(|&c| (c * c) as f64).sum());
    let similarities: Vec<(String, f64)> = profiles
        .iter()
        .map(|p| {
            let dot: f64 = p
                .grams
                .iter()
                .filter_map(|(g, f)| counts.get(g).map(|&c| c as f64 * f))
                .sum();
            let denom = doc_norm * p.norm();
            let sim = if denom > 0.0 && dot > 0.0 {
                dot / denom
            } else {
                0.0
            };
            (p.lang.clone(), sim)
        })
        .collect();

    let mut best: Option<usize> = None;
    for (i, (_, s)) in similarities.iter().enumerate() {
        if best.is_none_or(|b| *s > similarities[b].1) {
            best = Some(i);
        }
    }
    let (best_lang, confidence) = match best {
        Some(b) if similarities[b].1 > 0.0 => {
            let s1 = similarities[b].1;
            let s2 = similarities
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != b)
                .map(|(_, (_, s))| *s)
                .fold(0.0, f64::max);
            (
                Some(similarities[b].0.clone()),
                ((s1 - s2) / s1).clamp(0.0, 1.0),
            )
        }
        _ => (None, 0.0),
    };
    let lang = match &best_lang {
        Some(l) if confidence >= threshold => l.clone(),
        _ => UNKNOWN.into(),
    };
    LangGuess {
        lang,
        best: best_lang,
        confidence,
        similarities,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::vec;

    const ENG: &str = include_str!("../../tests/fixtures/eng.txt");
    const FRA: &str = include_str!("../../tests/fixtures/fra.txt");
    const HIN: &str = include_str!("../../tests/fixtures/hin.txt");

    fn corpora(langs: &[(&str, &str)]) -> BTreeMap<String, Vec<String>> {
        langs
            .iter()
            .map(|(l, t)| (String::from(*l), t.lines().map(String::from).collect()))
            .collect()
    }

    fn profiles(langs: &[(&str, &str)]) -> Vec<LangProfile> {
        train_langid(&corpora(langs), DEFAULT_ORDER, DEFAULT_PROFILE_SIZE).unwrap()
    }

    #[test]
    fn profile_frequencies_are_normalized() {
        for p in profiles(&[("eng", ENG), ("hin", HIN)]) {
            let total: f64 = p.grams.iter().map(|(_, f)| f).sum();
            assert!((total - 1.0).abs() < 1e-9);
            assert!(p.grams.len() <= DEFAULT_PROFILE_SIZE);
        }
    }

    #[test]
    fn disjoint_scripts_give_disjoint_profiles() {
        let ps = profiles(&[("eng", ENG), ("hin", HIN)]);
        let a: BTreeSet<_> = ps[0].grams.iter().map(|(g, _)| g.as_str()).collect();
        let b: BTreeSet<_> = ps[1].grams.iter().map(|(g, _)| g.as_str()).collect();
        assert!(a.is_disjoint(&b));
    }

    #[test]
    fn small_corpus_keeps_every_gram() {
        let ps = train_langid(&corpora(&[("xx", "ab")]), 3, 1000).unwrap();
        assert_eq!(ps.len(), 1);
        let grams: Vec<_> = ps[0].grams.iter().map(|(g, _)| g.as_str()).collect();
        assert_eq!(grams.len(), 2);
        assert!(grams.contains(&" ab") && grams.contains(&"ab "));
    }

    #[test]
    fn empty_language_corpus_is_an_error() {
        let mut c = corpora(&[("eng", ENG)]);
        c.insert("zzz".into(), vec![String::from("   ")]);
        assert!(matches!(train_langid(&c, 3, 10), Err(Error::Empty(_))));
    }

    #[test]
    fn devanagari_text_is_hindi() {
        let ps = profiles(&[("eng", ENG), ("hin", HIN)]);
        let g = identify_language(&ps, "किसान बाज़ार में सब्ज़ियाँ बेचते हैं", DEFAULT_THRESHOLD);
        assert_eq!(g.lang, "hin");
        assert!(g.confidence > 0.99);
    }

    #[test]
    fn training_text_classifies_as_itself() {
        let ps = profiles(&[("eng", ENG), ("fra", FRA), ("hin", HIN)]);
        for (lang, text) in [("eng", ENG), ("fra", FRA), ("hin", HIN)] {
            let g = identify_language(&ps, text, DEFAULT_THRESHOLD);
            assert_eq!(g.lang, lang, "{:?}", g.similarities);
            let own = g.similarities.iter().find(|(l, _)| l == lang).unwrap().1;
            assert!(g.similarities.iter().all(|(_, s)| *s <= own));
        }
    }

    #[test]
    fn balanced_script_mix_is_unknown() {
        let ps = profiles(&[("eng", ENG), ("hin", HIN)]);
        let mixed =
            "the market opens early बाज़ार जल्दी खुलता है farmers bring onions किसान प्याज़ लाते हैं";
        let g = identify_language(&ps, mixed, DEFAULT_THRESHOLD);
        assert!(g.confidence < DEFAULT_THRESHOLD, "{g:?}");
        assert_eq!(g.lang, UNKNOWN);
    }

    #[test]
    fn never_invents_codes() {
        let ps = profiles(&[("eng", ENG), ("hin", HIN)]);
        for text in ["", "12345", "😀😀", "ﾊﾝｶｸ", ENG] {
            let g = identify_language(&ps, text, DEFAULT_THRESHOLD);
            assert!(["eng", "hin", UNKNOWN].contains(&g.lang.as_str()));
            assert!((0.0..=1.0).contains(&g.confidence));
        }
    }
}
