//! Synthetic corpora and model fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use corpuskit::config::{IoConfig, PipelineConfig, ReportConfig, StageConfig};
use corpuskit::models::{save_linear, save_profiles};
use corpuskit::pipeline::QUALITY_KIND;
use corpuskit_core::quality::{train_langid, train_quality_classifier, QualityBucket, TrainConfig};
use corpuskit_core::Document;
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

pub const ENGLISH: &[&str] = &[
    "the",
    "river",
    "valley",
    "farmers",
    "harvest",
    "grain",
    "during",
    "monsoon",
    "season",
    "village",
    "market",
    "opens",
    "early",
    "morning",
    "children",
    "walk",
    "school",
    "teachers",
    "explain",
    "history",
    "of",
    "ancient",
    "kingdoms",
    "and",
    "their",
    "trade",
    "routes",
    "across",
    "mountains",
    "coastal",
    "towns",
    "built",
    "temples",
    "with",
    "carved",
    "stone",
    "pillars",
    "people",
    "celebrate",
    "festivals",
    "together",
    "sharing",
    "food",
    "music",
    "stories",
    "about",
    "courage",
    "family",
    "friendship",
    "water",
    "flows",
    "from",
    "northern",
    "glaciers",
    "into",
    "wide",
    "plains",
    "where",
    "cities",
    "grow",
];

pub const HINDI: &[&str] = &[
    "नदी",
    "घाटी",
    "किसान",
    "फसल",
    "अनाज",
    "मानसून",
    "मौसम",
    "गाँव",
    "बाज़ार",
    "सुबह",
    "बच्चे",
    "स्कूल",
    "शिक्षक",
    "इतिहास",
    "प्राचीन",
    "राज्य",
    "व्यापार",
    "पहाड़",
    "शहर",
    "मंदिर",
    "पत्थर",
    "लोग",
    "त्योहार",
    "साथ",
    "भोजन",
    "संगीत",
    "कहानी",
    "साहस",
    "परिवार",
    "दोस्ती",
    "पानी",
    "उत्तर",
    "मैदान",
    "और",
    "के",
    "में",
    "से",
    "है",
    "थे",
    "करते",
];

const SPAM: &[&str] = &[
    "buy", "now", "click", "here", "free", "offer", "win", "cash", "$$$", "!!!", "deal", "limited",
];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn prose(rng: &mut StdRng, words: &[&str], n: usize) -> String {
    let mut out = String::new();
    for i in 0..n {
        if i > 0 {
            out.push(if i % 12 == 0 { '\n' } else { ' ' });
        }
        out.push_str(words.choose(rng).unwrap());
    }
    out
}

pub fn spam(rng: &mut StdRng, n: usize) -> String {
    let mut out = String::new();
    for i in 0..n {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(SPAM.choose(rng).unwrap());
        if rng.random_bool(0.2) {
            out.push_str(&rng.random_range(100..999).to_string());
        }
    }
    out
}

pub fn code(rng: &mut StdRng, lines: usize) -> String {
    let mut out = String::from("import os\nimport sys\n\n");
    for i in 0..lines {
        let name = ENGLISH.choose(rng).unwrap();
        match i % 4 {
            0 => out.push_str(&format!("def {name}_{i}(x, y):\n")),
            1 => out.push_str(&format!(
                "    value = x * {} + y\n",
                rng.random_range(1..100)
            )),
            2 => out.push_str(&format!(
                "    if value > {}:\n        return value\n",
                rng.random_range(1..100)
            )),
            _ => out.push_str(&format!("    return {name}(value)  # {name}\n\n")),
        }
    }
    out
}

/// A mixed corpus: English and Hindi prose, short pages, exact and near
/// duplicates, spam, PII-bearing pages, code and mojibake.
pub fn synthetic_corpus(n: usize, seed: u64) -> Vec<Document> {
    let mut rng = rng(seed);
    let mut docs: Vec<Document> = Vec::with_capacity(n);
    for i in 0..n {
        let id = format!("doc{i:06}");
        let kind = rng.random_range(0..10);
        let long = rng.random_range(60..200);
        let short = rng.random_range(3..40);
        let doc = match kind {
            0 | 1 => Document::new(&id, prose(&mut rng, ENGLISH, long)).with_lang("eng"),
            2 => Document::new(&id, prose(&mut rng, HINDI, long)).with_lang("hin"),
            3 => Document::new(&id, prose(&mut rng, ENGLISH, short)),
            4 if !docs.is_empty() => {
                let src = docs.choose(&mut rng).unwrap();
                Document::new(&id, src.text.clone())
            }
            5 if !docs.is_empty() => {
                let src = docs.choose(&mut rng).unwrap();
                let mut words: Vec<String> = src.text.split(' ').map(str::to_owned).collect();
                let j = rng.random_range(0..words.len());
                words[j] = "changed".into();
                Document::new(&id, words.join(" "))
            }
            6 => Document::new(&id, spam(&mut rng, long)),
            7 => {
                let mut text = prose(&mut rng, ENGLISH, long);
                text.push_str(&format!(
                    " write to user{i}@example.com or call +91 98765 {:05}",
                    i % 100_000
                ));
                Document::new(&id, text).with_lang("eng")
            }
            8 => Document::new(&id, code(&mut rng, long / 4 + 10)),
            _ => {
                let text = prose(&mut rng, ENGLISH, long).replace("e ", "Ã© ");
                Document::new(&id, text)
            }
        };
        docs.push(doc);
    }
    docs
}

/// Trains a quality model and language profiles on fresh synthetic text and
/// writes them under `dir`. Returns (quality model path, profiles path).
pub fn write_models(dir: &Path) -> (PathBuf, PathBuf) {
    let mut rng = rng(99);
    let mut texts: Vec<(String, QualityBucket)> = Vec::new();
    for _ in 0..150 {
        texts.push((prose(&mut rng, ENGLISH, 80), QualityBucket::High));
        texts.push((prose(&mut rng, HINDI, 80), QualityBucket::High));
        texts.push((spam(&mut rng, 80), QualityBucket::Low));
        let mixed = format!("{} {}", prose(&mut rng, ENGLISH, 30), spam(&mut rng, 30));
        texts.push((mixed, QualityBucket::Medium));
    }
    let labeled: Vec<(&str, QualityBucket)> = texts.iter().map(|(t, b)| (t.as_str(), *b)).collect();
    let (model, _) = train_quality_classifier(&labeled, &TrainConfig::default()).unwrap();
    let quality = dir.join("quality.bin");
    save_linear(&model.0, QUALITY_KIND, &quality).unwrap();

    let mut corpora: BTreeMap<String, Vec<String>> = BTreeMap::new();
    corpora.insert(
        "eng".into(),
        (0..50).map(|_| prose(&mut rng, ENGLISH, 100)).collect(),
    );
    corpora.insert(
        "hin".into(),
        (0..50).map(|_| prose(&mut rng, HINDI, 100)).collect(),
    );
    let profiles = train_langid(&corpora, 3, 400).unwrap();
    let path = dir.join("profiles.json");
    save_profiles(&profiles, &path).unwrap();
    (quality, path)
}

pub fn config(input: &Path, out: &Path, stages: Vec<StageConfig>) -> PipelineConfig {
    PipelineConfig {
        seed: 42,
        io: IoConfig {
            input: input.to_owned(),
            output_dir: out.to_owned(),
            write_dropped: true,
        },
        reports: ReportConfig::default(),
        stages,
    }
}
