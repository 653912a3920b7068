use std::collections::BTreeSet;

use corpuskit::models::{
    default_pii_pattern_file, linear_from_bytes, linear_to_bytes, load_profiles, load_tokenizer,
    parse_pii_patterns, save_profiles, save_tokenizer, tokenizer_from_str, tokenizer_to_string,
};
use corpuskit_core::quality::{train_langid, FeatureSpec, LinearModel, TrainConfig};
use corpuskit_core::scrub::{default_patterns, PiiCategory, PiiDetector};
use corpuskit_core::tokenizer::{
    collect_seed_alphabet, train_bpe, BpeConfig, PretokConfig, TokenizerModel,
};

fn trained() -> TokenizerModel {
    let corpus = [
        "the cat sat on the mat with 1234 cats",
        "नमस्ते दुनिया, यह एक परीक्षण है",
        "\"quoted\" tabs\tand\nnewlines",
    ];
    let alphabet = collect_seed_alphabet(corpus);
    let cfg = BpeConfig {
        vocab_size: 400,
        specials: vec!["<s>".into(), "</s>".into()],
        ..Default::default()
    };
    train_bpe(corpus, &alphabet, &cfg).unwrap()
}

#[test]
fn tokenizer_text_roundtrip() {
    let model = trained();
    let text = tokenizer_to_string(&model);
    let back = tokenizer_from_str(&text).unwrap();
    assert_eq!(back.vocab(), model.vocab());
    assert_eq!(back.merges(), model.merges());
    assert_eq!(back.specials(), model.specials());
    assert_eq!(tokenizer_to_string(&back), text);
    let sample = "the cat नमस्ते 🙂";
    assert_eq!(back.encode(sample), model.encode(sample));
}

#[test]
fn tokenizer_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tok.txt");
    let model = TokenizerModel::byte_only(PretokConfig::default());
    save_tokenizer(&model, &path).unwrap();
    assert_eq!(load_tokenizer(&path).unwrap().vocab(), model.vocab());
}

#[test]
fn tampered_vocab_listing_is_rejected() {
    let text = tokenizer_to_string(&trained());
    let idx = text.find("vocab ").unwrap();
    let (head, tail) = text.split_at(idx);
    let tampered = format!("{head}{}", tail.replacen("\"<s>\"", "\"<x>\"", 1));
    assert!(tokenizer_from_str(&tampered).is_err());
    assert!(tokenizer_from_str("not a tokenizer").is_err());
}

#[test]
fn linear_model_roundtrip_and_kind_check() {
    let examples = [
        ("good text here", 1),
        ("bad bad bad", 0),
        ("more good words", 1),
    ];
    let cfg = TrainConfig {
        spec: FeatureSpec {
            ngram: 2,
            dim: 1 << 10,
        },
        epochs: 3,
        ..Default::default()
    };
    let model = LinearModel::train(&examples, 2, &cfg).unwrap();
    let bytes = linear_to_bytes(&model, "codemath");
    let back = linear_from_bytes(&bytes, "codemath").unwrap();
    assert_eq!(back, model);
    assert!(linear_from_bytes(&bytes, "quality").is_err());
    assert!(linear_from_bytes(&bytes[..bytes.len() - 1], "codemath").is_err());
}

#[test]
fn profiles_roundtrip() {
    let corpora: std::collections::BTreeMap<String, Vec<String>> = [
        ("eng".to_owned(), vec!["the quick brown fox".to_owned()]),
        ("hin".to_owned(), vec!["यह एक वाक्य है".to_owned()]),
    ]
    .into_iter()
    .collect();
    let profiles = train_langid(&corpora, 3, 50).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    save_profiles(&profiles, &path).unwrap();
    assert_eq!(load_profiles(&path).unwrap(), profiles);
}

#[test]
fn default_pattern_file_reproduces_the_builtin_detector() {
    let parsed = parse_pii_patterns(&default_pii_pattern_file()).unwrap();
    assert_eq!(parsed, default_patterns());
    let cats: BTreeSet<PiiCategory> = parsed.iter().map(|(c, _)| *c).collect();
    assert_eq!(cats.len(), PiiCategory::ALL.len());
    let text = "mail a@b.org or call +91 98765 43210";
    let a = PiiDetector::new(&parsed).unwrap().detect(text);
    assert_eq!(a, PiiDetector::default().detect(text));
}

#[test]
fn unknown_pattern_category_is_rejected() {
    assert!(parse_pii_patterns("PASSPORT = ['[A-Z][0-9]{7}']").is_err());
}
