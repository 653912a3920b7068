use std::collections::BTreeMap;
use std::path::Path;

use corpuskit::io::{format_record, parse_record, read_corpus, read_corpus_from, write_corpus};
use corpuskit_core::{Document, StageDecision, Verdict};
use proptest::prelude::*;

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn malformed_lines_are_reported_and_skipped() {
    let (docs, errors) = read_corpus(&fixture("mixed_lines.jsonl")).unwrap();
    let ids: Vec<&str> = docs.iter().map(|d| d.id.as_str()).collect();
    assert_eq!(ids, ["a1", "a2", "a4"]);
    let lines: Vec<usize> = errors.iter().map(|e| e.line).collect();
    assert_eq!(lines, [4, 5, 6, 7]);
    assert!(errors[2].message.contains("text"), "{}", errors[2].message);
    assert!(
        errors[3].message.contains("duplicate id"),
        "{}",
        errors[3].message
    );
}

#[test]
fn optional_fields_and_trail_are_parsed() {
    let (docs, _) = read_corpus(&fixture("mixed_lines.jsonl")).unwrap();
    assert_eq!(docs[0].lang.as_deref(), Some("eng"));
    assert_eq!(docs[1].lang, None);
    assert_eq!(docs[1].meta.get("source").map(String::as_str), Some("web"));
    assert_eq!(
        docs[1].extra.get("url").map(String::as_str),
        Some("\"http://example.org/x\"")
    );
    assert_eq!(docs[2].trail.len(), 1);
    assert_eq!(docs[2].trail[0].verdict, Verdict::Keep);
    assert!(!docs[2].meta.contains_key("trail"));
}

#[test]
fn unknown_keys_survive_a_rewrite() {
    let line = r#"{"id":"x","text":"t","extra":{"nested":[1,2,3]},"score":0.5}"#;
    let doc = parse_record(line).unwrap();
    let again = parse_record(&format_record(&doc)).unwrap();
    assert_eq!(doc, again);
    assert!(format_record(&doc).contains(r#""extra":{"nested":[1,2,3]}"#));
}

#[test]
fn invalid_utf8_is_replaced() {
    let mut bytes = br#"{"id":"b","text":"ok "#.to_vec();
    bytes.push(0xff);
    bytes.extend_from_slice(b"\"}\n");
    let (docs, errors) = read_corpus_from(&bytes[..]).unwrap();
    assert!(errors.is_empty());
    assert_eq!(docs[0].text, "ok \u{fffd}");
}

#[test]
fn missing_file_is_an_open_error() {
    let err = read_corpus(Path::new("/nonexistent/corpus.jsonl")).unwrap_err();
    assert!(err.to_string().contains("cannot open"));
}

fn doc_strategy() -> impl Strategy<Value = Document> {
    let text = prop::collection::vec(
        prop_oneof![
            Just("\n".to_owned()),
            Just("\"".to_owned()),
            Just("\\".to_owned()),
            Just("\t".to_owned()),
            "[a-z ]{1,8}",
            "\\PC{1,4}",
        ],
        0..12,
    )
    .prop_map(|parts| parts.concat());
    (
        "[a-z0-9_-]{1,10}",
        text,
        prop::option::of("[a-z]{3}"),
        prop::collection::btree_map("[a-z]{1,5}", "\\PC{0,6}", 0..3),
        prop::collection::vec(("[a-z_]{1,8}", "[a-z=0-9]{0,6}", 0..3u8), 0..3),
    )
        .prop_map(|(id, text, lang, meta, trail)| {
            let mut doc = Document::new(id, text);
            doc.lang = lang;
            doc.meta = meta
                .into_iter()
                .filter(|(k, _)| k != "trail")
                .collect::<BTreeMap<_, _>>();
            for (stage, reason, v) in trail {
                let verdict = [Verdict::Keep, Verdict::Drop, Verdict::Modified][v as usize];
                doc.record(StageDecision::new(&stage, verdict, reason));
            }
            doc
        })
}

proptest! {
    #[test]
    fn records_roundtrip(doc in doc_strategy()) {
        let line = format_record(&doc);
        prop_assert!(!line.contains('\n'));
        let back = parse_record(&line).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(format_record(&back), line);
    }

    #[test]
    fn corpus_files_roundtrip(docs in prop::collection::vec(doc_strategy(), 0..8)) {
        let mut seen = std::collections::HashSet::new();
        let docs: Vec<Document> = docs.into_iter().filter(|d| seen.insert(d.id.clone())).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        prop_assert_eq!(write_corpus(&docs, &path).unwrap(), docs.len());
        let (back, errors) = read_corpus(&path).unwrap();
        prop_assert!(errors.is_empty());
        prop_assert_eq!(back, docs);
    }
}
