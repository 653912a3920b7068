mod common;

use std::fs;

use corpuskit::config::{default_stages, NoParams, PipelineConfig, StageConfig};
use corpuskit::io::write_corpus;
use corpuskit::pipeline::{emit_outputs, prepare_stages, run_pipeline, run_stages, PipelineError};
use corpuskit_core::quality::HeuristicConfig;
use corpuskit_core::{Document, Verdict};
use proptest::prelude::*;

use common::{config, prose, rng, synthetic_corpus, write_models, ENGLISH};

#[test]
fn word_count_stage_drops_short_documents() {
    let mut r = rng(1);
    let docs: Vec<Document> = (0..10)
        .map(|i| {
            let n = if i % 3 == 0 { 10 } else { 80 };
            Document::new(format!("d{i}"), prose(&mut r, ENGLISH, n))
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    write_corpus(&docs, &input).unwrap();
    let cfg = config(
        &input,
        &dir.path().join("out"),
        vec![StageConfig::WordCount(HeuristicConfig::default())],
    );
    let out = run_pipeline(&cfg).unwrap();
    assert_eq!(out.report.stages[0].input, 10);
    assert_eq!(out.report.stages[0].kept, 6);
    assert_eq!(out.report.stages[0].dropped, 4);
    let dropped: Vec<&str> = out.dropped.iter().map(|d| d.id.as_str()).collect();
    assert_eq!(dropped, ["d0", "d3", "d6", "d9"]);
    for d in &out.dropped {
        let last = d.trail.last().unwrap();
        assert_eq!(last.verdict, Verdict::Drop);
        assert_eq!(last.reason, "count=10");
    }
}

#[test]
fn missing_model_is_a_config_error_before_reading_input() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        &dir.path().join("does-not-exist.jsonl"),
        dir.path(),
        default_stages(
            dir.path().join("missing.bin"),
            dir.path().join("missing.json"),
        ),
    );
    match run_pipeline(&cfg) {
        Err(PipelineError::Config(e)) => assert!(format!("{e:#}").contains("quality"), "{e:#}"),
        Err(e) => panic!("wrong error class: {e}"),
        Ok(_) => panic!("expected failure"),
    }
}

#[test]
fn unknown_stage_and_parameter_are_rejected() {
    let base = "[io]\ninput = \"x.jsonl\"\n";
    assert!(
        PipelineConfig::from_toml(&format!("{base}[[stages]]\nstage = \"sentiment\"\n")).is_err()
    );
    assert!(PipelineConfig::from_toml(&format!(
        "{base}[[stages]]\nstage = \"word_count\"\nmin_wrds = 3\n"
    ))
    .is_err());
    assert!(PipelineConfig::from_toml(&format!(
        "{base}[[stages]]\nstage = \"unicode\"\nstrict = true\n"
    ))
    .is_err());
    let ok = PipelineConfig::from_toml(&format!(
        "{base}[[stages]]\nstage = \"word_count\"\nmin_words = 3\n"
    ))
    .unwrap();
    assert_eq!(ok.stages.len(), 1);
}

#[test]
fn invalid_parameters_fail_validation() {
    let base = "[io]\ninput = \"x.jsonl\"\n[[stages]]\n";
    for stage in [
        "stage = \"word_count\"\nmin_words = 10\nmax_words = 5\n",
        "stage = \"fuzzy_dedup\"\nbands = 10\nrows = 10\n",
        "stage = \"fuzzy_dedup\"\njaccard_threshold = 1.5\n",
        "stage = \"codemath\"\ncodemath_threshold = 2.0\n",
    ] {
        let cfg = PipelineConfig::from_toml(&format!("{base}{stage}")).unwrap();
        assert!(cfg.validate().is_err(), "accepted {stage}");
    }
}

#[test]
fn digest_tracks_content_but_not_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let a = config(
        &dir.path().join("in.jsonl"),
        &dir.path().join("a"),
        vec![StageConfig::Unicode(NoParams {})],
    );
    let mut b = a.clone();
    b.io.output_dir = dir.path().join("b");
    assert_eq!(a.digest(), b.digest());
    b.seed += 1;
    assert_ne!(a.digest(), b.digest());
}

fn run_to_dir(cfg: &PipelineConfig) -> Vec<(String, Vec<u8>)> {
    let out = run_pipeline(cfg).unwrap();
    let mut files: Vec<(String, Vec<u8>)> = emit_outputs(&out, cfg)
        .unwrap()
        .into_iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (quality, profiles) = write_models(dir.path());
    let input = dir.path().join("in.jsonl");
    write_corpus(&synthetic_corpus(400, 5), &input).unwrap();
    let mut cfg = config(
        &input,
        &dir.path().join("run1"),
        default_stages(quality, profiles),
    );
    cfg.reports.histogram = true;
    cfg.reports.dedup_clusters = true;
    let first = run_to_dir(&cfg);
    cfg.io.output_dir = dir.path().join("run2");
    let second = run_to_dir(&cfg);
    assert!(first.iter().any(|(n, _)| n == "stage_report.tsv"));
    assert_eq!(first, second);
}

#[test]
fn pii_stage_redacts_in_kept_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    let docs = vec![
        Document::new("a", "reach me at someone@example.com today"),
        Document::new("b", "nothing personal here"),
    ];
    write_corpus(&docs, &input).unwrap();
    let cfg = config(
        &input,
        dir.path(),
        vec![StageConfig::Pii(Default::default())],
    );
    let out = run_pipeline(&cfg).unwrap();
    assert_eq!(out.kept[0].text, "reach me at <EMAIL> today");
    assert_eq!(out.kept[0].trail[0].verdict, Verdict::Modified);
    assert_eq!(out.kept[0].trail[0].reason, "EMAIL=1");
    assert_eq!(out.kept[1].text, "nothing personal here");
    assert_eq!(out.report.stages[0].modified, 1);
}

#[test]
fn dedup_keeper_rules_and_clusters() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    let mut r = rng(3);
    let text = prose(&mut r, ENGLISH, 120);
    let near = text.replacen("the", "a", 1);
    let docs = vec![
        Document::new("c", text.clone()),
        Document::new("a", near),
        Document::new("b", text),
        Document::new("z", prose(&mut r, ENGLISH, 120)),
    ];
    write_corpus(&docs, &input).unwrap();
    let cfg = config(
        &input,
        dir.path(),
        vec![
            StageConfig::ExactDedup(NoParams {}),
            StageConfig::FuzzyDedup(Default::default()),
        ],
    );
    let out = run_pipeline(&cfg).unwrap();
    let kept: Vec<&str> = out.kept.iter().map(|d| d.id.as_str()).collect();
    assert_eq!(kept, ["a", "z"]);
    // Exact copies keep the first occurrence; near-duplicates keep the smallest id.
    assert_eq!(
        out.clusters,
        vec![
            ("c".to_owned(), vec!["b".to_owned()]),
            ("a".to_owned(), vec!["c".to_owned()])
        ]
    );
    let reasons: Vec<&str> = out
        .dropped
        .iter()
        .map(|d| d.trail.last().unwrap().reason.as_str())
        .collect();
    assert_eq!(reasons, ["duplicate_of=c", "duplicate_of=a"]);
}

fn all_stage_configs(quality: &std::path::Path, profiles: &std::path::Path) -> Vec<StageConfig> {
    let mut stages = default_stages(quality.to_owned(), profiles.to_owned());
    stages[0] = StageConfig::WordCount(HeuristicConfig {
        min_words: 30,
        ..Default::default()
    });
    stages
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn every_stage_conserves_documents(mask in 1u16..(1 << 9), order_seed in any::<u64>(), corpus_seed in 0u64..1000) {
        let dir = tempfile::tempdir().unwrap();
        let (quality, profiles) = write_models(dir.path());
        let mut stages: Vec<StageConfig> = all_stage_configs(&quality, &profiles)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, s)| s)
            .collect();
        let mut r = rng(order_seed);
        rand::seq::SliceRandom::shuffle(&mut stages[..], &mut r);
        let cfg = config(&dir.path().join("unused"), dir.path(), stages);
        let prepared = prepare_stages(&cfg).unwrap();
        let docs = synthetic_corpus(120, corpus_seed);
        let out = run_stages(docs, &prepared, &cfg.digest(), cfg.seed).map_err(|(e, _)| e).unwrap();
        prop_assert!(out.report.check_invariants().is_ok());
        let mut flowing = 120;
        for s in &out.report.stages {
            prop_assert_eq!(s.input, flowing);
            prop_assert_eq!(s.input, s.kept + s.dropped);
            flowing = s.kept;
        }
        prop_assert_eq!(out.kept.len() + out.dropped.len(), 120);
        for d in &out.dropped {
            prop_assert_eq!(d.trail.last().unwrap().verdict, Verdict::Drop);
        }
        for d in &out.kept {
            prop_assert!(d.trail.iter().all(|t| t.verdict != Verdict::Drop));
            prop_assert_eq!(d.trail.len(), out.report.stages.len());
        }
    }
}
