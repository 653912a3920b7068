use std::fs;
use std::path::Path;

use corpuskit::cli::{main_with_args, EXIT_CONFIG, EXIT_RUNTIME};
use corpuskit::io::write_corpus;
use corpuskit_core::Document;

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("corpuskit").chain(args.iter().copied()))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn corpus(dir: &Path) -> std::path::PathBuf {
    let docs: Vec<Document> = (0..20)
        .map(|i| {
            let mut text = format!(
                "document number {i} talks about rivers and mountains and the valley below them"
            );
            if i % 2 == 1 {
                text.push_str(" with a few extra words");
            }
            Document::new(format!("d{i:02}"), text).with_lang(if i % 2 == 0 {
                "eng"
            } else {
                "hin"
            })
        })
        .collect();
    let path = dir.join("in.jsonl");
    write_corpus(&docs, &path).unwrap();
    path
}

#[test]
fn usage_errors_exit_with_config_status() {
    assert_eq!(run(&[]), EXIT_CONFIG);
    assert_eq!(run(&["frobnicate"]), EXIT_CONFIG);
    assert_eq!(run(&["curate"]), EXIT_CONFIG);
    assert_eq!(
        run(&["curate", "--config", "/nonexistent/cfg.toml"]),
        EXIT_CONFIG
    );
}

#[test]
fn curate_runs_and_classifies_failures() {
    let dir = tempfile::tempdir().unwrap();
    let input = corpus(dir.path());
    let out = dir.path().join("out");
    let cfg = dir.path().join("cfg.toml");
    fs::write(
        &cfg,
        format!(
            "seed = 3\n[io]\ninput = {:?}\noutput_dir = {:?}\n[reports]\nhistogram = true\n\
             [[stages]]\nstage = \"word_count\"\nmin_words = 14\n[[stages]]\nstage = \"exact_dedup\"\n",
            p(&input),
            p(&out)
        ),
    )
    .unwrap();
    assert_eq!(run(&["curate", "--config", p(&cfg)]), 0);
    let report = fs::read_to_string(out.join("stage_report.tsv")).unwrap();
    assert!(report.contains("word_count\t20\t10\t10\t0\n"), "{report}");
    assert!(out.join("histogram.tsv").exists());

    assert_eq!(
        run(&[
            "curate",
            "--config",
            p(&cfg),
            "--format",
            "records",
            "--out",
            p(&dir.path().join("o2"))
        ]),
        0
    );
    assert!(dir.path().join("o2/stage_report.jsonl").exists());

    fs::write(
        &cfg,
        "[io]\ninput = \"missing.jsonl\"\n[[stages]]\nstage = \"unicode\"\n",
    )
    .unwrap();
    assert_eq!(run(&["curate", "--config", p(&cfg)]), EXIT_RUNTIME);
    fs::write(
        &cfg,
        "[io]\ninput = \"in.jsonl\"\n[[stages]]\nstage = \"sentiment\"\n",
    )
    .unwrap();
    assert_eq!(run(&["curate", "--config", p(&cfg)]), EXIT_CONFIG);
}

#[test]
fn tokenizer_fertility_and_report_commands() {
    let dir = tempfile::tempdir().unwrap();
    let input = corpus(dir.path());
    let out = dir.path().join("tok");
    assert_eq!(
        run(&[
            "train-tokenizer",
            "--input",
            p(&input),
            "--vocab-size",
            "330",
            "--out",
            p(&out)
        ]),
        0
    );
    let tok = out.join("tokenizer.txt");
    assert!(fs::read_to_string(&tok)
        .unwrap()
        .starts_with("corpuskit-tokenizer 1\n"));
    assert_eq!(
        run(&[
            "train-tokenizer",
            "--input",
            p(&input),
            "--vocab-size",
            "10",
            "--out",
            p(&out)
        ]),
        EXIT_CONFIG
    );

    let spec = format!("small={}", p(&tok));
    let rep = dir.path().join("rep");
    assert_eq!(
        run(&[
            "fertility",
            "--tokenizer",
            &spec,
            "--corpus",
            p(&input),
            "--out",
            p(&rep)
        ]),
        0
    );
    let table = fs::read_to_string(rep.join("fertility.tsv")).unwrap();
    assert!(
        table.starts_with("Language\tsmall\neng – English\t"),
        "{table}"
    );
    assert_eq!(
        run(&[
            "fertility",
            "--tokenizer",
            "no-equals-sign",
            "--corpus",
            p(&input)
        ]),
        EXIT_CONFIG
    );

    assert_eq!(
        run(&[
            "report",
            "--corpus",
            p(&input),
            "--tokenizer",
            p(&tok),
            "--out",
            p(&rep)
        ]),
        0
    );
    assert!(fs::read_to_string(rep.join("histogram.tsv"))
        .unwrap()
        .contains("0-128\t20\n"));
}

#[test]
fn sft_filter_with_stub_judge() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pairs.jsonl");
    fs::write(
        &input,
        concat!(
            r#"{"id":"p1","prompt":"What is the capital of India?","completion":"New Delhi is the capital."}"#,
            "\n",
            r#"{"id":"p2","prompt":"Say hi","completion":"Hello there, nice to meet you."}"#,
            "\n"
        ),
    )
    .unwrap();
    let stub = dir.path().join("stub.txt");
    fs::write(&stub, "\"code\": 0, \"math\": 0, \"toxic\": 0, \"quality\": 5, \"language\": hi_or_eng\n\"code\": 0, \"math\": 0, \"toxic\": 0, \"quality\": 3, \"language\": hi_or_eng\n").unwrap();
    let cfg = dir.path().join("sft.toml");
    fs::write(&cfg, format!("stub_responses = {:?}\n", p(&stub))).unwrap();
    let out = dir.path().join("out");
    assert_eq!(
        run(&[
            "sft-filter",
            "--input",
            p(&input),
            "--config",
            p(&cfg),
            "--out",
            p(&out)
        ]),
        0
    );
    let kept = fs::read_to_string(out.join("kept.jsonl")).unwrap();
    assert_eq!(kept.lines().count(), 1);
    assert!(kept.contains("\"p1\""));
    let summary = fs::read_to_string(out.join("sft_report.tsv")).unwrap();
    assert!(summary.contains("drop:judge:quality\t1\n"), "{summary}");
    assert_eq!(
        fs::read_to_string(out.join("audit.jsonl"))
            .unwrap()
            .lines()
            .count(),
        2
    );

    assert_eq!(
        run(&[
            "sft-filter",
            "--input",
            p(&input),
            "--judge",
            "endpoint",
            "--out",
            p(&out)
        ]),
        EXIT_CONFIG
    );
}

#[test]
fn classifier_and_langid_training() {
    let dir = tempfile::tempdir().unwrap();
    let labeled = dir.path().join("labeled.jsonl");
    let mut lines = String::new();
    for i in 0..30 {
        let (label, text) = match i % 3 {
            0 => (
                "HIGH",
                "a careful essay about the history of the river valley",
            ),
            1 => ("MEDIUM", "some notes about rivers buy now"),
            _ => ("LOW", "click here free cash win win win"),
        };
        lines.push_str(&format!(
            "{{\"id\":\"l{i}\",\"text\":\"{text} {i}\",\"meta\":{{\"label\":\"{label}\"}}}}\n"
        ));
    }
    fs::write(&labeled, lines).unwrap();
    let out = dir.path().join("models");
    assert_eq!(
        run(&[
            "train-classifier",
            "--labeled",
            p(&labeled),
            "--kind",
            "quality",
            "--out",
            p(&out)
        ]),
        0
    );
    let model = corpuskit::models::load_linear(&out.join("quality.bin"), "quality").unwrap();
    assert_eq!(model.num_classes, 3);
    assert_eq!(
        run(&[
            "train-classifier",
            "--labeled",
            p(&labeled),
            "--kind",
            "codemath",
            "--out",
            p(&out)
        ]),
        EXIT_RUNTIME
    );

    let input = corpus(dir.path());
    assert_eq!(
        run(&["train-langid", "--corpus", p(&input), "--out", p(&out)]),
        0
    );
    let profiles = corpuskit::models::load_profiles(&out.join("profiles.json")).unwrap();
    assert_eq!(profiles.len(), 2);
}

#[test]
fn optimize_mixture_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let mk = |name: &str, word: &str| {
        let docs: Vec<Document> = (0..10)
            .map(|i| {
                Document::new(
                    format!("{name}{i}"),
                    format!("{word} {word}{i} ").repeat(20),
                )
            })
            .collect();
        write_corpus(&docs, &dir.path().join(format!("{name}.jsonl"))).unwrap();
    };
    mk("aa", "short");
    mk("bb", "considerablylongerwordsthatfragment");
    let cfg = dir.path().join("mix.toml");
    fs::write(
        &cfg,
        "[corpora]\naa = \"aa.jsonl\"\nbb = \"bb.jsonl\"\n[eval_corpora]\naa = \"aa.jsonl\"\nbb = \"bb.jsonl\"\n\
         [optimizer]\ntotal_chars = 4000\n[optimizer.bpe]\nvocab_size = 320\n",
    )
    .unwrap();
    let out = dir.path().join("mix");
    assert_eq!(
        run(&[
            "optimize-mixture",
            "--config",
            p(&cfg),
            "--iterations",
            "2",
            "--out",
            p(&out)
        ]),
        0
    );
    assert_eq!(
        fs::read_to_string(out.join("trajectory.jsonl"))
            .unwrap()
            .lines()
            .count(),
        2
    );
    let alloc = fs::read_to_string(out.join("allocation.tsv")).unwrap();
    assert!(alloc.starts_with("lang\tshare\tchars\naa\t"), "{alloc}");
    assert!(out.join("tokenizer.txt").exists());

    fs::write(&cfg, "[optimizer]\nmu = 0.3\n").unwrap();
    assert_eq!(run(&["optimize-mixture", "--config", p(&cfg)]), EXIT_CONFIG);
}
