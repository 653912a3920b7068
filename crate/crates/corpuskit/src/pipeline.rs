//! Runs an ordered list of curation stages over a corpus.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use corpuskit_core::dedup::{exact_duplicates, near_duplicate_clusters, DedupConfig};
use corpuskit_core::document::{Document, StageDecision, Verdict};
use corpuskit_core::histogram::LengthHistogram;
use corpuskit_core::quality::{
    classify_quality, identify_language, mean_word_length_filter, reformat_unicode,
    word_count_filter, HeuristicConfig, LangProfile, LinearModel, QualityBucket, QualityModel,
    UNKNOWN,
};
use corpuskit_core::scrub::{codemath_filter, redact_pii, CodeMathConfig, PiiDetector};
use corpuskit_core::tokenizer::{FertilityCounter, FertilityReport, PretokConfig, TokenizerModel};

use crate::config::{PipelineConfig, ReportFormat, StageConfig};
use crate::io::{read_corpus, write_corpus, LineError};
use crate::models::{load_linear, load_pii_patterns, load_profiles, load_tokenizer};
use crate::report::{self, PipelineReport, StageReport};

pub const QUALITY_KIND: &str = "quality";
pub const CODEMATH_KIND: &str = "codemath";

/// A stage with its models loaded.
pub enum Stage {
    WordCount(HeuristicConfig),
    MeanWordLength(HeuristicConfig),
    Quality {
        model: QualityModel,
        retain: Vec<QualityBucket>,
    },
    Langid {
        profiles: Vec<LangProfile>,
        threshold: f64,
        drop_unknown: bool,
    },
    Unicode,
    ExactDedup,
    FuzzyDedup {
        cfg: DedupConfig,
        group_by_lang: bool,
    },
    Pii(PiiDetector),
    Codemath {
        cfg: CodeMathConfig,
        model: Option<LinearModel>,
    },
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::WordCount(_) => "word_count",
            Stage::MeanWordLength(_) => "mean_word_length",
            Stage::Quality { .. } => "quality",
            Stage::Langid { .. } => "langid",
            Stage::Unicode => "unicode",
            Stage::ExactDedup => "exact_dedup",
            Stage::FuzzyDedup { .. } => "fuzzy_dedup",
            Stage::Pii(_) => "pii",
            Stage::Codemath { .. } => "codemath",
        }
    }

    /// Dedup stages see the whole corpus at once; the rest decide per document.
    pub fn is_barrier(&self) -> bool {
        matches!(self, Stage::ExactDedup | Stage::FuzzyDedup { .. })
    }

    /// Loads whatever the stage needs. Parameter checks run first.
    pub fn prepare(cfg: &StageConfig, root_seed: u64) -> Result<Stage> {
        cfg.validate_params(root_seed)?;
        Ok(match cfg {
            StageConfig::WordCount(h) => Stage::WordCount(h.clone()),
            StageConfig::MeanWordLength(h) => Stage::MeanWordLength(h.clone()),
            StageConfig::Quality(q) => {
                let model = load_linear(&q.model, QUALITY_KIND)?;
                anyhow::ensure!(model.num_classes == 3, "quality model must have 3 classes");
                Stage::Quality {
                    model: QualityModel(model),
                    retain: q.retain.clone(),
                }
            }
            StageConfig::Langid(l) => Stage::Langid {
                profiles: load_profiles(&l.profiles)?,
                threshold: l.threshold,
                drop_unknown: l.drop_unknown,
            },
            StageConfig::Unicode(_) => Stage::Unicode,
            StageConfig::ExactDedup(_) => Stage::ExactDedup,
            StageConfig::FuzzyDedup(f) => Stage::FuzzyDedup {
                cfg: f.dedup_config(root_seed),
                group_by_lang: f.group_by_lang,
            },
            StageConfig::Pii(p) => Stage::Pii(match &p.patterns {
                Some(path) => PiiDetector::new(&load_pii_patterns(path)?)?,
                None => PiiDetector::default(),
            }),
            StageConfig::Codemath(c) => {
                let model = match &c.model {
                    Some(path) => {
                        let m = load_linear(path, CODEMATH_KIND)?;
                        anyhow::ensure!(m.num_classes == 2, "codemath model must have 2 classes");
                        Some(m)
                    }
                    None => None,
                };
                Stage::Codemath {
                    cfg: c.scoring(),
                    model,
                }
            }
        })
    }

    fn decide(&self, doc: &mut Document) -> StageDecision {
        let name = self.name();
        match self {
            Stage::WordCount(h) => word_count_filter(doc, h),
            Stage::MeanWordLength(h) => mean_word_length_filter(doc, h),
            Stage::Quality { model, retain } => {
                let (bucket, confidence) = classify_quality(model, &doc.text);
                let reason = format!("bucket={bucket}");
                let d = if retain.contains(&bucket) {
                    StageDecision::keep(name, reason)
                } else {
                    StageDecision::drop(name, reason)
                };
                d.with_score(confidence)
            }
            Stage::Langid {
                profiles,
                threshold,
                drop_unknown,
            } => {
                let guess = identify_language(profiles, &doc.text, *threshold);
                let reason = format!("lang={}", guess.lang);
                let verdict = if *drop_unknown && guess.lang == UNKNOWN {
                    Verdict::Drop
                } else if doc.lang.as_deref() != Some(guess.lang.as_str()) {
                    Verdict::Modified
                } else {
                    Verdict::Keep
                };
                doc.lang = Some(guess.lang);
                StageDecision::new(name, verdict, reason).with_score(guess.confidence)
            }
            Stage::Unicode => {
                let (text, changed) = reformat_unicode(&doc.text);
                if changed {
                    doc.text = text;
                    StageDecision::modified(name, "repaired")
                } else {
                    StageDecision::keep(name, "unchanged")
                }
            }
            Stage::Pii(detector) => {
                let spans = detector.detect(&doc.text);
                if spans.is_empty() {
                    return StageDecision::keep(name, "none");
                }
                let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                for s in &spans {
                    *counts.entry(s.category.as_str()).or_default() += 1;
                }
                doc.text = redact_pii(&doc.text, &spans).expect("detected spans are valid");
                let reason: Vec<String> = counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
                StageDecision::modified(name, reason.join(",")).with_score(spans.len() as f64)
            }
            Stage::Codemath { cfg, model } => codemath_filter(doc, cfg, model.as_ref()).decision(),
            Stage::ExactDedup | Stage::FuzzyDedup { .. } => {
                unreachable!("barrier stages decide in bulk")
            }
        }
    }

    /// For each document: `None` to keep, or the id of the document it
    /// duplicates. Also returns clusters as (kept id, dropped ids).
    fn duplicates(&self, docs: &[Document]) -> Result<(Vec<Option<String>>, Vec<ClusterIds>)> {
        let mut dup_of: Vec<Option<String>> = vec![None; docs.len()];
        let mut clusters = Vec::new();
        match self {
            Stage::ExactDedup => {
                let texts: Vec<&str> = docs.iter().map(|d| d.text.as_str()).collect();
                let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
                for (i, dup) in exact_duplicates(&texts).into_iter().enumerate() {
                    if let Some(j) = dup {
                        dup_of[i] = Some(docs[j].id.clone());
                        groups.entry(j).or_default().push(docs[i].id.clone());
                    }
                }
                clusters = groups
                    .into_iter()
                    .map(|(j, d)| (docs[j].id.clone(), d))
                    .collect();
            }
            Stage::FuzzyDedup { cfg, group_by_lang } => {
                let mut groups: BTreeMap<Option<&str>, Vec<usize>> = BTreeMap::new();
                for (i, d) in docs.iter().enumerate() {
                    let key = if *group_by_lang {
                        d.lang.as_deref()
                    } else {
                        None
                    };
                    groups.entry(key).or_default().push(i);
                }
                for members in groups.values() {
                    let subset: Vec<Document> = members.iter().map(|&i| docs[i].clone()).collect();
                    for c in near_duplicate_clusters(&subset, cfg)? {
                        let kept = &subset[c.kept].id;
                        for &d in &c.dropped {
                            dup_of[members[d]] = Some(kept.clone());
                        }
                        clusters.push((
                            kept.clone(),
                            c.dropped.iter().map(|&d| subset[d].id.clone()).collect(),
                        ));
                    }
                }
                clusters.sort();
            }
            _ => unreachable!("only dedup stages are barriers"),
        }
        Ok((dup_of, clusters))
    }

    /// Applies the stage, appending one decision to every document's trail.
    pub fn apply(&self, docs: Vec<Document>) -> Result<StageOutcome> {
        let mut out = StageOutcome {
            report: StageReport {
                stage: self.name().into(),
                input: docs.len(),
                kept: 0,
                dropped: 0,
                modified: 0,
            },
            ..Default::default()
        };
        if self.is_barrier() {
            let (dup_of, clusters) = self.duplicates(&docs)?;
            out.clusters = clusters;
            for (mut doc, dup) in docs.into_iter().zip(dup_of) {
                let decision = match dup {
                    Some(kept) => StageDecision::drop(self.name(), format!("duplicate_of={kept}")),
                    None => StageDecision::keep(self.name(), "unique"),
                };
                doc.record(decision);
                out.route(doc);
            }
        } else {
            for mut doc in docs {
                let decision = self.decide(&mut doc);
                doc.record(decision);
                out.route(doc);
            }
        }
        Ok(out)
    }
}

#[derive(Default)]
pub struct StageOutcome {
    pub kept: Vec<Document>,
    pub dropped: Vec<Document>,
    pub report: StageReport,
    pub clusters: Vec<(String, Vec<String>)>,
}

impl StageOutcome {
    fn route(&mut self, doc: Document) {
        match doc.last_verdict() {
            Some(Verdict::Drop) => {
                self.report.dropped += 1;
                self.dropped.push(doc);
            }
            v => {
                self.report.kept += 1;
                if v == Some(Verdict::Modified) {
                    self.report.modified += 1;
                }
                self.kept.push(doc);
            }
        }
    }
}

/// A duplicate cluster as (kept id, dropped ids).
pub type ClusterIds = (String, Vec<String>);

/// Everything a run produces.
pub struct RunOutput {
    pub kept: Vec<Document>,
    pub dropped: Vec<Document>,
    pub report: PipelineReport,
    pub clusters: Vec<(String, Vec<String>)>,
    pub timings: Vec<(String, Duration)>,
    pub line_errors: Vec<LineError>,
}

/// Loads every stage; fails before any data is read.
pub fn prepare_stages(cfg: &PipelineConfig) -> Result<Vec<Stage>> {
    cfg.validate()?;
    cfg.stages
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Stage::prepare(s, cfg.seed).with_context(|| format!("stage {} ({})", i + 1, s.name()))
        })
        .collect()
}

/// Runs prepared stages over in-memory documents. On a stage failure the
/// error carries the report of the stages that completed.
pub fn run_stages(
    docs: Vec<Document>,
    stages: &[Stage],
    digest: &str,
    seed: u64,
) -> std::result::Result<RunOutput, (anyhow::Error, PipelineReport)> {
    let mut report = PipelineReport {
        config_digest: digest.into(),
        seed,
        input_documents: docs.len(),
        malformed_lines: 0,
        stages: Vec::new(),
        output_documents: 0,
    };
    let mut current = docs;
    let mut dropped = Vec::new();
    let mut clusters = Vec::new();
    let mut timings = Vec::new();
    for stage in stages {
        let start = Instant::now();
        let outcome = match stage.apply(current) {
            Ok(o) => o,
            Err(e) => return Err((e.context(format!("stage {} failed", stage.name())), report)),
        };
        timings.push((stage.name().to_owned(), start.elapsed()));
        log::info!(
            "{}: {} in, {} kept, {} dropped",
            stage.name(),
            outcome.report.input,
            outcome.report.kept,
            outcome.report.dropped
        );
        report.stages.push(outcome.report);
        clusters.extend(outcome.clusters);
        dropped.extend(outcome.dropped);
        current = outcome.kept;
    }
    report.output_documents = current.len();
    Ok(RunOutput {
        kept: current,
        dropped,
        report,
        clusters,
        timings,
        line_errors: Vec::new(),
    })
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("configuration error: {0:#}")]
    Config(anyhow::Error),
    #[error("runtime failure: {error:#}")]
    Runtime {
        error: anyhow::Error,
        partial: Option<Box<PipelineReport>>,
    },
}

/// Validates and loads the configuration, reads the input corpus, runs the
/// stages and returns the outputs (nothing is written).
pub fn run_pipeline(cfg: &PipelineConfig) -> std::result::Result<RunOutput, PipelineError> {
    let stages = prepare_stages(cfg).map_err(PipelineError::Config)?;
    let (docs, line_errors) = read_corpus(&cfg.io.input).map_err(|e| PipelineError::Runtime {
        error: e.into(),
        partial: None,
    })?;
    for e in &line_errors {
        log::warn!("{}: {e}", cfg.io.input.display());
    }
    let mut out =
        run_stages(docs, &stages, &cfg.digest(), cfg.seed).map_err(|(error, mut partial)| {
            partial.malformed_lines = line_errors.len();
            PipelineError::Runtime {
                error,
                partial: Some(Box::new(partial)),
            }
        })?;
    out.report.malformed_lines = line_errors.len();
    out.line_errors = line_errors;
    Ok(out)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn extension(format: ReportFormat) -> &'static str {
    match format {
        ReportFormat::Tsv => "tsv",
        ReportFormat::Records => "jsonl",
    }
}

/// Writes the stage report, which is always emitted, even for a failed run.
pub fn write_stage_report(
    report: &PipelineReport,
    dir: &Path,
    format: ReportFormat,
) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write(
        dir,
        &format!("stage_report.{}", extension(format)),
        &report::stage_report(report, format),
    )
}

/// Writes output corpora and every configured report; returns written paths.
pub fn emit_outputs(out: &RunOutput, cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let dir = &cfg.io.output_dir;
    let format = cfg.reports.format;
    let ext = extension(format);
    let mut written = vec![write_stage_report(&out.report, dir, format)?];
    let kept_path = dir.join("kept.jsonl");
    write_corpus(&out.kept, &kept_path)?;
    written.push(kept_path);
    if cfg.io.write_dropped {
        let path = dir.join("dropped.jsonl");
        write_corpus(&out.dropped, &path)?;
        written.push(path);
    }
    if !out.line_errors.is_empty() {
        let text: String = out
            .line_errors
            .iter()
            .map(|e| format!("{}\t{}\n", e.line, e.message))
            .collect();
        written.push(write(dir, "input_errors.tsv", &text)?);
    }
    if cfg.reports.histogram {
        let tok = match &cfg.reports.histogram_tokenizer {
            Some(p) => load_tokenizer(p)?,
            None => TokenizerModel::byte_only(PretokConfig::default()),
        };
        let h =
            LengthHistogram::from_token_counts(out.kept.iter().map(|d| tok.encode(&d.text).len()));
        written.push(write(
            dir,
            &format!("histogram.{ext}"),
            &report::histogram_report(&h, format),
        )?);
    }
    if !cfg.reports.fertility_tokenizers.is_empty() {
        let mut reports = Vec::new();
        for t in &cfg.reports.fertility_tokenizers {
            let model = load_tokenizer(&t.path)?;
            reports.push(kept_fertility(&model, &out.kept, &t.id));
        }
        written.push(write(
            dir,
            &format!("fertility.{ext}"),
            &report::fertility_table(&reports, format),
        )?);
    }
    if cfg.reports.dedup_clusters {
        written.push(write(
            dir,
            "dedup_clusters.tsv",
            &report::cluster_report(&out.clusters),
        )?);
    }
    if cfg.reports.timings {
        written.push(write(
            dir,
            "timings.tsv",
            &report::timings_table(&out.timings),
        )?);
    }
    Ok(written)
}

/// Fertility over tagged documents; untagged and unknown-language ones are skipped.
pub fn kept_fertility(
    model: &TokenizerModel,
    docs: &[Document],
    tokenizer_id: &str,
) -> FertilityReport {
    let mut counter = FertilityCounter::new(model);
    for d in docs {
        if let Some(lang) = d.lang.as_deref().filter(|l| *l != UNKNOWN) {
            counter.add(lang, &d.text);
        }
    }
    counter.finish("kept", tokenizer_id)
}
