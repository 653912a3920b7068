//! Report tables: stage summary, length histogram, fertility table,
//! dedup clusters, mixture trajectory.

use std::fmt::Write as _;
use std::time::Duration;

use corpuskit_core::histogram::LengthHistogram;
use corpuskit_core::mixture::IterationRecord;
use corpuskit_core::tokenizer::FertilityReport;
use serde::{Deserialize, Serialize};

use crate::config::ReportFormat;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub input: usize,
    pub kept: usize,
    pub dropped: usize,
    /// Kept documents whose text or tags the stage changed.
    pub modified: usize,
}

/// Deterministic run summary. Wall times live in a separate timings table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub config_digest: String,
    pub seed: u64,
    pub input_documents: usize,
    pub malformed_lines: usize,
    pub stages: Vec<StageReport>,
    pub output_documents: usize,
}

impl PipelineReport {
    pub fn total_dropped(&self) -> usize {
        self.stages.iter().map(|s| s.dropped).sum()
    }

    /// Per-stage conservation and chaining; `Err` names the first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut expected_input = self.input_documents;
        for s in &self.stages {
            if s.input != expected_input {
                return Err(format!(
                    "{}: input {} but previous stage kept {}",
                    s.stage, s.input, expected_input
                ));
            }
            if s.input != s.kept + s.dropped {
                return Err(format!(
                    "{}: input {} != kept {} + dropped {}",
                    s.stage, s.input, s.kept, s.dropped
                ));
            }
            if s.modified > s.kept {
                return Err(format!(
                    "{}: modified {} exceeds kept {}",
                    s.stage, s.modified, s.kept
                ));
            }
            expected_input = s.kept;
        }
        if expected_input != self.output_documents {
            return Err(format!(
                "output {} != last kept {}",
                self.output_documents, expected_input
            ));
        }
        Ok(())
    }
}

pub fn stage_report(report: &PipelineReport, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Tsv => {
            writeln!(out, "# config_digest\t{}", report.config_digest).unwrap();
            writeln!(out, "# seed\t{}", report.seed).unwrap();
            writeln!(out, "# malformed_lines\t{}", report.malformed_lines).unwrap();
            writeln!(out, "stage\tinput\tkept\tdropped\tmodified").unwrap();
            for s in &report.stages {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    s.stage, s.input, s.kept, s.dropped, s.modified
                )
                .unwrap();
            }
            let modified: usize = report.stages.iter().map(|s| s.modified).sum();
            writeln!(
                out,
                "total\t{}\t{}\t{}\t{}",
                report.input_documents,
                report.output_documents,
                report.total_dropped(),
                modified
            )
            .unwrap();
        }
        ReportFormat::Records => {
            writeln!(out, "{}", serde_json::to_string(report).unwrap()).unwrap();
        }
    }
    out
}

pub fn timings_table(timings: &[(String, Duration)]) -> String {
    let mut out = String::from("stage\tseconds\n");
    for (stage, d) in timings {
        writeln!(out, "{stage}\t{:.6}", d.as_secs_f64()).unwrap();
    }
    out
}

pub fn histogram_report(h: &LengthHistogram, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Tsv => {
            out.push_str("range\tcount\n");
            for (label, count) in h.buckets() {
                writeln!(out, "{label}\t{count}").unwrap();
            }
            writeln!(out, "overflow\t{}", h.overflow).unwrap();
        }
        ReportFormat::Records => {
            for (label, count) in h.buckets() {
                writeln!(
                    out,
                    "{}",
                    serde_json::json!({ "range": label, "count": count })
                )
                .unwrap();
            }
            writeln!(
                out,
                "{}",
                serde_json::json!({ "range": "overflow", "count": h.overflow })
            )
            .unwrap();
        }
    }
    out
}

/// English names for common ISO 639-3 codes.
pub fn language_name(code: &str) -> Option<&'static str> {
    Some(match code {
        "asm" => "Assamese",
        "ben" => "Bengali",
        "brx" => "Bodo",
        "doi" => "Dogri",
        "eng" => "English",
        "fra" => "French",
        "deu" => "German",
        "guj" => "Gujarati",
        "hin" => "Hindi",
        "kan" => "Kannada",
        "kas" => "Kashmiri",
        "kok" => "Konkani",
        "mai" => "Maithili",
        "mal" => "Malayalam",
        "mar" => "Marathi",
        "mni" => "Manipuri",
        "nep" => "Nepali",
        "ori" | "ory" => "Odia",
        "pan" => "Punjabi",
        "san" => "Sanskrit",
        "sat" => "Santali",
        "snd" => "Sindhi",
        "spa" => "Spanish",
        "tam" => "Tamil",
        "tel" => "Telugu",
        "urd" => "Urdu",
        _ => return None,
    })
}

/// Row label such as `hin – Hindi`; bare code for unnamed languages.
pub fn language_label(code: &str) -> String {
    match language_name(code) {
        Some(name) => format!("{code} – {name}"),
        None => code.to_owned(),
    }
}

/// Languages (sorted by code) down, tokenizers across, fertility to two
/// decimals; `-` where a tokenizer has no value for a language.
pub fn fertility_table(reports: &[FertilityReport], format: ReportFormat) -> String {
    let mut langs: Vec<&str> = reports
        .iter()
        .flat_map(|r| r.languages.keys().map(String::as_str))
        .collect();
    langs.sort_unstable();
    langs.dedup();
    let mut out = String::new();
    match format {
        ReportFormat::Tsv => {
            out.push_str("Language");
            for r in reports {
                write!(out, "\t{}", r.tokenizer_id).unwrap();
            }
            out.push('\n');
            for lang in langs {
                out.push_str(&language_label(lang));
                for r in reports {
                    match r.get(lang) {
                        Some(f) => write!(out, "\t{f:.2}").unwrap(),
                        None => out.push_str("\t-"),
                    }
                }
                out.push('\n');
            }
        }
        ReportFormat::Records => {
            for lang in langs {
                for r in reports {
                    if let Some(l) = r.languages.get(lang) {
                        let rec = serde_json::json!({
                            "lang": lang,
                            "tokenizer": r.tokenizer_id,
                            "corpus": r.corpus_id,
                            "words": l.words,
                            "tokens": l.tokens,
                            "fertility": l.fertility,
                        });
                        writeln!(out, "{rec}").unwrap();
                    }
                }
            }
        }
    }
    out
}

/// One line per cluster: `kept_id<TAB>dropped_id,dropped_id,...`.
pub fn cluster_report(clusters: &[(String, Vec<String>)]) -> String {
    let mut out = String::from("kept\tdropped\n");
    for (kept, dropped) in clusters {
        writeln!(out, "{kept}\t{}", dropped.join(",")).unwrap();
    }
    out
}

/// One JSON record per optimizer iteration.
pub fn trajectory_records(history: &[IterationRecord]) -> String {
    let mut out = String::new();
    for rec in history {
        writeln!(out, "{}", serde_json::to_string(rec).unwrap()).unwrap();
    }
    out
}
