//! Instruction-pair filtering: language rule, code/math pre-filter, judge.

use std::collections::BTreeMap;

use anyhow::Result;
use corpuskit_core::document::{Document, StageDecision, Verdict};
use corpuskit_core::quality::langid::DEFAULT_THRESHOLD;
use corpuskit_core::quality::{LangProfile, LinearModel};
use corpuskit_core::scrub::{codemath_filter, CodeMathConfig, CODEMATH_STAGE};
use corpuskit_core::sft::{
    language_rule_filter, InstructionPair, JudgeConfig, JudgeRecord, Scores,
};
use serde::{Deserialize, Serialize};

/// Stages run before any judge request.
pub struct PreFilters {
    pub profiles: Option<Vec<LangProfile>>,
    pub langid_threshold: f64,
    pub codemath: Option<(CodeMathConfig, Option<LinearModel>)>,
}

impl Default for PreFilters {
    fn default() -> Self {
        PreFilters {
            profiles: None,
            langid_threshold: DEFAULT_THRESHOLD,
            codemath: Some((CodeMathConfig::default(), None)),
        }
    }
}

/// One line of the audit log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub id: String,
    pub decisions: Vec<StageDecision>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub judge: Option<JudgeRecord>,
}

impl AuditRecord {
    pub fn verdict(&self) -> Verdict {
        self.decisions.last().map_or(Verdict::Keep, |d| d.verdict)
    }
}

#[derive(Debug, Default)]
pub struct SftOutput {
    pub kept: Vec<InstructionPair>,
    pub dropped: Vec<(InstructionPair, StageDecision)>,
    pub audit: Vec<AuditRecord>,
}

impl SftOutput {
    /// Drop counts keyed by `stage:reason`, or just the stage for the
    /// code/math filter whose reasons are score listings.
    pub fn drop_summary(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for (_, d) in &self.dropped {
            let key = if d.stage == CODEMATH_STAGE {
                d.stage.clone()
            } else {
                format!("{}:{}", d.stage, d.reason)
            };
            *out.entry(key).or_default() += 1;
        }
        out
    }
}

/// Runs the pre-filters, then `judge` on the survivors (returning one record
/// per pair passed to it, in order). Every input pair ends up in exactly one
/// of `kept` or `dropped` and has one audit record.
pub fn sft_filter<F>(pairs: Vec<InstructionPair>, pre: &PreFilters, judge: F) -> Result<SftOutput>
where
    F: FnOnce(&[InstructionPair]) -> Result<Vec<JudgeRecord>>,
{
    let mut out = SftOutput::default();
    let mut audits: Vec<AuditRecord> = Vec::with_capacity(pairs.len());
    let mut to_judge = Vec::new();
    for pair in pairs {
        let mut decisions = Vec::new();
        if let Some(profiles) = &pre.profiles {
            decisions.push(language_rule_filter(&pair, profiles, pre.langid_threshold));
        }
        if decisions
            .iter()
            .all(|d: &StageDecision| d.verdict.is_kept())
        {
            if let Some((cfg, model)) = &pre.codemath {
                let doc = Document::new(pair.id.clone(), pair.completion.clone());
                decisions.push(codemath_filter(&doc, cfg, model.as_ref()).decision());
            }
        }
        let index = audits.len();
        audits.push(AuditRecord {
            id: pair.id.clone(),
            decisions,
            judge: None,
        });
        to_judge.push((index, pair));
    }
    let (judged, pre_dropped): (Vec<_>, Vec<_>) = to_judge
        .into_iter()
        .partition(|(i, _)| audits[*i].verdict().is_kept());
    let judged_pairs: Vec<InstructionPair> = judged.iter().map(|(_, p)| p.clone()).collect();
    let records = judge(&judged_pairs)?;
    anyhow::ensure!(
        records.len() == judged_pairs.len(),
        "judge returned {} records for {} pairs",
        records.len(),
        judged_pairs.len()
    );
    let mut outcome: Vec<Option<(InstructionPair, StageDecision)>> = vec![None; audits.len()];
    for ((i, mut pair), record) in judged.into_iter().zip(records) {
        if let Some(Scores::Ratings(s)) = &record.scores {
            pair.scores = Some(s.clone());
        }
        audits[i].decisions.push(record.decision.clone());
        outcome[i] = Some((pair, record.decision.clone()));
        audits[i].judge = Some(record);
    }
    for (i, pair) in pre_dropped {
        let d = audits[i]
            .decisions
            .last()
            .cloned()
            .expect("dropped by a pre-filter");
        outcome[i] = Some((pair, d));
    }
    for (pair, decision) in outcome.into_iter().map(|o| o.expect("every pair decided")) {
        if decision.verdict.is_kept() {
            out.kept.push(pair);
        } else {
            out.dropped.push((pair, decision));
        }
    }
    out.audit = audits;
    Ok(out)
}

/// Convenience: configuration shared by the CLI.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SftConfig {
    pub judge: JudgeConfig,
    pub endpoint: crate::judge_client::EndpointConfig,
    /// Language profiles for the rule-based language gate.
    pub profiles: Option<std::path::PathBuf>,
    pub langid_threshold: Option<f64>,
    /// Run the code/math filter on completions before judging.
    pub codemath_prefilter: Option<bool>,
    /// Script for the offline stub judge, one response per line, cycled.
    pub stub_responses: Option<std::path::PathBuf>,
}
