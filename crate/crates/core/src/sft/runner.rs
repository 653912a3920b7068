//! Driving a judge over instruction pairs with retries.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::judge::{
    build_judge_prompt, build_rubric_prompt, parse_judge_response, parse_rubric_response,
    InstructionPair, JudgeScores, RubricScores,
};
use super::policy::{
    retention_decision, rubric_decision, RetentionPolicy, RubricPolicy, JUDGE_STAGE,
};
use crate::document::StageDecision;
use crate::error::Result;

/// Text-in, text-out access to a judge model.
pub trait Judge {
    /// Sends one prompt; `Err` carries a transport error description.
    fn complete(&mut self, prompt: &str) -> core::result::Result<String, String>;

    /// Called before retry number `attempt` (1-based).
    fn backoff(&mut self, _attempt: u32) {}
}

impl<F: FnMut(&str) -> core::result::Result<String, String>> Judge for F {
    fn complete(&mut self, prompt: &str) -> core::result::Result<String, String> {
        self(prompt)
    }
}

/// Replays a fixed script of responses in order, cycling when exhausted.
#[derive(Debug, Clone, Default)]
pub struct StubJudge {
    responses: Vec<String>,
    next: usize,
}

impl StubJudge {
    pub fn new<S: Into<String>>(responses: impl IntoIterator<Item = S>) -> Self {
        StubJudge {
            responses: responses.into_iter().map(Into::into).collect(),
            next: 0,
        }
    }

    /// Answers every prompt with a perfect score line.
    pub fn always_pass() -> Self {
        let pass = JudgeScores {
            code: 0,
            math: 0,
            toxic: 0,
            quality: 5,
            language: super::JudgeLanguage::HiOrEng,
        };
        StubJudge::new([pass.to_line()])
    }
}

impl Judge for StubJudge {
    fn complete(&mut self, _prompt: &str) -> core::result::Result<String, String> {
        if self.responses.is_empty() {
            return Err("stub judge has no responses".into());
        }
        let r = self.responses[self.next % self.responses.len()].clone();
        self.next += 1;
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgeFormat {
    /// Five ratings: code, math, toxic, quality, language.
    #[default]
    Ratings,
    /// Four 1–5 dimensions: relevance, fluency, helpfulness, alignment.
    Rubric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JudgeConfig {
    pub format: JudgeFormat,
    /// Extra attempts after the first failed one.
    pub max_retries: u32,
    pub policy: RetentionPolicy,
    pub rubric_policy: RubricPolicy,
}

impl Default for JudgeConfig {
    fn default() -> Self {
        JudgeConfig {
            format: JudgeFormat::Ratings,
            max_retries: 2,
            policy: RetentionPolicy::default(),
            rubric_policy: RubricPolicy::default(),
        }
    }
}

impl JudgeConfig {
    pub fn validate(&self) -> Result<()> {
        self.policy.validate()?;
        self.rubric_policy.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scores {
    Ratings(JudgeScores),
    Rubric(RubricScores),
}

/// One request/response exchange.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Audit record for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeRecord {
    pub id: String,
    pub attempts: Vec<Attempt>,
    pub scores: Option<Scores>,
    pub decision: StageDecision,
}

pub fn judge_prompt_for(pair: &InstructionPair, format: JudgeFormat) -> String {
    match format {
        JudgeFormat::Ratings => build_judge_prompt(pair),
        JudgeFormat::Rubric => build_rubric_prompt(pair),
    }
}

/// Parses one raw response and applies the configured policy.
pub fn score_response(
    raw: &str,
    cfg: &JudgeConfig,
) -> core::result::Result<(Scores, StageDecision), String> {
    match cfg.format {
        JudgeFormat::Ratings => parse_judge_response(raw)
            .map(|s| {
                let d = retention_decision(&s, &cfg.policy);
                (Scores::Ratings(s), d)
            })
            .map_err(|e| alloc::format!("parse: {e}")),
        JudgeFormat::Rubric => parse_rubric_response(raw)
            .map(|s| {
                let d = rubric_decision(&s, &cfg.rubric_policy);
                (Scores::Rubric(s), d)
            })
            .map_err(|e| alloc::format!("parse: {e}")),
    }
}

/// Judges one pair: up to `1 + max_retries` attempts, then DROP as
/// unscorable. Pairs with an empty side are dropped without a request.
pub fn judge_pair<J: Judge + ?Sized>(
    judge: &mut J,
    pair: &InstructionPair,
    cfg: &JudgeConfig,
) -> JudgeRecord {
    let mut record = JudgeRecord {
        id: pair.id.clone(),
        attempts: Vec::new(),
        scores: None,
        decision: StageDecision::drop(JUDGE_STAGE, "unscorable"),
    };
    if pair.prompt.trim().is_empty() || pair.completion.trim().is_empty() {
        record.decision = StageDecision::drop(JUDGE_STAGE, "empty");
        return record;
    }
    let prompt = judge_prompt_for(pair, cfg.format);
    for attempt in 0..=cfg.max_retries {
        if attempt > 0 {
            judge.backoff(attempt);
        }
        match judge.complete(&prompt) {
            Err(e) => record.attempts.push(Attempt {
                raw: None,
                error: Some(alloc::format!("transport: {e}")),
            }),
            Ok(raw) => match score_response(&raw, cfg) {
                Ok((scores, decision)) => {
                    record.attempts.push(Attempt {
                        raw: Some(raw),
                        error: None,
                    });
                    record.scores = Some(scores);
                    record.decision = decision;
                    return record;
                }
                Err(e) => record.attempts.push(Attempt {
                    raw: Some(raw),
                    error: Some(e),
                }),
            },
        }
    }
    record
}

/// Judges pairs in order, attaching parsed five-key scores to each pair.
pub fn judge_pairs<'a, J: Judge + ?Sized>(
    judge: &'a mut J,
    pairs: impl IntoIterator<Item = InstructionPair> + 'a,
    cfg: &'a JudgeConfig,
) -> impl Iterator<Item = (InstructionPair, JudgeRecord)> + 'a {
    pairs.into_iter().map(move |mut pair| {
        let record = judge_pair(judge, &pair, cfg);
        if let Some(Scores::Ratings(s)) = &record.scores {
            pair.scores = Some(s.clone());
        }
        (pair, record)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::Verdict;
    use crate::sft::JudgeLanguage;
    use alloc::format;
    use alloc::vec;

    fn pairs(n: usize) -> Vec<InstructionPair> {
        (0..n)
            .map(|i| InstructionPair::new(format!("p{i}"), "What is rice?", "A grain."))
            .collect()
    }

    #[test]
    fn always_pass_keeps_everything() {
        let mut judge = StubJudge::always_pass();
        let cfg = JudgeConfig::default();
        let out: Vec<_> = judge_pairs(&mut judge, pairs(5), &cfg).collect();
        assert_eq!(out.len(), 5);
        assert!(out
            .iter()
            .all(|(p, r)| r.decision.verdict == Verdict::Keep && p.scores.is_some()));
    }

    #[test]
    fn malformed_responses_become_unscorable_after_retries() {
        let mut judge = StubJudge::new(["I think it is fine."]);
        let cfg = JudgeConfig {
            max_retries: 3,
            ..Default::default()
        };
        let r = judge_pair(&mut judge, &pairs(1)[0], &cfg);
        assert_eq!(r.attempts.len(), 4);
        assert_eq!(
            (r.decision.verdict, r.decision.reason.as_str()),
            (Verdict::Drop, "unscorable")
        );
        assert!(r
            .attempts
            .iter()
            .all(|a| a.raw.as_deref() == Some("I think it is fine.")));
    }

    #[test]
    fn transport_errors_retry_with_backoff() {
        struct Flaky {
            fails: u32,
            backoffs: Vec<u32>,
        }
        impl Judge for Flaky {
            fn complete(&mut self, _: &str) -> core::result::Result<String, String> {
                if self.fails > 0 {
                    self.fails -= 1;
                    return Err("timeout".into());
                }
                StubJudge::always_pass().complete("")
            }
            fn backoff(&mut self, attempt: u32) {
                self.backoffs.push(attempt);
            }
        }
        let mut judge = Flaky {
            fails: 2,
            backoffs: vec![],
        };
        let r = judge_pair(&mut judge, &pairs(1)[0], &JudgeConfig::default());
        assert_eq!(r.decision.verdict, Verdict::Keep);
        assert_eq!(judge.backoffs, [1, 2]);
        assert_eq!(r.attempts[0].error.as_deref(), Some("transport: timeout"));
    }

    #[test]
    fn mixed_script_matches_independent_policy() {
        let lines: Vec<String> = (0..100)
            .map(|i| match i % 7 {
                0 => String::from("garbage"),
                k => JudgeScores {
                    code: (k % 2) as u8,
                    math: 0,
                    toxic: (i % 5 == 0) as u8,
                    quality: (k % 5 + 1) as u8,
                    language: JudgeLanguage::HiOrEng,
                }
                .to_line(),
            })
            .collect();
        // Oracle: a response keeps iff it parses to code 0, toxic 0, quality 5.
        let expected = lines
            .iter()
            .filter(|l| {
                l.contains("\"code\": 0,")
                    && l.contains("\"toxic\": 0,")
                    && l.contains("\"quality\": 5,")
            })
            .count();
        let mut judge = StubJudge::new(lines.clone());
        let cfg = JudgeConfig {
            max_retries: 0,
            ..Default::default()
        };
        let out: Vec<_> = judge_pairs(&mut judge, pairs(100), &cfg).collect();
        assert_eq!(out.len(), 100);
        let kept = out
            .iter()
            .filter(|(_, r)| r.decision.verdict == Verdict::Keep)
            .count();
        assert_eq!(kept, expected);
        assert!(expected > 0);
    }

    #[test]
    fn empty_pairs_are_not_sent() {
        let mut calls = 0;
        let mut judge = |_: &str| -> core::result::Result<String, String> {
            calls += 1;
            Err("unused".into())
        };
        let r = judge_pair(
            &mut judge,
            &InstructionPair::new("e", " ", "x"),
            &JudgeConfig::default(),
        );
        assert_eq!(r.decision.reason, "empty");
        assert_eq!(calls, 0);
    }

    #[test]
    fn rubric_format() {
        let line = RubricScores {
            relevance: 5,
            fluency: 5,
            helpfulness: 5,
            alignment: 5,
        }
        .to_line();
        let mut judge = StubJudge::new([line]);
        let cfg = JudgeConfig {
            format: JudgeFormat::Rubric,
            ..Default::default()
        };
        let r = judge_pair(&mut judge, &pairs(1)[0], &cfg);
        assert_eq!(r.decision.verdict, Verdict::Keep);
        assert!(matches!(r.scores, Some(Scores::Rubric(_))));
    }
}
