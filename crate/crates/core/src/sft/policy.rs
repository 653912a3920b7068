//! Retention rules applied to judge scores.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::judge::{
    JudgeScores, RubricScores, CODE_RANGE, HI_OR_ENG, MATH_RANGE, QUALITY_RANGE, RUBRIC_RANGE,
    TOXIC_RANGE,
};
use crate::document::StageDecision;
use crate::error::{Error, Result};

pub const JUDGE_STAGE: &str = "judge";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetentionPolicy {
    pub max_code: u8,
    pub max_math: u8,
    pub max_toxic: u8,
    pub min_quality: u8,
    pub required_language: String,
}

impl Default for RetentionPolicy {
    fn default() -> Self {
        RetentionPolicy {
            max_code: 0,
            max_math: 0,
            max_toxic: 0,
            min_quality: 5,
            required_language: String::from(HI_OR_ENG),
        }
    }
}

fn in_range(name: &str, v: u8, (min, max): (u8, u8)) -> Result<()> {
    if v < min || v > max {
        return Err(Error::Config(alloc::format!(
            "{name} = {v} outside {min}..={max}"
        )));
    }
    Ok(())
}

impl RetentionPolicy {
    pub fn validate(&self) -> Result<()> {
        in_range("max_code", self.max_code, CODE_RANGE)?;
        in_range("max_math", self.max_math, MATH_RANGE)?;
        in_range("max_toxic", self.max_toxic, TOXIC_RANGE)?;
        in_range("min_quality", self.min_quality, QUALITY_RANGE)?;
        if self.required_language.trim().is_empty() {
            return Err(Error::Config("required_language is empty".into()));
        }
        Ok(())
    }
}

fn decide(failures: Vec<&str>) -> StageDecision {
    if failures.is_empty() {
        StageDecision::keep(JUDGE_STAGE, "pass")
    } else {
        StageDecision::drop(JUDGE_STAGE, failures.join(","))
    }
}

/// KEEP iff every threshold holds; the DROP reason lists each failed check.
pub fn retention_decision(scores: &JudgeScores, policy: &RetentionPolicy) -> StageDecision {
    let mut failures = Vec::new();
    if scores.quality < policy.min_quality {
        failures.push("quality");
    }
    if scores.code > policy.max_code {
        failures.push("code");
    }
    if scores.math > policy.max_math {
        failures.push("math");
    }
    if scores.toxic > policy.max_toxic {
        failures.push("toxic");
    }
    if alloc::format!("{}", scores.language) != policy.required_language {
        failures.push("language");
    }
    decide(failures)
}

/// Per-dimension minimums for the four-key rubric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RubricPolicy {
    pub min_relevance: u8,
    pub min_fluency: u8,
    pub min_helpfulness: u8,
    pub min_alignment: u8,
}

impl Default for RubricPolicy {
    fn default() -> Self {
        RubricPolicy {
            min_relevance: 5,
            min_fluency: 5,
            min_helpfulness: 5,
            min_alignment: 5,
        }
    }
}

impl RubricPolicy {
    pub fn validate(&self) -> Result<()> {
        in_range("min_relevance", self.min_relevance, RUBRIC_RANGE)?;
        in_range("min_fluency", self.min_fluency, RUBRIC_RANGE)?;
        in_range("min_helpfulness", self.min_helpfulness, RUBRIC_RANGE)?;
        in_range("min_alignment", self.min_alignment, RUBRIC_RANGE)
    }
}

pub fn rubric_decision(scores: &RubricScores, policy: &RubricPolicy) -> StageDecision {
    let mut failures = Vec::new();
    for (name, v, min) in [
        ("relevance", scores.relevance, policy.min_relevance),
        ("fluency", scores.fluency, policy.min_fluency),
        ("helpfulness", scores.helpfulness, policy.min_helpfulness),
        ("alignment", scores.alignment, policy.min_alignment),
    ] {
        if v < min {
            failures.push(name);
        }
    }
    decide(failures)
}
