//! Instruction-pair filtering: language gate, judge prompt/response format,
//! retention policy, and the judge driver.

mod judge;
mod langrule;
mod policy;
mod runner;

pub use judge::{
    build_judge_prompt, build_rubric_prompt, parse_judge_response, parse_rubric_response,
    InstructionPair, JudgeLanguage, JudgeParseError, JudgeScores, RubricScores, CODE_RANGE,
    HI_OR_ENG, JUDGE_TEMPLATE, MATH_RANGE, QUALITY_RANGE, RUBRIC_RANGE, RUBRIC_TEMPLATE,
    TOXIC_RANGE,
};
pub use langrule::{language_rule_filter, ALLOWED_LANGUAGES, LANGUAGE_RULE_STAGE};
pub use policy::{retention_decision, rubric_decision, RetentionPolicy, RubricPolicy, JUDGE_STAGE};
pub use runner::{
    judge_pair, judge_pairs, judge_prompt_for, score_response, Attempt, Judge, JudgeConfig,
    JudgeFormat, JudgeRecord, Scores, StubJudge,
};
