//! Judge prompt construction and response parsing.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// The five-rating judge prompt with `{prompt}` and `{completion}` slots.
pub const JUDGE_TEMPLATE: &str = include_str!("judge_prompt.txt");
/// Four-dimension rubric prompt, same slots.
pub const RUBRIC_TEMPLATE: &str = include_str!("rubric_prompt.txt");

pub const HI_OR_ENG: &str = "hi_or_eng";

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct InstructionPair {
    pub id: String,
    pub prompt: String,
    pub completion: String,
    #[serde(default)]
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<JudgeScores>,
}

impl InstructionPair {
    pub fn new(
        id: impl Into<String>,
        prompt: impl Into<String>,
        completion: impl Into<String>,
    ) -> Self {
        InstructionPair {
            id: id.into(),
            prompt: prompt.into(),
            completion: completion.into(),
            ..Default::default()
        }
    }
}

fn fill(template: &str, prompt: &str, completion: &str) -> String {
    // Split once on the template so slot-like text inside user input is left alone.
    let (head, rest) = template
        .split_once("{prompt}")
        .expect("template has a prompt slot");
    let (mid, tail) = rest
        .split_once("{completion}")
        .expect("template has a completion slot");
    let mut out = String::with_capacity(template.len() + prompt.len() + completion.len());
    out.push_str(head);
    out.push_str(prompt);
    out.push_str(mid);
    out.push_str(completion);
    out.push_str(tail);
    out
}

pub fn build_judge_prompt(pair: &InstructionPair) -> String {
    fill(JUDGE_TEMPLATE, &pair.prompt, &pair.completion)
}

pub fn build_rubric_prompt(pair: &InstructionPair) -> String {
    fill(RUBRIC_TEMPLATE, &pair.prompt, &pair.completion)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JudgeLanguage {
    /// Serialized as the bare marker `hi_or_eng`.
    #[serde(with = "hi_or_eng_marker")]
    HiOrEng,
    List(Vec<String>),
}

mod hi_or_eng_marker {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(super::HI_OR_ENG)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = <&str>::deserialize(d)?;
        if s == super::HI_OR_ENG {
            Ok(())
        } else {
            Err(D::Error::custom("expected hi_or_eng"))
        }
    }
}

impl fmt::Display for JudgeLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JudgeLanguage::HiOrEng => f.write_str(HI_OR_ENG),
            JudgeLanguage::List(codes) => f.write_str(&codes.join(", ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgeScores {
    pub code: u8,
    pub math: u8,
    pub toxic: u8,
    pub quality: u8,
    pub language: JudgeLanguage,
}

pub const CODE_RANGE: (u8, u8) = (0, 5);
pub const MATH_RANGE: (u8, u8) = (0, 5);
pub const TOXIC_RANGE: (u8, u8) = (0, 5);
pub const QUALITY_RANGE: (u8, u8) = (1, 5);
pub const RUBRIC_RANGE: (u8, u8) = (1, 5);

impl JudgeScores {
    pub fn new(
        code: u8,
        math: u8,
        toxic: u8,
        quality: u8,
        language: JudgeLanguage,
    ) -> Result<Self, JudgeParseError> {
        let scores = JudgeScores {
            code,
            math,
            toxic,
            quality,
            language,
        };
        scores.validate()?;
        Ok(scores)
    }

    pub fn validate(&self) -> Result<(), JudgeParseError> {
        for (key, value, range) in [
            ("code", self.code, CODE_RANGE),
            ("math", self.math, MATH_RANGE),
            ("toxic", self.toxic, TOXIC_RANGE),
            ("quality", self.quality, QUALITY_RANGE),
        ] {
            check_range(key, value as i64, range)?;
        }
        if let JudgeLanguage::List(codes) = &self.language {
            if codes.is_empty() || codes.iter().any(|c| !valid_code(c)) {
                return Err(JudgeParseError::BadLanguage(self.language.to_string()));
            }
        }
        Ok(())
    }

    /// The single response line a judge is asked to produce.
    pub fn to_line(&self) -> String {
        alloc::format!(
            "\"code\": {}, \"math\": {}, \"toxic\": {}, \"quality\": {}, \"language\": {}",
            self.code,
            self.math,
            self.toxic,
            self.quality,
            self.language
        )
    }
}

fn valid_code(c: &str) -> bool {
    !c.is_empty()
        && c != HI_OR_ENG
        && !c.contains(|ch: char| ch == ',' || ch == '"' || ch.is_whitespace())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RubricScores {
    pub relevance: u8,
    pub fluency: u8,
    pub helpfulness: u8,
    pub alignment: u8,
}

impl RubricScores {
    pub fn to_line(&self) -> String {
        alloc::format!(
            "\"relevance\": {}, \"fluency\": {}, \"helpfulness\": {}, \"alignment\": {}",
            self.relevance,
            self.fluency,
            self.helpfulness,
            self.alignment
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JudgeParseError {
    #[error("empty response")]
    Empty,
    #[error("text outside the key-value line: {0:?}")]
    ExtraText(String),
    #[error("malformed key-value line at {0:?}")]
    Malformed(String),
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("duplicate key {0:?}")]
    DuplicateKey(String),
    #[error("missing key {0:?}")]
    MissingKey(String),
    #[error("{key}: {value:?} is not an integer")]
    NotInteger { key: String, value: String },
    #[error("{key}: {value} outside {min}..={max}")]
    OutOfRange {
        key: String,
        value: i64,
        min: u8,
        max: u8,
    },
    #[error("invalid language value {0:?}")]
    BadLanguage(String),
}

fn check_range(key: &str, value: i64, (min, max): (u8, u8)) -> Result<u8, JudgeParseError> {
    if value < min as i64 || value > max as i64 {
        return Err(JudgeParseError::OutOfRange {
            key: key.into(),
            value,
            min,
            max,
        });
    }
    Ok(value as u8)
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('"')
        .and_then(|r| r.strip_suffix('"'))
        .unwrap_or(s)
}

/// Splits one response line into `(key, raw value)` pairs for `keys`.
/// The value of `list_key` may be a comma-separated list that runs to the
/// end of the line.
fn split_pairs<'a>(
    text: &'a str,
    keys: &[&str],
    list_key: Option<&str>,
) -> Result<Vec<(&'a str, &'a str)>, JudgeParseError> {
    let line = text.trim();
    if line.is_empty() {
        return Err(JudgeParseError::Empty);
    }
    if line.contains('\n') {
        return Err(JudgeParseError::ExtraText(line.into()));
    }
    let line = line
        .strip_prefix('{')
        .and_then(|l| l.strip_suffix('}'))
        .map(str::trim)
        .unwrap_or(line);

    let mut pairs: Vec<(&str, &str)> = Vec::new();
    let mut rest = line;
    loop {
        rest = rest.trim_start();
        let (key, after) = if let Some(r) = rest.strip_prefix('"') {
            let end = r
                .find('"')
                .ok_or_else(|| JudgeParseError::Malformed(rest.into()))?;
            (&r[..end], &r[end + 1..])
        } else {
            let end = rest
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(rest.len());
            (&rest[..end], &rest[end..])
        };
        if !keys.contains(&key) {
            return Err(if pairs.is_empty() && !rest.starts_with('"') {
                JudgeParseError::ExtraText(line.into())
            } else {
                JudgeParseError::UnknownKey(key.into())
            });
        }
        if pairs.iter().any(|(k, _)| *k == key) {
            return Err(JudgeParseError::DuplicateKey(key.into()));
        }
        let after = after
            .trim_start()
            .strip_prefix(':')
            .ok_or_else(|| JudgeParseError::Malformed(rest.into()))?
            .trim_start();
        let (value, remainder) = if Some(key) == list_key {
            let marker_end = if after.starts_with('"') {
                HI_OR_ENG.len() + 2
            } else {
                HI_OR_ENG.len()
            };
            let marker_follows = after
                .get(marker_end..)
                .is_some_and(|r| r.trim_start().is_empty() || r.trim_start().starts_with(','));
            if unquote(after.get(..marker_end).unwrap_or("")) == HI_OR_ENG && marker_follows {
                (&after[..marker_end], &after[marker_end..])
            } else {
                (after, "")
            }
        } else {
            match after.find(',') {
                Some(i) => (&after[..i], &after[i..]),
                None => (after, ""),
            }
        };
        pairs.push((key, value.trim()));
        let remainder = remainder.trim_start();
        if remainder.is_empty() {
            break;
        }
        rest = remainder
            .strip_prefix(',')
            .ok_or_else(|| JudgeParseError::Malformed(remainder.into()))?;
    }
    for key in keys {
        if !pairs.iter().any(|(k, _)| k == key) {
            return Err(JudgeParseError::MissingKey((*key).into()));
        }
    }
    Ok(pairs)
}

fn integer(key: &str, raw: &str, range: (u8, u8)) -> Result<u8, JudgeParseError> {
    let v = unquote(raw);
    let n: i64 = v.parse().map_err(|_| JudgeParseError::NotInteger {
        key: key.into(),
        value: v.into(),
    })?;
    check_range(key, n, range)
}

fn value<'a>(pairs: &[(&str, &'a str)], key: &str) -> &'a str {
    pairs
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .unwrap_or("")
}

const JUDGE_KEYS: [&str; 5] = ["code", "math", "toxic", "quality", "language"];
const RUBRIC_KEYS: [&str; 4] = ["relevance", "fluency", "helpfulness", "alignment"];

pub fn parse_judge_response(text: &str) -> Result<JudgeScores, JudgeParseError> {
    let pairs = split_pairs(text, &JUDGE_KEYS, Some("language"))?;
    let raw_lang = value(&pairs, "language");
    let language = if unquote(raw_lang) == HI_OR_ENG {
        JudgeLanguage::HiOrEng
    } else {
        let codes: Vec<String> = raw_lang
            .split(',')
            .map(|c| String::from(unquote(c)))
            .collect();
        if codes.iter().any(|c| !valid_code(c)) {
            return Err(JudgeParseError::BadLanguage(raw_lang.into()));
        }
        JudgeLanguage::List(codes)
    };
    Ok(JudgeScores {
        code: integer("code", value(&pairs, "code"), CODE_RANGE)?,
        math: integer("math", value(&pairs, "math"), MATH_RANGE)?,
        toxic: integer("toxic", value(&pairs, "toxic"), TOXIC_RANGE)?,
        quality: integer("quality", value(&pairs, "quality"), QUALITY_RANGE)?,
        language,
    })
}

pub fn parse_rubric_response(text: &str) -> Result<RubricScores, JudgeParseError> {
    let pairs = split_pairs(text, &RUBRIC_KEYS, None)?;
    let get = |key| integer(key, value(&pairs, key), RUBRIC_RANGE);
    Ok(RubricScores {
        relevance: get("relevance")?,
        fluency: get("fluency")?,
        helpfulness: get("helpfulness")?,
        alignment: get("alignment")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pass() -> JudgeScores {
        JudgeScores::new(0, 0, 0, 5, JudgeLanguage::HiOrEng).unwrap()
    }

    #[test]
    fn prompt_substitution() {
        let p = build_judge_prompt(&InstructionPair::new("1", "Q", "A"));
        assert!(p.contains("QUESTION: Q\n"));
        assert!(p.contains("ANSWER: A\n"));
        assert!(p.starts_with("You are an evaluation assistant."));
        assert_eq!(
            p.len(),
            JUDGE_TEMPLATE.len() - "{prompt}{completion}".len() + 2
        );
    }

    #[test]
    fn user_braces_are_not_substituted() {
        let pair = InstructionPair::new("1", "say {completion} {x}", "{prompt}");
        let p = build_judge_prompt(&pair);
        assert!(p.contains("QUESTION: say {completion} {x}\nANSWER: {prompt}\n"));
        assert_eq!(p, build_judge_prompt(&pair));
    }

    #[test]
    fn canonical_pass_line() {
        let line =
            "\"code\": 0, \"math\": 0, \"toxic\": 0, \"quality\": 5, \"language\": hi_or_eng";
        assert_eq!(parse_judge_response(line).unwrap(), pass());
        assert_eq!(pass().to_line(), line);
    }

    #[test]
    fn tolerant_forms() {
        let want = pass();
        for line in [
            "  code: 0, math: 0, toxic: 0, quality: 5, language: hi_or_eng \n",
            "{\"code\": 0, \"math\": 0, \"toxic\": 0, \"quality\": 5, \"language\": \"hi_or_eng\"}",
            "\"language\": hi_or_eng, \"quality\": 5, \"toxic\": 0, \"math\": 0, \"code\": 0",
            "\"code\": \"0\", \"math\": 0,\"toxic\":0, \"quality\": 5, \"language\": hi_or_eng",
        ] {
            assert_eq!(parse_judge_response(line).unwrap(), want, "{line}");
        }
    }

    #[test]
    fn language_list_consumes_remainder() {
        let s = parse_judge_response(
            "\"code\": 1, \"math\": 0, \"toxic\": 0, \"quality\": 3, \"language\": hi, fr",
        )
        .unwrap();
        assert_eq!(
            s.language,
            JudgeLanguage::List(vec!["hi".into(), "fr".into()])
        );
        let s = parse_judge_response(
            "\"code\": 1, \"math\": 0, \"toxic\": 0, \"quality\": 3, \"language\": \"en\"",
        )
        .unwrap();
        assert_eq!(s.language, JudgeLanguage::List(vec!["en".into()]));
    }

    #[test]
    fn errors_name_the_violation() {
        use JudgeParseError::*;
        let base = |over: &str| over.to_string();
        type Check = fn(&JudgeParseError) -> bool;
        let cases: [(&str, Check); 10] = [
            ("\"code\": 7, \"math\": 0, \"toxic\": 0, \"quality\": 5, \"language\": hi_or_eng", |e| matches!(e, OutOfRange { .. })),
            ("\"code\": 0, \"math\": 0, \"toxic\": 0, \"quality\": 0, \"language\": hi_or_eng", |e| matches!(e, OutOfRange { .. })),
            ("\"code\": 0, \"math\": 0, \"toxic\": 0, \"quality\": 5", |e| matches!(e, MissingKey(k) if k == "language")),
            ("\"code\": 0, \"code\": 0, \"math\": 0, \"toxic\": 0, \"quality\": 5, \"language\": hi_or_eng", |e| matches!(e, DuplicateKey(_))),
            ("\"code\": 0.5, \"math\": 0, \"toxic\": 0, \"quality\": 5, \"language\": hi_or_eng", |e| matches!(e, NotInteger { .. })),
            ("\"code\": high, \"math\": 0, \"toxic\": 0, \"quality\": 5, \"language\": hi_or_eng", |e| matches!(e, NotInteger { .. })),
            ("Sure! \"code\": 0, \"math\": 0, \"toxic\": 0, \"quality\": 5, \"language\": hi_or_eng", |e| matches!(e, ExtraText(_))),
            ("Here are the ratings:\n\"code\": 0, \"math\": 0, \"toxic\": 0, \"quality\": 5, \"language\": hi_or_eng", |e| matches!(e, ExtraText(_))),
            ("\"code\": 0, \"math\": 0, \"toxic\": 0, \"quality\": 5, \"style\": 2, \"language\": hi_or_eng", |e| matches!(e, UnknownKey(_))),
            ("   ", |e| matches!(e, Empty)),
        ];
        for (line, check) in cases {
            let err = parse_judge_response(&base(line)).unwrap_err();
            assert!(check(&err), "{line}: {err:?}");
        }
    }

    #[test]
    fn rubric_roundtrip() {
        let r = RubricScores {
            relevance: 5,
            fluency: 4,
            helpfulness: 3,
            alignment: 1,
        };
        assert_eq!(parse_rubric_response(&r.to_line()).unwrap(), r);
        assert!(parse_rubric_response(
            "\"relevance\": 0, \"fluency\": 4, \"helpfulness\": 3, \"alignment\": 1"
        )
        .is_err());
        assert!(build_rubric_prompt(&InstructionPair::new("1", "Q", "A"))
            .contains("QUESTION: Q\nANSWER: A\n"));
    }

    #[test]
    fn serde_language_forms() {
        let s = pass();
        let mut list = s.clone();
        list.language = JudgeLanguage::List(vec!["hi".into(), "ta".into()]);
        for v in [s, list] {
            let json = serde_json::to_string(&v).unwrap();
            assert_eq!(serde_json::from_str::<JudgeScores>(&json).unwrap(), v);
        }
    }
}
