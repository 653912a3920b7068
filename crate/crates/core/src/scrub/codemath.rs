//! Code/math likelihood scoring from four signals: code-line patterns, math
//! token density, structural cues, and an optional binary linear classifier.

use alloc::string::String;
use serde::{Deserialize, Serialize};

use crate::document::{Document, StageDecision, Verdict};
use crate::error::{Error, Result};
use crate::quality::LinearModel;
use crate::text::content_lines;

pub const CODEMATH_STAGE: &str = "codemath";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeMathWeights {
    pub code: f64,
    pub math: f64,
    pub structural: f64,
    pub classifier: f64,
}

impl Default for CodeMathWeights {
    fn default() -> Self {
        CodeMathWeights {
            code: 0.4,
            math: 0.3,
            structural: 0.2,
            classifier: 0.1,
        }
    }
}

impl CodeMathWeights {
    pub fn validate(&self) -> Result<()> {
        let all = [self.code, self.math, self.structural, self.classifier];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Config(
                "codemath weights must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = all.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(alloc::format!(
                "codemath weights must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodeMathConfig {
    #[serde(rename = "codemath_weights")]
    pub weights: CodeMathWeights,
    #[serde(rename = "codemath_threshold")]
    pub threshold: f64,
    /// Share of numeric tokens tolerated before the excess counts as math.
    pub numeric_cap: f64,
}

impl Default for CodeMathConfig {
    fn default() -> Self {
        CodeMathConfig {
            weights: CodeMathWeights::default(),
            threshold: 0.5,
            numeric_cap: 0.15,
        }
    }
}

impl CodeMathConfig {
    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config(
                "codemath_threshold must lie in [0, 1]".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.numeric_cap) {
            return Err(Error::Config("numeric_cap must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeMathVerdict {
    pub code_score: f64,
    pub math_density: f64,
    pub structural_score: f64,
    /// `None` when no classifier was supplied; its weight is then spread
    /// over the other three signals.
    pub classifier_score: Option<f64>,
    pub combined: f64,
    pub verdict: Verdict,
}

impl CodeMathVerdict {
    pub fn decision(&self) -> StageDecision {
        let clf = match self.classifier_score {
            Some(c) => alloc::format!("{c:.4}"),
            None => String::from("-"),
        };
        let reason = alloc::format!(
            "code={:.4} math={:.4} structural={:.4} classifier={clf} combined={:.4}",
            self.code_score,
            self.math_density,
            self.structural_score,
            self.combined
        );
        StageDecision::new(CODEMATH_STAGE, self.verdict, reason).with_score(self.combined)
    }
}

const DEFINITION_KEYWORDS: &[&str] = &[
    "def",
    "fn",
    "func",
    "function",
    "class",
    "struct",
    "enum",
    "impl",
    "trait",
    "interface",
    "module",
    "async",
    "pub",
    "public",
    "private",
    "protected",
    "static",
    "void",
    "let",
    "const",
    "var",
    "val",
    "int",
    "char",
    "float",
    "double",
    "bool",
    "auto",
    "template",
    "typedef",
    "lambda",
    "SELECT",
    "INSERT",
    "UPDATE",
    "CREATE",
    "DELETE",
];
const IMPORT_KEYWORDS: &[&str] = &[
    "import", "#include", "#import", "#define", "#pragma", "using", "package", "require", "use",
    "extern",
];
const SQL_CLAUSES: &[&str] = &[
    "FROM", "WHERE", "JOIN", "LEFT", "RIGHT", "INNER", "OUTER", "GROUP", "ORDER", "HAVING",
    "LIMIT", "VALUES", "SET", "UNION", "AND", "OR", "ON",
];
const CONTROL_KEYWORDS: &[&str] = &[
    "if", "else", "elif", "for", "while", "do", "switch", "case", "try", "except", "catch",
    "finally", "with", "return", "yield", "break", "continue", "match", "loop", "raise", "throw",
];

fn leading_word(t: &str) -> &str {
    let end = t
        .char_indices()
        .find(|&(i, c)| !(c.is_ascii_alphanumeric() || c == '_' || (i == 0 && c == '#')))
        .map_or(t.len(), |(i, _)| i);
    &t[..end]
}

fn is_identifier_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

/// `name = ...`, `obj.field += ...`, `x := ...` but not `==`.
fn is_assignment(t: &str) -> bool {
    let mut chars = t.char_indices().peekable();
    match chars.peek() {
        Some(&(_, c)) if is_identifier_start(c) => {}
        _ => return false,
    }
    let mut end = t.len();
    for (i, c) in t.char_indices() {
        if !(c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '[' | ']' | '\'' | '"')) {
            end = i;
            break;
        }
    }
    let rest = t[end..].trim_start();
    let op_len = ["+=", "-=", "*=", "/=", "%=", "|=", "&=", ":=", "="]
        .iter()
        .find(|op| rest.starts_with(**op))
        .map(|op| op.len());
    match op_len {
        Some(n) => {
            let after = &rest[n..];
            !after.starts_with('=') && !after.trim().is_empty()
        }
        None => false,
    }
}

/// `name(...)` or `a.b(...)` with the call closing the line.
fn is_call_statement(t: &str) -> bool {
    let t = t.strip_suffix(';').unwrap_or(t);
    let Some(open) = t.find('(') else {
        return false;
    };
    let head = &t[..open];
    !head.is_empty()
        && head.starts_with(is_identifier_start)
        && head
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | ':'))
        && t.ends_with(')')
}

fn has_markup_tag(t: &str) -> bool {
    let bytes = t.as_bytes();
    bytes.iter().enumerate().any(|(i, &b)| {
        b == b'<'
            && bytes
                .get(i + 1)
                .is_some_and(|&n| n.is_ascii_alphabetic() || n == b'/' || n == b'!')
            && bytes[i + 1..].contains(&b'>')
    })
}

fn has_markup_command(t: &str) -> bool {
    let bytes = t.as_bytes();
    bytes.windows(2).any(|w| {
        w[0] == b'\\' && (w[1].is_ascii_alphabetic() || matches!(w[1], b'[' | b']' | b'(' | b')'))
    })
}

/// Line-level code patterns.
pub fn is_code_line(line: &str) -> bool {
    let t = line.trim();
    if t.is_empty() {
        return false;
    }
    let word = leading_word(t);
    let after = &t[word.len()..];
    let code_punct = |s: &str| s.contains(['(', '=', '{', ':', '<', '[']) || s.ends_with(';');
    if IMPORT_KEYWORDS.contains(&word) && !after.is_empty() && !t.ends_with('.') {
        return true;
    }
    if DEFINITION_KEYWORDS.contains(&word)
        && after.starts_with([' ', '(', '<'])
        && code_punct(after)
    {
        return true;
    }
    if CONTROL_KEYWORDS.contains(&word)
        && (t.ends_with([':', '{', ';', ')'])
            || after.starts_with(['(', ':', ';'])
            || after.is_empty())
    {
        return true;
    }
    if word == "from" && after.contains(" import ") {
        return true;
    }
    if SQL_CLAUSES.contains(&word) && after.starts_with(' ') && !t.ends_with('.') {
        return true;
    }
    if word == "return" && !t.ends_with('.') {
        return true;
    }
    if t.ends_with([';', '{', '}'])
        || t.starts_with('}')
        || t.starts_with("//")
        || t.starts_with("/*")
    {
        return true;
    }
    if t.starts_with('@') && t[1..].starts_with(is_identifier_start) && !t.contains(' ') {
        return true;
    }
    if t.matches(['{', '}']).count() >= 2 {
        return true;
    }
    if has_markup_tag(t) || has_markup_command(t) {
        return true;
    }
    if is_assignment(t) || is_call_statement(t) {
        return true;
    }
    is_formula_line(t)
}

/// Numbers, operators and short algebraic terms such as `6x`, `(n`, `k)`.
fn is_formula_term(tok: &str) -> bool {
    let core = tok.trim_matches(|c: char| matches!(c, '(' | ')' | '[' | ']' | ',' | ';' | ':'));
    core.is_empty()
        || is_numeric_token(core)
        || is_math_token(core)
        || (core.chars().count() <= 3
            && core
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '*' | '/' | '-' | '.')))
}

/// A line where at least half the tokens are math tokens, or an equation made
/// only of formula terms.
fn is_formula_line(t: &str) -> bool {
    let (mut total, mut math, mut terms) = (0usize, 0usize, 0usize);
    for tok in t.split_whitespace() {
        total += 1;
        if is_math_token(tok) {
            math += 1;
        }
        if is_formula_term(tok) {
            terms += 1;
        }
    }
    total >= 2 && (2 * math >= total || (math > 0 && terms == total))
}

/// Fraction of non-blank lines matching a code pattern. Fence markers and
/// lines inside a fenced block count as code.
pub fn code_pattern_score(text: &str) -> f64 {
    let mut in_fence = false;
    fraction(content_lines(text).map(|line| {
        if is_fence(line.trim_start()) {
            in_fence = !in_fence;
            return true;
        }
        in_fence || is_code_line(line)
    }))
}

fn fraction(flags: impl Iterator<Item = bool>) -> f64 {
    let (hits, total) = flags.fold((0usize, 0usize), |(h, n), f| (h + f as usize, n + 1));
    if total == 0 {
        0.0
    } else {
        (hits as f64 / total as f64).clamp(0.0, 1.0)
    }
}

fn is_math_scalar(c: char) -> bool {
    matches!(c,
        '=' | '+' | '<' | '>' | '^' | '±' | '×' | '÷' | '¬' | '²' | '³' | '¹'
        | '\u{2070}'..='\u{209F}'
        | '\u{2190}'..='\u{21FF}'
        | '\u{2200}'..='\u{22FF}'
        | '\u{2308}'..='\u{230B}'
        | '\u{27C0}'..='\u{27EF}'
        | '\u{2980}'..='\u{2AFF}'
        | '\u{1D400}'..='\u{1D7FF}'
        | 'ℕ' | 'ℤ' | 'ℚ' | 'ℝ' | 'ℂ' | 'ℓ')
}

/// Markup commands, math scalars, or `$` delimiters not used as a price.
pub fn is_math_token(tok: &str) -> bool {
    if has_markup_command(tok) || tok.chars().any(is_math_scalar) {
        return true;
    }
    let bytes = tok.as_bytes();
    bytes
        .iter()
        .enumerate()
        .any(|(i, &b)| b == b'$' && !bytes.get(i + 1).is_some_and(|n| n.is_ascii_digit()))
}

fn is_numeric_token(tok: &str) -> bool {
    let core = tok.trim_matches(|c: char| matches!(c, ',' | '.' | ';' | ':' | '(' | ')' | '%'));
    !core.is_empty()
        && core.chars().any(|c| c.is_ascii_digit())
        && core
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | '-' | '/' | '%'))
}

/// Math tokens over all whitespace tokens. Numeric tokens contribute only the
/// part of their share above `numeric_cap`.
pub fn math_density_with_cap(text: &str, numeric_cap: f64) -> f64 {
    let (mut total, mut math, mut numeric) = (0usize, 0usize, 0usize);
    for tok in text.split_whitespace() {
        total += 1;
        if is_math_token(tok) {
            math += 1;
        } else if is_numeric_token(tok) {
            numeric += 1;
        }
    }
    if total == 0 {
        return 0.0;
    }
    let excess = (numeric as f64 - numeric_cap * total as f64).max(0.0);
    ((math as f64 + excess) / total as f64).clamp(0.0, 1.0)
}

pub fn math_density(text: &str) -> f64 {
    math_density_with_cap(text, CodeMathConfig::default().numeric_cap)
}

fn is_fence(t: &str) -> bool {
    t.starts_with("```") || t.starts_with("~~~")
}

fn has_inline_code(t: &str) -> bool {
    let mut parts = t.split('`');
    parts.next();
    // An inline span needs an opening and closing backtick around content.
    let inner = parts.next();
    inner.is_some_and(|s| !s.trim().is_empty()) && parts.next().is_some()
}

/// Fraction of non-blank lines that are indented by a tab or four spaces,
/// are fence markers or lie inside a fence, contain inline code spans, or
/// carry an interactive prompt.
pub fn structural_cue_score(text: &str) -> f64 {
    let mut in_fence = false;
    fraction(content_lines(text).map(|line| {
        let t = line.trim_start();
        if is_fence(t) {
            in_fence = !in_fence;
            return true;
        }
        in_fence
            || line.starts_with('\t')
            || line.starts_with("    ")
            || has_inline_code(t)
            || t.starts_with(">>> ")
            || t.starts_with("In [")
    }))
}

/// Scores a document and drops it when the weighted combination exceeds the
/// threshold. Without a classifier its weight is redistributed
/// proportionally over the other signals.
pub fn codemath_filter(
    doc: &Document,
    cfg: &CodeMathConfig,
    model: Option<&LinearModel>,
) -> CodeMathVerdict {
    let code_score = code_pattern_score(&doc.text);
    let math = math_density_with_cap(&doc.text, cfg.numeric_cap);
    let structural_score = structural_cue_score(&doc.text);
    let classifier_score = model.map(|m| {
        m.probabilities(&doc.text)
            .and_then(|p| p.get(1).copied())
            .unwrap_or(0.0)
            .clamp(0.0, 1.0)
    });
    let w = &cfg.weights;
    let combined = combine(w, code_score, math, structural_score, classifier_score);
    let verdict = if combined > cfg.threshold {
        Verdict::Drop
    } else {
        Verdict::Keep
    };
    CodeMathVerdict {
        code_score,
        math_density: math,
        structural_score,
        classifier_score,
        combined,
        verdict,
    }
}

fn combine(
    w: &CodeMathWeights,
    code: f64,
    math: f64,
    structural: f64,
    classifier: Option<f64>,
) -> f64 {
    let base = w.code * code + w.math * math + w.structural * structural;
    let combined = match classifier {
        Some(c) => base + w.classifier * c,
        None => {
            let rest = w.code + w.math + w.structural;
            if rest > 0.0 {
                base / rest
            } else {
                0.0
            }
        }
    };
    combined.clamp(0.0, 1.0)
}
