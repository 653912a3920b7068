//! Script-agnostic text helpers.
//!
//! A word is a maximal run of non-whitespace Unicode scalars. Every stage that
//! counts words (heuristic filters, fertility) goes through [`words`].

/// Iterates the words of `text`.
pub fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split(char::is_whitespace).filter(|w| !w.is_empty())
}

pub fn word_count(text: &str) -> usize {
    words(text).count()
}

/// Length in Unicode scalar values.
pub fn scalar_len(text: &str) -> usize {
    text.chars().count()
}

/// Byte offset of the scalar at index `char_idx` (or `text.len()` past the end).
pub fn byte_offset(text: &str, char_idx: usize) -> usize {
    text.char_indices()
        .nth(char_idx)
        .map(|(b, _)| b)
        .unwrap_or(text.len())
}

/// Non-blank lines of `text`.
pub fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().filter(|l| !l.trim().is_empty())
}
