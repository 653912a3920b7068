//! Splitting text into the pieces BPE merges operate within.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Scalar that stands in for an ASCII space inside token strings.
pub const SPACE_MARKER: char = '\u{2581}';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PretokConfig {
    pub split_digits: bool,
    pub split_whitespace: bool,
}

impl Default for PretokConfig {
    fn default() -> Self {
        PretokConfig {
            split_digits: true,
            split_whitespace: true,
        }
    }
}

/// A contiguous slice of the source text. Merges never cross piece boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Piece<'a> {
    pub text: &'a str,
}

impl Piece<'_> {
    /// The piece as it appears in token strings, with spaces shown as the marker.
    pub fn marked(&self) -> String {
        self.text
            .chars()
            .map(|c| if c == ' ' { SPACE_MARKER } else { c })
            .collect()
    }
}

/// Splits `text` into pieces.
///
/// With `split_whitespace`, a whitespace run starts a new piece and stays
/// attached as a prefix to the word that follows it. With `split_digits`,
/// every numeric scalar is a piece of its own (any preceding whitespace run
/// is kept as its prefix). Concatenating the pieces gives back `text`.
pub fn pretokenize(text: &str, cfg: PretokConfig) -> Vec<Piece<'_>> {
    let mut pieces = Vec::new();
    let mut start = 0;
    // Whether the open piece holds anything other than leading whitespace.
    let mut has_body = false;
    for (i, c) in text.char_indices() {
        let end = i + c.len_utf8();
        if cfg.split_whitespace && c.is_whitespace() {
            if has_body {
                pieces.push(Piece {
                    text: &text[start..i],
                });
                start = i;
                has_body = false;
            }
        } else if cfg.split_digits && c.is_numeric() {
            if has_body {
                pieces.push(Piece {
                    text: &text[start..i],
                });
                start = i;
            }
            pieces.push(Piece {
                text: &text[start..end],
            });
            start = end;
            has_body = false;
        } else {
            has_body = true;
        }
    }
    if start < text.len() {
        pieces.push(Piece {
            text: &text[start..],
        });
    }
    pieces
}

/// Inverse of [`pretokenize`].
pub fn detokenize(pieces: &[Piece<'_>]) -> String {
    pieces.iter().map(|p| p.text).collect()
}
