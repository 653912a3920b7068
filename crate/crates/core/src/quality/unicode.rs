//! NFC normalization plus repair of UTF-8 text that was decoded as Latin-1.

use alloc::string::String;
use alloc::vec::Vec;

use unicode_normalization::{is_nfc, UnicodeNormalization};

pub const STAGE: &str = "unicode";

/// Upper bound on repair/normalize rounds; each repair strictly shortens the text.
const MAX_ROUNDS: usize = 8;

/// Returns the NFC form of `text` with Latin-1 double-encoding repaired, and
/// whether anything changed.
///
/// A maximal run of scalars in U+0080..=U+00FF is mapped back to the bytes it
/// came from; if those bytes are valid UTF-8 the run is replaced by the
/// decoded text. Runs that do not decode are left alone.
pub fn reformat_unicode(text: &str) -> (String, bool) {
    let mut current: String = if is_nfc(text) {
        text.into()
    } else {
        text.nfc().collect()
    };
    for _ in 0..MAX_ROUNDS {
        match repair_latin1_runs(&current) {
            Some(repaired) => current = repaired.nfc().collect(),
            None => break,
        }
    }
    let changed = current != text;
    (current, changed)
}

fn is_high_latin1(c: char) -> bool {
    ('\u{80}'..='\u{FF}').contains(&c)
}

/// One repair pass; `None` when no run decodes.
fn repair_latin1_runs(text: &str) -> Option<String> {
    let mut out = String::with_capacity(text.len());
    let mut run: Vec<u8> = Vec::new();
    let mut run_text = String::new();
    let mut repaired = false;
    let mut flush = |run: &mut Vec<u8>, run_text: &mut String, out: &mut String| {
        if run.is_empty() {
            return;
        }
        match core::str::from_utf8(run) {
            Ok(decoded) => {
                out.push_str(decoded);
                repaired = true;
            }
            Err(_) => out.push_str(run_text),
        }
        run.clear();
        run_text.clear();
    };
    for c in text.chars() {
        if is_high_latin1(c) {
            run.push(c as u32 as u8);
            run_text.push(c);
        } else {
            flush(&mut run, &mut run_text, &mut out);
            out.push(c);
        }
    }
    flush(&mut run, &mut run_text, &mut out);
    repaired.then_some(out)
}
