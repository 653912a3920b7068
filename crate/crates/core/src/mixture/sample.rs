use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// A character-budgeted draw from one language's corpus.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Sample {
    pub texts: Vec<String>,
    /// Scalars across `texts`.
    pub chars: usize,
    /// The corpus ran out before the budget was met.
    pub exhausted: bool,
}

/// Draws whole documents in seeded-shuffled order until `budget` scalars are
/// covered. The document that crosses the budget is cut at the whitespace
/// boundary nearest the remaining need, so the total lands within one word of
/// `budget`.
pub fn sample_characters<S: AsRef<str>>(corpus: &[S], budget: usize, seed: u64) -> Result<Sample> {
    if corpus.is_empty() {
        return Err(Error::Empty("sampling corpus".into()));
    }
    let mut sample = Sample::default();
    if budget == 0 {
        return Ok(sample);
    }
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.shuffle(&mut rng_from_seed(seed));

    for idx in order {
        let text = corpus[idx].as_ref();
        let len = text.chars().count();
        let need = budget - sample.chars;
        if len <= need {
            sample.texts.push(text.into());
            sample.chars += len;
            if sample.chars == budget {
                return Ok(sample);
            }
            continue;
        }
        let cut = nearest_boundary(text, need);
        if cut > 0 {
            let end = text.char_indices().nth(cut).map_or(text.len(), |(b, _)| b);
            sample.texts.push(text[..end].into());
            sample.chars += cut;
        }
        return Ok(sample);
    }
    log::warn!(
        "corpus of {} scalars is smaller than the budget {budget}; using all of it",
        sample.chars
    );
    sample.exhausted = true;
    Ok(sample)
}

/// Scalar index of the cut (before a whitespace scalar, or the end of text)
/// closest to `need`; ties prefer the shorter prefix.
fn nearest_boundary(text: &str, need: usize) -> usize {
    let mut best = 0usize;
    let mut best_dist = need;
    let mut n = 0usize;
    for (i, c) in text.chars().enumerate() {
        if c.is_whitespace() {
            let dist = i.abs_diff(need);
            if dist < best_dist {
                best = i;
                best_dist = dist;
            }
            if i > need {
                return best;
            }
        }
        n = i + 1;
    }
    if n.abs_diff(need) < best_dist {
        best = n;
    }
    best
}
