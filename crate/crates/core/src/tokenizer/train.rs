//! Greedy BPE training over pre-tokenized piece counts.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::{HashMap, HashSet};
use serde::{Deserialize, Serialize};

use super::model::{TokenId, TokenizerModel, DEFAULT_VOCAB_SIZE};
use super::pretok::{pretokenize, PretokConfig, SPACE_MARKER};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BpeConfig {
    pub vocab_size: usize,
    pub pretok: PretokConfig,
    pub specials: Vec<String>,
    /// Stop after this many merges even if the vocabulary has room.
    pub max_merges: Option<usize>,
}

impl Default for BpeConfig {
    fn default() -> Self {
        BpeConfig {
            vocab_size: DEFAULT_VOCAB_SIZE,
            pretok: PretokConfig::default(),
            specials: Vec::new(),
            max_merges: None,
        }
    }
}

/// Every distinct scalar of the corpus, in code-point order.
pub fn collect_seed_alphabet<'a>(corpus: impl IntoIterator<Item = &'a str>) -> BTreeSet<char> {
    corpus.into_iter().flat_map(str::chars).collect()
}

type Pair = (TokenId, TokenId);

struct Candidate {
    count: u64,
    left: String,
    right: String,
    pair: Pair,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Max-heap: highest count first, then the lexicographically smallest pair.
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| other.left.cmp(&self.left))
            .then_with(|| other.right.cmp(&self.right))
    }
}

struct Word {
    symbols: Vec<TokenId>,
    count: u64,
}

impl Word {
    /// Replaces every non-overlapping `(left, right)` with `merged`, left to
    /// right, reporting pair-count changes (already weighted by `count`).
    fn merge(&mut self, pair: Pair, merged: TokenId, deltas: &mut Vec<(Pair, i64)>) {
        let (left, right) = pair;
        let c = self.count as i64;
        let old = core::mem::take(&mut self.symbols);
        let mut i = 0;
        while i < old.len() {
            if i + 1 < old.len() && old[i] == left && old[i + 1] == right {
                if let Some(&prev) = self.symbols.last() {
                    deltas.push(((prev, left), -c));
                    deltas.push(((prev, merged), c));
                }
                if let Some(&next) = old.get(i + 2) {
                    deltas.push(((right, next), -c));
                    deltas.push(((merged, next), c));
                }
                deltas.push((pair, -c));
                self.symbols.push(merged);
                i += 2;
            } else {
                self.symbols.push(old[i]);
                i += 1;
            }
        }
    }
}

/// Trains a tokenizer on `corpus`.
///
/// Starting from `seed_alphabet` (plus the space marker and the byte tokens),
/// repeatedly merges the most frequent adjacent pair, counted within pieces
/// and weighted by piece multiplicity, until the vocabulary reaches
/// `vocab_size`, `max_merges` is hit, or no pair occurs at least twice.
/// Frequency ties go to the lexicographically smallest (left, right) pair.
/// Corpus scalars outside the alphabet are never merged.
pub fn train_bpe<'a>(
    corpus: impl IntoIterator<Item = &'a str>,
    seed_alphabet: &BTreeSet<char>,
    cfg: &BpeConfig,
) -> Result<TokenizerModel> {
    let mut model = TokenizerModel::base(seed_alphabet, &cfg.specials, cfg.pretok, cfg.vocab_size)?;

    let mut piece_counts: HashMap<&str, u64> = HashMap::new();
    for text in corpus {
        for piece in pretokenize(text, cfg.pretok) {
            *piece_counts.entry(piece.text).or_default() += 1;
        }
    }

    // Unknown scalars split a piece into independently merged segments.
    let mut segments: BTreeMap<Vec<TokenId>, u64> = BTreeMap::new();
    for (piece, count) in piece_counts {
        let mut current = Vec::new();
        for c in piece.chars() {
            let key = if c == ' ' { SPACE_MARKER } else { c };
            match (c != SPACE_MARKER)
                .then(|| model.text_id(key.encode_utf8(&mut [0; 4])))
                .flatten()
            {
                Some(id) => current.push(id),
                None => {
                    if current.len() > 1 {
                        *segments.entry(core::mem::take(&mut current)).or_default() += count;
                    }
                    current.clear();
                }
            }
        }
        if current.len() > 1 {
            *segments.entry(current).or_default() += count;
        }
    }
    let mut words: Vec<Word> = segments
        .into_iter()
        .map(|(symbols, count)| Word { symbols, count })
        .collect();

    let mut pair_counts: HashMap<Pair, i64> = HashMap::new();
    let mut pair_words: HashMap<Pair, HashSet<usize>> = HashMap::new();
    for (idx, word) in words.iter().enumerate() {
        for w in word.symbols.windows(2) {
            let pair = (w[0], w[1]);
            *pair_counts.entry(pair).or_default() += word.count as i64;
            pair_words.entry(pair).or_default().insert(idx);
        }
    }

    let candidate = |model: &TokenizerModel, pair: Pair, count: i64| Candidate {
        count: count as u64,
        left: model.token(pair.0).map(|t| t.display()).unwrap_or_default(),
        right: model.token(pair.1).map(|t| t.display()).unwrap_or_default(),
        pair,
    };
    let mut heap: BinaryHeap<Candidate> = pair_counts
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(&pair, &c)| candidate(&model, pair, c))
        .collect();

    let mut merges_done = 0usize;
    let mut deltas = Vec::new();
    while let Some(top) = heap.pop() {
        if model.vocab_len() >= cfg.vocab_size {
            break;
        }
        if cfg.max_merges.is_some_and(|m| merges_done >= m) {
            break;
        }
        let current = pair_counts.get(&top.pair).copied().unwrap_or(0);
        if current as u64 != top.count {
            if current > 0 {
                heap.push(Candidate {
                    count: current as u64,
                    ..top
                });
            }
            continue;
        }
        if top.count < 2 {
            break;
        }

        let merged = model.push_merge(top.pair.0, top.pair.1);
        merges_done += 1;

        let mut affected: Vec<usize> = pair_words
            .remove(&top.pair)
            .map(|s| s.into_iter().collect())
            .unwrap_or_default();
        affected.sort_unstable();
        let mut touched: BTreeSet<Pair> = BTreeSet::new();
        for idx in affected {
            deltas.clear();
            words[idx].merge(top.pair, merged, &mut deltas);
            for &(pair, d) in &deltas {
                *pair_counts.entry(pair).or_default() += d;
                if d > 0 {
                    pair_words.entry(pair).or_default().insert(idx);
                    touched.insert(pair);
                }
            }
        }
        pair_counts.remove(&top.pair);
        for pair in touched {
            let c = pair_counts.get(&pair).copied().unwrap_or(0);
            if c > 0 {
                heap.push(candidate(&model, pair, c));
            }
        }
    }
    Ok(model)
}
