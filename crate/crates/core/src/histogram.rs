//! Document length distribution over fixed token-count ranges.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::document::Document;
use crate::tokenizer::TokenizerModel;

/// Inclusive (low, high) token-count bounds of each bucket.
pub const BUCKET_RANGES: [(usize, usize); 8] = [
    (0, 128),
    (129, 256),
    (257, 512),
    (513, 1024),
    (1025, 2048),
    (2049, 4096),
    (4097, 8192),
    (8193, 16384),
];

pub const BUCKET_LABELS: [&str; 8] = [
    "0-128",
    "129-256",
    "257-512",
    "513-1024",
    "1025-2048",
    "2049-4096",
    "4097-8192",
    "8193-16384",
];

/// Counts per bucket, plus documents longer than the last bucket.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthHistogram {
    pub counts: [u64; 8],
    pub overflow: u64,
}

/// Index of the bucket holding `tokens`, or `None` past 16384.
pub fn bucket_index(tokens: usize) -> Option<usize> {
    BUCKET_RANGES
        .iter()
        .position(|&(lo, hi)| (lo..=hi).contains(&tokens))
}

impl LengthHistogram {
    pub fn add(&mut self, tokens: usize) {
        match bucket_index(tokens) {
            Some(i) => self.counts[i] += 1,
            None => self.overflow += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }

    /// (label, count) rows in range order.
    pub fn buckets(&self) -> Vec<(&'static str, u64)> {
        BUCKET_LABELS.iter().copied().zip(self.counts).collect()
    }

    pub fn from_token_counts(counts: impl IntoIterator<Item = usize>) -> Self {
        let mut h = Self::default();
        counts.into_iter().for_each(|c| h.add(c));
        h
    }
}

/// Buckets each document by its encoded length under `tok`.
pub fn token_length_histogram<'a>(
    docs: impl IntoIterator<Item = &'a Document>,
    tok: &TokenizerModel,
) -> LengthHistogram {
    LengthHistogram::from_token_counts(docs.into_iter().map(|d| tok.encode(&d.text).len()))
}
