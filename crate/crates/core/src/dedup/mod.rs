//! Exact and MinHash/LSH near-duplicate removal.

mod exact;
mod fuzzy;
mod lsh;
mod minhash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use exact::{exact_dedup, exact_duplicates, ExactDedup};
pub use fuzzy::{fuzzy_dedup, near_duplicate_clusters, Cluster, FuzzyDedup};
pub use lsh::{candidate_index_pairs, candidate_probability, lsh_candidate_pairs};
pub use minhash::{
    jaccard, minhash_signature, shingle_hashes, shingles, MinHashSignature, MinHasher,
};

/// Which member of a near-duplicate cluster survives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeeperRule {
    /// Lexicographically smallest id; output does not depend on input order.
    #[default]
    SmallestId,
    FirstOccurrence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DedupConfig {
    /// Shingle width in scalars.
    pub shingle_k: usize,
    pub num_hashes: usize,
    pub bands: usize,
    pub rows: usize,
    pub jaccard_threshold: f64,
    #[serde(rename = "dedup_seed")]
    pub seed: u64,
    /// Verify candidates against exact shingle Jaccard instead of the estimate.
    pub exact_verify: bool,
    pub keeper: KeeperRule,
}

impl Default for DedupConfig {
    fn default() -> Self {
        DedupConfig {
            shingle_k: 5,
            num_hashes: 256,
            bands: 32,
            rows: 8,
            jaccard_threshold: 0.8,
            seed: 0,
            exact_verify: false,
            keeper: KeeperRule::SmallestId,
        }
    }
}

impl DedupConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shingle_k == 0 {
            return Err(Error::Config("shingle_k must be at least 1".into()));
        }
        if self.bands * self.rows != self.num_hashes || self.num_hashes == 0 {
            return Err(Error::Config(alloc::format!(
                "bands ({}) x rows ({}) must equal num_hashes ({})",
                self.bands,
                self.rows,
                self.num_hashes
            )));
        }
        if !(self.jaccard_threshold > 0.0 && self.jaccard_threshold <= 1.0) {
            return Err(Error::Config(alloc::format!(
                "jaccard_threshold must lie in (0, 1], got {}",
                self.jaccard_threshold
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(DedupConfig::default().validate().is_ok());
        assert!(DedupConfig {
            bands: 30,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(DedupConfig {
            jaccard_threshold: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(DedupConfig {
            jaccard_threshold: 1.01,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(DedupConfig {
            shingle_k: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
