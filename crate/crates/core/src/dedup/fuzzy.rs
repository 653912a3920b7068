use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::lsh::candidate_index_pairs;
use super::minhash::{jaccard, shingle_hashes, MinHashSignature, MinHasher};
use super::{DedupConfig, KeeperRule};
use crate::document::Document;
use crate::error::Result;

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// A group of near-duplicates and the member that survives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub kept: usize,
    pub dropped: Vec<usize>,
}

/// Near-duplicate clusters among `docs`, by input index.
///
/// Signatures are computed per document, LSH proposes candidate pairs, and a
/// pair is linked when its estimated Jaccard (or the exact shingle Jaccard
/// with `exact_verify`) reaches the threshold. Linked components of two or
/// more documents become clusters. Documents without shingles never cluster.
pub fn near_duplicate_clusters(docs: &[Document], cfg: &DedupConfig) -> Result<Vec<Cluster>> {
    cfg.validate()?;
    let hasher = MinHasher::from_config(cfg);
    let mut sigs: Vec<MinHashSignature> = Vec::with_capacity(docs.len());
    let mut index: Vec<usize> = Vec::with_capacity(docs.len());
    for (i, doc) in docs.iter().enumerate() {
        let hashes = shingle_hashes(&doc.text, cfg.shingle_k)?;
        if hashes.is_empty() {
            continue;
        }
        sigs.push(hasher.signature_of_hashes(&doc.id, &hashes)?);
        index.push(i);
    }
    let mut sets = DisjointSet::new(docs.len());
    for (a, b) in candidate_index_pairs(&sigs, cfg)? {
        let similarity = if cfg.exact_verify {
            let sa = super::shingles(&docs[index[a]].text, cfg.shingle_k)?;
            let sb = super::shingles(&docs[index[b]].text, cfg.shingle_k)?;
            jaccard(&sa, &sb)
        } else {
            sigs[a].estimated_jaccard(&sigs[b])
        };
        if similarity >= cfg.jaccard_threshold {
            sets.union(index[a], index[b]);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..docs.len() {
        let root = sets.find(i);
        groups.entry(root).or_default().push(i);
    }
    Ok(groups
        .into_values()
        .filter(|members| members.len() > 1)
        .map(|members| {
            let kept = match cfg.keeper {
                KeeperRule::SmallestId => *members
                    .iter()
                    .min_by(|&&a, &&b| docs[a].id.cmp(&docs[b].id).then(a.cmp(&b)))
                    .expect("non-empty cluster"),
                KeeperRule::FirstOccurrence => members[0],
            };
            let dropped = members.into_iter().filter(|&m| m != kept).collect();
            Cluster { kept, dropped }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FuzzyDedup {
    pub kept: Vec<Document>,
    /// (kept id, dropped ids) per cluster.
    pub clusters: Vec<(String, Vec<String>)>,
}

/// Removes near-duplicates, keeping one member per cluster; survivors keep
/// their input order.
pub fn fuzzy_dedup(docs: Vec<Document>, cfg: &DedupConfig) -> Result<FuzzyDedup> {
    let clusters = near_duplicate_clusters(&docs, cfg)?;
    let dropped: BTreeSet<usize> = clusters
        .iter()
        .flat_map(|c| c.dropped.iter().copied())
        .collect();
    let report = clusters
        .iter()
        .map(|c| {
            (
                docs[c.kept].id.clone(),
                c.dropped.iter().map(|&d| docs[d].id.clone()).collect(),
            )
        })
        .collect();
    let kept = docs
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !dropped.contains(i))
        .map(|(_, d)| d)
        .collect();
    Ok(FuzzyDedup {
        kept,
        clusters: report,
    })
}
