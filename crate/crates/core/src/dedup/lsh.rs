use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;
use xxhash_rust::xxh3::xxh3_64_with_seed;

use super::minhash::MinHashSignature;
use super::DedupConfig;
use crate::error::{Error, Result};

fn check_compatible(sigs: &[MinHashSignature], cfg: &DedupConfig) -> Result<()> {
    cfg.validate()?;
    for s in sigs {
        if s.values.len() != cfg.num_hashes {
            return Err(Error::SignatureMismatch(alloc::format!(
                "signature {} has {} values, expected {}",
                s.doc_id,
                s.values.len(),
                cfg.num_hashes
            )));
        }
        if s.seed != sigs[0].seed {
            return Err(Error::SignatureMismatch(alloc::format!(
                "signature {} uses seed {}, expected {}",
                s.doc_id,
                s.seed,
                sigs[0].seed
            )));
        }
    }
    Ok(())
}

/// Index pairs `(i, j)`, `i < j`, whose signatures agree on every row of at
/// least one band.
pub fn candidate_index_pairs(
    sigs: &[MinHashSignature],
    cfg: &DedupConfig,
) -> Result<BTreeSet<(usize, usize)>> {
    check_compatible(sigs, cfg)?;
    let mut pairs = BTreeSet::new();
    let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut bytes = Vec::with_capacity(cfg.rows * 8);
    for band in 0..cfg.bands {
        buckets.clear();
        for (i, sig) in sigs.iter().enumerate() {
            bytes.clear();
            for v in &sig.values[band * cfg.rows..(band + 1) * cfg.rows] {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
            buckets
                .entry(xxh3_64_with_seed(&bytes, band as u64))
                .or_default()
                .push(i);
        }
        for members in buckets.values() {
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    // bucket keys are hashes; confirm the rows really agree
                    let rows = band * cfg.rows..(band + 1) * cfg.rows;
                    if sigs[i].values[rows.clone()] == sigs[j].values[rows] {
                        pairs.insert((i.min(j), i.max(j)));
                    }
                }
            }
        }
    }
    Ok(pairs)
}

/// Candidate pairs by document id, smaller id first.
pub fn lsh_candidate_pairs(
    sigs: &[MinHashSignature],
    cfg: &DedupConfig,
) -> Result<BTreeSet<(String, String)>> {
    Ok(candidate_index_pairs(sigs, cfg)?
        .into_iter()
        .map(|(i, j)| {
            let (a, b) = (&sigs[i].doc_id, &sigs[j].doc_id);
            if a <= b {
                (a.clone(), b.clone())
            } else {
                (b.clone(), a.clone())
            }
        })
        .collect())
}

/// Probability that a pair with Jaccard `j` becomes a candidate: `1 − (1 − j^r)^b`.
pub fn candidate_probability(j: f64, bands: usize, rows: usize) -> f64 {
    1.0 - libm::pow(1.0 - libm::pow(j, rows as f64), bands as f64)
}
