use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_64;

use super::DedupConfig;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// All length-`k` windows over the scalars of `text`. Text shorter than `k`
/// (but non-empty) is its own single shingle.
pub fn shingles(text: &str, k: usize) -> Result<BTreeSet<String>> {
    if k == 0 {
        return Err(Error::Config("shingle size must be at least 1".into()));
    }
    let chars: Vec<char> = text.chars().collect();
    if chars.is_empty() {
        return Ok(BTreeSet::new());
    }
    if chars.len() < k {
        return Ok([String::from(text)].into_iter().collect());
    }
    Ok(chars.windows(k).map(|w| w.iter().collect()).collect())
}

/// Base hashes of the distinct shingles of `text`, without materializing strings.
pub fn shingle_hashes(text: &str, k: usize) -> Result<Vec<u64>> {
    if k == 0 {
        return Err(Error::Config("shingle size must be at least 1".into()));
    }
    let bounds: Vec<usize> = text
        .char_indices()
        .map(|(i, _)| i)
        .chain([text.len()])
        .collect();
    let n = bounds.len() - 1;
    let mut out: Vec<u64> = if n == 0 {
        Vec::new()
    } else if n < k {
        alloc::vec![xxh3_64(text.as_bytes())]
    } else {
        (0..=n - k)
            .map(|i| xxh3_64(&text.as_bytes()[bounds[i]..bounds[i + k]]))
            .collect()
    };
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

const MERSENNE_61: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    let p = u128::from(a) * u128::from(b);
    let lo = (p as u64) & MERSENNE_61;
    let hi = (p >> 61) as u64;
    let mut s = lo + hi;
    while s >= MERSENNE_61 {
        s -= MERSENNE_61;
    }
    s
}

/// Universal hash family `h_i(x) = (a_i·x + b_i) mod (2^61 − 1)` with
/// coefficients drawn from `seed`.
#[derive(Debug, Clone)]
pub struct MinHasher {
    coeffs: Vec<(u64, u64)>,
    seed: u64,
}

impl MinHasher {
    pub fn new(num_hashes: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let coeffs = (0..num_hashes)
            .map(|_| {
                (
                    rng.random_range(1..MERSENNE_61),
                    rng.random_range(0..MERSENNE_61),
                )
            })
            .collect();
        MinHasher { coeffs, seed }
    }

    pub fn from_config(cfg: &DedupConfig) -> Self {
        Self::new(cfg.num_hashes, cfg.seed)
    }

    pub fn num_hashes(&self) -> usize {
        self.coeffs.len()
    }

    /// Signature over pre-hashed shingles.
    pub fn signature_of_hashes(&self, doc_id: &str, hashes: &[u64]) -> Result<MinHashSignature> {
        if hashes.is_empty() {
            return Err(Error::Empty(alloc::format!(
                "document {doc_id:?} has no shingles"
            )));
        }
        let mut values = alloc::vec![u64::MAX; self.coeffs.len()];
        for &h in hashes {
            let x = h % MERSENNE_61;
            for (v, &(a, b)) in values.iter_mut().zip(&self.coeffs) {
                let y = mul_mod(a, x) + b;
                let y = if y >= MERSENNE_61 { y - MERSENNE_61 } else { y };
                if y < *v {
                    *v = y;
                }
            }
        }
        Ok(MinHashSignature {
            doc_id: doc_id.into(),
            values,
            seed: self.seed,
        })
    }

    pub fn signature<'a>(
        &self,
        doc_id: &str,
        shingles: impl IntoIterator<Item = &'a String>,
    ) -> Result<MinHashSignature> {
        let hashes: Vec<u64> = shingles
            .into_iter()
            .map(|s| xxh3_64(s.as_bytes()))
            .collect();
        self.signature_of_hashes(doc_id, &hashes)
    }

    pub fn signature_of_text(
        &self,
        doc_id: &str,
        text: &str,
        k: usize,
    ) -> Result<MinHashSignature> {
        self.signature_of_hashes(doc_id, &shingle_hashes(text, k)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinHashSignature {
    pub doc_id: String,
    pub values: Vec<u64>,
    pub seed: u64,
}

impl MinHashSignature {
    /// Fraction of agreeing entries: the Jaccard estimate.
    pub fn estimated_jaccard(&self, other: &Self) -> f64 {
        let n = self.values.len().min(other.values.len());
        if n == 0 {
            return 0.0;
        }
        let same = self
            .values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| a == b)
            .count();
        same as f64 / n as f64
    }
}

/// Signature of a shingle set under `cfg`'s hash count and seed.
pub fn minhash_signature(
    doc_id: &str,
    shingles: &BTreeSet<String>,
    cfg: &DedupConfig,
) -> Result<MinHashSignature> {
    MinHasher::from_config(cfg).signature(doc_id, shingles)
}

/// Exact |A ∩ B| / |A ∪ B|; two empty sets count as identical.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}
