use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;
use xxhash_rust::xxh3::xxh3_128;

use crate::document::Document;

/// For each text, the index of the earlier byte-identical text it duplicates.
///
/// Texts are bucketed by a 128-bit content hash and confirmed byte-for-byte,
/// so a hash collision never merges distinct texts.
pub fn exact_duplicates<S: AsRef<str>>(texts: &[S]) -> Vec<Option<usize>> {
    let mut seen: HashMap<u128, Vec<usize>> = HashMap::new();
    texts
        .iter()
        .enumerate()
        .map(|(i, text)| {
            let text = text.as_ref();
            let bucket = seen.entry(xxh3_128(text.as_bytes())).or_default();
            match bucket.iter().find(|&&j| texts[j].as_ref() == text) {
                Some(&j) => Some(j),
                None => {
                    bucket.push(i);
                    None
                }
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExactDedup {
    pub kept: Vec<Document>,
    /// (duplicate id, id of the kept copy)
    pub dropped: Vec<(String, String)>,
}

/// Keeps the first occurrence of every distinct text, in input order.
pub fn exact_dedup(docs: Vec<Document>) -> ExactDedup {
    let dup_of = exact_duplicates(&docs.iter().map(|d| d.text.as_str()).collect::<Vec<_>>());
    let ids: Vec<String> = docs.iter().map(|d| d.id.clone()).collect();
    let mut out = ExactDedup::default();
    for (doc, dup) in docs.into_iter().zip(dup_of) {
        match dup {
            Some(j) => out.dropped.push((doc.id, ids[j].clone())),
            None => out.kept.push(doc),
        }
    }
    out
}
