//! Allocation-only building blocks for multilingual pretraining-corpus curation.
//!
//! Everything in this crate is pure computation over in-memory values: the
//! heuristic and classifier quality gates, language identification, unicode
//! repair, exact and MinHash/LSH deduplication, PII redaction, code/math
//! scoring, a byte-fallback BPE tokenizer with fertility measurement, the
//! fertility-driven language-mixture optimizer, and the instruction-pair judge
//! format. File formats, the pipeline runner and the CLI live in the
//! `corpuskit` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dedup;
pub mod document;
pub mod error;
pub mod histogram;
pub mod mixture;
pub mod quality;
pub mod rng;
pub mod scrub;
pub mod sft;
pub mod text;
pub mod tokenizer;

pub use document::{Document, StageDecision, Verdict};
pub use error::{Error, Result};
