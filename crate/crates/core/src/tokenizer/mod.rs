//! Byte-fallback BPE: pre-tokenization, training, encoding and fertility.

mod fertility;
mod model;
mod pretok;
mod train;

pub use fertility::{fertility, FertilityCounter, FertilityReport, LangFertility};
pub use model::{vocab_floor, Token, TokenId, TokenizerModel, BYTE_TOKENS, DEFAULT_VOCAB_SIZE};
pub use pretok::{detokenize, pretokenize, Piece, PretokConfig, SPACE_MARKER};
pub use train::{collect_seed_alphabet, train_bpe, BpeConfig};
