use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("training data is missing classes: {0}")]
    MissingClasses(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("vocab_size {requested} is below the floor of {floor} (alphabet + 256 byte tokens + specials)")]
    VocabTooSmall { requested: usize, floor: usize },
    #[error("token id {id} out of range for vocabulary of {len}")]
    TokenOutOfRange { id: u32, len: usize },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("invalid span: {0}")]
    InvalidSpan(String),
    #[error("language keys differ: {0}")]
    KeyMismatch(String),
    #[error("invalid pattern: {0}")]
    Pattern(String),
    #[error("malformed model: {0}")]
    Model(String),
}
