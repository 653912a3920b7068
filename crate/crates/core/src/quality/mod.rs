//! Document quality gates: heuristic filters, the n-gram quality classifier,
//! language identification and unicode repair.

pub mod classifier;
pub mod heuristics;
pub mod langid;
pub mod unicode;

pub use classifier::{
    classify_quality, hashed_features, train_quality_classifier, FeatureSpec, LinearModel,
    QualityBucket, QualityModel, TrainConfig, TrainReport,
};
pub use heuristics::{mean_word_length_filter, word_count_filter, HeuristicConfig};
pub use langid::{identify_language, train_langid, LangGuess, LangProfile, UNKNOWN};
pub use unicode::reformat_unicode;
