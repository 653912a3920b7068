//! Fertility-driven language-mixture optimization.
//!
//! Each iteration samples a character budget per language, trains a tokenizer
//! on the mixed sample, measures each language's fertility, and moves the
//! mixture toward the languages the tokenizer fragments most.

mod equations;
mod optimizer;
mod sample;

pub use equations::{
    allocate_characters, momentum_update, normalized_deficit, rounded_allocation, smoothed_weights,
    target_shares, LangMap,
};
pub use optimizer::{
    optimize, run_mixture_loop, BpeProbe, FertilityProbe, IterationRecord, MeasureOn, MixtureState,
    OptimizerConfig,
};
pub use sample::{sample_characters, Sample};
