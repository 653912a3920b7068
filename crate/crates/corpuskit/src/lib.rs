//! File formats, reports, the pipeline runner and the judge client around
//! `corpuskit-core`.

pub mod cli;
pub mod config;
pub mod io;
pub mod judge_client;
pub mod models;
pub mod pipeline;
pub mod report;
pub mod sft;
