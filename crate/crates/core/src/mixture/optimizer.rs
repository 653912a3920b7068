use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::equations::{
    allocate_characters, momentum_update, normalize, normalized_deficit, smoothed_weights, LangMap,
};
use super::sample::sample_characters;
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::tokenizer::{
    collect_seed_alphabet, train_bpe, BpeConfig, FertilityCounter, TokenizerModel,
};

/// Which text fertility is measured on each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureOn {
    #[default]
    HeldOut,
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Momentum μ in (0, 1].
    pub mu: f64,
    /// Smoothing ε > 0.
    pub epsilon: f64,
    /// Ideal fertility.
    pub f_best: f64,
    /// Characters sampled per iteration across all languages.
    pub total_chars: u64,
    pub iterations: usize,
    pub bpe: BpeConfig,
    pub measure_on: MeasureOn,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            mu: 0.3,
            epsilon: 0.01,
            f_best: 1.0,
            total_chars: 1_000_000,
            iterations: 5,
            bpe: BpeConfig::default(),
            measure_on: MeasureOn::HeldOut,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self, languages: usize) -> Result<()> {
        if languages == 0 {
            return Err(Error::Empty("no languages to optimize".into()));
        }
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(Error::Config(alloc::format!(
                "mu must lie in (0, 1], got {}",
                self.mu
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(alloc::format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if self.total_chars < languages as u64 {
            return Err(Error::Config(alloc::format!(
                "total_chars {} is below the language count {languages}",
                self.total_chars
            )));
        }
        Ok(())
    }
}

/// Everything one iteration computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub fertility: LangMap<f64>,
    pub delta: LangMap<f64>,
    pub weights: LangMap<f64>,
    pub targets: LangMap<f64>,
    pub shares: LangMap<f64>,
    pub allocation: LangMap<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureState {
    pub iteration: usize,
    pub shares: LangMap<f64>,
    /// Character budget the next iteration will sample with.
    pub allocation: LangMap<u64>,
    pub history: Vec<IterationRecord>,
}

impl MixtureState {
    pub fn uniform<'a>(languages: impl IntoIterator<Item = &'a str>, total_chars: u64) -> Self {
        let langs: BTreeSet<&str> = languages.into_iter().collect();
        let share = 1.0 / langs.len().max(1) as f64;
        let shares: LangMap<f64> = langs.into_iter().map(|l| (l.into(), share)).collect();
        let allocation = allocate_characters(&shares, total_chars);
        MixtureState {
            iteration: 0,
            shares,
            allocation,
            history: Vec::new(),
        }
    }

    /// Applies one round of updates given freshly measured fertilities.
    pub fn step(
        &mut self,
        fertility: LangMap<f64>,
        cfg: &OptimizerConfig,
    ) -> Result<&IterationRecord> {
        if !fertility.keys().eq(self.shares.keys()) {
            return Err(Error::KeyMismatch(alloc::format!(
                "measured languages {:?} differ from mixture languages {:?}",
                fertility.keys().collect::<Vec<_>>(),
                self.shares.keys().collect::<Vec<_>>()
            )));
        }
        let delta = normalized_deficit(&fertility, cfg.f_best)?;
        let weights = smoothed_weights(&delta, cfg.epsilon)?;
        let targets = normalize(&weights)?;
        let shares = momentum_update(&self.shares, &targets, cfg.mu)?;
        let allocation = allocate_characters(&shares, cfg.total_chars);
        self.iteration += 1;
        self.shares = shares.clone();
        self.allocation = allocation.clone();
        self.history.push(IterationRecord {
            iteration: self.iteration,
            fertility,
            delta,
            weights,
            targets,
            shares,
            allocation,
        });
        Ok(self.history.last().expect("just pushed"))
    }
}

/// Source of per-language fertility for a given character allocation.
pub trait FertilityProbe {
    fn measure(&mut self, iteration: usize, allocation: &LangMap<u64>) -> Result<LangMap<f64>>;
}

impl<F> FertilityProbe for F
where
    F: FnMut(usize, &LangMap<u64>) -> Result<LangMap<f64>>,
{
    fn measure(&mut self, iteration: usize, allocation: &LangMap<u64>) -> Result<LangMap<f64>> {
        self(iteration, allocation)
    }
}

/// Runs `cfg.iterations` rounds starting from a uniform mixture: measure
/// fertility under the current allocation, then update deficits, targets,
/// shares and the next allocation.
pub fn optimize<'a, P: FertilityProbe>(
    languages: impl IntoIterator<Item = &'a str>,
    cfg: &OptimizerConfig,
    probe: &mut P,
) -> Result<MixtureState> {
    let mut state = MixtureState::uniform(languages, cfg.total_chars);
    cfg.validate(state.shares.len())?;
    for n in 1..=cfg.iterations {
        let fertility = probe.measure(n, &state.allocation)?;
        state.step(fertility, cfg)?;
    }
    Ok(state)
}

/// Samples each language by its budget, trains one tokenizer on the mixed
/// sample, and measures per-language fertility.
pub struct BpeProbe<'c> {
    corpora: &'c LangMap<Vec<String>>,
    eval: &'c LangMap<Vec<String>>,
    alphabet: BTreeSet<char>,
    cfg: OptimizerConfig,
    /// Tokenizer from the most recent iteration.
    pub last_model: Option<TokenizerModel>,
}

impl<'c> BpeProbe<'c> {
    /// The seed alphabet covers every scalar in the full training corpora.
    pub fn new(
        corpora: &'c LangMap<Vec<String>>,
        eval: &'c LangMap<Vec<String>>,
        cfg: &OptimizerConfig,
    ) -> Result<Self> {
        for (lang, docs) in corpora {
            if docs.is_empty() {
                return Err(Error::Empty(alloc::format!("training corpus for {lang}")));
            }
        }
        if cfg.measure_on == MeasureOn::HeldOut && !eval.keys().eq(corpora.keys()) {
            return Err(Error::KeyMismatch(alloc::format!(
                "eval languages {:?} differ from training languages {:?}",
                eval.keys().collect::<Vec<_>>(),
                corpora.keys().collect::<Vec<_>>()
            )));
        }
        let alphabet = collect_seed_alphabet(corpora.values().flatten().map(String::as_str));
        Ok(BpeProbe {
            corpora,
            eval,
            alphabet,
            cfg: cfg.clone(),
            last_model: None,
        })
    }
}

impl FertilityProbe for BpeProbe<'_> {
    fn measure(&mut self, iteration: usize, allocation: &LangMap<u64>) -> Result<LangMap<f64>> {
        let mut samples: LangMap<Vec<String>> = LangMap::new();
        for (lang, docs) in self.corpora {
            let budget = allocation.get(lang).copied().unwrap_or(0) as usize;
            let seed = derive_seed(self.cfg.seed, &alloc::format!("sample/{iteration}/{lang}"));
            samples.insert(lang.clone(), sample_characters(docs, budget, seed)?.texts);
        }
        let model = train_bpe(
            samples.values().flatten().map(String::as_str),
            &self.alphabet,
            &self.cfg.bpe,
        )?;
        let measured = match self.cfg.measure_on {
            MeasureOn::HeldOut => self.eval,
            MeasureOn::Sample => &samples,
        };
        let mut counter = FertilityCounter::new(&model);
        for (lang, docs) in measured {
            for text in docs {
                counter.add(lang, text);
            }
        }
        let report = counter.finish("", "");
        let mut fertility = LangMap::new();
        for lang in self.corpora.keys() {
            let f = report.get(lang).ok_or_else(|| {
                Error::Empty(alloc::format!("no words to measure fertility for {lang}"))
            })?;
            fertility.insert(lang.clone(), f);
        }
        self.last_model = Some(model);
        Ok(fertility)
    }
}

/// The full loop with BPE retraining each iteration.
pub fn run_mixture_loop(
    corpora: &LangMap<Vec<String>>,
    eval_corpora: &LangMap<Vec<String>>,
    cfg: &OptimizerConfig,
) -> Result<MixtureState> {
    let mut probe = BpeProbe::new(corpora, eval_corpora, cfg)?;
    optimize(corpora.keys().map(String::as_str), cfg, &mut probe)
}
