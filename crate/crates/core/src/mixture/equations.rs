//! The four per-iteration update steps of the language-mixture optimizer.
//!
//! Maps are keyed by language code; `BTreeMap` keeps every step's iteration
//! order, and therefore its floating-point summation order, fixed.

use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::error::{Error, Result};

pub type LangMap<T> = BTreeMap<String, T>;

/// Deficit of each language's fertility against `f_best`, scaled by the
/// spread `max f − min f`. A zero spread gives zero deficits.
pub fn normalized_deficit(fertility: &LangMap<f64>, f_best: f64) -> Result<LangMap<f64>> {
    if fertility.is_empty() {
        return Err(Error::Empty("fertility map".into()));
    }
    if let Some((lang, f)) = fertility
        .iter()
        .find(|(_, f)| !(f.is_finite() && **f > 0.0))
    {
        return Err(Error::Config(alloc::format!(
            "fertility for {lang} must be positive and finite, got {f}"
        )));
    }
    let max = fertility.values().copied().fold(f64::MIN, f64::max);
    let min = fertility.values().copied().fold(f64::MAX, f64::min);
    let range = max - min;
    Ok(fertility
        .iter()
        .map(|(lang, &f)| {
            let delta = if range > 0.0 {
                (f - f_best) / range
            } else {
                0.0
            };
            (lang.clone(), delta)
        })
        .collect())
}

/// Smoothed weights `max(δ, 0) + ε`; negative deficits are clamped so every
/// weight stays at least `ε`.
pub fn smoothed_weights(delta: &LangMap<f64>, epsilon: f64) -> Result<LangMap<f64>> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(alloc::format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    Ok(delta
        .iter()
        .map(|(lang, &d)| (lang.clone(), d.max(0.0) + epsilon))
        .collect())
}

/// Target shares: smoothed weights normalized to sum to one.
pub fn target_shares(delta: &LangMap<f64>, epsilon: f64) -> Result<LangMap<f64>> {
    normalize(&smoothed_weights(delta, epsilon)?)
}

pub(crate) fn normalize(weights: &LangMap<f64>) -> Result<LangMap<f64>> {
    let total: f64 = weights.values().sum();
    if !(total > 0.0) {
        return Err(Error::Config(alloc::format!("weights sum to {total}")));
    }
    Ok(weights
        .iter()
        .map(|(lang, &w)| (lang.clone(), w / total))
        .collect())
}

/// Convex blend `(1 − μ)·m_prev + μ·t`.
pub fn momentum_update(
    m_prev: &LangMap<f64>,
    target: &LangMap<f64>,
    mu: f64,
) -> Result<LangMap<f64>> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::Config(alloc::format!(
            "momentum must lie in (0, 1], got {mu}"
        )));
    }
    if !m_prev.keys().eq(target.keys()) {
        return Err(Error::KeyMismatch(alloc::format!(
            "previous mixture {:?} vs targets {:?}",
            m_prev.keys().collect::<alloc::vec::Vec<_>>(),
            target.keys().collect::<alloc::vec::Vec<_>>()
        )));
    }
    Ok(m_prev
        .iter()
        .zip(target.values())
        .map(|((lang, &m), &t)| (lang.clone(), (1.0 - mu) * m + mu * t))
        .collect())
}

/// Plain `round(m·T)` per language, whose total may miss `T`.
pub fn rounded_allocation(shares: &LangMap<f64>, total: u64) -> LangMap<u64> {
    shares
        .iter()
        .map(|(lang, &m)| (lang.clone(), libm::round(m * total as f64).max(0.0) as u64))
        .collect()
}

/// Character budget per language summing to exactly `total`.
///
/// Largest-remainder apportionment: floor of `m·T`, then the leftover units go
/// to the largest fractional parts (ties to the earlier language code). When
/// plain rounding already sums to `T` the two agree.
pub fn allocate_characters(shares: &LangMap<f64>, total: u64) -> LangMap<u64> {
    let mut alloc: LangMap<u64> = LangMap::new();
    let mut remainders = alloc::vec::Vec::with_capacity(shares.len());
    for (lang, &m) in shares {
        let exact = m.max(0.0) * total as f64;
        let base = libm::floor(exact);
        alloc.insert(lang.clone(), base as u64);
        remainders.push((exact - base, lang));
    }
    let assigned: u64 = alloc.values().sum();
    let mut leftover = total.saturating_sub(assigned) as usize;
    remainders.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    for (_, lang) in remainders.iter().cycle() {
        if leftover == 0 {
            break;
        }
        *alloc.get_mut(*lang).expect("key from shares") += 1;
        leftover -= 1;
    }
    alloc
}
