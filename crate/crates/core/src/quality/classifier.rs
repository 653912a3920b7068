//! Hashed character n-gram linear classifiers trained by SGD.
//!
//! [`LinearModel`] is the shared machinery: multinomial logistic regression
//! without bias terms over L2-normalized hashed n-gram counts. The quality
//! gate wraps it with three buckets; the code/math filter can reuse it with
//! two classes.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_64;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    /// Character n-gram order.
    pub ngram: usize,
    /// Number of hash buckets.
    pub dim: usize,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        FeatureSpec {
            ngram: 3,
            dim: 1 << 18,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub spec: FeatureSpec,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            spec: FeatureSpec::default(),
            epochs: 10,
            learning_rate: 0.5,
            seed: 0,
        }
    }
}

/// Sparse L2-normalized hashed n-gram counts, sorted by index. Texts shorter
/// than the n-gram order contribute themselves as a single feature.
pub fn hashed_features(text: &str, spec: FeatureSpec) -> Vec<(u32, f32)> {
    let chars: Vec<char> = text.chars().collect();
    if chars.is_empty() || spec.dim == 0 {
        return Vec::new();
    }
    let n = spec.ngram.max(1);
    let mut counts: HashMap<u32, f32> = HashMap::new();
    let mut buf = String::new();
    let mut add = |gram: &[char]| {
        buf.clear();
        buf.extend(gram);
        let idx = (xxh3_64(buf.as_bytes()) % spec.dim as u64) as u32;
        *counts.entry(idx).or_default() += 1.0;
    };
    if chars.len() < n {
        add(&chars);
    } else {
        chars.windows(n).for_each(&mut add);
    }
    let norm = libm::sqrtf(counts.values().map(|v| v * v).sum::<f32>());
    let mut feats: Vec<(u32, f32)> = counts.into_iter().map(|(i, v)| (i, v / norm)).collect();
    feats.sort_unstable_by_key(|&(i, _)| i);
    feats
}

/// A linear model over hashed features; weights are class-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub spec: FeatureSpec,
    pub num_classes: usize,
    pub seed: u64,
    pub weights: Vec<f32>,
}

impl LinearModel {
    pub fn zeros(spec: FeatureSpec, num_classes: usize, seed: u64) -> Self {
        LinearModel {
            spec,
            num_classes,
            seed,
            weights: vec![0.0; spec.dim * num_classes],
        }
    }

    /// Checks the weight vector against the declared shape.
    pub fn validate(&self) -> Result<()> {
        if self.weights.len() != self.spec.dim * self.num_classes {
            return Err(Error::Model(alloc::format!(
                "weight vector has {} entries, expected {} x {}",
                self.weights.len(),
                self.spec.dim,
                self.num_classes
            )));
        }
        Ok(())
    }

    /// Trains on `(text, class)` pairs. Every class in `0..num_classes` must
    /// appear. The visiting order is a seeded shuffle of the given order, so
    /// the result is a function of (data order, config).
    pub fn train(
        examples: &[(&str, usize)],
        num_classes: usize,
        cfg: &TrainConfig,
    ) -> Result<Self> {
        let mut seen = vec![false; num_classes];
        for &(_, class) in examples {
            if class >= num_classes {
                return Err(Error::Config(alloc::format!("class {class} out of range")));
            }
            seen[class] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::MissingClasses(alloc::format!(
                "no examples for class {missing}"
            )));
        }
        let feats: Vec<Vec<(u32, f32)>> = examples
            .iter()
            .map(|(t, _)| hashed_features(t, cfg.spec))
            .collect();
        let mut model = Self::zeros(cfg.spec, num_classes, cfg.seed);
        let mut order: Vec<usize> = (0..examples.len()).collect();
        let mut rng = rng_from_seed(cfg.seed);
        let mut probs = vec![0.0f64; num_classes];
        for _ in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                let x = &feats[i];
                if x.is_empty() {
                    continue;
                }
                model.softmax_into(x, &mut probs);
                for (class, p) in probs.iter().enumerate() {
                    let target = if class == examples[i].1 { 1.0 } else { 0.0 };
                    let g = (cfg.learning_rate * (target - p)) as f32;
                    let row =
                        &mut model.weights[class * model.spec.dim..(class + 1) * model.spec.dim];
                    for &(j, v) in x {
                        row[j as usize] += g * v;
                    }
                }
            }
        }
        Ok(model)
    }

    fn scores(&self, x: &[(u32, f32)], out: &mut [f64]) {
        for (class, s) in out.iter_mut().enumerate() {
            let row = &self.weights[class * self.spec.dim..(class + 1) * self.spec.dim];
            *s = x.iter().map(|&(j, v)| f64::from(row[j as usize] * v)).sum();
        }
    }

    fn softmax_into(&self, x: &[(u32, f32)], out: &mut [f64]) {
        self.scores(x, out);
        let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for s in out.iter_mut() {
            *s = libm::exp(*s - max);
            total += *s;
        }
        out.iter_mut().for_each(|s| *s /= total);
    }

    /// Class probabilities, or `None` when the text yields no features.
    pub fn probabilities(&self, text: &str) -> Option<Vec<f64>> {
        let x = hashed_features(text, self.spec);
        if x.is_empty() {
            return None;
        }
        let mut out = vec![0.0; self.num_classes];
        self.softmax_into(&x, &mut out);
        Some(out)
    }

    /// Raw linear scores, for callers that need the pre-softmax values.
    pub fn raw_scores(&self, text: &str) -> Vec<f64> {
        let x = hashed_features(text, self.spec);
        let mut out = vec![0.0; self.num_classes];
        self.scores(&x, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum QualityBucket {
    Low,
    Medium,
    High,
}

impl QualityBucket {
    pub const ALL: [QualityBucket; 3] = [
        QualityBucket::Low,
        QualityBucket::Medium,
        QualityBucket::High,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            QualityBucket::Low => "LOW",
            QualityBucket::Medium => "MEDIUM",
            QualityBucket::High => "HIGH",
        }
    }
}

impl fmt::Display for QualityBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for QualityBucket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LOW" => Ok(QualityBucket::Low),
            "MEDIUM" => Ok(QualityBucket::Medium),
            "HIGH" => Ok(QualityBucket::High),
            other => Err(Error::Config(alloc::format!(
                "unknown quality bucket {other:?}"
            ))),
        }
    }
}

/// Three-bucket document quality model.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityModel(pub LinearModel);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainReport {
    pub training_accuracy: f64,
}

pub fn train_quality_classifier(
    labeled: &[(&str, QualityBucket)],
    cfg: &TrainConfig,
) -> Result<(QualityModel, TrainReport)> {
    let examples: Vec<(&str, usize)> = labeled.iter().map(|&(t, b)| (t, b.index())).collect();
    let model = QualityModel(LinearModel::train(&examples, 3, cfg).map_err(|e| match e {
        Error::MissingClasses(_) => {
            let missing: Vec<&str> = QualityBucket::ALL
                .iter()
                .filter(|b| !labeled.iter().any(|(_, l)| l == *b))
                .map(|b| b.as_str())
                .collect();
            Error::MissingClasses(missing.join(", "))
        }
        other => other,
    })?);
    let correct = labeled
        .iter()
        .filter(|(t, b)| classify_quality(&model, t).0 == *b)
        .count();
    let training_accuracy = correct as f64 / labeled.len() as f64;
    Ok((model, TrainReport { training_accuracy }))
}

/// Bucket with the highest probability and that probability. Text without
/// features is MEDIUM at 1/3; exact ties go to the lower bucket.
pub fn classify_quality(model: &QualityModel, text: &str) -> (QualityBucket, f64) {
    let Some(p) = model.0.probabilities(text) else {
        return (QualityBucket::Medium, 1.0 / 3.0);
    };
    let mut best = 0;
    for i in 1..p.len() {
        if p[i] > p[best] {
            best = i;
        }
    }
    (QualityBucket::ALL[best], p[best].clamp(0.0, 1.0))
}
