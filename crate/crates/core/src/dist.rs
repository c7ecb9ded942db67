//! Exact arithmetic on finite distributions: separation distance, total
//! variation, and mixture decomposition.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Validation tolerance used throughout the distribution kernel.
pub const TOL: f64 = 1e-12;

/// A finite probability distribution over ordered outcome keys.
///
/// Probabilities are validated on construction: nonnegative, summing to 1
/// within `TOL`. Operations on pairs unify supports by zero-padding the
/// union of keys.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<K: Ord + Clone> {
    probs: BTreeMap<K, f64>,
}

impl<K: Ord + Clone> Distribution<K> {
    pub fn new(probs: BTreeMap<K, f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut sum = 0.0;
        for p in probs.values() {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::InvalidDistribution(format!("bad probability {p}")));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
        }
        Ok(Distribution { probs })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (K, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, p) in pairs {
            if map.insert(k, p).is_some() {
                return Err(Error::InvalidDistribution("duplicate support key".into()));
            }
        }
        Self::new(map)
    }

    /// Uniform distribution over the given keys.
    pub fn uniform_over(keys: impl IntoIterator<Item = K>) -> Result<Self> {
        let keys: Vec<K> = keys.into_iter().collect();
        if keys.is_empty() {
            return Err(Error::InvalidDistribution("uniform over empty key list".into()));
        }
        let p = 1.0 / keys.len() as f64;
        Self::from_pairs(keys.into_iter().map(|k| (k, p)))
    }

    /// Frequency-normalized distribution of a sample stream. An explicit
    /// support may be supplied so zero-count outcomes appear with mass 0.
    pub fn empirical(
        samples: impl IntoIterator<Item = K>,
        support: Option<&[K]>,
    ) -> Result<Self> {
        let mut counts: BTreeMap<K, u64> = BTreeMap::new();
        if let Some(support) = support {
            for k in support {
                counts.insert(k.clone(), 0);
            }
        }
        let mut total = 0u64;
        for k in samples {
            *counts.entry(k).or_insert(0) += 1;
            total += 1;
        }
        if total == 0 {
            return Err(Error::EmptySamples);
        }
        Distribution::new(
            counts
                .into_iter()
                .map(|(k, c)| (k, c as f64 / total as f64))
                .collect(),
        )
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.probs.keys()
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    pub fn prob(&self, key: &K) -> f64 {
        self.probs.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> {
        self.probs.iter().map(|(k, &p)| (k, p))
    }

    fn unified_keys(&self, other: &Self) -> Vec<K> {
        let mut keys: Vec<K> = self.probs.keys().cloned().collect();
        for k in other.probs.keys() {
            if !self.probs.contains_key(k) {
                keys.push(k.clone());
            }
        }
        keys.sort();
        keys
    }
}

/// Separation distance `s(a,b) = min{eps >= 0 : a >= (1-eps) b}`.
///
/// Computed as the max over outcomes with `b(x) > 0` of `1 - a(x)/b(x)`,
/// clamped to `[0,1]`; outcomes with `b(x) = 0` impose no constraint.
/// Asymmetric in its arguments.
pub fn separation_distance<K: Ord + Clone>(a: &Distribution<K>, b: &Distribution<K>) -> f64 {
    let mut worst: f64 = 0.0;
    for key in a.unified_keys(b) {
        let bx = b.prob(&key);
        if bx > 0.0 {
            worst = worst.max(1.0 - a.prob(&key) / bx);
        }
    }
    worst.clamp(0.0, 1.0)
}

/// Total variation distance `1/2 sum |a(x) - b(x)|`.
pub fn total_variation<K: Ord + Clone>(a: &Distribution<K>, b: &Distribution<K>) -> f64 {
    let mut sum = 0.0;
    for key in a.unified_keys(b) {
        sum += (a.prob(&key) - b.prob(&key)).abs();
    }
    (sum / 2.0).clamp(0.0, 1.0)
}

/// The mixture component `gamma` with `a = (1-eps) b + eps gamma`.
///
/// Requires `separation_distance(a,b) <= eps`; on violation the error names
/// a witness outcome. `gamma = (1/eps) a + (1 - 1/eps) b`.
pub fn mixture_decompose<K: Ord + Clone + std::fmt::Debug>(
    a: &Distribution<K>,
    b: &Distribution<K>,
    eps: f64,
) -> Result<Distribution<K>> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidConfig(format!("epsilon {eps} not in (0,1]")));
    }
    let keys = a.unified_keys(b);
    let mut probs = BTreeMap::new();
    for key in keys {
        let ax = a.prob(&key);
        let bx = b.prob(&key);
        let gx = ax / eps + (1.0 - 1.0 / eps) * bx;
        if gx < -TOL {
            return Err(Error::MixturePrecondition {
                witness: format!("{key:?}"),
                alpha: ax,
                floor: (1.0 - eps) * bx,
            });
        }
        probs.insert(key, gx.max(0.0));
    }
    // Renormalize away float dust only; the mass is 1 within TOL by construction.
    let sum: f64 = probs.values().sum();
    debug_assert!((sum - 1.0).abs() <= 1e-9);
    for p in probs.values_mut() {
        *p /= sum;
    }
    Distribution::new(probs)
}
