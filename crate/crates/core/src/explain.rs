//! Exact Shapley attribution with a marginal-expectation value function:
//! `f(S)` is the mean prediction over background rows with the features
//! outside `S` taken from the background row.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Exact enumeration visits `2^F` subsets; this caps `F`.
pub const MAX_FEATURES: usize = 15;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ExplainError {
    #[error("{0} features exceeds the exact-enumeration limit of 15")]
    TooManyFeatures(usize),
    #[error("background set is empty")]
    EmptyBackground,
    #[error("row has {got} features, expected {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("no instances to summarize")]
    NoInstances,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapConfig {
    pub background: usize,
    pub seed: u64,
}

impl Default for ShapConfig {
    fn default() -> Self {
        ShapConfig { background: 100, seed: 0 }
    }
}

/// Up to `cfg.background` rows drawn without replacement, kept in their
/// original order.
pub fn sample_background(rows: &[Vec<f64>], cfg: &ShapConfig) -> Vec<Vec<f64>> {
    if rows.len() <= cfg.background {
        return rows.to_vec();
    }
    let mut idx = sample(&mut ChaCha8Rng::seed_from_u64(cfg.seed), rows.len(), cfg.background).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| rows[i].clone()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapValues {
    pub phi: Vec<f64>,
    /// Mean prediction over the background.
    pub base: f64,
    pub prediction: f64,
}

/// `v(S)` for every subset mask of the features.
fn subset_values<F: Fn(&[f64]) -> f64>(predict: &F, instance: &[f64], background: &[Vec<f64>]) -> Vec<f64> {
    let f = instance.len();
    let mut row = vec![0.0; f];
    (0..1usize << f)
        .map(|mask| {
            let total: f64 = background
                .iter()
                .map(|b| {
                    for j in 0..f {
                        row[j] = if mask >> j & 1 == 1 { instance[j] } else { b[j] };
                    }
                    predict(&row)
                })
                .sum();
            total / background.len() as f64
        })
        .collect()
}

/// `|S|! (F - |S| - 1)! / F!` for `|S| = 0..F`.
fn shapley_weights(f: usize) -> Vec<f64> {
    let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
    (0..f).map(|s| fact(s) * fact(f - s - 1) / fact(f)).collect()
}

/// Exact Shapley values of `instance` under `predict`.
pub fn shapley_values<F>(predict: &F, instance: &[f64], background: &[Vec<f64>]) -> Result<ShapValues, ExplainError>
where
    F: Fn(&[f64]) -> f64,
{
    let f = instance.len();
    if f > MAX_FEATURES {
        return Err(ExplainError::TooManyFeatures(f));
    }
    if background.is_empty() {
        return Err(ExplainError::EmptyBackground);
    }
    if let Some(b) = background.iter().find(|b| b.len() != f) {
        return Err(ExplainError::DimMismatch { expected: f, got: b.len() });
    }
    let v = subset_values(predict, instance, background);
    let w = shapley_weights(f);
    let phi = (0..f)
        .map(|i| {
            let bit = 1usize << i;
            (0..1usize << f)
                .filter(|m| m & bit == 0)
                .map(|m| w[m.count_ones() as usize] * (v[m | bit] - v[m]))
                .sum()
        })
        .collect();
    Ok(ShapValues { phi, base: v[0], prediction: predict(instance) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub feature: String,
    pub mean_abs: f64,
    pub rank: usize,
}

/// Features by mean `|phi|`, largest first, ties by column order.
pub fn mean_abs_shap(values: &[ShapValues], features: &[String]) -> Result<Vec<RankedFeature>, ExplainError> {
    if values.is_empty() {
        return Err(ExplainError::NoInstances);
    }
    let n = values.len() as f64;
    let mut means: Vec<(usize, f64)> = (0..features.len())
        .map(|j| (j, values.iter().map(|v| v.phi[j].abs()).sum::<f64>() / n))
        .collect();
    means.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(means
        .into_iter()
        .enumerate()
        .map(|(r, (j, m))| RankedFeature { feature: features[j].clone(), mean_abs: m, rank: r + 1 })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapReport {
    pub features: Vec<String>,
    pub instances: Vec<Vec<f64>>,
    pub values: Vec<ShapValues>,
    pub ranking: Vec<RankedFeature>,
}

impl ShapReport {
    /// `feature,mean_abs_shap,rank`.
    pub fn ranking_csv(&self) -> String {
        let mut out = String::from("feature,mean_abs_shap,rank\n");
        for r in &self.ranking {
            out.push_str(&format!("{},{:.10},{}\n", r.feature, r.mean_abs, r.rank));
        }
        out
    }

    /// Long format for beeswarm plots: `instance,feature,value,shap`.
    pub fn long_csv(&self) -> String {
        let mut out = String::from("instance,feature,value,shap\n");
        for (i, (x, v)) in self.instances.iter().zip(&self.values).enumerate() {
            for (j, name) in self.features.iter().enumerate() {
                out.push_str(&format!("{},{},{},{:.10}\n", i + 1, name, x[j], v.phi[j]));
            }
        }
        out
    }
}

/// Shapley values for every instance (in parallel) plus the ranking.
pub fn explain_instances<F>(
    predict: &F,
    instances: &[Vec<f64>],
    background: &[Vec<f64>],
    features: &[String],
) -> Result<ShapReport, ExplainError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if let Some(x) = instances.iter().find(|x| x.len() != features.len()) {
        return Err(ExplainError::DimMismatch { expected: features.len(), got: x.len() });
    }
    let values = instances
        .par_iter()
        .map(|x| shapley_values(predict, x, background))
        .collect::<Result<Vec<_>, _>>()?;
    let ranking = mean_abs_shap(&values, features)?;
    Ok(ShapReport { features: features.to_vec(), instances: instances.to_vec(), values, ranking })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_feature() {
        let bg = vec![vec![1.0], vec![3.0]];
        let s = shapley_values(&|x: &[f64]| x[0] * x[0], &[4.0], &bg).unwrap();
        assert_eq!(s.base, 5.0);
        assert_eq!(s.phi, vec![11.0]);
    }

    #[test]
    fn linear_closed_form() {
        let (a, b) = (1.7, -0.4);
        let bg = vec![vec![0.0, 1.0], vec![2.0, 5.0], vec![1.0, -3.0]];
        let s = shapley_values(&|x: &[f64]| a * x[0] + b * x[1], &[3.0, 2.0], &bg).unwrap();
        assert!((s.phi[0] - a * (3.0 - 1.0)).abs() < 1e-10);
        assert!((s.phi[1] - b * (2.0 - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn errors() {
        let f = |_: &[f64]| 0.0;
        assert_eq!(shapley_values(&f, &[0.0; 16], &[vec![0.0; 16]]), Err(ExplainError::TooManyFeatures(16)));
        assert_eq!(shapley_values(&f, &[0.0], &[]), Err(ExplainError::EmptyBackground));
        assert_eq!(mean_abs_shap(&[], &[]), Err(ExplainError::NoInstances));
    }

    #[test]
    fn constant_model_has_zero_attribution() {
        let bg = vec![vec![0.0, 1.0], vec![2.0, 5.0]];
        let names = vec!["a".to_string(), "b".to_string()];
        let r = explain_instances(&|_: &[f64]| 0.3, &[vec![1.0, 1.0], vec![4.0, 0.0]], &bg, &names).unwrap();
        assert!(r.ranking.iter().all(|f| f.mean_abs == 0.0));
        assert_eq!(r.ranking[0].feature, "a");
    }

    #[test]
    fn ranking_single_instance() {
        let v = ShapValues { phi: vec![0.1, -0.5, 0.1], base: 0.0, prediction: -0.3 };
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let r = mean_abs_shap(&[v], &names).unwrap();
        let order: Vec<&str> = r.iter().map(|f| f.feature.as_str()).collect();
        assert_eq!(order, ["b", "a", "c"]);
    }

    #[test]
    fn background_sampling_is_seeded() {
        let rows: Vec<Vec<f64>> = (0..500).map(|i| vec![i as f64]).collect();
        let cfg = ShapConfig::default();
        let a = sample_background(&rows, &cfg);
        assert_eq!(a.len(), 100);
        assert_eq!(a, sample_background(&rows, &cfg));
        assert_eq!(sample_background(&rows[..10], &cfg).len(), 10);
    }
}
