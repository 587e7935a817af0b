//! Entropy weights over standardized columns and the momentum series.

use serde::{Deserialize, Serialize};

use crate::ingest::StandardizedFrame;

pub const DEFAULT_EPSILON: f64 = 1e-12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EwmError {
    #[error("entropy weights need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("every column is uninformative (all entropies are 1)")]
    AllColumnsUninformative,
    #[error("column `{0}` is not present in the frame")]
    ColumnMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub columns: Vec<String>,
    pub weights: Vec<f64>,
    /// Entropies after clamping to `[0, 1]`.
    pub entropies: Vec<f64>,
    pub epsilon: f64,
}

impl WeightVector {
    pub fn weight_of(&self, column: &str) -> Option<f64> {
        self.columns.iter().position(|c| c == column).map(|i| self.weights[i])
    }
}

/// Entropy of one standardized column; an all-zero column has entropy 1.
fn column_entropy(z: &[f64], epsilon: f64) -> f64 {
    let total: f64 = z.iter().sum();
    if !(total > 0.0) {
        return 1.0;
    }
    let ln_t = (z.len() as f64).ln();
    let h: f64 = z
        .iter()
        .map(|&v| {
            let p = v / total;
            p * (p + epsilon).ln()
        })
        .sum();
    (-h / ln_t).clamp(0.0, 1.0)
}

/// Entropy weight of each column: `w_i = (1 - e_i) / sum_j (1 - e_j)`.
pub fn entropy_weights(z: &StandardizedFrame, epsilon: f64) -> Result<WeightVector, EwmError> {
    if z.len() < 2 {
        return Err(EwmError::TooFewPoints(z.len()));
    }
    let entropies: Vec<f64> = (0..z.width()).map(|j| column_entropy(&z.column(j), epsilon)).collect();
    let divergence: f64 = entropies.iter().map(|e| 1.0 - e).sum();
    if !(divergence > 0.0) {
        return Err(EwmError::AllColumnsUninformative);
    }
    Ok(WeightVector {
        columns: z.columns.clone(),
        weights: entropies.iter().map(|e| (1.0 - e) / divergence).collect(),
        entropies,
        epsilon,
    })
}

/// Weights computed on the stacked rows of several matches.
pub fn pooled_entropy_weights(frames: &[StandardizedFrame], epsilon: f64) -> Result<WeightVector, EwmError> {
    let stacked = StandardizedFrame::concat(frames)
        .ok_or_else(|| EwmError::ColumnMismatch("frames disagree on columns".into()))?;
    entropy_weights(&stacked, epsilon)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumSeries {
    pub match_id: String,
    pub values: Vec<f64>,
    pub weights: WeightVector,
}

impl MomentumSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Sample standard deviation (n - 1 denominator).
    pub fn std_dev(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        (self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    }
}

/// `M_t = sum_i w_i z_it`, matching columns of `w` to `z` by name.
pub fn momentum_series(
    match_id: &str,
    z: &StandardizedFrame,
    w: &WeightVector,
) -> Result<MomentumSeries, EwmError> {
    let idx = w
        .columns
        .iter()
        .map(|c| z.columns.iter().position(|zc| zc == c).ok_or_else(|| EwmError::ColumnMismatch(c.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let values = z
        .z
        .iter()
        .map(|row| idx.iter().zip(&w.weights).map(|(&j, wt)| wt * row[j]).sum::<f64>().clamp(0.0, 1.0))
        .collect();
    Ok(MomentumSeries { match_id: match_id.to_string(), values, weights: w.clone() })
}
