//! Per-match chain from point records to the model table: features,
//! entropy-weight momentum, tuned CUSUM change points and shift intensity.

use serde::{Deserialize, Serialize};

use crate::changepoint::{cusum_detect, tune_threshold, ChangePointSet, ChangepointError, CusumParams, CusumTrace, TuneConfig};
use crate::ewm::{entropy_weights, momentum_series, MomentumSeries, WeightVector, DEFAULT_EPSILON};
use crate::ingest::{derive_features, standardize, FeatureFrame, FeatureId, MatchData, StandardizedFrame};
use crate::model::{Dataset, BASE_FEATURES};
use crate::shift::{relative_distance, ShiftSeries};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Columns entering the momentum composite.
    pub features: Vec<FeatureId>,
    pub epsilon: f64,
    /// Drift as a multiple of the momentum standard deviation.
    pub drift_factor: f64,
    /// Absolute drift; overrides `drift_factor`.
    pub drift: Option<f64>,
    /// Fixed threshold; when absent the tuner targets `target_changepoints`.
    pub threshold: Option<f64>,
    pub target_changepoints: usize,
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            features: BASE_FEATURES.iter().map(|s| s.parse().expect("base features are valid")).collect(),
            epsilon: DEFAULT_EPSILON,
            drift_factor: 0.05,
            drift: None,
            threshold: None,
            target_changepoints: 40,
            tolerance: 0.01,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneSummary {
    pub target: usize,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchAnalysis {
    pub match_id: String,
    pub frame: FeatureFrame,
    pub standardized: StandardizedFrame,
    pub weights: WeightVector,
    pub momentum: MomentumSeries,
    pub params: CusumParams,
    pub trace: CusumTrace,
    pub changepoints: ChangePointSet,
    pub tuning: Option<TuneSummary>,
    pub shift: ShiftSeries,
}

/// Initial threshold for the tuner, in momentum standard deviations.
const INITIAL_THRESHOLD_SD: f64 = 4.0;

pub fn analyze_match(m: &MatchData, cfg: &PipelineConfig) -> Result<MatchAnalysis, Error> {
    let frame = derive_features(m)?;
    let standardized = standardize(&frame, &cfg.features);
    let weights = entropy_weights(&standardized, cfg.epsilon)?;
    let momentum = momentum_series(&m.match_id, &standardized, &weights)?;
    let sd = momentum.std_dev();
    let drift = cfg.drift.unwrap_or(cfg.drift_factor * sd);
    let base = CusumParams { drift, ..CusumParams::for_series(&momentum, 1.0) };
    let (params, trace, changepoints, tuning) = match cfg.threshold {
        Some(h) => {
            let params = CusumParams { threshold: h, ..base };
            let (trace, set) = cusum_detect(&momentum, &params)?;
            (params, trace, set, None)
        }
        None => {
            let tcfg = TuneConfig {
                target: cfg.target_changepoints,
                initial_threshold: INITIAL_THRESHOLD_SD * sd.max(f64::MIN_POSITIVE),
                tolerance: cfg.tolerance,
                max_iter: cfg.max_iter,
            };
            let out = match tune_threshold(&momentum, &base, &tcfg) {
                Ok(o) => o,
                // keep the closest count found
                Err(ChangepointError::NoConvergence { best, .. }) => *best,
                Err(e) => return Err(e.into()),
            };
            let summary = TuneSummary { target: tcfg.target, converged: out.converged, iterations: out.iterations };
            (CusumParams { threshold: out.threshold, ..base }, out.trace, out.set, Some(summary))
        }
    };
    let shift = relative_distance(&changepoints, momentum.len())?;
    Ok(MatchAnalysis {
        match_id: m.match_id.clone(),
        frame,
        standardized,
        weights,
        momentum,
        params,
        trace,
        changepoints,
        tuning,
        shift,
    })
}

impl MatchAnalysis {
    /// `x1..x16`, `M`, `CP`, `V` per point, labelled by Player 1 winning it.
    pub fn dataset(&self) -> Dataset {
        let mut columns: Vec<String> = FeatureId::all().map(|f| f.to_string()).collect();
        columns.extend(["M", "CP", "V"].map(String::from));
        let labels = self.changepoints.labels();
        let rows = self
            .frame
            .rows
            .iter()
            .enumerate()
            .map(|(t, r)| {
                let mut row = r.to_vec();
                row.extend([self.momentum.values[t], f64::from(labels[t]), self.shift.values[t]]);
                row
            })
            .collect();
        Dataset { columns, rows, labels: self.frame.outcome.clone() }
    }

    /// `t,M,upper,lower,CP,V` for plotting.
    pub fn series_csv(&self) -> String {
        let labels = self.changepoints.labels();
        let mut out = String::from("t,M,cusum_upper,cusum_lower,CP,V\n");
        for t in 0..self.momentum.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                t + 1,
                self.momentum.values[t],
                self.trace.upper[t],
                self.trace.lower[t],
                labels[t],
                self.shift.values[t]
            ));
        }
        out
    }
}

/// Analyzes every match and stacks the per-match tables.
pub fn pooled_dataset(matches: &[MatchData], cfg: &PipelineConfig) -> Result<Dataset, Error> {
    let parts = matches.iter().map(|m| analyze_match(m, cfg).map(|a| a.dataset())).collect::<Result<Vec<_>, _>>()?;
    Dataset::concat(&parts).ok_or(Error::Empty)
}
