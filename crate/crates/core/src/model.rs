//! Feed-forward network (tanh hidden layers, sigmoid output) trained by
//! PSO-seeded full-batch gradient descent, and the scenario comparison.
//!
//! Parameters are flattened layer by layer as `W` (out x in, row-major)
//! followed by `b`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::stats::{classification_metrics, sigmoid, softplus, MetricsReport, StatsError};

/// Version of the serialized [`TrainedNet`] document.
pub const TRAINED_NET_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("only one class present in the training rows")]
    SingleClass,
    #[error("training loss became non-finite")]
    NonFiniteLoss,
    #[error("empty batch")]
    EmptyBatch,
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("column `{0}` is not in the data set")]
    MissingColumn(String),
    #[error("unsupported trained-network version {0}")]
    UnsupportedVersion(u32),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetConfig {
    pub input_dim: usize,
    /// Sizes of the tanh hidden layers; the output layer is one sigmoid unit.
    pub hidden: Vec<usize>,
}

impl NetConfig {
    pub fn new(input_dim: usize, hidden: Vec<usize>) -> Result<Self, ModelError> {
        if input_dim == 0 || hidden.iter().any(|&h| h == 0) {
            return Err(ModelError::BadConfig("layer sizes must be >= 1".into()));
        }
        Ok(NetConfig { input_dim, hidden })
    }

    /// `(inputs, outputs)` of every layer including the output layer.
    pub fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::with_capacity(self.hidden.len() + 1);
        let mut prev = self.input_dim;
        for &h in self.hidden.iter().chain(std::iter::once(&1)) {
            dims.push((prev, h));
            prev = h;
        }
        dims
    }

    pub fn param_count(&self) -> usize {
        self.layer_dims().iter().map(|(i, o)| o * (i + 1)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub config: NetConfig,
    pub params: Vec<f64>,
}

/// Activations of every layer for one input; the last entry holds the logit.
fn forward_pass(dims: &[(usize, usize)], params: &[f64], x: &[f64], acts: &mut Vec<Vec<f64>>) -> f64 {
    acts.clear();
    acts.push(x.to_vec());
    let mut off = 0;
    let last = dims.len() - 1;
    for (l, &(n_in, n_out)) in dims.iter().enumerate() {
        let w = &params[off..off + n_in * n_out];
        let b = &params[off + n_in * n_out..off + n_in * n_out + n_out];
        off += n_out * (n_in + 1);
        let input = &acts[l];
        let out: Vec<f64> = (0..n_out)
            .map(|k| {
                let z = b[k] + w[k * n_in..(k + 1) * n_in].iter().zip(input).map(|(a, v)| a * v).sum::<f64>();
                if l == last {
                    z
                } else {
                    z.tanh()
                }
            })
            .collect();
        acts.push(out);
    }
    acts[dims.len()][0]
}

fn mean_loss(dims: &[(usize, usize)], params: &[f64], x: &[Vec<f64>], y: &[bool]) -> f64 {
    let mut acts = Vec::new();
    let total: f64 = x
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let z = forward_pass(dims, params, row, &mut acts);
            if yi {
                softplus(-z)
            } else {
                softplus(z)
            }
        })
        .sum();
    total / x.len() as f64
}

fn mean_gradient(dims: &[(usize, usize)], params: &[f64], x: &[Vec<f64>], y: &[bool]) -> Vec<f64> {
    let mut grad = vec![0.0; params.len()];
    let mut acts = Vec::new();
    let offsets: Vec<usize> = dims
        .iter()
        .scan(0, |off, &(i, o)| {
            let start = *off;
            *off += o * (i + 1);
            Some(start)
        })
        .collect();
    let scale = 1.0 / x.len() as f64;
    for (row, &yi) in x.iter().zip(y) {
        let z = forward_pass(dims, params, row, &mut acts);
        // d loss / d logit for the sigmoid + cross-entropy pair
        let mut delta = vec![(sigmoid(z) - f64::from(u8::from(yi))) * scale];
        for l in (0..dims.len()).rev() {
            let (n_in, n_out) = dims[l];
            let off = offsets[l];
            let input = &acts[l];
            for k in 0..n_out {
                for j in 0..n_in {
                    grad[off + k * n_in + j] += delta[k] * input[j];
                }
                grad[off + n_in * n_out + k] += delta[k];
            }
            if l > 0 {
                let w = &params[off..off + n_in * n_out];
                delta = (0..n_in)
                    .map(|j| {
                        let back: f64 = (0..n_out).map(|k| w[k * n_in + j] * delta[k]).sum();
                        back * (1.0 - input[j] * input[j])
                    })
                    .collect();
            }
        }
    }
    grad
}

impl Network {
    pub fn new(config: NetConfig, params: Vec<f64>) -> Result<Self, ModelError> {
        let expected = config.param_count();
        if params.len() != expected {
            return Err(ModelError::DimMismatch { expected, got: params.len() });
        }
        Ok(Network { config, params })
    }

    pub fn zeros(config: NetConfig) -> Self {
        let n = config.param_count();
        Network { config, params: vec![0.0; n] }
    }

    fn check_input(&self, x: &[f64]) -> Result<(), ModelError> {
        if x.len() != self.config.input_dim {
            return Err(ModelError::DimMismatch { expected: self.config.input_dim, got: x.len() });
        }
        Ok(())
    }

    fn check_batch(&self, x: &[Vec<f64>], y: &[bool]) -> Result<(), ModelError> {
        if x.is_empty() {
            return Err(ModelError::EmptyBatch);
        }
        if x.len() != y.len() {
            return Err(ModelError::DimMismatch { expected: x.len(), got: y.len() });
        }
        x.iter().try_for_each(|r| self.check_input(r))
    }

    pub fn logit(&self, x: &[f64]) -> Result<f64, ModelError> {
        self.check_input(x)?;
        Ok(forward_pass(&self.config.layer_dims(), &self.params, x, &mut Vec::new()))
    }

    /// Output probability in `(0, 1)`.
    pub fn forward(&self, x: &[f64]) -> Result<f64, ModelError> {
        self.logit(x).map(sigmoid)
    }

    /// Mean binary cross-entropy over the batch.
    pub fn loss(&self, x: &[Vec<f64>], y: &[bool]) -> Result<f64, ModelError> {
        self.check_batch(x, y)?;
        Ok(mean_loss(&self.config.layer_dims(), &self.params, x, y))
    }

    /// Exact gradient of [`Network::loss`] with respect to the flat parameters.
    pub fn gradient(&self, x: &[Vec<f64>], y: &[bool]) -> Result<Vec<f64>, ModelError> {
        self.check_batch(x, y)?;
        Ok(mean_gradient(&self.config.layer_dims(), &self.params, x, y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub swarm: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub c1: f64,
    pub c2: f64,
    pub lower: f64,
    pub upper: f64,
    pub velocity_clamp: f64,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            swarm: 30,
            iterations: 100,
            inertia: 0.7,
            c1: 1.5,
            c2: 1.5,
            lower: -3.0,
            upper: 3.0,
            velocity_clamp: 1.0,
            seed: 0,
        }
    }
}

impl PsoConfig {
    fn validate(&self, dim: usize) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::BadConfig(m.into()));
        if dim == 0 {
            return bad("dimension must be >= 1");
        }
        if self.swarm < 2 {
            return bad("swarm must be >= 2");
        }
        if !(0.0..=1.0).contains(&self.inertia) {
            return bad("inertia must be in [0, 1]");
        }
        if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
            return bad("c1 and c2 must be >= 0");
        }
        if !(self.lower < self.upper) || !self.lower.is_finite() || !self.upper.is_finite() {
            return bad("bounds must satisfy lower < upper");
        }
        if !(self.velocity_clamp > 0.0) {
            return bad("velocity clamp must be > 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoResult {
    pub best_position: Vec<f64>,
    pub best_value: f64,
    /// Global best after initialization and after every iteration.
    pub trace: Vec<f64>,
}

fn fitness(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Particle swarm minimization:
///
/// ```text
/// v <- w v + c1 r1 (p_best - p) + c2 r2 (g_best - p)
/// p <- p + v
/// ```
///
/// with fresh uniform `r1, r2` per particle, iteration and dimension,
/// velocities clamped to `+-velocity_clamp` and positions clipped to the
/// bounds. Random numbers are drawn serially; only objective evaluations run
/// in parallel, so the result depends on the seed alone.
pub fn pso_optimize<F>(objective: F, dim: usize, cfg: &PsoConfig) -> Result<PsoResult, ModelError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let vmax = cfg.velocity_clamp;
    let mut pos: Vec<Vec<f64>> =
        (0..cfg.swarm).map(|_| (0..dim).map(|_| rng.gen_range(cfg.lower..=cfg.upper)).collect()).collect();
    let mut vel: Vec<Vec<f64>> =
        (0..cfg.swarm).map(|_| (0..dim).map(|_| rng.gen_range(-vmax..=vmax)).collect()).collect();
    let eval = |pos: &Vec<Vec<f64>>| -> Vec<f64> { pos.par_iter().map(|p| fitness(objective(p))).collect() };

    let mut pbest = pos.clone();
    let mut pbest_val = eval(&pos);
    let argmin = |vals: &[f64]| {
        vals.iter().enumerate().fold(0, |b, (i, &v)| if v < vals[b] { i } else { b })
    };
    let mut g = argmin(&pbest_val);
    let mut gbest = pbest[g].clone();
    let mut gbest_val = pbest_val[g];
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    trace.push(gbest_val);

    for _ in 0..cfg.iterations {
        for i in 0..cfg.swarm {
            for d in 0..dim {
                let r1: f64 = rng.gen();
                let r2: f64 = rng.gen();
                let v = cfg.inertia * vel[i][d]
                    + cfg.c1 * r1 * (pbest[i][d] - pos[i][d])
                    + cfg.c2 * r2 * (gbest[d] - pos[i][d]);
                vel[i][d] = v.clamp(-vmax, vmax);
                pos[i][d] = (pos[i][d] + vel[i][d]).clamp(cfg.lower, cfg.upper);
            }
        }
        let vals = eval(&pos);
        for i in 0..cfg.swarm {
            if vals[i] < pbest_val[i] {
                pbest_val[i] = vals[i];
                pbest[i].clone_from(&pos[i]);
            }
        }
        g = argmin(&pbest_val);
        if pbest_val[g] < gbest_val {
            gbest_val = pbest_val[g];
            gbest.clone_from(&pbest[g]);
        }
        trace.push(gbest_val);
    }
    Ok(PsoResult { best_position: gbest, best_value: gbest_val, trace })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BpConfig {
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig { learning_rate: 0.05, epochs: 500 }
    }
}

/// Per-column min/max learned from training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let width = rows.first().map_or(0, Vec::len);
        let mut min = vec![f64::INFINITY; width];
        let mut max = vec![f64::NEG_INFINITY; width];
        for r in rows {
            for j in 0..width {
                min[j] = min[j].min(r[j]);
                max[j] = max[j].max(r[j]);
            }
        }
        MinMaxScaler { min, max }
    }

    /// Scaled row, clipped to `[-0.5, 1.5]`; constant columns map to 0.
    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(j, &v)| {
                let span = self.max[j] - self.min[j];
                if span > 0.0 {
                    ((v - self.min[j]) / span).clamp(-0.5, 1.5)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingHistory {
    /// PSO global best loss after initialization and every iteration.
    pub pso_best: Vec<f64>,
    /// Training loss after every gradient epoch.
    pub bp_loss: Vec<f64>,
    /// Loss of the returned parameters.
    pub final_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedNet {
    pub version: u32,
    pub features: Vec<String>,
    pub network: Network,
    pub scaler: MinMaxScaler,
    pub history: TrainingHistory,
    pub pso: PsoConfig,
    pub bp: BpConfig,
    pub seed: u64,
}

impl TrainedNet {
    /// Probability for a raw (unscaled) feature row.
    pub fn predict(&self, x: &[f64]) -> Result<f64, ModelError> {
        if x.len() != self.scaler.min.len() {
            return Err(ModelError::DimMismatch { expected: self.scaler.min.len(), got: x.len() });
        }
        self.network.forward(&self.scaler.transform(x))
    }

    pub fn predict_all(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>, ModelError> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trained net serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ModelError> {
        let net: TrainedNet = serde_json::from_str(s).map_err(|e| ModelError::BadConfig(e.to_string()))?;
        if net.version != TRAINED_NET_VERSION {
            return Err(ModelError::UnsupportedVersion(net.version));
        }
        Network::new(net.network.config.clone(), net.network.params.clone())?;
        Ok(net)
    }
}

/// PSO over the parameter space minimizes training cross-entropy; the
/// global best seeds full-batch gradient descent. The parameters with the
/// lowest training loss seen in either phase are kept, so the final loss
/// never exceeds the PSO best.
pub fn train_bp_pso(
    x: &[Vec<f64>],
    y: &[bool],
    features: Vec<String>,
    hidden: &[usize],
    pso: &PsoConfig,
    bp: &BpConfig,
) -> Result<TrainedNet, ModelError> {
    if x.is_empty() {
        return Err(ModelError::EmptyBatch);
    }
    if x.len() != y.len() {
        return Err(ModelError::DimMismatch { expected: x.len(), got: y.len() });
    }
    let width = x[0].len();
    if features.len() != width {
        return Err(ModelError::DimMismatch { expected: width, got: features.len() });
    }
    if y.iter().all(|&v| v) || y.iter().all(|&v| !v) {
        return Err(ModelError::SingleClass);
    }
    let config = NetConfig::new(width, hidden.to_vec())?;
    let scaler = MinMaxScaler::fit(x);
    let xs: Vec<Vec<f64>> = x.iter().map(|r| scaler.transform(r)).collect();
    let dims = config.layer_dims();

    let swarm = pso_optimize(|p| mean_loss(&dims, p, &xs, y), config.param_count(), pso)?;
    if !swarm.best_value.is_finite() {
        return Err(ModelError::NonFiniteLoss);
    }
    let mut params = swarm.best_position.clone();
    let mut best = (swarm.best_value, params.clone());
    let mut bp_loss = Vec::with_capacity(bp.epochs);
    for _ in 0..bp.epochs {
        let g = mean_gradient(&dims, &params, &xs, y);
        for (p, gi) in params.iter_mut().zip(&g) {
            *p -= bp.learning_rate * gi;
        }
        let l = mean_loss(&dims, &params, &xs, y);
        if !l.is_finite() {
            break;
        }
        bp_loss.push(l);
        if l < best.0 {
            best = (l, params.clone());
        }
    }
    Ok(TrainedNet {
        version: TRAINED_NET_VERSION,
        features,
        network: Network::new(config, best.1)?,
        scaler,
        history: TrainingHistory { pso_best: swarm.trace, bp_loss, final_loss: best.0 },
        pso: *pso,
        bp: *bp,
        seed: pso.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// Random split within each class.
    #[default]
    Stratified,
    /// First rows train, last rows test.
    Chronological,
}

/// Train/test row indices (each sorted) with `ratio` of the rows training.
pub fn split_indices(labels: &[bool], ratio: f64, seed: u64, mode: SplitMode) -> (Vec<usize>, Vec<usize>) {
    let n = labels.len();
    match mode {
        SplitMode::Chronological => {
            let cut = ((n as f64) * ratio).round() as usize;
            ((0..cut).collect(), (cut..n).collect())
        }
        SplitMode::Stratified => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (mut train, mut test) = (Vec::new(), Vec::new());
            for class in [false, true] {
                let mut idx: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
                idx.shuffle(&mut rng);
                let mut cut = ((idx.len() as f64) * ratio).round() as usize;
                if idx.len() >= 2 {
                    cut = cut.clamp(1, idx.len() - 1);
                }
                train.extend_from_slice(&idx[..cut]);
                test.extend_from_slice(&idx[cut..]);
            }
            train.sort_unstable();
            test.sort_unstable();
            (train, test)
        }
    }
}

/// Named numeric columns with one binary label per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows restricted to `names` (in that order) for the given row indices.
    pub fn select(&self, names: &[String], rows: &[usize]) -> Result<Vec<Vec<f64>>, ModelError> {
        let idx = names
            .iter()
            .map(|n| self.columns.iter().position(|c| c == n).ok_or_else(|| ModelError::MissingColumn(n.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(rows.iter().map(|&r| idx.iter().map(|&j| self.rows[r][j]).collect()).collect())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Stacks data sets with identical columns.
    pub fn concat(parts: &[Dataset]) -> Option<Dataset> {
        let first = parts.first()?;
        if parts.iter().any(|p| p.columns != first.columns) {
            return None;
        }
        Some(Dataset {
            columns: first.columns.clone(),
            rows: parts.iter().flat_map(|p| p.rows.iter().cloned()).collect(),
            labels: parts.iter().flat_map(|p| p.labels.iter().copied()).collect(),
        })
    }
}

/// The six selected point features.
pub const BASE_FEATURES: [&str; 6] = ["x3", "x4", "x6", "x7", "x9", "x10"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "Base")]
    Base,
    #[serde(rename = "Base+M")]
    BaseM,
    #[serde(rename = "Base+M+CP")]
    BaseMCp,
    #[serde(rename = "Base+M+CP+V")]
    BaseMCpV,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::Base, Scenario::BaseM, Scenario::BaseMCp, Scenario::BaseMCpV];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Base => "Base",
            Scenario::BaseM => "Base+M",
            Scenario::BaseMCp => "Base+M+CP",
            Scenario::BaseMCpV => "Base+M+CP+V",
        }
    }

    pub fn columns(self) -> Vec<String> {
        let extra: &[&str] = match self {
            Scenario::Base => &[],
            Scenario::BaseM => &["M"],
            Scenario::BaseMCp => &["M", "CP"],
            Scenario::BaseMCpV => &["M", "CP", "V"],
        };
        BASE_FEATURES.iter().chain(extra).map(|s| s.to_string()).collect()
    }

    pub fn spec(self) -> ScenarioSpec {
        ScenarioSpec { name: self.name().to_string(), columns: self.columns() }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        let key = s.trim().to_ascii_lowercase().replace(' ', "");
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name().to_ascii_lowercase() == key)
            .ok_or_else(|| ModelError::BadConfig(format!("unknown scenario `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub ratio: f64,
    pub seeds: Vec<u64>,
    pub hidden: Vec<usize>,
    pub pso: PsoConfig,
    pub bp: BpConfig,
    pub split: SplitMode,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            ratio: 0.8,
            seeds: vec![1, 2, 3, 4, 5],
            hidden: vec![8],
            pso: PsoConfig::default(),
            bp: BpConfig::default(),
            split: SplitMode::Stratified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRun {
    pub scenario: String,
    pub seed: u64,
    pub metrics: MetricsReport,
    pub roc: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub scenario: String,
    pub columns: Vec<String>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
    pub auc_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub rows: Vec<ScenarioRow>,
    pub runs: Vec<ScenarioRun>,
}

impl ScenarioReport {
    pub fn row(&self, scenario: &str) -> Option<&ScenarioRow> {
        self.rows.iter().find(|r| r.scenario == scenario)
    }

    /// Metrics table as CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scenario,precision,recall,f1,auc,auc_sd\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.6},{:.6},{:.6},{:.6},{:.6}\n", r.scenario, r.precision, r.recall, r.f1, r.auc, r.auc_sd));
        }
        out
    }
}

/// Trains and evaluates every scenario on one shared split per seed and
/// averages the test metrics over seeds.
pub fn scenario_matrix(
    data: &Dataset,
    scenarios: &[ScenarioSpec],
    cfg: &ScenarioConfig,
) -> Result<ScenarioReport, ModelError> {
    if scenarios.is_empty() || cfg.seeds.is_empty() {
        return Err(ModelError::BadConfig("need at least one scenario and one seed".into()));
    }
    if !(cfg.ratio > 0.0 && cfg.ratio < 1.0) {
        return Err(ModelError::BadConfig(format!("split ratio must be in (0, 1), got {}", cfg.ratio)));
    }
    for s in scenarios {
        data.select(&s.columns, &[])?;
    }
    let jobs: Vec<(u64, &ScenarioSpec)> =
        cfg.seeds.iter().flat_map(|&seed| scenarios.iter().map(move |s| (seed, s))).collect();
    let runs = jobs
        .par_iter()
        .map(|&(seed, spec)| {
            let (train, test) = split_indices(&data.labels, cfg.ratio, seed, cfg.split);
            let xtr = data.select(&spec.columns, &train)?;
            let ytr: Vec<bool> = train.iter().map(|&i| data.labels[i]).collect();
            let xte = data.select(&spec.columns, &test)?;
            let yte: Vec<bool> = test.iter().map(|&i| data.labels[i]).collect();
            let pso = PsoConfig { seed, ..cfg.pso };
            let net = train_bp_pso(&xtr, &ytr, spec.columns.clone(), &cfg.hidden, &pso, &cfg.bp)?;
            let scores = net.predict_all(&xte)?;
            let metrics = classification_metrics(&scores, &yte, 0.5)?;
            let roc = crate::stats::roc_auc(&scores, &yte)?.points;
            Ok(ScenarioRun { scenario: spec.name.clone(), seed, metrics, roc })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;

    let rows = scenarios
        .iter()
        .map(|spec| {
            let mine: Vec<&ScenarioRun> = runs.iter().filter(|r| r.scenario == spec.name).collect();
            let n = mine.len() as f64;
            let mean = |f: fn(&MetricsReport) -> f64| mine.iter().map(|r| f(&r.metrics)).sum::<f64>() / n;
            let auc = mean(|m| m.auc);
            let auc_sd = if mine.len() > 1 {
                (mine.iter().map(|r| (r.metrics.auc - auc).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            ScenarioRow {
                scenario: spec.name.clone(),
                columns: spec.columns.clone(),
                precision: mean(|m| m.precision),
                recall: mean(|m| m.recall),
                f1: mean(|m| m.f1),
                auc,
                auc_sd,
            }
        })
        .collect();
    Ok(ScenarioReport { rows, runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_net() -> Network {
        // 1-2-1: W1 = [0.5, -1.0], b1 = [0.1, 0.2], W2 = [2.0, 1.0], b2 = -0.3
        Network::new(NetConfig::new(1, vec![2]).unwrap(), vec![0.5, -1.0, 0.1, 0.2, 2.0, 1.0, -0.3]).unwrap()
    }

    #[test]
    fn zero_net_outputs_half() {
        let net = Network::zeros(NetConfig::new(3, vec![4]).unwrap());
        assert_eq!(net.forward(&[1.0, -2.0, 7.0]).unwrap(), 0.5);
    }

    #[test]
    fn saturated_output_bias() {
        let mut net = Network::zeros(NetConfig::new(2, vec![3]).unwrap());
        *net.params.last_mut().unwrap() = 50.0;
        assert!((net.forward(&[0.3, 0.1]).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tiny_net_by_hand() {
        let x = 0.8;
        let h1 = (0.5 * x + 0.1f64).tanh();
        let h2 = (-1.0 * x + 0.2f64).tanh();
        let expected = 1.0 / (1.0 + (-(2.0 * h1 + 1.0 * h2 - 0.3f64)).exp());
        assert!((tiny_net().forward(&[x]).unwrap() - expected).abs() < 1e-15);
        assert_eq!(tiny_net().config.param_count(), 7);
    }

    #[test]
    fn dimension_checks() {
        let net = tiny_net();
        assert_eq!(net.forward(&[1.0, 2.0]), Err(ModelError::DimMismatch { expected: 1, got: 2 }));
        assert_eq!(net.gradient(&[], &[]), Err(ModelError::EmptyBatch));
        assert!(Network::new(NetConfig::new(1, vec![2]).unwrap(), vec![0.0; 6]).is_err());
    }

    #[test]
    fn duplicated_rows_same_gradient() {
        let net = tiny_net();
        let x = vec![vec![0.3], vec![-0.7]];
        let y = vec![true, false];
        let g1 = net.gradient(&x, &y).unwrap();
        let x2: Vec<Vec<f64>> = x.iter().chain(&x).cloned().collect();
        let y2: Vec<bool> = y.iter().chain(&y).copied().collect();
        let g2 = net.gradient(&x2, &y2).unwrap();
        for (a, b) in g1.iter().zip(&g2) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn frozen_swarm_keeps_initial_best() {
        let cfg = PsoConfig { inertia: 0.0, c1: 0.0, c2: 0.0, iterations: 20, ..Default::default() };
        let r = pso_optimize(|p| p.iter().map(|v| v * v).sum(), 3, &cfg).unwrap();
        assert!(r.trace.iter().all(|&v| v == r.trace[0]));
    }

    #[test]
    fn pso_one_dimensional_parabola() {
        let cfg = PsoConfig { lower: -10.0, upper: 10.0, seed: 4, ..Default::default() };
        let r = pso_optimize(|p| (p[0] - 3.0).powi(2), 1, &cfg).unwrap();
        assert!((r.best_position[0] - 3.0).abs() < 1e-2);
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn pso_nan_is_worst() {
        let cfg = PsoConfig { seed: 2, ..Default::default() };
        let r = pso_optimize(|p| if p[0] > 0.0 { f64::NAN } else { -p[0] }, 1, &cfg).unwrap();
        assert!(r.best_value.is_finite());
    }

    #[test]
    fn pso_config_checks() {
        let bad = PsoConfig { swarm: 1, ..Default::default() };
        assert!(matches!(pso_optimize(|_| 0.0, 1, &bad), Err(ModelError::BadConfig(_))));
        assert!(matches!(pso_optimize(|_| 0.0, 0, &PsoConfig::default()), Err(ModelError::BadConfig(_))));
    }

    #[test]
    fn stratified_split_keeps_class_ratio() {
        let labels: Vec<bool> = (0..100).map(|i| i % 4 == 0).collect();
        let (train, test) = split_indices(&labels, 0.8, 9, SplitMode::Stratified);
        assert_eq!(train.len() + test.len(), 100);
        assert_eq!(train.iter().filter(|&&i| labels[i]).count(), 20);
        assert_eq!(test.iter().filter(|&&i| labels[i]).count(), 5);
        assert_eq!(split_indices(&labels, 0.8, 9, SplitMode::Stratified), (train, test));
        let (a, b) = split_indices(&labels, 0.8, 0, SplitMode::Chronological);
        assert_eq!((a.len(), b[0]), (80, 80));
    }

    #[test]
    fn scaler_uses_training_rows() {
        let s = MinMaxScaler::fit(&[vec![0.0, 5.0], vec![10.0, 5.0]]);
        assert_eq!(s.transform(&[5.0, 7.0]), vec![0.5, 0.0]);
        assert_eq!(s.transform(&[30.0, 1.0]), vec![1.5, 0.0]);
        assert_eq!(s.transform(&[-30.0, 1.0]), vec![-0.5, 0.0]);
    }

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        assert_eq!(Scenario::BaseMCpV.columns().len(), 9);
        assert!("Base+X".parse::<Scenario>().is_err());
    }

    #[test]
    fn trained_net_json_round_trip() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let y: Vec<bool> = (0..20).map(|i| i >= 10).collect();
        let pso = PsoConfig { swarm: 5, iterations: 5, ..Default::default() };
        let bp = BpConfig { epochs: 10, ..Default::default() };
        let net = train_bp_pso(&x, &y, vec!["a".into(), "b".into()], &[3], &pso, &bp).unwrap();
        let back = TrainedNet::from_json(&net.to_json()).unwrap();
        assert_eq!(back, net);
        assert!(net.history.final_loss <= *net.history.pso_best.last().unwrap());
        let mut bad = net.clone();
        bad.version = 99;
        assert_eq!(TrainedNet::from_json(&bad.to_json()), Err(ModelError::UnsupportedVersion(99)));
    }
}
