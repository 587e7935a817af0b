//! Logistic regression, ROC/AUC, threshold metrics and stepwise selection
//! under the AUC criterion.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StatsError {
    #[error("only one class present in the labels")]
    SingleClass,
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),
    #[error("logistic fit did not converge in {iterations} iterations (gradient norm {gradient_norm:e})")]
    NonConvergence { iterations: usize, gradient_norm: f64 },
    #[error("length mismatch: {0} scores vs {1} labels")]
    LengthMismatch(usize, usize),
    #[error("no candidate features")]
    NoCandidates,
}

/// Coefficient norm at which a fit is declared separated and stopped.
pub const SEPARATION_NORM: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Standard errors `[intercept, slopes...]` from the inverse information.
    pub std_errors: Option<Vec<f64>>,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Set when the coefficient norm hit [`SEPARATION_NORM`].
    pub separated: bool,
}

impl LogisticModel {
    pub fn linear_predictor(&self, x: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(x).map(|(b, v)| b * v).sum::<f64>()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        sigmoid(self.linear_predictor(x))
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
pub fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn check_design(x: &[Vec<f64>], p: usize) -> Result<(), StatsError> {
    let n = x.len();
    if n < p + 2 {
        return Err(StatsError::DegenerateDesign(format!("{n} rows for {p} features")));
    }
    if x.iter().any(|r| r.len() != p) {
        return Err(StatsError::DegenerateDesign("ragged rows".into()));
    }
    for j in 0..p {
        if x.iter().all(|r| r[j] == x[0][j]) {
            return Err(StatsError::DegenerateDesign(format!("column {j} is constant")));
        }
        for k in j + 1..p {
            if x.iter().all(|r| r[j] == r[k]) {
                return Err(StatsError::DegenerateDesign(format!("columns {j} and {k} are identical")));
            }
        }
    }
    Ok(())
}

/// Bernoulli log-likelihood at `beta = [intercept, slopes...]`.
pub fn log_likelihood(x: &[Vec<f64>], y: &[bool], beta: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(row, &yi)| {
            let eta = beta[0] + row.iter().zip(&beta[1..]).map(|(a, b)| a * b).sum::<f64>();
            if yi {
                -softplus(-eta)
            } else {
                -softplus(eta)
            }
        })
        .sum()
}

/// Maximum-likelihood logistic regression with intercept, by damped Newton.
/// Convergence is declared when the gradient of the mean log-likelihood has
/// norm `<= tol`.
pub fn fit_logistic(x: &[Vec<f64>], y: &[bool], tol: f64, max_iter: usize) -> Result<LogisticModel, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let p = x.first().map_or(0, Vec::len);
    check_design(x, p)?;
    let n = x.len();
    let dim = p + 1;
    let design = DMatrix::from_fn(n, dim, |i, j| if j == 0 { 1.0 } else { x[i][j - 1] });
    let target = DVector::from_iterator(n, y.iter().map(|&b| if b { 1.0 } else { 0.0 }));
    let mut beta = DVector::<f64>::zeros(dim);
    let mut ll = log_likelihood(x, y, beta.as_slice());
    let mut separated = false;
    let mut grad_norm = f64::INFINITY;
    let mut iterations = 0;
    let mut hessian = DMatrix::<f64>::zeros(dim, dim);

    while iterations < max_iter {
        iterations += 1;
        let eta = &design * &beta;
        let mu = eta.map(sigmoid);
        let grad = design.transpose() * (&target - &mu);
        grad_norm = grad.norm() / n as f64;
        let w = mu.map(|m| (m * (1.0 - m)).max(1e-12));
        let xw = DMatrix::from_fn(n, dim, |i, j| design[(i, j)] * w[i]);
        hessian = design.transpose() * xw;
        if grad_norm <= tol {
            break;
        }
        let step = match hessian.clone().cholesky() {
            Some(c) => c.solve(&grad),
            None => {
                let ridge = &hessian + DMatrix::identity(dim, dim) * 1e-8 * (1.0 + hessian.diagonal().max());
                match ridge.cholesky() {
                    Some(c) => c.solve(&grad),
                    None => return Err(StatsError::DegenerateDesign("information matrix is singular".into())),
                }
            }
        };
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = &beta + &step * scale;
            let cand_ll = log_likelihood(x, y, cand.as_slice());
            if cand_ll >= ll - 1e-12 * ll.abs() {
                beta = cand;
                ll = cand_ll;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if beta.norm() > SEPARATION_NORM {
            beta *= SEPARATION_NORM / beta.norm();
            separated = true;
            break;
        }
        if !accepted {
            break;
        }
    }
    if !separated && grad_norm > tol {
        if grad_norm.is_finite() && grad_norm < tol.sqrt() && iterations < max_iter {
            // stalled on the likelihood's floating-point floor
        } else {
            return Err(StatsError::NonConvergence { iterations, gradient_norm: grad_norm });
        }
    }
    let std_errors = hessian
        .clone()
        .try_inverse()
        .map(|inv| (0..dim).map(|i| inv[(i, i)].max(0.0).sqrt()).collect());
    Ok(LogisticModel {
        intercept: beta[0],
        coefficients: beta.as_slice()[1..].to_vec(),
        std_errors: if separated { None } else { std_errors },
        iterations,
        gradient_norm: grad_norm,
        separated,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub auc: f64,
    /// `(false positive rate, true positive rate)` from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
}

fn class_counts(labels: &[bool]) -> Result<(usize, usize), StatsError> {
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(StatsError::SingleClass);
    }
    Ok((pos, neg))
}

/// Area under the ROC curve as the Mann-Whitney statistic (ties count 1/2),
/// plus the curve at every distinct score threshold.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<RocCurve, StatsError> {
    if scores.len() != labels.len() {
        return Err(StatsError::LengthMismatch(scores.len(), labels.len()));
    }
    let (pos, neg) = class_counts(labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    // sum over groups of tied scores, walking from the highest score down
    let mut area2 = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (mut gp, mut gn) = (0usize, 0usize);
        while i < order.len() && scores[order[i]].total_cmp(&s).is_eq() {
            if labels[order[i]] {
                gp += 1;
            } else {
                gn += 1;
            }
            i += 1;
        }
        // negatives in this group are beaten by all earlier positives and tie with gp
        area2 += gn as f64 * (2 * tp + gp) as f64;
        tp += gp;
        fp += gn;
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    Ok(RocCurve { auc: area2 / (2.0 * pos as f64 * neg as f64), points })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
    pub threshold: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Positive-class precision, recall and F1 at `score >= threshold`, plus AUC.
pub fn classification_metrics(scores: &[f64], labels: &[bool], threshold: f64) -> Result<MetricsReport, StatsError> {
    let roc = roc_auc(scores, labels)?;
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&s, &l) in scores.iter().zip(labels) {
        match (s >= threshold, l) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
    let recall = tp as f64 / (tp + fn_) as f64;
    Ok(MetricsReport { precision, recall, f1: f1_score(precision, recall), auc: roc.auc, threshold, tp, fp, tn, fn_ })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepAction {
    Added,
    Removed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionStep {
    pub action: StepAction,
    pub feature: String,
    pub features: Vec<String>,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub steps: Vec<SelectionStep>,
    pub selected: Vec<String>,
    pub auc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepwiseConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Out-of-fold AUC with this many folds instead of in-sample AUC.
    pub folds: Option<usize>,
    pub seed: u64,
}

impl Default for StepwiseConfig {
    fn default() -> Self {
        StepwiseConfig { tol: 1e-8, max_iter: 100, folds: None, seed: 0 }
    }
}

fn subset_rows(columns: &[(String, Vec<f64>)], set: &[usize], rows: &[usize]) -> Vec<Vec<f64>> {
    rows.iter().map(|&i| set.iter().map(|&j| columns[j].1[i]).collect()).collect()
}

/// AUC of the logistic model on `set`; `Ok(None)` when the design is
/// degenerate (such a set is never admissible).
fn set_auc(
    columns: &[(String, Vec<f64>)],
    y: &[bool],
    set: &[usize],
    cfg: &StepwiseConfig,
    folds: &[Vec<usize>],
) -> Result<Option<f64>, StatsError> {
    if set.is_empty() {
        return Ok(Some(0.5));
    }
    let n = y.len();
    let all: Vec<usize> = (0..n).collect();
    let mut scores = vec![0.0; n];
    let fit = |rows: &[usize]| {
        let x = subset_rows(columns, set, rows);
        let yy: Vec<bool> = rows.iter().map(|&i| y[i]).collect();
        fit_logistic(&x, &yy, cfg.tol, cfg.max_iter)
    };
    if folds.is_empty() {
        let model = match fit(&all) {
            Ok(m) => m,
            Err(StatsError::DegenerateDesign(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        for (i, s) in scores.iter_mut().enumerate() {
            *s = model.linear_predictor(&subset_rows(columns, set, &[i])[0]);
        }
    } else {
        for held in folds {
            let train: Vec<usize> = all.iter().copied().filter(|i| !held.contains(i)).collect();
            let model = match fit(&train) {
                Ok(m) => m,
                Err(StatsError::DegenerateDesign(_)) | Err(StatsError::SingleClass) => return Ok(None),
                Err(e) => return Err(e),
            };
            for &i in held {
                scores[i] = model.linear_predictor(&subset_rows(columns, set, &[i])[0]);
            }
        }
    }
    Ok(Some(roc_auc(&scores, y)?.auc))
}

fn best_by_auc(results: Vec<(usize, Option<f64>)>) -> Option<(usize, f64)> {
    // results arrive ordered by preference; strict `>` keeps the earliest on ties
    results.into_iter().fold(None, |best, (j, auc)| match (best, auc) {
        (_, None) => best,
        (None, Some(a)) => Some((j, a)),
        (Some((bj, ba)), Some(a)) => Some(if a > ba { (j, a) } else { (bj, ba) }),
    })
}

/// Forward-backward stepwise selection maximizing AUC.
///
/// Each forward step adds the candidate with the highest AUC if it beats the
/// current AUC. After an addition, included features whose removal raises
/// AUC are dropped one at a time. Ties go to the earlier candidate.
pub fn stepwise_select(
    columns: &[(String, Vec<f64>)],
    y: &[bool],
    candidates: &[usize],
    cfg: &StepwiseConfig,
) -> Result<SelectionTrace, StatsError> {
    if candidates.is_empty() {
        return Err(StatsError::NoCandidates);
    }
    class_counts(y)?;
    let folds: Vec<Vec<usize>> = match cfg.folds {
        Some(k) if k >= 2 => {
            let mut idx: Vec<usize> = (0..y.len()).collect();
            idx.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
            (0..k).map(|f| idx.iter().copied().skip(f).step_by(k).collect()).collect()
        }
        _ => Vec::new(),
    };
    let name = |j: usize| columns[j].0.clone();
    let mut set: Vec<usize> = Vec::new();
    let mut auc = 0.5;
    let mut steps = Vec::new();
    loop {
        let pool: Vec<usize> = candidates.iter().copied().filter(|c| !set.contains(c)).collect();
        let results = pool
            .par_iter()
            .map(|&c| {
                let mut trial = set.clone();
                trial.push(c);
                set_auc(columns, y, &trial, cfg, &folds).map(|a| (c, a))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let Some((add, add_auc)) = best_by_auc(results) else { break };
        if add_auc <= auc {
            break;
        }
        set.push(add);
        auc = add_auc;
        steps.push(SelectionStep {
            action: StepAction::Added,
            feature: name(add),
            features: set.iter().map(|&j| name(j)).collect(),
            auc,
        });
        loop {
            if set.len() < 2 {
                break;
            }
            let results = set
                .par_iter()
                .map(|&r| {
                    let trial: Vec<usize> = set.iter().copied().filter(|&j| j != r).collect();
                    set_auc(columns, y, &trial, cfg, &folds).map(|a| (r, a))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let Some((drop, drop_auc)) = best_by_auc(results) else { break };
            if drop_auc <= auc {
                break;
            }
            set.retain(|&j| j != drop);
            auc = drop_auc;
            steps.push(SelectionStep {
                action: StepAction::Removed,
                feature: name(drop),
                features: set.iter().map(|&j| name(j)).collect(),
                auc,
            });
        }
    }
    Ok(SelectionTrace { steps, selected: set.iter().map(|&j| name(j)).collect(), auc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auc_examples() {
        let labels = [false, false, true, true];
        assert_eq!(roc_auc(&[0.0, 0.0, 1.0, 1.0], &labels).unwrap().auc, 1.0);
        assert_eq!(roc_auc(&[0.3; 4], &labels).unwrap().auc, 0.5);
        assert_eq!(roc_auc(&[0.1, 0.4, 0.35, 0.8], &labels).unwrap().auc, 0.75);
        assert_eq!(roc_auc(&[0.1, 0.2], &[true, true]), Err(StatsError::SingleClass));
    }

    #[test]
    fn roc_curve_endpoints() {
        let c = roc_auc(&[0.1, 0.4, 0.35, 0.8], &[false, false, true, true]).unwrap();
        assert_eq!(c.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(c.points.last(), Some(&(1.0, 1.0)));
        assert_eq!(c.points.len(), 5);
    }

    #[test]
    fn metrics_examples() {
        let labels = [true, false, true, false];
        let m = classification_metrics(&[0.9, 0.1, 0.8, 0.2], &labels, 0.5).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        let m = classification_metrics(&[0.9; 4], &labels, 0.5).unwrap();
        assert_eq!((m.precision, m.recall), (0.5, 1.0));
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn confusion_arithmetic() {
        // TP = 6, FP = 3, FN = 4, TN = 7
        let mut scores = vec![0.9; 9];
        scores.extend([0.1; 11]);
        let mut labels = vec![true; 6];
        labels.extend([false; 3]);
        labels.extend([true; 4]);
        labels.extend([false; 7]);
        let m = classification_metrics(&scores, &labels, 0.5).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_, m.tn), (6, 3, 4, 7));
        assert!((m.precision - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.recall - 0.6).abs() < 1e-15);
        assert!((m.f1 - 0.631_578_947_368_421).abs() < 1e-12);
    }

    #[test]
    fn balanced_intercept_only() {
        // one weak noise column so the design is non-empty
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![((i * 7) % 5) as f64]).collect();
        let y: Vec<bool> = (0..40).map(|i| (i / 5) % 2 == 0).collect();
        let m = fit_logistic(&x, &y, 1e-10, 100).unwrap();
        assert!(!m.separated);
        assert!(m.intercept.abs() < 0.6);
        assert!(m.gradient_norm <= 1e-10);
    }

    #[test]
    fn separable_data_flags() {
        let x: Vec<Vec<f64>> = (-10..10).map(|i| vec![i as f64 + 0.5]).collect();
        let y: Vec<bool> = x.iter().map(|r| r[0] > 0.0).collect();
        let m = fit_logistic(&x, &y, 1e-8, 100).unwrap();
        assert!(m.separated);
        let scores: Vec<f64> = x.iter().map(|r| m.predict(r)).collect();
        assert_eq!(roc_auc(&scores, &y).unwrap().auc, 1.0);
    }

    #[test]
    fn degenerate_designs() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, i as f64]).collect();
        let y: Vec<bool> = (0..10).map(|i| i % 3 == 0).collect();
        assert!(matches!(fit_logistic(&x, &y, 1e-8, 50), Err(StatsError::DegenerateDesign(_))));
        let x: Vec<Vec<f64>> = (0..10).map(|_| vec![1.0]).collect();
        assert!(matches!(fit_logistic(&x, &y, 1e-8, 50), Err(StatsError::DegenerateDesign(_))));
        let x: Vec<Vec<f64>> = (0..2).map(|i| vec![i as f64]).collect();
        assert!(matches!(fit_logistic(&x, &y[..2], 1e-8, 50), Err(StatsError::DegenerateDesign(_))));
    }

    #[test]
    fn stepwise_picks_informative_first() {
        let y: Vec<bool> = (0..60).map(|i| (i * 13) % 7 < 3).collect();
        let noise: Vec<f64> = (0..60).map(|i| ((i * 31) % 11) as f64).collect();
        let signal: Vec<f64> = y.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let cols = vec![("noise".to_string(), noise), ("signal".to_string(), signal)];
        let t = stepwise_select(&cols, &y, &[0, 1], &StepwiseConfig::default()).unwrap();
        assert_eq!(t.steps[0].feature, "signal");
        assert_eq!(t.auc, 1.0);
        assert_eq!(t.selected, vec!["signal"]);
    }

    #[test]
    fn stepwise_kfold_runs() {
        let y: Vec<bool> = (0..80).map(|i| (i * 13) % 7 < 3).collect();
        let signal: Vec<f64> = y.iter().enumerate().map(|(i, &b)| f64::from(u8::from(b)) + (i % 3) as f64 * 0.3).collect();
        let cols = vec![("s".to_string(), signal)];
        let cfg = StepwiseConfig { folds: Some(4), ..Default::default() };
        let t = stepwise_select(&cols, &y, &[0], &cfg).unwrap();
        assert_eq!(t.selected, vec!["s"]);
        assert!(t.auc > 0.9);
    }
}
