//! Two-sided CUSUM change-point detection on a momentum series, plus the
//! multiplicative threshold tuner that targets a given number of change
//! points.

use serde::{Deserialize, Serialize};

use crate::ewm::MomentumSeries;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ChangepointError {
    #[error("momentum series is empty")]
    EmptySeries,
    #[error("invalid CUSUM parameters: {0}")]
    BadParams(String),
    #[error("threshold tuner did not reach the target within {max_iter} iterations")]
    NoConvergence { max_iter: usize, best: Box<TuneOutcome> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum Reference {
    /// Mean of the series being monitored.
    MatchMean,
    Supplied(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CusumParams {
    pub reference: Reference,
    pub drift: f64,
    pub threshold: f64,
    pub reset_after_detection: bool,
}

impl CusumParams {
    /// Match-mean reference and drift `0.05 * sd(M)`.
    pub fn for_series(m: &MomentumSeries, threshold: f64) -> Self {
        CusumParams {
            reference: Reference::MatchMean,
            drift: 0.05 * m.std_dev(),
            threshold,
            reset_after_detection: true,
        }
    }

    fn validate(&self) -> Result<(), ChangepointError> {
        if !(self.threshold > 0.0) || !self.threshold.is_finite() {
            return Err(ChangepointError::BadParams(format!("threshold must be > 0, got {}", self.threshold)));
        }
        if !(self.drift >= 0.0) {
            return Err(ChangepointError::BadParams(format!("drift must be >= 0, got {}", self.drift)));
        }
        Ok(())
    }
}

/// Upper and lower cumulative sums. Values at a detection are recorded
/// before the reset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CusumTrace {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangePoint {
    /// One-based point index.
    pub time: usize,
    /// `+1` favours Player 1, `-1` the opponent.
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangePointSet {
    pub len: usize,
    pub points: Vec<ChangePoint>,
}

impl ChangePointSet {
    pub fn new(len: usize, points: Vec<ChangePoint>) -> Self {
        ChangePointSet { len, points }
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn positives(&self) -> usize {
        self.points.iter().filter(|p| p.sign > 0).count()
    }

    pub fn negatives(&self) -> usize {
        self.points.iter().filter(|p| p.sign < 0).count()
    }

    /// `CP_t` for `t = 1..=len`.
    pub fn labels(&self) -> Vec<i8> {
        let mut out = vec![0; self.len];
        for p in &self.points {
            out[p.time - 1] = p.sign;
        }
        out
    }

    /// `D_1 = t_1`, `D_i = t_i - t_{i-1}`.
    pub fn durations(&self) -> Vec<usize> {
        let mut prev = 0;
        self.points
            .iter()
            .map(|p| {
                let d = p.time - prev;
                prev = p.time;
                d
            })
            .collect()
    }
}

/// Runs the two-sided CUSUM over `m`:
///
/// ```text
/// upper_t = max(0, upper_{t-1} + (M_t - mu) - d)
/// lower_t = min(0, lower_{t-1} + (M_t - mu) + d)
/// ```
///
/// `upper_t > h` is a positive change point, `lower_t < -h` a negative one.
pub fn cusum_detect(m: &MomentumSeries, p: &CusumParams) -> Result<(CusumTrace, ChangePointSet), ChangepointError> {
    cusum_on(&m.values, p)
}

/// [`cusum_detect`] on a bare slice.
pub fn cusum_on(values: &[f64], p: &CusumParams) -> Result<(CusumTrace, ChangePointSet), ChangepointError> {
    if values.is_empty() {
        return Err(ChangepointError::EmptySeries);
    }
    p.validate()?;
    let mu = match p.reference {
        // shifted by the first value so a constant series has an exact mean
        Reference::MatchMean => {
            let x0 = values[0];
            x0 + values.iter().map(|v| v - x0).sum::<f64>() / values.len() as f64
        }
        Reference::Supplied(mu) => mu,
    };
    let (h, d) = (p.threshold, p.drift);
    let mut trace = CusumTrace { upper: Vec::with_capacity(values.len()), lower: Vec::with_capacity(values.len()) };
    let mut points = Vec::new();
    let (mut up, mut lo) = (0.0f64, 0.0f64);
    for (i, &x) in values.iter().enumerate() {
        let dev = x - mu;
        up = (up + dev - d).max(0.0);
        lo = (lo + dev + d).min(0.0);
        trace.upper.push(up);
        trace.lower.push(lo);
        let pos = up > h;
        let neg = lo < -h;
        if pos || neg {
            let sign = if pos && (!neg || up - h >= -lo - h) { 1 } else { -1 };
            points.push(ChangePoint { time: i + 1, sign });
            if p.reset_after_detection {
                up = 0.0;
                lo = 0.0;
            }
        }
    }
    Ok((trace, ChangePointSet::new(values.len(), points)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneOutcome {
    pub threshold: f64,
    pub set: ChangePointSet,
    pub trace: CusumTrace,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuneConfig {
    pub target: usize,
    pub initial_threshold: f64,
    /// Relative tolerance on the count.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl TuneConfig {
    pub fn new(target: usize, initial_threshold: f64) -> Self {
        TuneConfig { target, initial_threshold, tolerance: 0.01, max_iter: 200 }
    }
}

/// Scales `h` up by 10% while too many change points are found and down by
/// 10% while too few. Once the count has been seen on both sides of the
/// target, every direction reversal halves the step, so the search settles on
/// a threshold inside the step function's target band when one exists. If the
/// band is skipped entirely, the step collapses and the closest count seen is
/// returned (ties to the larger threshold).
pub fn tune_threshold(
    m: &MomentumSeries,
    base: &CusumParams,
    cfg: &TuneConfig,
) -> Result<TuneOutcome, ChangepointError> {
    if cfg.target == 0 {
        return Err(ChangepointError::BadParams("target must be >= 1".into()));
    }
    if !(cfg.initial_threshold > 0.0) {
        return Err(ChangepointError::BadParams("initial threshold must be > 0".into()));
    }
    let target = cfg.target as f64;
    let band = cfg.tolerance * target;
    let mut h = cfg.initial_threshold;
    let mut step = 0.1;
    let mut last_dir = 0i8;
    let mut best: Option<(f64, TuneOutcome)> = None;

    for iter in 1..=cfg.max_iter {
        let params = CusumParams { threshold: h, ..*base };
        let (trace, set) = cusum_detect(m, &params)?;
        let count = set.count() as f64;
        let miss = (count - target).abs();
        let outcome = TuneOutcome { threshold: h, set, trace, converged: miss <= band, iterations: iter };
        let better = match &best {
            None => true,
            Some((b, o)) => miss < *b || (miss == *b && h > o.threshold),
        };
        if outcome.converged {
            return Ok(outcome);
        }
        if better {
            best = Some((miss, outcome));
        }
        let dir: i8 = if count > target { 1 } else { -1 };
        if last_dir != 0 && dir != last_dir {
            step *= 0.5;
        }
        last_dir = dir;
        if step < 1e-12 {
            let (_, o) = best.expect("at least one iteration ran");
            return Ok(TuneOutcome { iterations: iter, ..o });
        }
        h *= if dir > 0 { 1.0 + step } else { 1.0 - step };
    }
    let (_, o) = best.expect("max_iter >= 1");
    Err(ChangepointError::NoConvergence { max_iter: cfg.max_iter, best: Box::new(o) })
}
