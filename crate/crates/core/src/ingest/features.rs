use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::record::{MatchData, Player};
use super::IngestError;

pub const FEATURE_COUNT: usize = 16;

/// Index of an engineered feature, `x1` ..= `x16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FeatureId(u8);

impl FeatureId {
    pub fn new(n: u8) -> Result<Self, IngestError> {
        if (1..=FEATURE_COUNT as u8).contains(&n) {
            Ok(FeatureId(n))
        } else {
            Err(IngestError::UnknownColumn(format!("x{n}")))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn all() -> impl Iterator<Item = FeatureId> {
        (1..=FEATURE_COUNT as u8).map(FeatureId)
    }

    /// Short description of the column.
    pub fn describe(self) -> &'static str {
        match self.0 {
            1 => "games won by player 1 in current set",
            2 => "score difference (ordinal) player 1 - player 2",
            3 => "player 1 serving a first serve",
            4 => "player 1 score >= player 2 score",
            5 => "sets won difference",
            6 => "player 1 ace",
            7 => "player 1 winner",
            8 => "player 1 double fault",
            9 => "player 1 unforced error",
            10 => "cumulative net points won ratio",
            11 => "cumulative break points won ratio",
            12 => "cumulative distance run by player 1",
            13 => "distance run in last three points",
            14 => "distance run in current point",
            15 => "ball speed",
            16 => "ball speed x serve number",
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl FromStr for FeatureId {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, IngestError> {
        let t = s.trim();
        t.strip_prefix('x')
            .or_else(|| t.strip_prefix('X'))
            .and_then(|n| n.parse::<u8>().ok())
            .ok_or_else(|| IngestError::UnknownColumn(t.to_string()))
            .and_then(FeatureId::new)
    }
}

impl TryFrom<String> for FeatureId {
    type Error = IngestError;
    fn try_from(s: String) -> Result<Self, IngestError> {
        s.parse()
    }
}

impl From<FeatureId> for String {
    fn from(id: FeatureId) -> String {
        id.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Larger is better for Player 1.
    Positive,
    /// Smaller is better for Player 1.
    Negative,
}

/// Default orientation: double faults and unforced errors are negative.
pub fn default_orientation(id: FeatureId) -> Orientation {
    match id.number() {
        8 | 9 => Orientation::Negative,
        _ => Orientation::Positive,
    }
}

/// A cell filled by match-median imputation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Imputed {
    pub feature: FeatureId,
    /// Zero-based point index.
    pub point: usize,
}

/// Engineered per-point features for one match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureFrame {
    pub match_id: String,
    /// `rows[t][i]` is feature `x{i+1}` at point `t`.
    pub rows: Vec<[f64; FEATURE_COUNT]>,
    /// `true` when Player 1 won the point.
    pub outcome: Vec<bool>,
    pub orientation: [Orientation; FEATURE_COUNT],
    pub imputed: Vec<Imputed>,
}

impl FeatureFrame {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, id: FeatureId) -> Vec<f64> {
        self.rows.iter().map(|r| r[id.index()]).collect()
    }

    pub fn outcome_f64(&self) -> Vec<f64> {
        self.outcome.iter().map(|&w| if w { 1.0 } else { 0.0 }).collect()
    }

    /// Column-named CSV: `point,x1..x16,outcome`.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), IngestError> {
        let mut w = csv::Writer::from_writer(sink);
        let mut header = vec!["point".to_string()];
        header.extend(FeatureId::all().map(|f| f.to_string()));
        header.push("outcome".into());
        w.write_record(&header)?;
        for (t, row) in self.rows.iter().enumerate() {
            let mut rec = vec![(t + 1).to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            rec.push(u8::from(self.outcome[t]).to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 { values[n / 2] } else { 0.5 * (values[n / 2 - 1] + values[n / 2]) })
}

/// Fills missing cells with the median of the observed ones. Every source of
/// a missing cell is reported against `feature`.
fn impute(
    raw: &[Option<f64>],
    feature: FeatureId,
    imputed: &mut Vec<Imputed>,
) -> Result<Vec<f64>, IngestError> {
    let mut observed: Vec<f64> = raw.iter().flatten().copied().collect();
    let fill = median(&mut observed);
    raw.iter()
        .enumerate()
        .map(|(t, v)| match (v, fill) {
            (Some(x), _) => Ok(*x),
            (None, Some(m)) => {
                imputed.push(Imputed { feature, point: t });
                Ok(m)
            }
            (None, None) => Err(IngestError::MissingRequired { feature, point: t + 1 }),
        })
        .collect()
}

fn ratio(num: u32, den: u32) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Derives `x1..x16` for every point of a match.
pub fn derive_features(m: &MatchData) -> Result<FeatureFrame, IngestError> {
    if m.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    if let Err(i) = m.check_order() {
        return Err(IngestError::OutOfOrder { match_id: m.match_id.clone(), point: i + 1 });
    }
    let f = |n| FeatureId::new(n).unwrap();
    let mut imputed = Vec::new();
    let dist_raw: Vec<Option<f64>> = m.points.iter().map(|p| p.p1_distance_run).collect();
    let speed_raw: Vec<Option<f64>> = m.points.iter().map(|p| p.ball_speed).collect();
    let dist = impute(&dist_raw, f(14), &mut imputed)?;
    let speed = impute(&speed_raw, f(15), &mut imputed)?;

    let mut rows = Vec::with_capacity(m.len());
    let (mut net, mut net_won, mut bp, mut bp_won) = (0u32, 0u32, 0u32, 0u32);
    let (mut sets1, mut sets2) = (0i32, 0i32);
    let mut total_dist = 0.0;
    for (t, p) in m.points.iter().enumerate() {
        let s1 = p.p1_score.ordinal();
        let s2 = p.p2_score.ordinal();
        net += u32::from(p.p1.net_pt);
        net_won += u32::from(p.p1.net_pt_won);
        bp += u32::from(p.p1.break_pt);
        bp_won += u32::from(p.p1.break_pt_won);
        total_dist += dist[t];
        let last3: f64 = dist[t.saturating_sub(2)..=t].iter().sum();
        let mut row = [0.0; FEATURE_COUNT];
        row[0] = p.p1_games as f64;
        row[1] = s1 - s2;
        row[2] = f64::from(u8::from(p.server == Player::One && p.serve_no == 1));
        row[3] = f64::from(u8::from(s1 >= s2));
        row[4] = (sets1 - sets2) as f64;
        row[5] = f64::from(u8::from(p.p1.ace));
        row[6] = f64::from(u8::from(p.p1.winner));
        row[7] = f64::from(u8::from(p.p1.double_fault));
        row[8] = f64::from(u8::from(p.p1.unf_err));
        row[9] = ratio(net_won, net);
        row[10] = ratio(bp_won, bp);
        row[11] = total_dist;
        row[12] = last3;
        row[13] = dist[t];
        row[14] = speed[t];
        row[15] = speed[t] * p.serve_no as f64;
        rows.push(row);
        // sets completed on this point count from the next point on
        match p.set_victor {
            Some(Player::One) => sets1 += 1,
            Some(Player::Two) => sets2 += 1,
            None => {}
        }
    }
    Ok(FeatureFrame {
        match_id: m.match_id.clone(),
        rows,
        outcome: m.outcomes(),
        orientation: std::array::from_fn(|i| default_orientation(FeatureId(i as u8 + 1))),
        imputed,
    })
}

/// Min-max standardized columns of one match, every entry in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizedFrame {
    pub columns: Vec<String>,
    /// `z[t][j]` is column `j` at point `t`.
    pub z: Vec<Vec<f64>>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl StandardizedFrame {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.z.iter().map(|r| r[j]).collect()
    }

    /// Builds a frame from raw named columns; all columns must have the
    /// same length.
    pub fn from_columns(columns: &[(String, Vec<f64>, Orientation)]) -> Self {
        let t = columns.first().map_or(0, |c| c.1.len());
        let mut z = vec![Vec::with_capacity(columns.len()); t];
        let (mut min, mut max) = (Vec::new(), Vec::new());
        for (_, values, orientation) in columns {
            assert_eq!(values.len(), t, "ragged columns");
            let (scaled, lo, hi) = min_max_scale(values, *orientation);
            for (row, v) in z.iter_mut().zip(scaled) {
                row.push(v);
            }
            min.push(lo);
            max.push(hi);
        }
        StandardizedFrame { columns: columns.iter().map(|c| c.0.clone()).collect(), z, min, max }
    }

    /// Stacks frames with identical columns (pooled weighting across matches).
    pub fn concat(frames: &[StandardizedFrame]) -> Option<StandardizedFrame> {
        let first = frames.first()?;
        if frames.iter().any(|f| f.columns != first.columns) {
            return None;
        }
        let z = frames.iter().flat_map(|f| f.z.iter().cloned()).collect();
        let w = first.width();
        let fold = |pick: fn(&StandardizedFrame, usize) -> f64, better: fn(f64, f64) -> f64| {
            (0..w).map(|j| frames.iter().map(|f| pick(f, j)).reduce(better).unwrap()).collect()
        };
        Some(StandardizedFrame {
            columns: first.columns.clone(),
            z,
            min: fold(|f, j| f.min[j], f64::min),
            max: fold(|f, j| f.max[j], f64::max),
        })
    }
}

/// Affine map onto `[0, 1]`; a constant column maps to zeros.
pub fn min_max_scale(values: &[f64], orientation: Orientation) -> (Vec<f64>, f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    let scaled = values
        .iter()
        .map(|&x| {
            if !(range > 0.0) {
                0.0
            } else {
                let v = match orientation {
                    Orientation::Positive => (x - lo) / range,
                    Orientation::Negative => (hi - x) / range,
                };
                v.clamp(0.0, 1.0)
            }
        })
        .collect();
    (scaled, lo, hi)
}

/// Standardizes the requested features of a frame, using the frame's
/// orientation flags.
pub fn standardize(frame: &FeatureFrame, columns: &[FeatureId]) -> StandardizedFrame {
    let cols: Vec<(String, Vec<f64>, Orientation)> = columns
        .iter()
        .map(|&id| (id.to_string(), frame.column(id), frame.orientation[id.index()]))
        .collect();
    StandardizedFrame::from_columns(&cols)
}

/// Like [`standardize`] but takes column names (`"x7"`), rejecting unknown ones.
pub fn standardize_named(frame: &FeatureFrame, names: &[&str]) -> Result<StandardizedFrame, IngestError> {
    let ids = names.iter().map(|n| n.parse()).collect::<Result<Vec<FeatureId>, _>>()?;
    Ok(standardize(frame, &ids))
}
