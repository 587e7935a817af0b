//! Relative-distance shift intensity `V_t`.
//!
//! Anchors sit at the change points with value `CP_{t_i} * D_max / D_i`.
//! Between anchors `V` is linear; it ramps up from `V_0 = 0` to the first
//! anchor and decays linearly to `V_T = 0` after the last one.

use serde::{Deserialize, Serialize};

use crate::changepoint::ChangePointSet;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ShiftError {
    #[error("change point at t = {time} is outside 1..={len}")]
    TimeOutOfRange { time: usize, len: usize },
    #[error("change points must be strictly increasing with sign +1 or -1")]
    Malformed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftSeries {
    /// `values[t - 1] = V_t` for `t = 1..=T`.
    pub values: Vec<f64>,
    pub d_max: usize,
    /// `(t_i, V_{t_i})`.
    pub anchors: Vec<(usize, f64)>,
}

impl ShiftSeries {
    /// `V` at a fractional time in `[0, T]`, on the same lines as the
    /// integer points.
    pub fn at(&self, t: f64) -> f64 {
        let len = self.values.len() as f64;
        let mut knots: Vec<(f64, f64)> = vec![(0.0, 0.0)];
        knots.extend(self.anchors.iter().map(|&(ti, v)| (ti as f64, v)));
        if self.anchors.last().map_or(true, |&(ti, _)| (ti as f64) < len) {
            knots.push((len, 0.0));
        }
        if t <= 0.0 {
            return 0.0;
        }
        for w in knots.windows(2) {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if t <= t1 {
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
            }
        }
        knots.last().unwrap().1
    }
}

pub fn relative_distance(cp: &ChangePointSet, len: usize) -> Result<ShiftSeries, ShiftError> {
    let mut prev = 0;
    for p in &cp.points {
        if p.time == 0 || p.time > len {
            return Err(ShiftError::TimeOutOfRange { time: p.time, len });
        }
        if p.time <= prev || !(p.sign == 1 || p.sign == -1) {
            return Err(ShiftError::Malformed);
        }
        prev = p.time;
    }
    if cp.points.is_empty() {
        return Ok(ShiftSeries { values: vec![0.0; len], d_max: 0, anchors: vec![] });
    }
    let durations = cp.durations();
    let d_max = *durations.iter().max().unwrap();
    let anchors: Vec<(usize, f64)> = cp
        .points
        .iter()
        .zip(&durations)
        .map(|(p, &d)| (p.time, f64::from(p.sign) * d_max as f64 / d as f64))
        .collect();

    let mut values = vec![0.0; len];
    let (t1, v1) = anchors[0];
    for t in 1..t1 {
        values[t - 1] = v1 / t1 as f64 * t as f64;
    }
    for w in anchors.windows(2) {
        let ((ta, va), (tb, vb)) = (w[0], w[1]);
        for t in ta..=tb {
            values[t - 1] = (vb - va) / (tb - ta) as f64 * (t - ta) as f64 + va;
        }
    }
    let (tn, vn) = *anchors.last().unwrap();
    values[tn - 1] = vn;
    values[t1 - 1] = v1;
    if tn < len {
        for t in tn + 1..=len {
            values[t - 1] = vn - vn / (len - tn) as f64 * (t - tn) as f64;
        }
    }
    Ok(ShiftSeries { values, d_max, anchors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::changepoint::ChangePoint;

    fn set(len: usize, pts: &[(usize, i8)]) -> ChangePointSet {
        ChangePointSet::new(len, pts.iter().map(|&(time, sign)| ChangePoint { time, sign }).collect())
    }

    #[test]
    fn no_change_points() {
        let v = relative_distance(&set(7, &[]), 7).unwrap();
        assert_eq!(v.values, vec![0.0; 7]);
    }

    #[test]
    fn single_change_point() {
        let v = relative_distance(&set(10, &[(5, 1)]), 10).unwrap();
        assert_eq!(v.d_max, 5);
        let at = |t: usize| v.values[t - 1];
        assert!((at(5) - 1.0).abs() < 1e-12);
        assert!((at(2) - 0.4).abs() < 1e-12);
        assert!((at(8) - 0.4).abs() < 1e-12);
        assert!(at(10).abs() < 1e-12);
    }

    #[test]
    fn two_change_points() {
        let v = relative_distance(&set(12, &[(4, 1), (6, -1)]), 12).unwrap();
        assert_eq!(v.d_max, 4);
        let at = |t: usize| v.values[t - 1];
        assert!((at(4) - 1.0).abs() < 1e-12);
        assert!((at(6) + 2.0).abs() < 1e-12);
        assert!((at(5) + 0.5).abs() < 1e-12);
        assert!(at(12).abs() < 1e-12);
    }

    #[test]
    fn last_point_anchor_keeps_value() {
        let v = relative_distance(&set(6, &[(3, 1), (6, -1)]), 6).unwrap();
        assert_eq!(v.values[5], -1.0);
    }

    #[test]
    fn range_checks() {
        assert_eq!(
            relative_distance(&set(5, &[(6, 1)]), 5),
            Err(ShiftError::TimeOutOfRange { time: 6, len: 5 })
        );
        assert_eq!(relative_distance(&set(5, &[(3, 1), (3, -1)]), 5), Err(ShiftError::Malformed));
    }

    #[test]
    fn fractional_queries_follow_the_lines() {
        let v = relative_distance(&set(12, &[(4, 1), (6, -1)]), 12).unwrap();
        for t in 1..=12 {
            assert!((v.at(t as f64) - v.values[t - 1]).abs() < 1e-12, "t={t}");
        }
        assert!((v.at(4.5) - 0.25).abs() < 1e-12);
        assert_eq!(v.at(0.0), 0.0);
    }
}
