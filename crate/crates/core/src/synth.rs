//! Synthetic point sequences: i.i.d. null, streak-dependent momentum, level
//! calibration of the streak tests, and annotated point-by-point matches for
//! end-to-end runs.
//!
//! Every match draws from its own ChaCha stream (`seed`, stream = match
//! index), one uniform per point outcome, so generators that agree on the
//! win probabilities produce identical sequences.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ingest::{IngestError, MatchData, Player, PointFlags, PointRecord, ScoreToken};
use crate::streaks::{build_contingency, pooled_streaks, ContingencyTable, StreakError, TestResult};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SynthError {
    #[error("win probability must be in [0, 1], got {0}")]
    BadProbability(f64),
    #[error("calibration needs at least 500 data sets, got {0}")]
    TooFewDatasets(usize),
    #[error("alpha must be in (0, 1], got {0}")]
    BadAlpha(f64),
}

fn match_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_p(p: f64) -> Result<(), SynthError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(SynthError::BadProbability(p))
    }
}

/// Core generator. `beta` maps the signed current streak entering a point
/// (`+k` after `k` wins, `-k` after `k` losses, 0 at the start) to the added
/// win probability; boosted probabilities are clamped to `[0.01, 0.99]`.
fn generate<B>(p: f64, beta: &B, len: usize, matches: usize, seed: u64, first_stream: u64) -> Vec<Vec<bool>>
where
    B: Fn(i64) -> f64 + Sync,
{
    (0..matches)
        .into_par_iter()
        .map(|m| {
            let mut rng = match_rng(seed, first_stream + m as u64);
            let mut streak = 0i64;
            (0..len)
                .map(|_| {
                    let b = beta(streak);
                    let prob = if b == 0.0 { p } else { (p + b).clamp(0.01, 0.99) };
                    let won = rng.gen::<f64>() < prob;
                    streak = match (won, streak.signum()) {
                        (true, 1) => streak + 1,
                        (true, _) => 1,
                        (false, -1) => streak - 1,
                        (false, _) => -1,
                    };
                    won
                })
                .collect()
        })
        .collect()
}

/// `matches` sequences of `len` i.i.d. Bernoulli(`p`) points.
pub fn gen_null(p: f64, len: usize, matches: usize, seed: u64) -> Result<Vec<Vec<bool>>, SynthError> {
    check_p(p)?;
    Ok(generate(p, &|_| 0.0, len, matches, seed, 0))
}

/// `beta(k) = after_wins` for `k >= 1`, `after_losses` for `k <= -1`, and 0
/// at the start of a match.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StreakBoost {
    pub after_wins: f64,
    pub after_losses: f64,
}

impl StreakBoost {
    pub fn beta(&self, k: i64) -> f64 {
        match k.signum() {
            1 => self.after_wins,
            -1 => self.after_losses,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub p: f64,
    pub boost: StreakBoost,
    pub len: usize,
    pub matches: usize,
    pub seed: u64,
}

impl GeneratorConfig {
    /// 31 matches of 235 points at `p = 0.5`, no boost.
    pub fn corpus_shaped(seed: u64) -> Self {
        GeneratorConfig { p: 0.5, boost: StreakBoost::default(), len: 235, matches: 31, seed }
    }
}

pub fn gen_momentum(cfg: &GeneratorConfig) -> Result<Vec<Vec<bool>>, SynthError> {
    check_p(cfg.p)?;
    let boost = cfg.boost;
    Ok(generate(cfg.p, &move |k| boost.beta(k), cfg.len, cfg.matches, cfg.seed, 0))
}

/// [`gen_momentum`] with an arbitrary boost function.
pub fn gen_momentum_with<B>(p: f64, beta: B, len: usize, matches: usize, seed: u64) -> Result<Vec<Vec<bool>>, SynthError>
where
    B: Fn(i64) -> f64 + Sync,
{
    check_p(p)?;
    Ok(generate(p, &beta, len, matches, seed, 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub alpha: f64,
    pub datasets: usize,
    pub rejections: usize,
    /// Data sets whose test returned an error (counted as not rejected).
    pub failures: usize,
    pub rate: f64,
    pub std_error: f64,
    /// Wilson 95% interval for the rejection rate.
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Rejection rate of `test` at level `alpha` over `datasets` corpora drawn
/// from `cfg`. Corpus `d` uses streams `d * matches ..` of `cfg.seed`.
pub fn calibrate<T>(test: T, alpha: f64, datasets: usize, cfg: &GeneratorConfig, cap: usize) -> Result<Calibration, SynthError>
where
    T: Fn(&ContingencyTable) -> Result<TestResult, StreakError> + Sync,
{
    if datasets < 500 {
        return Err(SynthError::TooFewDatasets(datasets));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(SynthError::BadAlpha(alpha));
    }
    check_p(cfg.p)?;
    let boost = cfg.boost;
    let outcomes: Vec<Option<bool>> = (0..datasets)
        .into_par_iter()
        .map(|d| {
            let seqs = generate(cfg.p, &|k| boost.beta(k), cfg.len, cfg.matches, cfg.seed, (d * cfg.matches) as u64);
            let table = build_contingency(&pooled_streaks(&seqs), cap).ok()?;
            test(&table).ok().map(|r| r.p_value < alpha)
        })
        .collect();
    let rejections = outcomes.iter().filter(|o| **o == Some(true)).count();
    let failures = outcomes.iter().filter(|o| o.is_none()).count();
    let n = datasets as f64;
    let rate = rejections as f64 / n;
    let z = 1.959_963_984_540_054f64;
    let centre = (rate + z * z / (2.0 * n)) / (1.0 + z * z / n);
    let half = z / (1.0 + z * z / n) * (rate * (1.0 - rate) / n + z * z / (4.0 * n * n)).sqrt();
    Ok(Calibration {
        alpha,
        datasets,
        rejections,
        failures,
        rate,
        std_error: (rate * (1.0 - rate) / n).sqrt(),
        ci_low: (centre - half).max(0.0),
        ci_high: (centre + half).min(1.0),
    })
}

/// Minimal CSV (`match_id,point_no,point_victor`) for outcome sequences.
pub fn write_sequences_csv<W: Write>(sequences: &[Vec<bool>], prefix: &str, sink: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["match_id", "point_no", "point_victor"])?;
    for (m, seq) in sequences.iter().enumerate() {
        let id = format!("{prefix}-{:03}", m + 1);
        for (t, &won) in seq.iter().enumerate() {
            w.write_record([id.as_str(), &(t + 1).to_string(), if won { "1" } else { "2" }])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Annotated matches with a latent momentum regime.
///
/// A hidden state `r_t = +-1` flips with probability `regime_switch` per
/// point and shifts Player 1's win probability by `regime_effect * r_t` on
/// top of the serve advantage. Shot annotations depend on the outcome and
/// weakly on the regime. Scoring is standard games/sets with tiebreaks at
/// 6-6; a match stops after `points` points regardless of the score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedConfig {
    pub matches: usize,
    pub points: usize,
    pub regime_switch: f64,
    pub regime_effect: f64,
    pub seed: u64,
}

impl Default for AnnotatedConfig {
    fn default() -> Self {
        AnnotatedConfig { matches: 8, points: 300, regime_switch: 0.02, regime_effect: 0.25, seed: 0 }
    }
}

fn score_tokens(a: u32, b: u32, tiebreak: bool) -> (ScoreToken, ScoreToken) {
    use ScoreToken::*;
    if tiebreak {
        return (Tiebreak(a), Tiebreak(b));
    }
    let plain = |n: u32| match n {
        0 => Love,
        1 => Fifteen,
        2 => Thirty,
        _ => Forty,
    };
    if a >= 3 && b >= 3 {
        return match a.cmp(&b) {
            std::cmp::Ordering::Equal => (Forty, Forty),
            std::cmp::Ordering::Greater => (Advantage, Forty),
            std::cmp::Ordering::Less => (Forty, Advantage),
        };
    }
    (plain(a), plain(b))
}

/// Scores and flags are recorded as they stand before each point; the
/// points-won counters include it.
pub fn gen_annotated(cfg: &AnnotatedConfig) -> Vec<MatchData> {
    (0..cfg.matches)
        .into_par_iter()
        .map(|m| annotated_match(cfg, m))
        .collect()
}

fn annotated_match(cfg: &AnnotatedConfig, m: usize) -> MatchData {
    let match_id = format!("synth-{:03}", m + 1);
    let mut rng = match_rng(cfg.seed, m as u64);
    let mut regime = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let (mut set_no, mut game_no, mut point_no) = (1u32, 1u32, 0u32);
    let (mut g1, mut g2) = (0u32, 0u32);
    let (mut a, mut b) = (0u32, 0u32);
    let (mut won1, mut won2) = (0u32, 0u32);
    let mut server = if m % 2 == 0 { Player::One } else { Player::Two };
    let mut points = Vec::with_capacity(cfg.points);

    while points.len() < cfg.points {
        point_no += 1;
        if rng.gen::<f64>() < cfg.regime_switch {
            regime = -regime;
        }
        let tiebreak = g1 == 6 && g2 == 6;
        let (s1, s2) = score_tokens(a, b, tiebreak);
        let first_in = rng.gen::<f64>() < 0.62;
        let serve_no: u8 = if first_in { 1 } else { 2 };
        let p_server = if first_in { 0.64 } else { 0.52 };
        let p1_serving = server == Player::One;
        let base = if p1_serving { p_server } else { 1.0 - p_server };
        let p1_win = (base + cfg.regime_effect * regime).clamp(0.01, 0.99);
        let won = rng.gen::<f64>() < p1_win;
        let victor = if won { Player::One } else { Player::Two };
        if won {
            won1 += 1;
        } else {
            won2 += 1;
        }

        // game point for the receiver = break point
        let target = if tiebreak { 7 } else { 4 };
        let (srv_pts, rcv_pts) = if p1_serving { (a, b) } else { (b, a) };
        let break_pt = rcv_pts + 1 >= target && rcv_pts + 1 >= srv_pts + 2 && !tiebreak;

        let mut p1 = PointFlags::default();
        let mut p2 = PointFlags::default();
        let server_won = won == p1_serving;
        let u: f64 = rng.gen();
        let tilt = 0.05 * regime;
        let rally: u32;
        if server_won && first_in && u < 0.15 {
            if p1_serving { p1.ace = true } else { p2.ace = true }
            rally = 1;
        } else if !server_won && !first_in && u < 0.25 {
            if p1_serving { p1.double_fault = true } else { p2.double_fault = true }
            rally = 0;
        } else {
            rally = 2 + rng.gen_range(0..9);
            let v: f64 = rng.gen();
            if won {
                if v < 0.35 + tilt {
                    p1.winner = true;
                } else if v < 0.35 + tilt + 0.4 {
                    p2.unf_err = true;
                } else {
                    p2.force_err = true;
                }
            } else if v < 0.45 - tilt {
                p1.unf_err = true;
            } else if v < 0.80 {
                p2.winner = true;
            } else {
                p1.force_err = true;
            }
        }
        if rally >= 2 && rng.gen::<f64>() < 0.18 + 0.04 * regime {
            p1.net_pt = true;
            p1.net_pt_won = won;
        }
        if break_pt {
            if p1_serving {
                p2.break_pt = true;
                p2.break_pt_won = !won;
            } else {
                p1.break_pt = true;
                p1.break_pt_won = won;
            }
        }
        let speed = if rally == 0 && !first_in {
            None
        } else if first_in {
            Some(110.0 + rng.gen_range(0.0..20.0f64).round())
        } else {
            Some(85.0 + rng.gen_range(0.0..15.0f64).round())
        };
        let run = |rng: &mut ChaCha8Rng| ((2.0 + 3.2 * f64::from(rally) + rng.gen_range(0.0..6.0)) * 10.0).round() / 10.0;
        let d1 = run(&mut rng);
        let d2 = run(&mut rng);

        if won {
            a += 1;
        } else {
            b += 1;
        }
        let game_over = if tiebreak { (a >= 7 || b >= 7) && a.abs_diff(b) >= 2 } else { (a >= 4 || b >= 4) && a.abs_diff(b) >= 2 };
        let mut game_victor = None;
        let mut set_victor = None;
        let rec_g1 = g1;
        let rec_g2 = g2;
        let rec_game = game_no;
        let rec_set = set_no;
        let rec_server = server;
        if game_over {
            game_victor = Some(if a > b { Player::One } else { Player::Two });
            if a > b {
                g1 += 1;
            } else {
                g2 += 1;
            }
            a = 0;
            b = 0;
            game_no += 1;
            server = if server == Player::One { Player::Two } else { Player::One };
            let set_over = (g1 >= 6 || g2 >= 6) && (g1.abs_diff(g2) >= 2 || g1 == 7 || g2 == 7);
            if set_over {
                set_victor = Some(if g1 > g2 { Player::One } else { Player::Two });
                g1 = 0;
                g2 = 0;
                set_no += 1;
                game_no = 1;
            }
        }
        points.push(PointRecord {
            match_id: match_id.clone(),
            set_no: rec_set,
            game_no: rec_game,
            point_no,
            p1_games: rec_g1,
            p2_games: rec_g2,
            p1_score: s1,
            p2_score: s2,
            server: rec_server,
            serve_no,
            point_victor: victor,
            p1_points_won: won1,
            p2_points_won: won2,
            game_victor,
            set_victor,
            p1,
            p2,
            ball_speed: speed,
            ball_spin: None,
            // no rally on a double fault
            rally_length: (rally > 0).then_some(rally),
            game_time: None,
            serve_direction: None,
            serve_depth: None,
            return_depth: None,
            p1_distance_run: Some(d1),
            p2_distance_run: Some(d2),
        });
    }
    MatchData { match_id, points }
}
