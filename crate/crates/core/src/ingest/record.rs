use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Score inside a game as shown on the scoreboard.
///
/// Tiebreak games report plain point counts; those are kept as
/// [`ScoreToken::Tiebreak`] so the real point-by-point files parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScoreToken {
    Love,
    Fifteen,
    Thirty,
    Forty,
    Advantage,
    Tiebreak(u32),
}

impl ScoreToken {
    /// Ordinal used for score differencing: 0, 15, 30, 40, AD map to 0..=4.
    pub fn ordinal(self) -> f64 {
        match self {
            ScoreToken::Love => 0.0,
            ScoreToken::Fifteen => 1.0,
            ScoreToken::Thirty => 2.0,
            ScoreToken::Forty => 3.0,
            ScoreToken::Advantage => 4.0,
            ScoreToken::Tiebreak(n) => n as f64,
        }
    }
}

impl FromStr for ScoreToken {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim() {
            "0" => Ok(ScoreToken::Love),
            "15" => Ok(ScoreToken::Fifteen),
            "30" => Ok(ScoreToken::Thirty),
            "40" => Ok(ScoreToken::Forty),
            "AD" | "Ad" | "ad" => Ok(ScoreToken::Advantage),
            other => other.parse::<u32>().map(ScoreToken::Tiebreak).map_err(|_| ()),
        }
    }
}

impl fmt::Display for ScoreToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreToken::Love => f.write_str("0"),
            ScoreToken::Fifteen => f.write_str("15"),
            ScoreToken::Thirty => f.write_str("30"),
            ScoreToken::Forty => f.write_str("40"),
            ScoreToken::Advantage => f.write_str("AD"),
            ScoreToken::Tiebreak(n) => write!(f, "{n}"),
        }
    }
}

/// Player 1 / Player 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn code(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(Player::One),
            2 => Some(Player::Two),
            _ => None,
        }
    }
}

/// Per-player binary annotations of a single point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointFlags {
    pub ace: bool,
    pub winner: bool,
    pub double_fault: bool,
    pub unf_err: bool,
    pub net_pt: bool,
    pub net_pt_won: bool,
    pub break_pt: bool,
    pub break_pt_won: bool,
    pub force_err: bool,
}

/// One row of a point-by-point file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub match_id: String,
    pub set_no: u32,
    pub game_no: u32,
    pub point_no: u32,
    pub p1_games: u32,
    pub p2_games: u32,
    pub p1_score: ScoreToken,
    pub p2_score: ScoreToken,
    pub server: Player,
    /// 1 = first serve, 2 = second serve.
    pub serve_no: u8,
    pub point_victor: Player,
    pub p1_points_won: u32,
    pub p2_points_won: u32,
    /// `None` when nobody won a game (or set) on this point.
    pub game_victor: Option<Player>,
    pub set_victor: Option<Player>,
    pub p1: PointFlags,
    pub p2: PointFlags,
    pub ball_speed: Option<f64>,
    pub ball_spin: Option<f64>,
    pub rally_length: Option<u32>,
    pub game_time: Option<f64>,
    pub serve_direction: Option<String>,
    pub serve_depth: Option<String>,
    pub return_depth: Option<String>,
    pub p1_distance_run: Option<f64>,
    pub p2_distance_run: Option<f64>,
}

impl PointRecord {
    pub fn p1_won(&self) -> bool {
        self.point_victor == Player::One
    }

    fn order_key(&self) -> (u32, u32, u32) {
        (self.set_no, self.game_no, self.point_no)
    }
}

/// All points of one match in play order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchData {
    pub match_id: String,
    pub points: Vec<PointRecord>,
}

impl MatchData {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point outcomes from Player 1's side (`true` = won).
    pub fn outcomes(&self) -> Vec<bool> {
        self.points.iter().map(PointRecord::p1_won).collect()
    }

    /// Checks the ordering and identity invariants; returns the offending
    /// point index on failure.
    pub fn check_order(&self) -> Result<(), usize> {
        for (i, p) in self.points.iter().enumerate() {
            if p.match_id != self.match_id {
                return Err(i);
            }
            if i > 0 && self.points[i - 1].order_key() >= p.order_key() {
                return Err(i);
            }
        }
        Ok(())
    }
}
