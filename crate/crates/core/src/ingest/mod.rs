//! Point-by-point CSV ingestion and feature engineering.
//!
//! Rows are parsed into [`PointRecord`]s and grouped per match. Each match is
//! turned into a [`FeatureFrame`] holding the sixteen engineered columns
//! `x1..x16`:
//!
//! | column | meaning |
//! |--------|---------|
//! | x1 | games won by player 1 in the current set |
//! | x2 | score ordinal difference (0/15/30/40/AD -> 0..4) |
//! | x3 | player 1 serving a first serve |
//! | x4 | player 1 level or ahead in the game |
//! | x5 | completed sets difference |
//! | x6..x9 | ace, winner, double fault, unforced error flags |
//! | x10, x11 | running net-point and break-point conversion (0/0 = 0) |
//! | x12..x14 | cumulative, last-three-points and current distance run |
//! | x15, x16 | ball speed and ball speed x serve number |
//!
//! Missing distance and speed cells are filled with the match median and
//! recorded in [`FeatureFrame::imputed`].

mod csv_io;
mod features;
mod record;

pub use csv_io::{parse_csv, parse_outcomes, write_csv, Column, ColumnMap, FlagKind, OutcomeSequence, Side};
pub use features::{
    default_orientation, derive_features, min_max_scale, standardize, standardize_named, FeatureFrame,
    FeatureId, Imputed, Orientation, StandardizedFrame, FEATURE_COUNT,
};
pub use record::{MatchData, Player, PointFlags, PointRecord, ScoreToken};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("input is empty")]
    EmptyInput,
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: bad value {value:?} in column `{column}`")]
    BadToken { row: usize, column: String, value: String },
    #[error("match {match_id}: point {point} is out of (set, game, point) order")]
    OutOfOrder { match_id: String, point: usize },
    #[error("feature {feature} has no observed source value (first missing at point {point})")]
    MissingRequired { feature: FeatureId, point: usize },
    #[error("unknown feature column `{0}`")]
    UnknownColumn(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "match_id,set_no,game_no,point_no,p1_games,p2_games,p1_score,p2_score,server,serve_no,point_victor,p1_points_won,p2_points_won,game_victor,set_victor,p1_ace,p2_ace,p1_winner,p2_winner,p1_double_fault,p2_double_fault,p1_unf_err,p2_unf_err,p1_net_pt,p2_net_pt,p1_net_pt_won,p2_net_pt_won,p1_break_pt,p2_break_pt,p1_break_pt_won,p2_break_pt_won,p1_force_err,p2_force_err,speed_mph,p1_distance_run,p2_distance_run,rally_count";

    fn row(point: u32, s1: &str, s2: &str, victor: u8, winner: u8, net: (u8, u8), speed: &str, dist: &str) -> String {
        format!(
            "m1,1,1,{point},0,0,{s1},{s2},1,1,{victor},0,0,0,0,0,0,{winner},0,0,0,0,0,{},0,{},0,0,0,0,0,0,0,{speed},{dist},5.0,3",
            net.0, net.1
        )
    }

    fn sample() -> String {
        [
            HEADER.to_string(),
            row(1, "0", "0", 1, 1, (0, 0), "120", "10"),
            row(2, "15", "0", 2, 0, (1, 0), "", "20"),
            row(3, "15", "15", 1, 0, (1, 1), "110", ""),
            row(4, "40", "30", 1, 0, (0, 0), "100", "30"),
            row(5, "AD", "40", 1, 0, (0, 0), "90", "40"),
        ]
        .join("\n")
    }

    fn parsed() -> MatchData {
        parse_csv(sample().as_bytes(), &ColumnMap::default()).unwrap().remove(0)
    }

    #[test]
    fn parses_advantage_token() {
        let m = parsed();
        assert_eq!(m.points[4].p1_score, ScoreToken::Advantage);
        assert_eq!(m.points[3].p1_score, ScoreToken::Forty);
        assert_eq!(m.points[1].ball_speed, None);
    }

    #[test]
    fn empty_input() {
        assert!(matches!(parse_csv("".as_bytes(), &ColumnMap::default()), Err(IngestError::EmptyInput)));
        assert!(matches!(
            parse_csv(HEADER.as_bytes(), &ColumnMap::default()),
            Err(IngestError::EmptyInput)
        ));
    }

    #[test]
    fn out_of_range_victor() {
        let csv = format!("{HEADER}\n{}", row(1, "0", "0", 3, 0, (0, 0), "1", "1"));
        match parse_csv(csv.as_bytes(), &ColumnMap::default()) {
            Err(IngestError::BadToken { row, column, value }) => {
                assert_eq!((row, column.as_str(), value.as_str()), (2, "point_victor", "3"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_column_named() {
        let csv = "match_id,point_victor\nm,1\n";
        match parse_csv(csv.as_bytes(), &ColumnMap::default()) {
            Err(IngestError::MissingColumn(c)) => assert_eq!(c, "set_no"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn feature_definitions() {
        let f = derive_features(&parsed()).unwrap();
        let x = |t: usize, n: u8| f.rows[t][n as usize - 1];
        // (40, 30) -> 3 - 2
        assert_eq!(x(3, 2), 1.0);
        assert_eq!(x(3, 4), 1.0);
        assert_eq!(x(4, 2), 1.0);
        // winner on the first point
        assert_eq!(x(0, 7), 1.0);
        // no net approaches yet -> 0
        assert_eq!(x(0, 10), 0.0);
        assert_eq!(x(1, 10), 0.0);
        assert_eq!(x(2, 10), 0.5);
        assert_eq!(x(4, 10), 0.5);
        assert_eq!(f.outcome, vec![true, false, true, true, true]);
        assert_eq!(x(0, 3), 1.0);
    }

    #[test]
    fn imputes_match_median_and_flags() {
        let f = derive_features(&parsed()).unwrap();
        // speeds 120, 110, 100, 90 -> median 105
        assert_eq!(f.rows[1][14], 105.0);
        assert_eq!(f.rows[1][15], 105.0);
        // distances 10, 20, 30, 40 -> median 25
        assert_eq!(f.rows[2][13], 25.0);
        assert_eq!(f.rows[2][11], 55.0);
        assert_eq!(f.rows[3][12], 20.0 + 25.0 + 30.0);
        assert_eq!(f.imputed.len(), 2);
    }

    #[test]
    fn missing_everywhere_is_an_error() {
        let mut m = parsed();
        for p in &mut m.points {
            p.ball_speed = None;
        }
        assert!(matches!(derive_features(&m), Err(IngestError::MissingRequired { point: 1, .. })));
    }

    #[test]
    fn set_difference_counts_completed_sets() {
        let mut m = parsed();
        m.points[1].set_victor = Some(Player::Two);
        let f = derive_features(&m).unwrap();
        assert_eq!(f.rows[1][4], 0.0);
        assert_eq!(f.rows[2][4], -1.0);
    }

    #[test]
    fn standardize_examples() {
        let (z, ..) = min_max_scale(&[2.0, 4.0, 6.0], Orientation::Positive);
        assert_eq!(z, vec![0.0, 0.5, 1.0]);
        let (z, ..) = min_max_scale(&[2.0, 4.0, 6.0], Orientation::Negative);
        assert_eq!(z, vec![1.0, 0.5, 0.0]);
        let (z, ..) = min_max_scale(&[5.0, 5.0, 5.0], Orientation::Positive);
        assert_eq!(z, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn unknown_column_rejected() {
        let f = derive_features(&parsed()).unwrap();
        assert!(matches!(standardize_named(&f, &["x3", "x17"]), Err(IngestError::UnknownColumn(_))));
        let z = standardize_named(&f, &["x9", "x10"]).unwrap();
        assert_eq!(z.columns, vec!["x9", "x10"]);
    }

    #[test]
    fn round_trip_preserves_features() {
        let matches = parse_csv(sample().as_bytes(), &ColumnMap::default()).unwrap();
        let mut buf = Vec::new();
        write_csv(&matches, &mut buf).unwrap();
        let again = parse_csv(buf.as_slice(), &ColumnMap::default()).unwrap();
        assert_eq!(matches, again);
        assert_eq!(derive_features(&matches[0]).unwrap(), derive_features(&again[0]).unwrap());
    }

    #[test]
    fn outcomes_only() {
        let seqs = parse_outcomes("match_id,point_no,point_victor\na,1,1\nb,1,2\na,2,2\n".as_bytes()).unwrap();
        assert_eq!(seqs.len(), 2);
        assert_eq!(seqs[0].won, vec![true, false]);
        assert_eq!(seqs[1].won, vec![false]);
    }
}
