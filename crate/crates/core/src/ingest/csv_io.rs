use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::record::{MatchData, Player, PointFlags, PointRecord, ScoreToken};
use super::IngestError;

/// Logical columns of the point-by-point schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Column {
    MatchId,
    SetNo,
    GameNo,
    PointNo,
    P1Games,
    P2Games,
    P1Score,
    P2Score,
    Server,
    ServeNo,
    PointVictor,
    P1PointsWon,
    P2PointsWon,
    GameVictor,
    SetVictor,
    Flag(Side, FlagKind),
    BallSpeed,
    BallSpin,
    RallyLength,
    GameTime,
    ServeDirection,
    ServeDepth,
    ReturnDepth,
    P1DistanceRun,
    P2DistanceRun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    P1,
    P2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlagKind {
    Ace,
    Winner,
    DoubleFault,
    UnfErr,
    NetPt,
    NetPtWon,
    BreakPt,
    BreakPtWon,
    ForceErr,
}

const FLAG_KINDS: [(FlagKind, &str); 9] = [
    (FlagKind::Ace, "ace"),
    (FlagKind::Winner, "winner"),
    (FlagKind::DoubleFault, "double_fault"),
    (FlagKind::UnfErr, "unf_err"),
    (FlagKind::NetPt, "net_pt"),
    (FlagKind::NetPtWon, "net_pt_won"),
    (FlagKind::BreakPt, "break_pt"),
    (FlagKind::BreakPtWon, "break_pt_won"),
    (FlagKind::ForceErr, "force_err"),
];

impl Column {
    pub fn is_required(self) -> bool {
        !matches!(
            self,
            Column::BallSpeed
                | Column::BallSpin
                | Column::RallyLength
                | Column::GameTime
                | Column::ServeDirection
                | Column::ServeDepth
                | Column::ReturnDepth
                | Column::P1DistanceRun
                | Column::P2DistanceRun
        )
    }

    /// Canonical header name, used when writing.
    pub fn canonical_name(self) -> String {
        match self {
            Column::MatchId => "match_id".into(),
            Column::SetNo => "set_no".into(),
            Column::GameNo => "game_no".into(),
            Column::PointNo => "point_no".into(),
            Column::P1Games => "p1_games".into(),
            Column::P2Games => "p2_games".into(),
            Column::P1Score => "p1_score".into(),
            Column::P2Score => "p2_score".into(),
            Column::Server => "server".into(),
            Column::ServeNo => "serve_no".into(),
            Column::PointVictor => "point_victor".into(),
            Column::P1PointsWon => "p1_points_won".into(),
            Column::P2PointsWon => "p2_points_won".into(),
            Column::GameVictor => "game_victor".into(),
            Column::SetVictor => "set_victor".into(),
            Column::Flag(side, kind) => {
                let prefix = match side {
                    Side::P1 => "p1",
                    Side::P2 => "p2",
                };
                let suffix = FLAG_KINDS.iter().find(|(k, _)| *k == kind).map(|(_, s)| *s).unwrap();
                format!("{prefix}_{suffix}")
            }
            Column::BallSpeed => "ball_speed".into(),
            Column::BallSpin => "ball_spin".into(),
            Column::RallyLength => "rally_length".into(),
            Column::GameTime => "game_time".into(),
            Column::ServeDirection => "serve_direction".into(),
            Column::ServeDepth => "serve_depth".into(),
            Column::ReturnDepth => "return_depth".into(),
            Column::P1DistanceRun => "p1_distance_run".into(),
            Column::P2DistanceRun => "p2_distance_run".into(),
        }
    }

    pub fn all() -> Vec<Column> {
        let mut cols = vec![
            Column::MatchId,
            Column::SetNo,
            Column::GameNo,
            Column::PointNo,
            Column::P1Games,
            Column::P2Games,
            Column::P1Score,
            Column::P2Score,
            Column::Server,
            Column::ServeNo,
            Column::PointVictor,
            Column::P1PointsWon,
            Column::P2PointsWon,
            Column::GameVictor,
            Column::SetVictor,
        ];
        for side in [Side::P1, Side::P2] {
            for (kind, _) in FLAG_KINDS {
                cols.push(Column::Flag(side, kind));
            }
        }
        cols.extend([
            Column::BallSpeed,
            Column::BallSpin,
            Column::RallyLength,
            Column::GameTime,
            Column::ServeDirection,
            Column::ServeDepth,
            Column::ReturnDepth,
            Column::P1DistanceRun,
            Column::P2DistanceRun,
        ]);
        cols
    }
}

/// Maps logical columns to candidate header names. The first candidate
/// present in the header wins.
#[derive(Debug, Clone)]
pub struct ColumnMap {
    names: BTreeMap<Column, Vec<String>>,
}

impl Default for ColumnMap {
    /// Canonical names plus the aliases used by the public Wimbledon
    /// point-by-point release (`speed_mph`, `rally_count`, `serve_width`).
    fn default() -> Self {
        let mut names: BTreeMap<Column, Vec<String>> =
            Column::all().into_iter().map(|c| (c, vec![c.canonical_name()])).collect();
        let mut alias = |c: Column, a: &str| names.get_mut(&c).unwrap().push(a.to_string());
        alias(Column::BallSpeed, "speed_mph");
        alias(Column::RallyLength, "rally_count");
        alias(Column::ServeDirection, "serve_width");
        ColumnMap { names }
    }
}

impl ColumnMap {
    /// Replaces the candidates for one column.
    pub fn with(mut self, column: Column, header: impl Into<String>) -> Self {
        self.names.insert(column, vec![header.into()]);
        self
    }

    fn resolve(&self, header: &csv::StringRecord) -> Result<BTreeMap<Column, usize>, IngestError> {
        let mut out = BTreeMap::new();
        for (col, candidates) in &self.names {
            let found = candidates
                .iter()
                .find_map(|name| header.iter().position(|h| h.trim() == name));
            match found {
                Some(idx) => {
                    out.insert(*col, idx);
                }
                None if col.is_required() => {
                    return Err(IngestError::MissingColumn(candidates[0].clone()));
                }
                None => {}
            }
        }
        Ok(out)
    }
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c.eq_ignore_ascii_case("na") || c.eq_ignore_ascii_case("nan")
}

struct RowReader<'a> {
    row: &'a csv::StringRecord,
    row_no: usize,
    index: &'a BTreeMap<Column, usize>,
}

impl RowReader<'_> {
    fn cell(&self, col: Column) -> Option<&str> {
        self.index.get(&col).and_then(|&i| self.row.get(i)).map(str::trim)
    }

    fn bad(&self, col: Column, value: &str) -> IngestError {
        IngestError::BadToken {
            row: self.row_no,
            column: col.canonical_name(),
            value: value.to_string(),
        }
    }

    fn required(&self, col: Column) -> Result<&str, IngestError> {
        match self.cell(col) {
            Some(v) if !is_missing(v) => Ok(v),
            other => Err(self.bad(col, other.unwrap_or(""))),
        }
    }

    fn uint(&self, col: Column) -> Result<u32, IngestError> {
        let v = self.required(col)?;
        v.parse::<u32>().map_err(|_| self.bad(col, v))
    }

    fn positive(&self, col: Column) -> Result<u32, IngestError> {
        let v = self.uint(col)?;
        if v == 0 {
            return Err(self.bad(col, "0"));
        }
        Ok(v)
    }

    fn player(&self, col: Column) -> Result<Player, IngestError> {
        let v = self.required(col)?;
        v.parse::<u8>().ok().and_then(Player::from_code).ok_or_else(|| self.bad(col, v))
    }

    fn victor(&self, col: Column) -> Result<Option<Player>, IngestError> {
        let v = self.required(col)?;
        match v {
            "0" => Ok(None),
            "1" => Ok(Some(Player::One)),
            "2" => Ok(Some(Player::Two)),
            _ => Err(self.bad(col, v)),
        }
    }

    fn flag(&self, col: Column) -> Result<bool, IngestError> {
        let v = self.required(col)?;
        match v {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(self.bad(col, v)),
        }
    }

    fn score(&self, col: Column) -> Result<ScoreToken, IngestError> {
        let v = self.required(col)?;
        v.parse().map_err(|_| self.bad(col, v))
    }

    fn opt_nonneg(&self, col: Column) -> Result<Option<f64>, IngestError> {
        match self.cell(col) {
            None => Ok(None),
            Some(v) if is_missing(v) => Ok(None),
            Some(v) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() && x >= 0.0 => Ok(Some(x)),
                _ => Err(self.bad(col, v)),
            },
        }
    }

    fn opt_text(&self, col: Column) -> Option<String> {
        self.cell(col).filter(|v| !is_missing(v)).map(str::to_string)
    }

    fn flags(&self, side: Side) -> Result<PointFlags, IngestError> {
        let f = |kind| self.flag(Column::Flag(side, kind));
        Ok(PointFlags {
            ace: f(FlagKind::Ace)?,
            winner: f(FlagKind::Winner)?,
            double_fault: f(FlagKind::DoubleFault)?,
            unf_err: f(FlagKind::UnfErr)?,
            net_pt: f(FlagKind::NetPt)?,
            net_pt_won: f(FlagKind::NetPtWon)?,
            break_pt: f(FlagKind::BreakPt)?,
            break_pt_won: f(FlagKind::BreakPtWon)?,
            force_err: f(FlagKind::ForceErr)?,
        })
    }

    fn record(&self) -> Result<PointRecord, IngestError> {
        let serve_no = match self.required(Column::ServeNo)? {
            "1" => 1,
            "2" => 2,
            v => return Err(self.bad(Column::ServeNo, v)),
        };
        let rally_length = match self.opt_nonneg(Column::RallyLength)? {
            None => None,
            Some(x) if x >= 1.0 && x.fract() == 0.0 => Some(x as u32),
            Some(x) => return Err(self.bad(Column::RallyLength, &x.to_string())),
        };
        let game_time = match self.cell(Column::GameTime) {
            Some(v) if !is_missing(v) => {
                Some(v.parse::<f64>().map_err(|_| self.bad(Column::GameTime, v))?)
            }
            _ => None,
        };
        Ok(PointRecord {
            match_id: self.required(Column::MatchId)?.to_string(),
            set_no: self.positive(Column::SetNo)?,
            game_no: self.positive(Column::GameNo)?,
            point_no: self.positive(Column::PointNo)?,
            p1_games: self.uint(Column::P1Games)?,
            p2_games: self.uint(Column::P2Games)?,
            p1_score: self.score(Column::P1Score)?,
            p2_score: self.score(Column::P2Score)?,
            server: self.player(Column::Server)?,
            serve_no,
            point_victor: self.player(Column::PointVictor)?,
            p1_points_won: self.uint(Column::P1PointsWon)?,
            p2_points_won: self.uint(Column::P2PointsWon)?,
            game_victor: self.victor(Column::GameVictor)?,
            set_victor: self.victor(Column::SetVictor)?,
            p1: self.flags(Side::P1)?,
            p2: self.flags(Side::P2)?,
            ball_speed: self.opt_nonneg(Column::BallSpeed)?,
            ball_spin: self.opt_nonneg(Column::BallSpin)?,
            rally_length,
            game_time,
            serve_direction: self.opt_text(Column::ServeDirection),
            serve_depth: self.opt_text(Column::ServeDepth),
            return_depth: self.opt_text(Column::ReturnDepth),
            p1_distance_run: self.opt_nonneg(Column::P1DistanceRun)?,
            p2_distance_run: self.opt_nonneg(Column::P2DistanceRun)?,
        })
    }
}

/// Groups rows by `match_id`, keeping first-appearance order of matches and
/// file order of points.
fn group<T>(rows: Vec<(String, T)>) -> Vec<(String, Vec<T>)> {
    let mut order: Vec<(String, Vec<T>)> = Vec::new();
    let mut slot: BTreeMap<String, usize> = BTreeMap::new();
    for (id, item) in rows {
        let i = *slot.entry(id.clone()).or_insert_with(|| {
            order.push((id, Vec::new()));
            order.len() - 1
        });
        order[i].1.push(item);
    }
    order
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(source)
}

fn header_of<R: Read>(rdr: &mut csv::Reader<R>) -> Result<csv::StringRecord, IngestError> {
    let header = rdr.headers()?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].trim().is_empty()) {
        return Err(IngestError::EmptyInput);
    }
    Ok(header)
}

/// Parses a full point-by-point CSV into one [`MatchData`] per match.
pub fn parse_csv<R: Read>(source: R, schema: &ColumnMap) -> Result<Vec<MatchData>, IngestError> {
    let mut rdr = reader(source);
    let header = header_of(&mut rdr)?;
    let index = schema.resolve(&header)?;
    let mut rows = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        // header is line 1
        let rec = RowReader { row: &row, row_no: i + 2, index: &index }.record()?;
        rows.push((rec.match_id.clone(), rec));
    }
    if rows.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    let matches: Vec<MatchData> = group(rows)
        .into_iter()
        .map(|(match_id, points)| MatchData { match_id, points })
        .collect();
    for m in &matches {
        if let Err(i) = m.check_order() {
            return Err(IngestError::OutOfOrder { match_id: m.match_id.clone(), point: i + 1 });
        }
    }
    Ok(matches)
}

/// Per-match outcome sequences of Player 1.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSequence {
    pub match_id: String,
    pub won: Vec<bool>,
}

/// Reads only `match_id` and `point_victor`; accepts both full files and the
/// minimal `match_id,point_no,point_victor` export of the generators.
pub fn parse_outcomes<R: Read>(source: R) -> Result<Vec<OutcomeSequence>, IngestError> {
    let mut rdr = reader(source);
    let header = header_of(&mut rdr)?;
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let id_col = find("match_id")?;
    let victor_col = find("point_victor")?;
    let mut rows = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let id = row.get(id_col).unwrap_or("").trim().to_string();
        let v = row.get(victor_col).unwrap_or("").trim();
        let won = match v {
            "1" => true,
            "2" => false,
            _ => {
                return Err(IngestError::BadToken {
                    row: i + 2,
                    column: "point_victor".into(),
                    value: v.to_string(),
                })
            }
        };
        rows.push((id, won));
    }
    if rows.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    Ok(group(rows).into_iter().map(|(match_id, won)| OutcomeSequence { match_id, won }).collect())
}

fn fmt_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

/// Writes records under the canonical header names.
pub fn write_csv<W: Write>(matches: &[MatchData], sink: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(sink);
    let columns = Column::all();
    w.write_record(columns.iter().map(|c| c.canonical_name()))?;
    for m in matches {
        for p in &m.points {
            let mut row: Vec<String> = Vec::with_capacity(columns.len());
            for col in &columns {
                let cell = match *col {
                    Column::MatchId => p.match_id.clone(),
                    Column::SetNo => p.set_no.to_string(),
                    Column::GameNo => p.game_no.to_string(),
                    Column::PointNo => p.point_no.to_string(),
                    Column::P1Games => p.p1_games.to_string(),
                    Column::P2Games => p.p2_games.to_string(),
                    Column::P1Score => p.p1_score.to_string(),
                    Column::P2Score => p.p2_score.to_string(),
                    Column::Server => p.server.code().to_string(),
                    Column::ServeNo => p.serve_no.to_string(),
                    Column::PointVictor => p.point_victor.code().to_string(),
                    Column::P1PointsWon => p.p1_points_won.to_string(),
                    Column::P2PointsWon => p.p2_points_won.to_string(),
                    Column::GameVictor => p.game_victor.map_or(0, Player::code).to_string(),
                    Column::SetVictor => p.set_victor.map_or(0, Player::code).to_string(),
                    Column::Flag(side, kind) => {
                        let f = match side {
                            Side::P1 => &p.p1,
                            Side::P2 => &p.p2,
                        };
                        let b = match kind {
                            FlagKind::Ace => f.ace,
                            FlagKind::Winner => f.winner,
                            FlagKind::DoubleFault => f.double_fault,
                            FlagKind::UnfErr => f.unf_err,
                            FlagKind::NetPt => f.net_pt,
                            FlagKind::NetPtWon => f.net_pt_won,
                            FlagKind::BreakPt => f.break_pt,
                            FlagKind::BreakPtWon => f.break_pt_won,
                            FlagKind::ForceErr => f.force_err,
                        };
                        u8::from(b).to_string()
                    }
                    Column::BallSpeed => fmt_opt(&p.ball_speed),
                    Column::BallSpin => fmt_opt(&p.ball_spin),
                    Column::RallyLength => fmt_opt(&p.rally_length),
                    Column::GameTime => fmt_opt(&p.game_time),
                    Column::ServeDirection => fmt_opt(&p.serve_direction),
                    Column::ServeDepth => fmt_opt(&p.serve_depth),
                    Column::ReturnDepth => fmt_opt(&p.return_depth),
                    Column::P1DistanceRun => fmt_opt(&p.p1_distance_run),
                    Column::P2DistanceRun => fmt_opt(&p.p2_distance_run),
                };
                row.push(cell);
            }
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}
