//! Winning streaks, the streak-length x next-point contingency table and the
//! independence tests run on it.
//!
//! A run of `L` consecutive wins contributes one record per prefix length
//! `i = 1..=L`. Prefix `i < L` is an extension; prefix `L` is a termination,
//! whether the run ended with a loss or with the end of the sequence.
//! Streaks never cross match boundaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::special::{chi2_sf, ln_factorial_table};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StreakError {
    #[error("no winning streaks to tabulate")]
    EmptyStreaks,
    #[error("pooling cap must be at least 2, got {0}")]
    BadCap(usize),
    #[error("degenerate margins: {0}")]
    DegenerateMargins(String),
    #[error("exact test needs at least 1000 replicates, got {0}")]
    TooFewReplicates(u64),
    #[error("{count} margin-compatible tables exceed the enumeration limit {limit}")]
    TooManyTables { count: u128, limit: u128 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transition {
    Extension,
    Termination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreakRecord {
    pub length: usize,
    pub next: Transition,
}

/// One record per prefix of every maximal run of wins.
pub fn extract_streaks(outcomes: &[bool]) -> Vec<StreakRecord> {
    let mut out = Vec::new();
    let mut t = 0;
    while t < outcomes.len() {
        if !outcomes[t] {
            t += 1;
            continue;
        }
        let start = t;
        while t < outcomes.len() && outcomes[t] {
            t += 1;
        }
        let run = t - start;
        for i in 1..=run {
            let next = if i < run { Transition::Extension } else { Transition::Termination };
            out.push(StreakRecord { length: i, next });
        }
    }
    out
}

/// `k x 2` table of streak length against extension / termination.
///
/// Row `i` (zero based) holds streaks of length `i + 1`; the last row pools
/// every length `>= cap`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub cap: usize,
    /// `counts[i] = [extensions, terminations]`.
    pub counts: Vec<[u64; 2]>,
}

impl ContingencyTable {
    /// Wraps hard-coded counts; the last row is taken as the pooled row.
    pub fn from_counts(counts: Vec<[u64; 2]>) -> Self {
        ContingencyTable { cap: counts.len(), counts }
    }

    pub fn rows(&self) -> usize {
        self.counts.len()
    }

    pub fn row_totals(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r[0] + r[1]).collect()
    }

    pub fn col_totals(&self) -> [u64; 2] {
        self.counts.iter().fold([0, 0], |acc, r| [acc[0] + r[0], acc[1] + r[1]])
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|r| r[0] + r[1]).sum()
    }

    /// Row label in the `W_1 .. W_{cap}+` style.
    pub fn label(&self, row: usize) -> String {
        if row + 1 == self.cap && self.counts.len() == self.cap {
            format!("W{}+", row + 1)
        } else {
            format!("W{}", row + 1)
        }
    }

    fn check_margins(&self) -> Result<(), StreakError> {
        if let Some(i) = self.row_totals().iter().position(|&r| r == 0) {
            return Err(StreakError::DegenerateMargins(format!("row {} is empty", self.label(i))));
        }
        let cols = self.col_totals();
        if cols[0] == 0 || cols[1] == 0 {
            return Err(StreakError::DegenerateMargins("a column margin is zero".into()));
        }
        if self.counts.len() < 2 {
            return Err(StreakError::DegenerateMargins("fewer than two rows".into()));
        }
        Ok(())
    }

    /// Text rendering in the usual layout with margins.
    pub fn render(&self) -> String {
        let mut s = format!("{:<8}{:>12}{:>13}{:>8}\n", "Streak", "Extension", "Termination", "n_i.");
        for (i, r) in self.counts.iter().enumerate() {
            s += &format!("{:<8}{:>12}{:>13}{:>8}\n", self.label(i), r[0], r[1], r[0] + r[1]);
        }
        let c = self.col_totals();
        s += &format!("{:<8}{:>12}{:>13}{:>8}\n", "n_.j", c[0], c[1], self.total());
        s
    }
}

pub fn build_contingency(records: &[StreakRecord], cap: usize) -> Result<ContingencyTable, StreakError> {
    if cap < 2 {
        return Err(StreakError::BadCap(cap));
    }
    if records.is_empty() {
        return Err(StreakError::EmptyStreaks);
    }
    let mut counts = vec![[0u64; 2]; cap];
    for r in records {
        let row = r.length.min(cap) - 1;
        let col = match r.next {
            Transition::Extension => 0,
            Transition::Termination => 1,
        };
        counts[row][col] += 1;
    }
    Ok(ContingencyTable { cap, counts })
}

/// Streak records pooled over several matches.
pub fn pooled_streaks<S: AsRef<[bool]>>(sequences: &[S]) -> Vec<StreakRecord> {
    sequences.iter().flat_map(|s| extract_streaks(s.as_ref())).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowProbability {
    pub label: String,
    pub support: u64,
    /// `None` for a row without any streak.
    pub extension: Option<f64>,
}

/// `P(Extension | W_i) = n_i1 / n_i.` per row.
pub fn transition_probs(t: &ContingencyTable) -> Vec<RowProbability> {
    t.counts
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let n = r[0] + r[1];
            RowProbability {
                label: t.label(i),
                support: n,
                extension: (n > 0).then(|| r[0] as f64 / n as f64),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    PearsonChi2,
    ExactMc,
    ExactEnumeration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: TestMethod,
    /// Pearson chi-square, or `-ln P(observed table)` for the exact tests.
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
    /// All expected counts >= 5 and n >= 50.
    pub valid: bool,
    pub replicates: u64,
    /// Monte-Carlo standard error of `p_value`.
    pub std_error: Option<f64>,
}

fn expected_counts_ok(t: &ContingencyTable) -> bool {
    let n = t.total() as f64;
    let cols = t.col_totals();
    let ok = t
        .row_totals()
        .iter()
        .all(|&r| cols.iter().all(|&c| r as f64 * c as f64 / n >= 5.0));
    ok && t.total() >= 50
}

/// Pearson chi-square test of independence with `k - 1` degrees of freedom.
pub fn chi_squared_test(t: &ContingencyTable) -> Result<TestResult, StreakError> {
    t.check_margins()?;
    let n = t.total() as f64;
    let cols = t.col_totals();
    let mut stat = 0.0;
    for (r, row) in t.row_totals().iter().zip(&t.counts) {
        for j in 0..2 {
            let expected = *r as f64 * cols[j] as f64 / n;
            let d = row[j] as f64 - expected;
            stat += d * d / expected;
        }
    }
    let df = (t.rows() - 1) as u32;
    Ok(TestResult {
        method: TestMethod::PearsonChi2,
        statistic: stat,
        df,
        p_value: chi2_sf(stat, df),
        valid: expected_counts_ok(t),
        replicates: 0,
        std_error: None,
    })
}

/// Log-probability bookkeeping for `k x 2` tables with fixed margins.
///
/// Under independence, with margins fixed, the first column is multivariate
/// hypergeometric: `P(x) = prod_i C(r_i, x_i) / C(n, c_1)`.
struct Margins {
    rows: Vec<u64>,
    col1: u64,
    n: u64,
    lf: Vec<f64>,
}

/// Relative slack when comparing table probabilities, so tables tied with the
/// observed one in exact arithmetic are counted as "at most as likely".
const TIE_SLACK: f64 = 1e-7;

impl Margins {
    fn of(t: &ContingencyTable) -> Self {
        let rows = t.row_totals();
        let n = t.total();
        Margins { rows, col1: t.col_totals()[0], n, lf: ln_factorial_table(n as usize) }
    }

    fn ln_choose(&self, n: u64, k: u64) -> f64 {
        self.lf[n as usize] - self.lf[k as usize] - self.lf[(n - k) as usize]
    }

    /// `ln P(table)` from the first-column counts.
    fn ln_prob(&self, first_col: &[u64]) -> f64 {
        let num: f64 = self.rows.iter().zip(first_col).map(|(&r, &x)| self.ln_choose(r, x)).sum();
        num - self.ln_choose(self.n, self.col1)
    }

    fn threshold(&self, observed: f64) -> f64 {
        observed + TIE_SLACK * observed.abs().max(1.0)
    }

    /// Draws the first column by sequential hypergeometric allocation.
    fn sample<R: Rng>(&self, rng: &mut R, out: &mut [u64]) {
        let mut remaining = self.n;
        let mut successes = self.col1;
        for (slot, &r) in out.iter_mut().zip(&self.rows) {
            let x = sample_hypergeometric(rng, remaining, successes, r, &self.lf);
            *slot = x;
            remaining -= r;
            successes -= x;
        }
    }

    /// Number of first columns compatible with the margins (saturating).
    fn count_tables(&self) -> u128 {
        // ways[s] = number of partial columns with sum s
        let mut ways = vec![0u128; self.col1 as usize + 1];
        ways[0] = 1;
        for &r in &self.rows {
            let mut next = vec![0u128; ways.len()];
            for (s, &w) in ways.iter().enumerate() {
                if w == 0 {
                    continue;
                }
                for x in 0..=r as usize {
                    if s + x >= next.len() {
                        break;
                    }
                    next[s + x] = next[s + x].saturating_add(w);
                }
            }
            ways = next;
        }
        ways[self.col1 as usize]
    }
}

/// Hypergeometric draw: successes among `draws` items taken without
/// replacement from `total` items of which `successes` are marked.
/// Inversion by chop-down search starting at the mode.
fn sample_hypergeometric<R: Rng>(rng: &mut R, total: u64, successes: u64, draws: u64, lf: &[f64]) -> u64 {
    let failures = total - successes;
    let lo = draws.saturating_sub(failures);
    let hi = successes.min(draws);
    if lo == hi {
        return lo;
    }
    let (n, k, f) = (draws as f64, successes as f64, failures as f64);
    let mode = (((n + 1.0) * (k + 1.0) / (total as f64 + 2.0)).floor() as u64).clamp(lo, hi);
    let ln_pmf = |x: u64| {
        lf[successes as usize] - lf[x as usize] - lf[(successes - x) as usize] + lf[failures as usize]
            - lf[(draws - x) as usize]
            - lf[(failures + x - draws) as usize]
            - (lf[total as usize] - lf[draws as usize] - lf[(total - draws) as usize])
    };
    let p_mode = ln_pmf(mode).exp();
    let mut u: f64 = rng.gen::<f64>() - p_mode;
    if u < 0.0 {
        return mode;
    }
    let (mut down, mut up) = (mode, mode);
    let (mut p_down, mut p_up) = (p_mode, p_mode);
    loop {
        let mut moved = false;
        if down > lo {
            let x = down as f64;
            p_down *= x * (f - n + x) / ((k - x + 1.0) * (n - x + 1.0));
            down -= 1;
            u -= p_down;
            if u < 0.0 {
                return down;
            }
            moved = true;
        }
        if up < hi {
            let x = up as f64;
            p_up *= (k - x) * (n - x) / ((x + 1.0) * (f - n + x + 1.0));
            up += 1;
            u -= p_up;
            if u < 0.0 {
                return up;
            }
            moved = true;
        }
        if !moved {
            // rounding leftover in the tails
            return mode;
        }
    }
}

const CHUNK: u64 = 4096;

/// Monte-Carlo version of the Fisher-Freeman-Halton exact test.
///
/// Replicates are drawn from the null distribution of tables with the
/// observed margins. The p-value is the share of replicates whose
/// probability does not exceed that of the observed table. Replicates are
/// processed in fixed-size chunks with one ChaCha stream per chunk, so the
/// result depends only on `seed`.
pub fn exact_test(t: &ContingencyTable, replicates: u64, seed: u64) -> Result<TestResult, StreakError> {
    t.check_margins()?;
    if replicates < 1000 {
        return Err(StreakError::TooFewReplicates(replicates));
    }
    let m = Margins::of(t);
    let observed: Vec<u64> = t.counts.iter().map(|r| r[0]).collect();
    let ln_obs = m.ln_prob(&observed);
    let limit = m.threshold(ln_obs);
    let chunks = replicates.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let todo = CHUNK.min(replicates - c * CHUNK);
            let mut col = vec![0u64; m.rows.len()];
            let mut hits = 0u64;
            for _ in 0..todo {
                m.sample(&mut rng, &mut col);
                if m.ln_prob(&col) <= limit {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / replicates as f64;
    Ok(TestResult {
        method: TestMethod::ExactMc,
        statistic: -ln_obs,
        df: (t.rows() - 1) as u32,
        p_value: p,
        valid: expected_counts_ok(t),
        replicates,
        std_error: Some((p * (1.0 - p) / replicates as f64).sqrt()),
    })
}

/// Default cap on the number of tables [`exact_test_enumerated`] will visit.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

/// Exact p-value by visiting every table with the observed margins.
pub fn exact_test_enumerated(t: &ContingencyTable) -> Result<TestResult, StreakError> {
    t.check_margins()?;
    let m = Margins::of(t);
    let count = m.count_tables();
    if count > ENUMERATION_LIMIT {
        return Err(StreakError::TooManyTables { count, limit: ENUMERATION_LIMIT });
    }
    let observed: Vec<u64> = t.counts.iter().map(|r| r[0]).collect();
    let ln_obs = m.ln_prob(&observed);
    let limit = m.threshold(ln_obs);

    fn walk(m: &Margins, row: usize, left: u64, col: &mut Vec<u64>, limit: f64, acc: &mut f64) {
        if row + 1 == m.rows.len() {
            if left <= m.rows[row] {
                col[row] = left;
                let lp = m.ln_prob(col);
                if lp <= limit {
                    *acc += lp.exp();
                }
            }
            return;
        }
        let rest: u64 = m.rows[row + 1..].iter().sum();
        let lo = left.saturating_sub(rest);
        for x in lo..=m.rows[row].min(left) {
            col[row] = x;
            walk(m, row + 1, left - x, col, limit, acc);
        }
    }

    let mut col = vec![0u64; m.rows.len()];
    let mut p = 0.0;
    walk(&m, 0, m.col1, &mut col, limit, &mut p);
    Ok(TestResult {
        method: TestMethod::ExactEnumeration,
        statistic: -ln_obs,
        df: (t.rows() - 1) as u32,
        p_value: p.min(1.0),
        valid: expected_counts_ok(t),
        replicates: count as u64,
        std_error: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalEntry {
    pub label: String,
    /// Positions that have a next point inside the same match.
    pub support: u64,
    pub wins_next: u64,
    /// `None` when `support == 0`.
    pub probability: Option<f64>,
}

/// `P(W_next | W_k)` and `P(W_next | L_k)` for `k = 1..cap` (last pooled).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalProbTable {
    pub cap: usize,
    pub after_wins: Vec<ConditionalEntry>,
    pub after_losses: Vec<ConditionalEntry>,
}

/// Win probability of the next point given the current run (so far) of
/// exactly `k` wins or losses. Lookups never cross match boundaries.
pub fn conditional_win_probs<S: AsRef<[bool]>>(sequences: &[S], cap: usize) -> Result<ConditionalProbTable, StreakError> {
    if cap < 2 {
        return Err(StreakError::BadCap(cap));
    }
    let mut wins = vec![[0u64; 2]; cap];
    let mut losses = vec![[0u64; 2]; cap];
    for seq in sequences {
        let seq = seq.as_ref();
        let mut run = 0usize;
        for t in 0..seq.len() {
            run = if t > 0 && seq[t] == seq[t - 1] { run + 1 } else { 1 };
            let Some(&next) = seq.get(t + 1) else { break };
            let bucket = run.min(cap) - 1;
            let table = if seq[t] { &mut wins } else { &mut losses };
            table[bucket][0] += 1;
            table[bucket][1] += u64::from(next);
        }
    }
    let entries = |prefix: char, table: &[[u64; 2]]| {
        table
            .iter()
            .enumerate()
            .map(|(i, &[support, wins_next])| ConditionalEntry {
                label: if i + 1 == cap { format!("{prefix}{}+", i + 1) } else { format!("{prefix}{}", i + 1) },
                support,
                wins_next,
                probability: (support > 0).then(|| wins_next as f64 / support as f64),
            })
            .collect()
    };
    Ok(ConditionalProbTable { cap, after_wins: entries('W', &wins), after_losses: entries('L', &losses) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> Vec<bool> {
        s.split(',').map(|c| c.trim() == "W").collect()
    }

    const SAMPLE: &str = "W,W,L,W,W,W,L,W,L,W,W,L,W,W";

    fn row_counts(records: &[StreakRecord], len: usize) -> (usize, usize) {
        let rows: Vec<_> = records.iter().filter(|r| r.length == len).collect();
        (rows.len(), rows.iter().filter(|r| r.next == Transition::Extension).count())
    }

    #[test]
    fn fourteen_point_sample() {
        let r = extract_streaks(&seq(SAMPLE));
        assert_eq!(row_counts(&r, 1), (5, 4));
        assert_eq!(row_counts(&r, 2), (4, 1));
        assert_eq!(row_counts(&r, 3), (1, 0));
        let t = build_contingency(&r, 3).unwrap();
        assert_eq!(t.counts, vec![[4, 1], [1, 3], [0, 1]]);
        assert_eq!(t.row_totals(), vec![5, 4, 1]);
        let p: Vec<_> = transition_probs(&t).into_iter().map(|r| r.extension.unwrap()).collect();
        assert_eq!(p, vec![0.8, 0.25, 0.0]);
    }

    #[test]
    fn truncation_terminates() {
        let r = extract_streaks(&[true, true]);
        assert_eq!(
            r,
            vec![
                StreakRecord { length: 1, next: Transition::Extension },
                StreakRecord { length: 2, next: Transition::Termination }
            ]
        );
        assert!(extract_streaks(&[false; 5]).is_empty());
    }

    #[test]
    fn single_terminated_streak() {
        let t = build_contingency(&extract_streaks(&[true, false]), 2).unwrap();
        assert_eq!(t.counts, vec![[0, 1], [0, 0]]);
        assert!(matches!(chi_squared_test(&t), Err(StreakError::DegenerateMargins(_))));
        assert_eq!(build_contingency(&[], 7), Err(StreakError::EmptyStreaks));
        assert_eq!(build_contingency(&extract_streaks(&[true]), 1), Err(StreakError::BadCap(1)));
    }

    #[test]
    fn transition_probability_of_full_row() {
        let t = ContingencyTable::from_counts(vec![[10, 0], [3, 3]]);
        assert_eq!(transition_probs(&t)[0].extension, Some(1.0));
        let t = ContingencyTable::from_counts(vec![[10, 0], [0, 0]]);
        assert_eq!(transition_probs(&t)[1].extension, None);
    }

    #[test]
    fn equal_proportions_give_zero_statistic() {
        let t = ContingencyTable::from_counts(vec![[20, 10]; 4]);
        let r = chi_squared_test(&t).unwrap();
        assert!(r.statistic.abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert_eq!(r.df, 3);
    }

    #[test]
    fn two_by_two_hand_value() {
        // expected counts are all 5, every cell deviates by 5: 4 * 25 / 5
        let t = ContingencyTable::from_counts(vec![[10, 0], [0, 10]]);
        let r = chi_squared_test(&t).unwrap();
        assert!((r.statistic - 20.0).abs() < 1e-12);
        assert_eq!(r.df, 1);
        assert!((r.p_value / 7.744_216_431_044_07e-6 - 1.0).abs() < 1e-9);
        assert!(!r.valid);
    }

    #[test]
    fn exact_two_by_two_enumeration() {
        let t = ContingencyTable::from_counts(vec![[5, 0], [0, 5]]);
        let e = exact_test_enumerated(&t).unwrap();
        assert!((e.p_value - 2.0 / 252.0).abs() < 1e-12);
        assert_eq!(e.replicates, 6);
    }

    #[test]
    fn exact_mc_determinism_and_bounds() {
        let t = ContingencyTable::from_counts(vec![[5, 1], [2, 4], [1, 6]]);
        let a = exact_test(&t, 5000, 7).unwrap();
        let b = exact_test(&t, 5000, 7).unwrap();
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a.p_value));
        assert_eq!(exact_test(&t, 10, 7), Err(StreakError::TooFewReplicates(10)));
    }

    #[test]
    fn hypergeometric_sampler_mean() {
        let lf = ln_factorial_table(200);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 40_000;
        let draws: Vec<u64> = (0..n).map(|_| sample_hypergeometric(&mut rng, 200, 70, 50, &lf)).collect();
        let mean = draws.iter().sum::<u64>() as f64 / n as f64;
        // E = 50 * 70 / 200 = 17.5; Var = 50*.35*.65*150/199
        let sd = (50.0 * 0.35 * 0.65 * 150.0 / 199.0f64).sqrt();
        assert!((mean - 17.5).abs() < 4.0 * sd / (n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn table_count() {
        let m = Margins::of(&ContingencyTable::from_counts(vec![[1, 1], [1, 1], [1, 1]]));
        // columns (x1,x2,x3) in {0,1,2}^3 with sum 3 and x_i <= 2: 7 tables
        assert_eq!(m.count_tables(), 7);
    }

    #[test]
    fn conditional_probabilities() {
        let alt: Vec<bool> = (0..10).map(|i| i % 2 == 0).collect();
        let c = conditional_win_probs(&[alt], 7).unwrap();
        assert_eq!(c.after_wins[0].probability, Some(0.0));
        assert_eq!(c.after_losses[0].probability, Some(1.0));

        let c = conditional_win_probs(&[vec![true, true, true]], 7).unwrap();
        assert_eq!(c.after_wins[0].probability, Some(1.0));
        assert_eq!(c.after_wins[1].probability, Some(1.0));
        assert_eq!(c.after_wins[2].probability, None);
        assert_eq!(c.after_wins[6].label, "W7+");
    }

    #[test]
    fn conditional_does_not_cross_matches() {
        let c = conditional_win_probs(&[vec![true], vec![true]], 3).unwrap();
        assert_eq!(c.after_wins[0].support, 0);
    }
}
