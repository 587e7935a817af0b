//! Subcommand implementations. Each returns the one-line stdout summary.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use momentum_core::explain::{explain_instances, sample_background, ShapConfig};
use momentum_core::ingest::{parse_outcomes, write_csv, ColumnMap};
use momentum_core::model::{split_indices, BpConfig, ScenarioConfig, SplitMode};
use momentum_core::stats::{RocCurve, StepwiseConfig};
use momentum_core::streaks::{conditional_win_probs, pooled_streaks, transition_probs};
use momentum_core::synth::{gen_momentum, write_sequences_csv, AnnotatedConfig, StreakBoost};
use momentum_core::{
    analyze_match, build_contingency, chi_squared_test, classification_metrics, exact_test, gen_annotated, gen_null,
    parse_csv, roc_auc, scenario_matrix, stepwise_select, train_bp_pso, Dataset, GeneratorConfig, MatchAnalysis,
    MatchData, MetricsReport, PipelineConfig, PsoConfig, Scenario, TrainedNet,
};
use serde_json::{json, Value};

use crate::output::{OutDir, PLOT_SCRIPT};
use crate::settings::{Settings, UsageError};

pub enum CliError {
    /// Exit status 2.
    Usage(String),
    /// Exit status 1; carries the library error message verbatim.
    Domain(String),
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e.0)
    }
}

macro_rules! domain_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        }
    )*};
}

domain_from!(
    momentum_core::Error,
    momentum_core::ingest::IngestError,
    momentum_core::streaks::StreakError,
    momentum_core::model::ModelError,
    momentum_core::stats::StatsError,
    momentum_core::explain::ExplainError,
    momentum_core::synth::SynthError
);

type Result<T> = std::result::Result<T, CliError>;

fn io_err(what: &str, path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Domain(format!("cannot {what} {}: {e}", path.display()))
}

fn out_dir(s: &Settings) -> Result<OutDir> {
    let root = s.path("out").unwrap_or_else(|| PathBuf::from("out"));
    OutDir::create(&root).map_err(|e| io_err("create", &root, e))
}

/// Artifact writer bound to its directory, turning IO failures into domain errors.
struct Out {
    dir: OutDir,
}

impl Out {
    fn new(s: &Settings) -> Result<Self> {
        Ok(Out { dir: out_dir(s)? })
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.path(name);
        self.dir.write(name, body.as_bytes()).map_err(|e| io_err("write", &path, e))
    }

    fn json<T: serde::Serialize>(&mut self, name: &str, kind: &str, body: &T) -> Result<()> {
        let path = self.dir.path(name);
        self.dir.write_json(name, kind, body).map_err(|e| io_err("write", &path, e))
    }
}

fn open_input(s: &Settings) -> Result<BufReader<File>> {
    let path = s.require_path("input")?;
    let f = File::open(&path).map_err(|e| io_err("open", &path, e))?;
    Ok(BufReader::new(f))
}

fn load_matches(s: &Settings) -> Result<Vec<MatchData>> {
    Ok(parse_csv(open_input(s)?, &ColumnMap::default())?)
}

/// `--match-id`: one id, `all`, or (when absent) `default_all` decides.
fn select(s: &Settings, matches: Vec<MatchData>, default_all: bool) -> Result<Vec<MatchData>> {
    match s.raw("match-id") {
        Some("all") => Ok(matches),
        None if default_all => Ok(matches),
        Some(id) => match matches.into_iter().find(|m| m.match_id == id) {
            Some(m) => Ok(vec![m]),
            None => Err(CliError::Domain(format!("match `{id}` not found in input"))),
        },
        None => matches.into_iter().last().map(|m| vec![m]).ok_or_else(|| momentum_core::Error::Empty.into()),
    }
}

fn pipeline_cfg(s: &Settings) -> Result<PipelineConfig> {
    Ok(PipelineConfig {
        drift: s.get("drift")?,
        threshold: s.get("threshold")?,
        target_changepoints: s.get_or("target-changepoints", 40)?,
        ..PipelineConfig::default()
    })
}

fn analyses(s: &Settings, matches: &[MatchData]) -> Result<Vec<MatchAnalysis>> {
    let cfg = pipeline_cfg(s)?;
    if matches.is_empty() {
        return Err(momentum_core::Error::Empty.into());
    }
    Ok(matches.iter().map(|m| analyze_match(m, &cfg)).collect::<std::result::Result<_, _>>()?)
}

fn pooled(analyses: &[MatchAnalysis]) -> Result<Dataset> {
    let parts: Vec<Dataset> = analyses.iter().map(MatchAnalysis::dataset).collect();
    Dataset::concat(&parts).ok_or_else(|| momentum_core::Error::Empty.into())
}

fn file_safe(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn scenario_slug(name: &str) -> String {
    name.to_ascii_lowercase().replace('+', "_")
}

fn ids(analyses: &[MatchAnalysis]) -> Vec<&str> {
    analyses.iter().map(|a| a.match_id.as_str()).collect()
}

// ---- per-stage writers -------------------------------------------------

fn write_features(out: &mut Out, matches: &[MatchData]) -> Result<Value> {
    let mut listing = Vec::new();
    for m in matches {
        let frame = momentum_core::derive_features(m)?;
        let mut buf = Vec::new();
        frame.write_csv(&mut buf)?;
        let name = format!("features_{}.csv", file_safe(&m.match_id));
        out.text(&name, &String::from_utf8_lossy(&buf))?;
        listing.push(json!({
            "match_id": m.match_id,
            "points": frame.len(),
            "imputed": frame.imputed.len(),
            "file": name,
        }));
    }
    out.json("ingest.json", "ingest", &listing)?;
    Ok(json!({ "matches": matches.len(), "points": matches.iter().map(MatchData::len).sum::<usize>() }))
}

fn write_streak_test(out: &mut Out, s: &Settings, sequences: &[Vec<bool>]) -> Result<Value> {
    let cap = s.get_or("cap", 7usize)?;
    let replicates = s.get_or("replicates", 100_000u64)?;
    let seed = s.get_or("seed", 1u64)?;
    let table = build_contingency(&pooled_streaks(sequences), cap)?;
    let chi = chi_squared_test(&table)?;
    let exact = exact_test(&table, replicates, seed)?;
    let rows: Vec<Value> = (0..table.rows())
        .map(|i| json!({ "label": table.label(i), "extensions": table.counts[i][0], "terminations": table.counts[i][1] }))
        .collect();
    let body = json!({
        "matches": sequences.len(),
        "cap": cap,
        "table": rows,
        "n": table.total(),
        "chi2": chi.statistic,
        "df": chi.df,
        "p_value": chi.p_value,
        "exact_p_value": exact.p_value,
        "chi_squared_test": chi,
        "exact_test": exact,
        "transition_probs": transition_probs(&table),
        "conditional_probs": conditional_win_probs(sequences, cap)?,
    });
    out.json("contingency.json", "streak-test", &body)?;
    out.text("contingency.txt", &table.render())?;
    Ok(json!({
        "matches": sequences.len(),
        "n": table.total(),
        "chi2": chi.statistic,
        "df": chi.df,
        "p_value": chi.p_value,
        "exact_p_value": exact.p_value,
    }))
}

fn write_selection(out: &mut Out, s: &Settings, data: &Dataset) -> Result<Value> {
    let columns: Vec<(String, Vec<f64>)> = momentum_core::FeatureId::all()
        .map(|f| {
            let name = f.to_string();
            let col = data.column(&name).expect("dataset carries x1..x16");
            (name, col)
        })
        .collect();
    let candidates: Vec<usize> = (0..columns.len()).collect();
    let cfg = StepwiseConfig { seed: s.get_or("seed", 1u64)?, ..StepwiseConfig::default() };
    let trace = stepwise_select(&columns, &data.labels, &candidates, &cfg)?;
    out.json("selection.json", "feature-selection", &trace)?;
    Ok(json!({ "selected": trace.selected, "auc": trace.auc }))
}

fn write_momentum(out: &mut Out, analyses: &[MatchAnalysis]) -> Result<Value> {
    let mut csv = String::from("match_id,t,M\n");
    for a in analyses {
        for (t, v) in a.momentum.values.iter().enumerate() {
            csv.push_str(&format!("{},{},{}\n", a.match_id, t + 1, v));
        }
    }
    out.text("momentum.csv", &csv)?;
    let body: Vec<Value> = analyses.iter().map(|a| json!({ "match_id": a.match_id, "weights": a.weights })).collect();
    out.json("weights.json", "entropy-weights", &body)?;
    let last = analyses.last().expect("non-empty");
    let weights: serde_json::Map<String, Value> =
        last.weights.columns.iter().zip(&last.weights.weights).map(|(c, w)| (c.clone(), json!(w))).collect();
    Ok(json!({ "match_id": last.match_id, "matches": analyses.len(), "weights": weights }))
}

fn write_changepoints(out: &mut Out, analyses: &[MatchAnalysis]) -> Result<Value> {
    let mut csv = String::from("match_id,t,M,cusum_upper,cusum_lower,CP\n");
    for a in analyses {
        let labels = a.changepoints.labels();
        for t in 0..a.momentum.len() {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                a.match_id,
                t + 1,
                a.momentum.values[t],
                a.trace.upper[t],
                a.trace.lower[t],
                labels[t]
            ));
        }
    }
    out.text("cusum.csv", &csv)?;
    let body: Vec<Value> = analyses
        .iter()
        .map(|a| {
            json!({
                "match_id": a.match_id,
                "params": a.params,
                "tuning": a.tuning,
                "count": a.changepoints.count(),
                "positives": a.changepoints.positives(),
                "negatives": a.changepoints.negatives(),
                "points": a.changepoints.points,
            })
        })
        .collect();
    out.json("changepoints.json", "changepoints", &body)?;
    let counts: Vec<usize> = analyses.iter().map(|a| a.changepoints.count()).collect();
    Ok(json!({ "matches": ids(analyses), "changepoints": counts }))
}

fn write_shift(out: &mut Out, analyses: &[MatchAnalysis]) -> Result<Value> {
    let mut csv = String::from("match_id,t,V\n");
    for a in analyses {
        for (t, v) in a.shift.values.iter().enumerate() {
            csv.push_str(&format!("{},{},{}\n", a.match_id, t + 1, v));
        }
    }
    out.text("shift.csv", &csv)?;
    let body: Vec<Value> = analyses
        .iter()
        .map(|a| json!({ "match_id": a.match_id, "d_max": a.shift.d_max, "anchors": a.shift.anchors }))
        .collect();
    out.json("shift.json", "shift-intensity", &body)?;
    let d_max: Vec<usize> = analyses.iter().map(|a| a.shift.d_max).collect();
    Ok(json!({ "matches": ids(analyses), "d_max": d_max }))
}

fn scenario_cfg(s: &Settings) -> Result<ScenarioConfig> {
    let seed = s.get_or("seed", 1u64)?;
    let count = s.get_or("seeds", 5u64)?;
    let ratio = s.get_or("split", 0.8)?;
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(CliError::Usage(format!("--split must be in (0, 1), got {ratio}")));
    }
    if count == 0 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    let pso_default = PsoConfig::default();
    let bp_default = BpConfig::default();
    Ok(ScenarioConfig {
        ratio,
        seeds: (seed..seed + count).collect(),
        hidden: vec![s.get_or("hidden", 8usize)?],
        pso: PsoConfig {
            swarm: s.get_or("swarm", pso_default.swarm)?,
            iterations: s.get_or("iterations", pso_default.iterations)?,
            seed,
            ..pso_default
        },
        bp: BpConfig {
            learning_rate: s.get_or("learning-rate", bp_default.learning_rate)?,
            epochs: s.get_or("epochs", bp_default.epochs)?,
        },
        split: SplitMode::Stratified,
    })
}

fn scenario(s: &Settings) -> Result<Option<Scenario>> {
    s.raw("scenario").map(|v| v.parse::<Scenario>().map_err(|e| CliError::Usage(e.to_string()))).transpose()
}

fn roc_csv(roc: &[(f64, f64)]) -> String {
    let mut out = String::from("fpr,tpr\n");
    for (f, t) in roc {
        out.push_str(&format!("{f},{t}\n"));
    }
    out
}

struct Split {
    train: Vec<usize>,
    test: Vec<usize>,
}

impl Split {
    fn of(data: &Dataset, cfg: &ScenarioConfig) -> Self {
        let (train, test) = split_indices(&data.labels, cfg.ratio, cfg.pso.seed, cfg.split);
        Split { train, test }
    }

    fn labels(data: &Dataset, rows: &[usize]) -> Vec<bool> {
        rows.iter().map(|&i| data.labels[i]).collect()
    }
}

struct Fitted {
    net: TrainedNet,
    metrics: MetricsReport,
    roc: RocCurve,
}

fn fit(data: &Dataset, sc: Scenario, cfg: &ScenarioConfig) -> Result<Fitted> {
    let split = Split::of(data, cfg);
    let cols = sc.columns();
    let xtr = data.select(&cols, &split.train)?;
    let ytr = Split::labels(data, &split.train);
    let net = train_bp_pso(&xtr, &ytr, cols.clone(), &cfg.hidden, &cfg.pso, &cfg.bp)?;
    let xte = data.select(&cols, &split.test)?;
    let yte = Split::labels(data, &split.test);
    let scores = net.predict_all(&xte)?;
    let metrics = classification_metrics(&scores, &yte, 0.5)?;
    let roc = roc_auc(&scores, &yte)?;
    Ok(Fitted { net, metrics, roc })
}

fn write_train(out: &mut Out, s: &Settings, data: &Dataset) -> Result<(Value, TrainedNet)> {
    let cfg = scenario_cfg(s)?;
    let sc = scenario(s)?.unwrap_or(Scenario::BaseMCpV);
    let fitted = fit(data, sc, &cfg)?;
    let mut model = fitted.net.to_json();
    model.push('\n');
    out.text("model.json", &model)?;
    let split = Split::of(data, &cfg);
    let body = json!({
        "scenario": sc.name(),
        "columns": sc.columns(),
        "seed": cfg.pso.seed,
        "split": cfg.ratio,
        "train_rows": split.train.len(),
        "test_rows": split.test.len(),
        "final_loss": fitted.net.history.final_loss,
        "metrics": fitted.metrics,
    });
    out.json("train.json", "training", &body)?;
    out.text(&format!("roc_{}.csv", scenario_slug(sc.name())), &roc_csv(&fitted.roc.points))?;
    let summary = json!({
        "scenario": sc.name(),
        "auc": fitted.metrics.auc,
        "f1": fitted.metrics.f1,
        "final_loss": fitted.net.history.final_loss,
    });
    Ok((summary, fitted.net))
}

fn write_evaluate(out: &mut Out, s: &Settings, data: &Dataset) -> Result<Value> {
    let cfg = scenario_cfg(s)?;
    let list: Vec<Scenario> = match scenario(s)? {
        Some(sc) => vec![sc],
        None => Scenario::ALL.to_vec(),
    };
    let specs: Vec<_> = list.iter().map(|sc| sc.spec()).collect();
    let report = scenario_matrix(data, &specs, &cfg)?;
    out.text("metrics.csv", &report.to_csv())?;
    out.json("metrics.json", "scenario-metrics", &json!({ "seeds": cfg.seeds, "rows": report.rows, "runs": report.runs.iter().map(|r| json!({"scenario": r.scenario, "seed": r.seed, "metrics": r.metrics})).collect::<Vec<_>>() }))?;
    for spec in &specs {
        // curve of the first seed
        if let Some(run) = report.runs.iter().find(|r| r.scenario == spec.name) {
            out.text(&format!("roc_{}.csv", scenario_slug(&spec.name)), &roc_csv(&run.roc))?;
        }
    }
    let auc: serde_json::Map<String, Value> = report.rows.iter().map(|r| (r.scenario.clone(), json!(r.auc))).collect();
    Ok(json!({ "seeds": cfg.seeds.len(), "auc": auc }))
}

fn write_shap(out: &mut Out, s: &Settings, data: &Dataset, trained: Option<TrainedNet>) -> Result<Value> {
    let cfg = scenario_cfg(s)?;
    let (net, source) = match (s.path("model"), trained) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(&path).map_err(|e| io_err("read", &path, e))?;
            (TrainedNet::from_json(&text)?, path.display().to_string())
        }
        (None, Some(net)) => (net, "trained".to_string()),
        (None, None) => {
            let sc = scenario(s)?.unwrap_or(Scenario::BaseMCpV);
            (fit(data, sc, &cfg)?.net, "trained".to_string())
        }
    };
    let split = Split::of(data, &cfg);
    let train = data.select(&net.features, &split.train)?;
    let test = data.select(&net.features, &split.test)?;
    let shap_cfg = ShapConfig { background: s.get_or("background", ShapConfig::default().background)?, seed: cfg.pso.seed };
    let background = sample_background(&train, &shap_cfg);
    let predict = |x: &[f64]| net.predict(x).unwrap_or(f64::NAN);
    let report = explain_instances(&predict, &test, &background, &net.features)?;
    out.text("shap_ranking.csv", &report.ranking_csv())?;
    out.text("shap_values.csv", &report.long_csv())?;
    let base = report.values.first().map_or(f64::NAN, |v| v.base);
    out.json(
        "shap.json",
        "shapley",
        &json!({
            "model": source,
            "features": report.features,
            "instances": report.instances.len(),
            "background": background.len(),
            "base": base,
            "ranking": report.ranking,
        }),
    )?;
    let top: Vec<&str> = report.ranking.iter().take(3).map(|r| r.feature.as_str()).collect();
    Ok(json!({ "instances": report.instances.len(), "top": top }))
}

fn with_command(name: &str, mut v: Value) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("command".into(), json!(name));
    if let Value::Object(rest) = v.take() {
        obj.extend(rest);
    }
    Value::Object(obj)
}

// ---- subcommands -------------------------------------------------------

pub fn ingest(s: &Settings) -> Result<Value> {
    let matches = select(s, load_matches(s)?, true)?;
    let mut out = Out::new(s)?;
    Ok(with_command("ingest", write_features(&mut out, &matches)?))
}

/// Pools every match unless `--match-id` names one.
pub fn test_momentum(s: &Settings) -> Result<Value> {
    let mut seqs = parse_outcomes(open_input(s)?)?;
    if let Some(id) = s.raw("match-id").filter(|id| *id != "all") {
        seqs.retain(|q| q.match_id == id);
        if seqs.is_empty() {
            return Err(CliError::Domain(format!("match `{id}` not found in input")));
        }
    }
    let won: Vec<Vec<bool>> = seqs.into_iter().map(|q| q.won).collect();
    let mut out = Out::new(s)?;
    Ok(with_command("test-momentum", write_streak_test(&mut out, s, &won)?))
}

/// Pools every match unless `--match-id` names one.
pub fn select_features(s: &Settings) -> Result<Value> {
    let matches = select(s, load_matches(s)?, true)?;
    let data = pooled(&analyses(s, &matches)?)?;
    let mut out = Out::new(s)?;
    Ok(with_command("select-features", write_selection(&mut out, s, &data)?))
}

pub fn momentum(s: &Settings) -> Result<Value> {
    let a = analyses(s, &select(s, load_matches(s)?, false)?)?;
    let mut out = Out::new(s)?;
    Ok(with_command("momentum", write_momentum(&mut out, &a)?))
}

pub fn changepoints(s: &Settings) -> Result<Value> {
    let a = analyses(s, &select(s, load_matches(s)?, false)?)?;
    let mut out = Out::new(s)?;
    Ok(with_command("changepoints", write_changepoints(&mut out, &a)?))
}

pub fn shift(s: &Settings) -> Result<Value> {
    let a = analyses(s, &select(s, load_matches(s)?, false)?)?;
    let mut out = Out::new(s)?;
    Ok(with_command("shift", write_shift(&mut out, &a)?))
}

pub fn train(s: &Settings) -> Result<Value> {
    let data = pooled(&analyses(s, &select(s, load_matches(s)?, false)?)?)?;
    let mut out = Out::new(s)?;
    Ok(with_command("train", write_train(&mut out, s, &data)?.0))
}

pub fn evaluate(s: &Settings) -> Result<Value> {
    let data = pooled(&analyses(s, &select(s, load_matches(s)?, false)?)?)?;
    let mut out = Out::new(s)?;
    Ok(with_command("evaluate", write_evaluate(&mut out, s, &data)?))
}

pub fn shap(s: &Settings) -> Result<Value> {
    let data = pooled(&analyses(s, &select(s, load_matches(s)?, false)?)?)?;
    let mut out = Out::new(s)?;
    Ok(with_command("shap", write_shap(&mut out, s, &data, None)?))
}

pub fn synth(s: &Settings) -> Result<Value> {
    let kind = s.raw("kind").unwrap_or("annotated").to_string();
    let seed = s.get_or("seed", 1u64)?;
    let mut buf = Vec::new();
    let (matches, points) = match kind.as_str() {
        "annotated" => {
            let d = AnnotatedConfig::default();
            let cfg = AnnotatedConfig {
                matches: s.get_or("matches", d.matches)?,
                points: s.get_or("points", d.points)?,
                seed,
                ..d
            };
            write_csv(&gen_annotated(&cfg), &mut buf)?;
            (cfg.matches, cfg.points)
        }
        "null" | "momentum" => {
            let d = GeneratorConfig::corpus_shaped(seed);
            let p = s.get_or("p", d.p)?;
            let matches = s.get_or("matches", d.matches)?;
            let len = s.get_or("points", d.len)?;
            let seqs = if kind == "null" {
                gen_null(p, len, matches, seed)?
            } else {
                let boost = StreakBoost {
                    after_wins: s.get_or("boost-wins", 0.0)?,
                    after_losses: s.get_or("boost-losses", 0.0)?,
                };
                gen_momentum(&GeneratorConfig { p, boost, len, matches, seed })?
            };
            write_sequences_csv(&seqs, "synth", &mut buf)?;
            (matches, len)
        }
        other => return Err(CliError::Usage(format!("unknown --kind `{other}` (expected null, momentum or annotated)"))),
    };
    let mut out = Out::new(s)?;
    out.text("synth.csv", &String::from_utf8_lossy(&buf))?;
    Ok(json!({
        "command": "synth",
        "kind": kind,
        "matches": matches,
        "points": points,
        "path": out.dir.path("synth.csv").display().to_string(),
    }))
}

/// Every stage on the selected match(es), plus `series.csv` of the last one,
/// a plotting script and `report.json`.
pub fn report(s: &Settings) -> Result<Value> {
    let matches = select(s, load_matches(s)?, false)?;
    let a = analyses(s, &matches)?;
    let data = pooled(&a)?;
    let mut out = Out::new(s)?;
    let seqs: Vec<Vec<bool>> = matches.iter().map(MatchData::outcomes).collect();

    let ingest = write_features(&mut out, &matches)?;
    let streaks = write_streak_test(&mut out, s, &seqs)?;
    let selection = write_selection(&mut out, s, &data)?;
    let momentum = write_momentum(&mut out, &a)?;
    let cps = write_changepoints(&mut out, &a)?;
    let shift = write_shift(&mut out, &a)?;
    out.text("series.csv", &a.last().expect("non-empty").series_csv())?;
    let (train, net) = write_train(&mut out, s, &data)?;
    let evaluate = write_evaluate(&mut out, s, &data)?;
    let shap = write_shap(&mut out, s, &data, Some(net))?;
    out.text("plot.py", PLOT_SCRIPT)?;

    let stages = json!({
        "ingest": ingest,
        "test_momentum": streaks,
        "select_features": selection,
        "momentum": momentum,
        "changepoints": cps,
        "shift": shift,
        "train": train,
        "evaluate": evaluate,
        "shap": shap,
    });
    let mut artifacts = out.dir.written().to_vec();
    artifacts.push("report.json".into());
    out.json("report.json", "report", &json!({ "matches": ids(&a), "artifacts": artifacts, "stages": stages }))?;
    Ok(json!({ "command": "report", "matches": ids(&a), "artifacts": artifacts.len(), "auc": stages["evaluate"]["auc"] }))
}
