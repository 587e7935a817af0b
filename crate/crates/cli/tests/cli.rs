use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_momentum"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn summary(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 1, "one summary line, got {text:?}");
    serde_json::from_str(text.trim()).expect("summary is JSON")
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Small annotated corpus shared by the tests.
fn corpus(dir: &Path) -> PathBuf {
    let out = dir.join("corpus");
    let o = run(&["synth", "--kind", "annotated", "--matches", "2", "--points", "180", "--seed", "3", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out.join("synth.csv")
}

const FAST: &[&str] = &["--epochs", "15", "--swarm", "6", "--iterations", "4", "--seeds", "2", "--replicates", "3000", "--background", "15"];

fn fast_flags(cmd: &str) -> Vec<&'static str> {
    let allowed: &[&str] = match cmd {
        "test-momentum" => &["--replicates"],
        "train" | "evaluate" => &["--epochs", "--swarm", "--iterations", "--seeds"],
        "shap" => &["--epochs", "--swarm", "--iterations", "--seeds", "--background"],
        "report" => &["--epochs", "--swarm", "--iterations", "--seeds", "--replicates", "--background"],
        _ => &[],
    };
    FAST.chunks(2).filter(|c| allowed.contains(&c[0])).flatten().copied().collect()
}

#[test]
fn every_subcommand_is_byte_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let input = corpus(tmp.path());
    let before = std::fs::read(&input).unwrap();
    let cmds = [
        "ingest",
        "test-momentum",
        "select-features",
        "momentum",
        "changepoints",
        "shift",
        "train",
        "evaluate",
        "shap",
        "report",
    ];
    for cmd in cmds {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let dir = tmp.path().join(format!("{cmd}-{rep}"));
            let mut args = vec![cmd, "--input", p(&input), "--out", p(&dir), "--seed", "7"];
            args.extend(fast_flags(cmd));
            let o = run(&args);
            assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
            assert_eq!(summary(&o)["command"], cmd);
            outputs.push((o.stdout, files(&dir)));
        }
        assert!(!outputs[0].1.is_empty(), "{cmd} wrote nothing");
        assert_eq!(outputs[0].1, outputs[1].1, "{cmd} artifacts differ between runs");
        assert_eq!(outputs[0].0, outputs[1].0, "{cmd} summaries differ");
    }
    // synth too
    let a = run(&["synth", "--kind", "null", "--seed", "5", "--out", p(&tmp.path().join("s0"))]);
    let b = run(&["synth", "--kind", "null", "--seed", "5", "--out", p(&tmp.path().join("s1"))]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(files(&tmp.path().join("s0")), files(&tmp.path().join("s1")));
    assert_eq!(std::fs::read(&input).unwrap(), before, "input was modified");
}

#[test]
fn report_bundles_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let input = corpus(tmp.path());
    let dir = tmp.path().join("report");
    let mut args = vec!["report", "--input", p(&input), "--out", p(&dir)];
    args.extend(fast_flags("report"));
    let o = run(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let names = files(&dir);
    for want in [
        "contingency.json",
        "selection.json",
        "momentum.csv",
        "weights.json",
        "cusum.csv",
        "changepoints.json",
        "shift.csv",
        "series.csv",
        "model.json",
        "train.json",
        "metrics.csv",
        "roc_base.csv",
        "roc_base_m_cp_v.csv",
        "shap_ranking.csv",
        "shap_values.csv",
        "plot.py",
        "report.json",
    ] {
        assert!(names.contains_key(want), "missing {want}");
    }
    let report: Value = serde_json::from_slice(&names["report.json"]).unwrap();
    assert_eq!(report["schema_version"], 1);
    let listed: Vec<&str> = report["body"]["artifacts"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    for name in names.keys() {
        assert!(listed.contains(&name.as_str()), "{name} not listed");
    }
    let roc = String::from_utf8_lossy(&names["roc_base.csv"]).into_owned();
    assert!(roc.starts_with("fpr,tpr\n0,0\n"));
}

#[test]
fn synth_then_test_momentum_smoke() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("s");
    let o = run(&["synth", "--kind", "momentum", "--boost-wins", "0", "--boost-losses", "0", "--seed", "1", "--out", p(&s)]);
    assert!(o.status.success());
    let o = run(&["test-momentum", "--input", p(&s.join("synth.csv")), "--out", p(&tmp.path().join("t")), "--replicates", "2000"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = summary(&o);
    let pv = v["p_value"].as_f64().expect("p_value present");
    assert!((0.0..=1.0).contains(&pv));
    assert_eq!(v["matches"], 31);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = run(&["momentum", "--frobnicate", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--frobnicate"));
    let o = run(&["nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_rules() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("s");
    assert!(run(&["synth", "--kind", "null", "--matches", "4", "--points", "120", "--out", p(&s)]).status.success());
    let input = s.join("synth.csv");

    let bad = tmp.path().join("bad.conf");
    std::fs::write(&bad, "cap=5\nwhatever=1\n").unwrap();
    let o = run(&["test-momentum", "--input", p(&input), "--config", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("whatever"));

    // file sets cap 5 and replicates, the flag overrides cap
    let good = tmp.path().join("good.conf");
    std::fs::write(&good, "# streak test\ncap = 5\nreplicates=1000\n").unwrap();
    let out = tmp.path().join("t");
    let o = run(&["test-momentum", "--input", p(&input), "--config", p(&good), "--cap", "3", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&std::fs::read(out.join("contingency.json")).unwrap()).unwrap();
    assert_eq!(doc["body"]["cap"], 3);
    assert_eq!(doc["body"]["exact_test"]["replicates"], 1000);
}

#[test]
fn domain_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let input = corpus(tmp.path());
    let o = run(&["momentum", "--input", p(&input), "--match-id", "nope", "--out", p(&tmp.path().join("x"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope"));

    let broken = tmp.path().join("broken.csv");
    std::fs::write(&broken, "match_id,point_no,point_victor\nm,1,3\n").unwrap();
    let o = run(&["test-momentum", "--input", p(&broken), "--out", p(&tmp.path().join("y"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("point_victor"));

    let o = run(&["train", "--input", p(&input), "--split", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_documents_defaults() {
    let o = run(&["report", "--help"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for flag in ["--cap", "--target-changepoints", "--epochs", "--swarm", "--background", "--split", "--seed", "--out"] {
        let line = text.lines().find(|l| l.contains(flag)).unwrap_or_else(|| panic!("{flag} missing from help"));
        let _ = line;
    }
    assert!(text.matches("[default:").count() >= 12, "{text}");
}
