//! Artifact writing: every file lands via a temp file in the same directory
//! and an atomic rename, so readers never see a partial artifact.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Schema version stamped into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(OutDir { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path(name)).map_err(|e| e.error)?;
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        Ok(())
    }

    /// Pretty JSON with a trailing newline and a `schema_version` field.
    pub fn write_json<T: Serialize>(&mut self, name: &str, kind: &str, body: &T) -> std::io::Result<()> {
        let doc = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "kind": kind,
            "body": body,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("reports serialize");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Names of the files written so far, in order.
    pub fn written(&self) -> &[String] {
        &self.written
    }
}

/// Plotting script stub that reads the plot-data CSVs next to it.
pub const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plots the CSV artifacts in this directory (matplotlib + pandas)."""
import glob
import os

import matplotlib.pyplot as plt
import pandas as pd

here = os.path.dirname(os.path.abspath(__file__))


def path(name):
    return os.path.join(here, name)


if os.path.exists(path("series.csv")):
    s = pd.read_csv(path("series.csv"))
    fig, ax = plt.subplots(3, 1, sharex=True, figsize=(10, 8))
    ax[0].plot(s.t, s.M)
    ax[0].set_ylabel("M_t")
    ax[1].plot(s.t, s.cusum_upper, label="upper")
    ax[1].plot(s.t, s.cusum_lower, label="lower")
    up, down = s[s.CP > 0], s[s.CP < 0]
    ax[1].scatter(up.t, up.cusum_upper, marker="^", color="red")
    ax[1].scatter(down.t, down.cusum_lower, marker="v", color="green")
    ax[1].legend()
    ax[2].plot(s.t, s.V)
    ax[2].set_ylabel("V_t")
    fig.savefig(path("series.png"), dpi=120)

rocs = sorted(glob.glob(path("roc_*.csv")))
if rocs:
    fig, ax = plt.subplots(figsize=(6, 6))
    for f in rocs:
        r = pd.read_csv(f)
        ax.plot(r.fpr, r.tpr, label=os.path.basename(f)[4:-4])
    ax.plot([0, 1], [0, 1], linestyle=":")
    ax.legend()
    fig.savefig(path("roc.png"), dpi=120)

if os.path.exists(path("shap_values.csv")):
    v = pd.read_csv(path("shap_values.csv"))
    order = v.groupby("feature").shap.apply(lambda x: x.abs().mean()).sort_values().index
    fig, ax = plt.subplots(figsize=(8, 5))
    for i, name in enumerate(order):
        sub = v[v.feature == name]
        ax.scatter(sub.shap, [i] * len(sub), c=sub.value, s=8)
    ax.set_yticks(range(len(order)))
    ax.set_yticklabels(order)
    fig.savefig(path("shap.png"), dpi=120)
"#;
