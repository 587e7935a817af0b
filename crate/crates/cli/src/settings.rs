//! Flat `key=value` configuration merged with command-line flags.
//!
//! Precedence is flag > file > built-in default. Keys are the long flag
//! names without the leading dashes; `_` and `-` are interchangeable.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Every key a configuration file may set.
pub const KNOWN_KEYS: &[&str] = &[
    "input",
    "match-id",
    "out",
    "seed",
    "cap",
    "replicates",
    "drift",
    "threshold",
    "target-changepoints",
    "scenario",
    "split",
    "epochs",
    "swarm",
    "iterations",
    "hidden",
    "learning-rate",
    "seeds",
    "background",
    "model",
    "kind",
    "p",
    "boost-wins",
    "boost-losses",
    "points",
    "matches",
];

/// A usage problem: bad flag value, unknown config key, unreadable config.
#[derive(Debug)]
pub struct UsageError(pub String);

impl Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

/// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, UsageError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("config line {}: expected key=value, got `{line}`", i + 1)))?;
        let key = normalize(k);
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(UsageError(format!("config line {}: unknown key `{}`", i + 1, k.trim())));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Merged view over flags and the config file.
#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn new(flags: Vec<(&'static str, Option<String>)>, file: BTreeMap<String, String>) -> Self {
        let mut values = file;
        for (k, v) in flags {
            if let Some(v) = v {
                values.insert(k.to_string(), v);
            }
        }
        Settings { values }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, UsageError>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| UsageError(format!("invalid value `{v}` for --{key}: {e}"))))
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, UsageError>
    where
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(PathBuf::from)
    }

    pub fn require_path(&self, key: &str) -> Result<PathBuf, UsageError> {
        self.path(key).ok_or_else(|| UsageError(format!("--{key} is required")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let m = parse_config("# comment\ncap = 5\ntarget_changepoints=30\n\n").unwrap();
        assert_eq!(m["cap"], "5");
        assert_eq!(m["target-changepoints"], "30");
        let err = parse_config("capp=5").unwrap_err();
        assert!(err.0.contains("unknown key `capp`"));
        assert!(parse_config("cap 5").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = parse_config("cap=5\nseed=9").unwrap();
        let s = Settings::new(vec![("cap", Some("3".into())), ("seed", None)], file);
        assert_eq!(s.get_or::<usize>("cap", 7).unwrap(), 3);
        assert_eq!(s.get_or::<u64>("seed", 1).unwrap(), 9);
        assert_eq!(s.get_or::<f64>("split", 0.8).unwrap(), 0.8);
        assert!(Settings::new(vec![("cap", Some("x".into()))], BTreeMap::new()).get::<usize>("cap").is_err());
    }
}
