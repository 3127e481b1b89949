//! Turning command-line strings and config files into core types.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use jwbraid::{BraidWord, ClosureSpec, Coefficients, InfiniteBraidSpec};
use serde::{Deserialize, Serialize};

use crate::Format;

/// Everything an experiment depends on; flags override file values.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec: Option<InfiniteBraidSpec>,
    pub max_len: Option<usize>,
    pub order: Option<i64>,
    pub closure: Option<ClosureSpec>,
    pub coefficients: Option<Coefficients>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub i_max: Option<usize>,
    pub window: Option<usize>,
    pub max_crossings: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
            }
        }
    }
}

/// Reads JSON given inline (starting with `{`) or from a file.
fn inline_or_file(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
    }
}

pub fn spec(arg: Option<&PathBuf>, config: &ExperimentConfig) -> Result<InfiniteBraidSpec> {
    match (arg, &config.spec) {
        (Some(p), _) => Ok(InfiniteBraidSpec::from_json(&inline_or_file(&p.to_string_lossy())?)?),
        (None, Some(s)) => Ok(s.clone().validated()?),
        (None, None) => bail!("no braid spec: pass --spec or set `spec` in the config"),
    }
}

pub fn closure(arg: Option<&str>, config: &ExperimentConfig) -> Result<ClosureSpec> {
    match (arg, &config.closure) {
        (Some("trace"), _) | (None, None) => Ok(ClosureSpec::Trace),
        (Some(a), _) => serde_json::from_str(&inline_or_file(a)?).context("parsing closure"),
        (None, Some(c)) => Ok(c.clone()),
    }
}

/// Parses a word; without `--n` the strand count is one more than the
/// largest generator index (at least 2).
pub fn word(n: Option<usize>, text: &str) -> Result<BraidWord> {
    let n = match n {
        Some(n) => n,
        None => {
            let widest = text
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter_map(|t| t.parse::<i64>().ok())
                .map(|k| k.unsigned_abs() as usize)
                .max()
                .unwrap_or(1);
            (widest + 1).max(2)
        }
    };
    Ok(BraidWord::parse(n, text)?)
}
