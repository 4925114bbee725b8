//! Experiment config file.
//!
//! A TOML file of flat `key = value` pairs. Every key is optional and mirrors
//! a command-line flag with dashes replaced by underscores; a flag given on
//! the command line wins over the file.
//!
//! ```toml
//! seed = 7
//! mode = "cross"
//! epochs = 4
//! learning_rate = 0.01
//! mask_rate = 0.1
//! split = "0.8,0.1,0.1"
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::formats::read_text;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    // dataset
    pub seeds: Option<usize>,
    pub max_per_provenance: Option<usize>,
    pub mask_rate: Option<f64>,
    pub split: Option<String>,
    pub group_by_mention: Option<bool>,
    // model
    pub mode: Option<String>,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub embed_dim: Option<usize>,
    pub hash_vocab: Option<usize>,
    pub lambda: Option<f64>,
    pub threshold: Option<f64>,
    pub gamma: Option<f64>,
    pub init_scale: Option<f64>,
    pub typing: Option<bool>,
    // ablation
    pub fractions: Option<String>,
    pub filter: Option<String>,
    // service
    pub port: Option<u16>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        toml::from_str(&text).map_err(|e| {
            let line = e
                .span()
                .map_or(0, |s| text[..s.start].matches('\n').count() + 1);
            Error::format(path, line, e.message())
        })
    }
}

/// Parses `"0.8,0.1,0.1"`.
pub fn parse_ratios(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts = parse_floats(s)?;
    parts
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 3 comma-separated ratios, got {}", v.len()))
}

pub fn parse_floats(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {p:?}"))
        })
        .collect()
}
