//! Run configuration: a flat `key = value` file, overridden by flags.

use std::fmt::Display;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use mann_core::{BlockGrid, FeatureConfig, MannConfig, TrainConfig};

pub const KEYS: [&str; 9] = [
    "d",
    "block_grid",
    "snn_hidden",
    "cnn_hidden",
    "learning_rate",
    "epochs",
    "threshold",
    "master_seed",
    "test_fraction",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Axes per orientation: column, row, diagonal, block.
    pub d: [usize; 4],
    pub block_grid: BlockGrid,
    pub snn_hidden: usize,
    pub cnn_hidden: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub threshold: f64,
    pub master_seed: u64,
    pub test_fraction: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            d: [8; 4],
            block_grid: BlockGrid::default(),
            snn_hidden: 16,
            cnn_hidden: 4,
            learning_rate: 0.1,
            epochs: 500,
            threshold: 0.5,
            master_seed: 0,
            test_fraction: 0.3,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: Display,
{
    value
        .parse()
        .map_err(|e| anyhow::anyhow!("invalid value '{value}' for {key}: {e}"))
}

/// `"8"` applies to all four orientations; `"c,r,d,b"` sets each one.
fn parse_d(value: &str) -> Result<[usize; 4]> {
    let parts: Vec<usize> = value
        .split(',')
        .map(|p| parse::<usize>("d", p.trim()))
        .collect::<Result<_>>()?;
    let d = match parts.as_slice() {
        [n] => [*n; 4],
        [c, r, d, b] => [*c, *r, *d, *b],
        _ => bail!("d must be one count or four comma-separated counts, got '{value}'"),
    };
    if d.contains(&0) {
        bail!("d must be at least 1, got '{value}'");
    }
    Ok(d)
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "d" => self.d = parse_d(value)?,
            "block_grid" => self.block_grid = parse(key, value)?,
            "snn_hidden" => self.snn_hidden = parse(key, value)?,
            "cnn_hidden" => self.cnn_hidden = parse(key, value)?,
            "learning_rate" => self.learning_rate = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "threshold" => self.threshold = parse(key, value)?,
            "master_seed" => self.master_seed = parse(key, value)?,
            "test_fraction" => self.test_fraction = parse(key, value)?,
            _ => bail!(
                "unknown config key '{key}' (known keys: {})",
                KEYS.join(", ")
            ),
        }
        Ok(())
    }

    /// Applies a config file. Blank lines and `#` comments are ignored; a key
    /// may appear only once.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        let mut seen: Vec<String> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected key = value, found '{line}'", n + 1);
            };
            let key = key.trim();
            if seen.iter().any(|k| k == key) {
                bail!("line {}: duplicate key '{key}'", n + 1);
            }
            self.set(key, value.trim())
                .with_context(|| format!("line {}", n + 1))?;
            seen.push(key.to_string());
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            bail!("epochs must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            bail!("learning_rate must be positive, got {}", self.learning_rate);
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            bail!("threshold must be in (0, 1), got {}", self.threshold);
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            bail!(
                "test_fraction must be in (0, 1), got {}",
                self.test_fraction
            );
        }
        if self.snn_hidden == 0 || self.cnn_hidden == 0 {
            bail!("hidden layer sizes must be at least 1");
        }
        Ok(())
    }

    pub fn features(&self) -> FeatureConfig {
        FeatureConfig {
            d: self.d,
            block_grid: self.block_grid,
        }
    }

    pub fn mann(&self, classes: usize) -> MannConfig {
        MannConfig {
            m: 4,
            l: classes,
            snn_hidden: self.snn_hidden,
            cnn_hidden: self.cnn_hidden,
            threshold: self.threshold,
            train: TrainConfig {
                learning_rate: self.learning_rate,
                epochs: self.epochs,
                seed: self.master_seed,
                shuffle: true,
            },
            master_seed: self.master_seed,
        }
    }
}
