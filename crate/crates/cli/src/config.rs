//! Experiment configuration.
//!
//! The file is flat TOML: every key is a scalar or a list, for example
//!
//! ```toml
//! channel = "bm"
//! rho = [0.0, 0.9]
//! rates = [[1, 2], [2, 4]]
//! eps1 = [0.0, 0.005, 0.01, 0.05]
//! eps2 = [0.0, 0.01, 0.05, 0.10]
//! ```
//!
//! Missing keys take the defaults of [`ExperimentConfig::default`].

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use twcq::{ChannelKind, NoisePair, SourceConfig, TrainConfig};

use crate::error::{io_err, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Ba,
    Bm,
}

impl From<Channel> for ChannelKind {
    fn from(c: Channel) -> Self {
        match c {
            Channel::Ba => ChannelKind::BinaryAdditive,
            Channel::Bm => ChannelKind::BinaryMultiplying,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Half,
    Both,
}

impl Mode {
    pub fn half(self) -> bool {
        matches!(self, Mode::Half | Mode::Both)
    }

    pub fn full(self) -> bool {
        matches!(self, Mode::Full | Mode::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub channel: Channel,
    pub mode: Mode,
    pub rho: Vec<f64>,
    /// `[half-duplex rate, full-duplex rate]` pairs.
    pub rates: Vec<[usize; 2]>,
    /// Noise schedule, one entry per point for each terminal.
    pub eps1: Vec<f64>,
    pub eps2: Vec<f64>,
    pub grid_points: usize,
    pub grid_halfwidth: f64,
    pub stop_threshold: f64,
    pub max_iters: usize,
    pub refresh_codebooks: bool,
    pub seed: u64,
    /// Monte Carlo samples per table row, 0 to skip.
    pub simulate: usize,
    /// Write codebook and partition dumps plus saved systems.
    pub dump_figures: bool,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        let source = SourceConfig::new(0.0);
        Self {
            channel: Channel::Ba,
            mode: Mode::Both,
            rho: vec![0.0, 0.9],
            rates: vec![[1, 2], [2, 4]],
            eps1: vec![0.0, 0.005, 0.01, 0.05],
            eps2: vec![0.0, 0.01, 0.05, 0.10],
            grid_points: source.grid_points,
            grid_halfwidth: source.grid_halfwidth,
            stop_threshold: train.stop_threshold,
            max_iters: train.max_iters,
            refresh_codebooks: train.refresh_codebooks,
            seed: 1,
            simulate: 0,
            dump_figures: false,
            out: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_toml(&text)
    }

    pub fn kind(&self) -> ChannelKind {
        self.channel.into()
    }

    pub fn schedule(&self) -> Result<Vec<NoisePair>, CliError> {
        if self.eps1.len() != self.eps2.len() {
            return Err(CliError::Config(format!(
                "eps1 has {} entries but eps2 has {}",
                self.eps1.len(),
                self.eps2.len()
            )));
        }
        self.eps1
            .iter()
            .zip(&self.eps2)
            .map(|(&a, &b)| NoisePair::new(a, b).map_err(|e| CliError::Config(e.to_string())))
            .collect()
    }

    pub fn source(&self, rho: f64) -> SourceConfig {
        SourceConfig::with_grid(rho, self.grid_halfwidth, self.grid_points)
    }

    pub fn train_config(&self) -> Result<TrainConfig, CliError> {
        let cfg = TrainConfig {
            stop_threshold: self.stop_threshold,
            max_iters: self.max_iters,
            anneal_schedule: self.schedule()?,
            refresh_codebooks: self.refresh_codebooks,
            ..TrainConfig::default()
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.train_config()?;
        for &rho in &self.rho {
            self.source(rho)
                .validate()
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        for &[half, full] in &self.rates {
            if half == 0 || full != 2 * half {
                return Err(CliError::Config(format!(
                    "rate pair [{half}, {full}]: full-duplex rate must be twice the half-duplex rate"
                )));
            }
            if full > twcq::channel::MAX_TUPLE_LEN {
                return Err(CliError::Config(format!(
                    "rate pair [{half}, {full}]: at most {} bits per sample",
                    twcq::channel::MAX_TUPLE_LEN
                )));
            }
        }
        Ok(())
    }
}
