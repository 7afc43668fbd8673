//! Experiment configuration: a JSON file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use relaynet::rate::OptimizerOptions;
use relaynet::sim::{Scheme, DEFAULT_EPSILON};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// One simulation point. `n` is derived from the threshold when rate-scale
/// factors are given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderPoint {
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "B", default = "default_blocks")]
    pub blocks: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_blocks() -> usize {
    4
}

fn default_trials() -> usize {
    300
}

impl LadderPoint {
    pub fn new(m: usize) -> Self {
        LadderPoint { m, n: None, blocks: default_blocks(), trials: default_trials() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub scheme: Scheme,
    pub ladder: Vec<LadderPoint>,
    pub rate_scale: Vec<f64>,
    pub epsilon: f64,
    /// Point-to-point bin rate `R`; no binning when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_rate: Option<f64>,
    /// Slack over `H(S0|Sk)` for binned schemes; `2/m` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_rate_delta: Option<f64>,
    pub dry_run: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            scheme: Scheme::Sliding,
            ladder: vec![LadderPoint::new(6)],
            rate_scale: vec![0.8],
            epsilon: DEFAULT_EPSILON,
            bin_rate: None,
            bin_rate_delta: None,
            dry_run: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Built-in network name or path to a network document.
    pub network: String,
    /// `auto` or a comma-separated terminal order such as `0,1,3`.
    pub plan: String,
    pub optimizer: OptimizerOptions,
    pub certify: bool,
    pub simulation: SimulationConfig,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            network: "net-a".into(),
            plan: "auto".into(),
            optimizer: OptimizerOptions::default(),
            certify: false,
            simulation: SimulationConfig::default(),
            seed: 0,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let sim = &self.simulation;
        if sim.ladder.is_empty() {
            return Err(CliError::Config("the simulation ladder is empty".into()));
        }
        for p in &sim.ladder {
            if p.m == 0 || p.blocks == 0 || p.trials == 0 || p.n == Some(0) {
                return Err(CliError::Config(format!("ladder entries must be positive, got {p:?}")));
            }
        }
        if let Some(f) = sim.rate_scale.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(CliError::Config(format!("rate-scale factors must be positive, got {f}")));
        }
        Ok(())
    }

    /// Applies command-line overrides on top of this configuration.
    pub fn apply(mut self, o: &Overrides) -> Result<Self> {
        if let Some(v) = &o.net {
            self.network = v.clone();
        }
        if let Some(v) = &o.plan {
            self.plan = v.clone();
        }
        if let Some(v) = o.restarts {
            self.optimizer.restarts = v;
        }
        if let Some(v) = o.tol {
            self.optimizer.tol = v;
        }
        self.certify |= o.certify;
        if let Some(v) = o.scheme {
            self.simulation.scheme = v;
        }
        if o.m.is_some() || o.n.is_some() || o.blocks.is_some() || o.trials.is_some() {
            let base = self.simulation.ladder.first().cloned().unwrap_or_else(|| LadderPoint::new(6));
            let ms = o.m.clone().unwrap_or_else(|| self.simulation.ladder.iter().map(|p| p.m).collect());
            self.simulation.ladder = ms
                .into_iter()
                .map(|m| LadderPoint {
                    m,
                    n: o.n.or(base.n),
                    blocks: o.blocks.unwrap_or(base.blocks),
                    trials: o.trials.unwrap_or(base.trials),
                })
                .collect();
            if o.n.is_some() && o.rate_scale.is_none() {
                self.simulation.rate_scale.clear();
            }
        }
        if let Some(v) = &o.rate_scale {
            self.simulation.rate_scale = v.clone();
        }
        if let Some(v) = o.bin_rate {
            self.simulation.bin_rate = Some(v);
        }
        if let Some(v) = o.bin_rate_delta {
            self.simulation.bin_rate_delta = Some(v);
        }
        if let Some(v) = o.epsilon {
            self.simulation.epsilon = v;
        }
        self.simulation.dry_run |= o.dry_run;
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = &o.out {
            self.out = Some(v.clone());
        }
        self.validate()?;
        Ok(self)
    }
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    s.parse().map_err(|e: relaynet::Error| e.to_string())
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Experiment configuration file (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in network name or path to a network document.
    #[arg(long)]
    pub net: Option<String>,
    /// `auto` or a terminal order such as `0,1,3`.
    #[arg(long)]
    pub plan: Option<String>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also compute the degraded capacity and its certificate.
    #[arg(long)]
    pub certify: bool,
    /// ptp, sliding or backward.
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<Scheme>,
    /// Source block lengths, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    /// Channel block length; disables rate scaling unless `--rate-scale` is given.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "B")]
    pub blocks: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Operating rates as multiples of the threshold, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub rate_scale: Option<Vec<f64>>,
    /// Point-to-point bin rate in bits per source symbol.
    #[arg(long)]
    pub bin_rate: Option<f64>,
    #[arg(long)]
    pub bin_rate_delta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write results here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the block schedule instead of simulating.
    #[arg(long)]
    pub dry_run: bool,
}

impl Overrides {
    /// Loads `--config` if given and applies the remaining flags.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        base.apply(self)
    }
}
