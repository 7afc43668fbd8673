//! Subcommand implementations. Each returns a document that serializes to
//! the command's output and parses back without loss.

use std::path::Path;

use relaynet::catalog;
use relaynet::rate::{
    degraded_capacity, optimize_rate, ordered_cutset_bound, Certificate, CooperationPlan, CutsetBound, Mode,
    OptimizerOptions, PlanChoice, RateReport,
};
use relaynet::sim::backward::BinRates;
use relaynet::sim::{
    backward_schedule, simulate_backward, simulate_ptp, simulate_sliding_window, sliding_schedule, Scheme,
    SimParams, SimResult,
};
use relaynet::{load_network, NetworkSpec};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::table::{SimRow, SimulationTable};

/// Resolves a built-in name or reads a network document from disk.
pub fn load_spec(network: &str) -> Result<NetworkSpec> {
    if catalog::NAMES.contains(&network) {
        return Ok(catalog::by_name(network)?);
    }
    let path = Path::new(network);
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    Ok(load_network(&text)?)
}

fn plan_choice(spec: &NetworkSpec, text: &str) -> Result<PlanChoice> {
    if text.trim() == "auto" {
        Ok(PlanChoice::Auto)
    } else {
        Ok(PlanChoice::Explicit(CooperationPlan::parse(Mode::for_spec(spec), text)?))
    }
}

fn optimizer(cfg: &ExperimentConfig) -> OptimizerOptions {
    OptimizerOptions { seed: cfg.seed, ..cfg.optimizer.clone() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateDocument {
    pub config: ExperimentConfig,
    pub report: RateReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundDocument {
    pub config: ExperimentConfig,
    pub bound: CutsetBound,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<RateReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

pub fn cmd_rate(cfg: &ExperimentConfig) -> Result<RateDocument> {
    let spec = load_spec(&cfg.network)?;
    let report = optimize_rate(&spec, &plan_choice(&spec, &cfg.plan)?, &optimizer(cfg))?;
    Ok(RateDocument { config: cfg.clone(), report })
}

pub fn cmd_bound(cfg: &ExperimentConfig) -> Result<BoundDocument> {
    let spec = load_spec(&cfg.network)?;
    let opts = optimizer(cfg);
    let bound = ordered_cutset_bound(&spec, &opts)?;
    let capacity = if cfg.certify { Some(degraded_capacity(&spec, &opts)?) } else { None };
    let certificate = capacity.as_ref().and_then(|c| c.certificate.clone());
    Ok(BoundDocument { config: cfg.clone(), bound, capacity, certificate })
}

/// Threshold report for the plan a scheme runs on.
fn threshold(spec: &NetworkSpec, cfg: &ExperimentConfig) -> Result<RateReport> {
    let opts = optimizer(cfg);
    let choice = match cfg.simulation.scheme {
        Scheme::Sliding => plan_choice(spec, &cfg.plan)?,
        Scheme::Ptp | Scheme::Backward => PlanChoice::Explicit(CooperationPlan::identity(spec)),
    };
    Ok(optimize_rate(spec, &choice, &opts)?)
}

fn run_point(spec: &NetworkSpec, cfg: &ExperimentConfig, plan: &CooperationPlan, params: &SimParams) -> Result<SimResult> {
    let sim = &cfg.simulation;
    Ok(match sim.scheme {
        Scheme::Ptp => {
            let max = (spec.source_alphabets()[0] as f64).log2();
            let rate = match (sim.bin_rate, sim.bin_rate_delta) {
                (Some(r), _) => r,
                (None, Some(d)) => (spec.source_conditional_entropy(1)? + d).min(max),
                (None, None) => spec.sources().entropy(&["S0"])?,
            };
            simulate_ptp(spec, params, rate)?
        }
        Scheme::Sliding => simulate_sliding_window(spec, plan, params)?,
        Scheme::Backward => {
            let rates = BinRates { delta: sim.bin_rate_delta, overrides: Vec::new() };
            simulate_backward(spec, params, &rates)?
        }
    })
}

pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<SimulationTable> {
    cfg.validate()?;
    let spec = load_spec(&cfg.network)?;
    let sim = &cfg.simulation;
    if sim.scheme == Scheme::Ptp && spec.k() != 0 {
        return Err(relaynet::Error::PlanMismatch(format!("ptp needs K = 0, network has K = {}", spec.k())).into());
    }
    if sim.scheme == Scheme::Backward && spec.k() > relaynet::sim::backward::MAX_BACKWARD_RELAYS {
        return Err(relaynet::Error::UnsupportedK(spec.k()).into());
    }
    let report = threshold(&spec, cfg)?;
    let r_star = report.rate;
    let mut rows = Vec::new();
    for point in &sim.ladder {
        let factors: Vec<Option<f64>> =
            if sim.rate_scale.is_empty() { vec![None] } else { sim.rate_scale.iter().map(|&f| Some(f)).collect() };
        for factor in factors {
            let n = match (factor, point.n) {
                (Some(f), _) => {
                    if !r_star.is_finite() || r_star <= 0.0 {
                        return Err(CliError::Config(format!("cannot scale against threshold {r_star}")));
                    }
                    (point.m as f64 / (f * r_star)).ceil().max(1.0) as usize
                }
                (None, Some(n)) => n,
                (None, None) => return Err(CliError::Config("a ladder point needs n when no rate scale is set".into())),
            };
            let params = SimParams {
                m: point.m,
                n,
                blocks: point.blocks,
                epsilon: sim.epsilon,
                trials: point.trials,
                seed: cfg.seed,
                input_law: Some(report.input_pmf.clone()),
            };
            let result = run_point(&spec, cfg, &report.plan, &params)?;
            rows.push(SimRow {
                scheme: sim.scheme,
                m: point.m,
                n,
                blocks: point.blocks,
                trials: result.trials,
                rate_scale: factor,
                rate: result.config.rate,
                p_e: result.p_e,
                errors_total: result.errors_total,
                per_terminal_errors: result.per_terminal_errors,
                seed: cfg.seed,
            });
        }
    }
    Ok(SimulationTable { scheme: sim.scheme, rows, threshold: r_star })
}

/// Block schedule of the configured scheme, for the first ladder point's `B`.
pub fn cmd_dry_run(cfg: &ExperimentConfig) -> Result<String> {
    let spec = load_spec(&cfg.network)?;
    let blocks = cfg.simulation.ladder.first().map_or(1, |p| p.blocks);
    Ok(match cfg.simulation.scheme {
        Scheme::Sliding | Scheme::Ptp => {
            let plan = match plan_choice(&spec, &cfg.plan)? {
                PlanChoice::Auto => CooperationPlan::identity(&spec),
                PlanChoice::Explicit(p) => p,
            };
            plan.validate(&spec)?;
            sliding_schedule(&plan, blocks)?
        }
        Scheme::Backward => backward_schedule(spec.k(), blocks)?,
    })
}

/// Network document of a built-in network, pretty-printed.
pub fn gen_net(name: &str) -> Result<String> {
    let spec = catalog::by_name(name)?;
    Ok(serde_json::to_string_pretty(&spec.to_document()).expect("documents serialize") + "\n")
}
