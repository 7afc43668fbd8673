//! Monte-Carlo protocol simulation.
//!
//! Each simulator runs the random-coding protocol end to end on a network:
//! typical-set source codebook, random bins, superposition channel codebooks,
//! a memoryless channel, and typicality decoders. Trials are independent and
//! run in parallel; every random draw comes from a stream derived from the
//! root seed and the trial number, so results do not depend on scheduling.

pub mod backward;
pub mod binning;
pub mod codebook;
pub mod ptp;
pub mod schedule;
pub mod sliding;
pub mod typical;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::JointPmf;
use crate::network::{s_label, x_label, y_label, NetworkSpec};
use crate::seed;

pub use backward::simulate_backward;
pub use binning::{assign_bins, bin_count, BinAssignment};
pub use codebook::ChannelCodebookStack;
pub use ptp::simulate_ptp;
pub use schedule::{backward_schedule, sliding_schedule};
pub use sliding::simulate_sliding_window;
pub use typical::{build_typical_source_codebook, joint_typicality, SourceCodebook};

use typical::CountTest;

/// Typicality slack used when none is given.
pub const DEFAULT_EPSILON: f64 = 3.0;

/// Slack added to `H(S0|Sk)` for practical bin rates, as a multiple of `1/m`.
pub const DEFAULT_BIN_SLACK: f64 = 2.0;

/// Which protocol produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ptp,
    Sliding,
    Backward,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Ptp => "ptp",
            Scheme::Sliding => "sliding",
            Scheme::Backward => "backward",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ptp" => Ok(Scheme::Ptp),
            "sliding" => Ok(Scheme::Sliding),
            "backward" => Ok(Scheme::Backward),
            other => Err(Error::InvalidParameter(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Block lengths, trial count and seed shared by all simulators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    /// Source block length.
    pub m: usize,
    /// Channel block length.
    pub n: usize,
    /// Block-count parameter `B`; ignored by the point-to-point scheme.
    pub blocks: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    /// Codeword law over the transmitting inputs; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_law: Option<JointPmf>,
}

impl SimParams {
    pub fn new(m: usize, n: usize, blocks: usize, trials: usize, seed: u64) -> Self {
        SimParams { m, n, blocks, epsilon: DEFAULT_EPSILON, trials, seed, input_law: None }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_input_law(mut self, law: JointPmf) -> Self {
        self.input_law = Some(law);
        self
    }

    fn check(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.trials == 0 {
            return Err(Error::InvalidParameter("m, n and trials must be positive".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be a finite non-negative number, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// Error count of one decoding terminal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminalErrors {
    pub terminal: usize,
    /// Trials in which this terminal got at least one block wrong.
    pub errors: u64,
}

/// Parameters echoed back with a result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub m: usize,
    pub n: usize,
    pub blocks: usize,
    pub epsilon: f64,
    /// Per-block operating rate `m / n`.
    pub rate: f64,
    pub seed: u64,
    /// Bin rate per decoding terminal, in the order of `per_terminal_errors`.
    pub bin_rates: Vec<f64>,
    pub source_blocks: usize,
    pub channel_blocks: usize,
    /// Size `M` of the typical source codebook.
    pub source_words: usize,
}

/// Empirical error probability of a protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub scheme: Scheme,
    pub trials: u64,
    pub errors_total: u64,
    pub per_terminal_errors: Vec<TerminalErrors>,
    pub p_e: f64,
    pub config: SimConfig,
}

/// Source and channel samplers for one network.
pub(crate) struct Environment<'a> {
    spec: &'a NetworkSpec,
    source_sizes: Vec<usize>,
    source_cumulative: Vec<f64>,
    channel_cumulative: Vec<Vec<f64>>,
}

impl<'a> Environment<'a> {
    pub(crate) fn new(spec: &'a NetworkSpec) -> Self {
        let src = spec.sources();
        let source_cumulative = cumulative(src.probs());
        let ch = spec.channel();
        let rows = ch.input_sizes().iter().product::<usize>();
        let channel_cumulative = (0..rows).map(|r| cumulative(ch.row(r))).collect();
        Environment { spec, source_sizes: src.sizes().to_vec(), source_cumulative, channel_cumulative }
    }

    /// One source block: a length-`m` sequence per variable `S0..`.
    pub(crate) fn draw_sources<R: Rng>(&self, rng: &mut R, m: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::with_capacity(m); self.source_sizes.len()];
        for _ in 0..m {
            let mut cell = sample(&self.source_cumulative, rng);
            for (v, &size) in out.iter_mut().zip(&self.source_sizes).rev() {
                v.push(cell % size);
                cell /= size;
            }
        }
        out
    }

    /// One channel block. `inputs[t]` is terminal `t`'s codeword, `None`
    /// for silent terminals (constant symbol 0). Returns `Y1..` in order.
    pub(crate) fn transmit<R: Rng>(&self, rng: &mut R, inputs: &[Option<&[usize]>], n: usize) -> Vec<Vec<usize>> {
        let in_sizes = self.spec.channel().input_sizes();
        let out_sizes = self.spec.channel().output_sizes();
        let mut out = vec![Vec::with_capacity(n); out_sizes.len()];
        for t in 0..n {
            let row = inputs
                .iter()
                .zip(in_sizes)
                .fold(0, |acc, (x, &size)| acc * size + x.map_or(0, |x| x[t]));
            let mut cell = sample(&self.channel_cumulative[row], rng);
            for (v, &size) in out.iter_mut().zip(out_sizes).rev() {
                v.push(cell % size);
                cell /= size;
            }
        }
        out
    }
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn sample<R: Rng>(cumulative: &[f64], rng: &mut R) -> usize {
    let total = cumulative.last().copied().unwrap_or(1.0);
    let r: f64 = rng.gen::<f64>() * total;
    cumulative.iter().position(|&c| r < c).unwrap_or(cumulative.len() - 1)
}

/// Codeword law for the transmitting `terminals`, listed level by level.
pub(crate) fn level_law(spec: &NetworkSpec, input_law: Option<&JointPmf>, terminals: &[usize]) -> Result<JointPmf> {
    let labels: Vec<String> = terminals.iter().map(|&t| x_label(t)).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    match input_law {
        Some(law) => {
            let projected = law.project(&refs)?;
            for (&t, &size) in terminals.iter().zip(projected.sizes()) {
                if size != spec.input_alphabets()[t] {
                    return Err(Error::AlphabetMismatch(format!(
                        "{} has size {size}, network declares {}",
                        x_label(t),
                        spec.input_alphabets()[t]
                    )));
                }
            }
            Ok(projected)
        }
        None => JointPmf::uniform(labels, terminals.iter().map(|&t| spec.input_alphabets()[t]).collect()),
    }
}

/// Typicality test of the inputs `terminals` together with `Y{receiver}`.
pub(crate) fn channel_test(
    joint: &JointPmf,
    terminals: &[usize],
    receiver: usize,
    n: usize,
    epsilon: f64,
) -> Result<CountTest> {
    let mut labels: Vec<String> = terminals.iter().map(|&t| x_label(t)).collect();
    labels.push(y_label(receiver));
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let p = joint.project(&refs)?;
    Ok(CountTest::new(p.sizes().to_vec(), p.probs(), n, epsilon))
}

/// Typicality test of `(S0, S{terminal})` at source length `m`.
pub(crate) fn source_test(spec: &NetworkSpec, terminal: usize, m: usize, epsilon: f64) -> Result<CountTest> {
    let p = spec.sources().project(&["S0", &s_label(terminal)])?;
    Ok(CountTest::new(p.sizes().to_vec(), p.probs(), m, epsilon))
}

/// Typical codebook of the `S0` marginal.
pub(crate) fn source_codebook(spec: &NetworkSpec, m: usize, epsilon: f64) -> Result<SourceCodebook> {
    let p = spec.sources().project(&["S0"])?;
    build_typical_source_codebook(p.probs(), m, epsilon)
}

/// Bins for `terminal`; rates at or above `H(S0)` keep one word per bin.
pub(crate) fn bins_for_rate(
    codebook: &SourceCodebook,
    terminal: usize,
    rate: f64,
    source_entropy: f64,
    seed: u64,
) -> Result<BinAssignment> {
    if rate >= source_entropy - 1e-9 {
        Ok(BinAssignment::identity(codebook, terminal, rate))
    } else {
        assign_bins(codebook, terminal, rate, seed)
    }
}

/// Runs `trial(t, trial_seed)` for every trial in parallel. Each call
/// returns one error flag per decoding terminal.
pub(crate) fn run_trials<F>(params: &SimParams, decoders: usize, trial: F) -> Result<(u64, Vec<u64>)>
where
    F: Fn(u64) -> Result<Vec<bool>> + Sync,
{
    let outcomes: Vec<Vec<bool>> = (0..params.trials as u64)
        .into_par_iter()
        .map(|t| trial(seed::derive(params.seed, &[seed::tag::TRIAL, t])))
        .collect::<Result<_>>()?;
    let mut per = vec![0u64; decoders];
    let mut total = 0;
    for flags in &outcomes {
        for (c, &e) in per.iter_mut().zip(flags) {
            *c += u64::from(e);
        }
        total += u64::from(flags.iter().any(|&e| e));
    }
    Ok((total, per))
}

/// Whether a decoded estimate is wrong; an atypical source is always an error.
pub(crate) fn wrong(truth: Option<usize>, estimate: Option<usize>) -> bool {
    truth.is_none() || estimate != truth
}

pub(crate) fn finish(
    scheme: Scheme,
    params: &SimParams,
    decoders: &[usize],
    (errors_total, per): (u64, Vec<u64>),
    config: SimConfig,
) -> SimResult {
    SimResult {
        scheme,
        trials: params.trials as u64,
        errors_total,
        per_terminal_errors: decoders
            .iter()
            .zip(per)
            .map(|(&terminal, errors)| TerminalErrors { terminal, errors })
            .collect(),
        p_e: errors_total as f64 / params.trials as f64,
        config,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn samplers_follow_the_laws() {
        let spec = catalog::net_a();
        let env = Environment::new(&spec);
        let mut rng = seed::rng(1, &[]);
        let s = env.draw_sources(&mut rng, 20_000);
        let flips = s[0].iter().zip(&s[1]).filter(|(a, b)| a != b).count() as f64 / 20_000.0;
        assert!((flips - 0.25).abs() < 0.02, "{flips}");
        let x: Vec<usize> = (0..20_000).map(|t| t % 2).collect();
        let y = env.transmit(&mut rng, &[Some(&x), None], 20_000);
        let flips = x.iter().zip(&y[0]).filter(|(a, b)| a != b).count() as f64 / 20_000.0;
        assert!((flips - 0.1).abs() < 0.02, "{flips}");
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [Scheme::Ptp, Scheme::Sliding, Scheme::Backward] {
            assert_eq!(s.to_string().parse::<Scheme>().unwrap(), s);
        }
        assert!("nope".parse::<Scheme>().is_err());
    }
}
