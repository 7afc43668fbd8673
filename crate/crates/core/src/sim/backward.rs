//! Semi-regular encoding with backward decoding, for up to two relays.
//!
//! With `K` relays, source blocks and channel blocks are addressed by
//! `K`-digit vectors: source digits run over `0..B`, channel digits over
//! `0..=B`, so `B^K` source blocks ride on `(B+1)^K` channel blocks. At
//! channel block `d` the level-`i` message is terminal `i`'s bin of the
//! source block `d - e_{i-1}` (`e_0` is no shift), or the padding bin when
//! that block does not exist. Terminal `j` sends `x_j(level j+1 | .., level
//! K+1)` from its own estimates and decodes source block `s` from channel
//! block `s + e_{j-1}`: forward along the digits at or above `j`, backward
//! along the digits below. Channel decoding finds the unique bin index, and
//! source decoding finds the unique member of that bin typical with the
//! terminal's side information.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::NetworkSpec;
use crate::seed::{self, tag};

use super::{
    bin_count, bins_for_rate, channel_test, finish, level_law, run_trials, source_codebook, source_test, wrong,
    ChannelCodebookStack, Environment, Scheme, SimConfig, SimParams, SimResult, DEFAULT_BIN_SLACK,
};

/// Largest relay count the backward schedule supports.
pub const MAX_BACKWARD_RELAYS: usize = 2;

/// Bin rates `R_k = H(S0|Sk) + delta`, with optional per-terminal overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BinRates {
    /// Slack in bits per source symbol; `2/m` when absent.
    pub delta: Option<f64>,
    /// `(terminal, R)` pairs replacing the default rate.
    pub overrides: Vec<(usize, f64)>,
}

impl BinRates {
    pub fn with_delta(delta: f64) -> Self {
        BinRates { delta: Some(delta), overrides: Vec::new() }
    }

    pub fn with_override(mut self, terminal: usize, rate: f64) -> Self {
        self.overrides.push((terminal, rate));
        self
    }

    /// Rates for terminals `1..=K+1`.
    pub fn resolve(&self, spec: &NetworkSpec, m: usize) -> Result<Vec<f64>> {
        let delta = self.delta.unwrap_or(DEFAULT_BIN_SLACK / m as f64);
        let mut rates = Vec::with_capacity(spec.num_terminals() - 1);
        for k in 1..spec.num_terminals() {
            rates.push(spec.source_conditional_entropy(k)? + delta);
        }
        for &(k, r) in &self.overrides {
            if k == 0 || k >= spec.num_terminals() {
                return Err(Error::InvalidParameter(format!("bin rate override for terminal {k}, which does not decode")));
            }
            rates[k - 1] = r;
        }
        if let Some(r) = rates.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(Error::InvalidParameter(format!("bin rates must be non-negative, got {r}")));
        }
        Ok(rates)
    }
}

/// Digit-vector addressing of source and channel blocks.
#[derive(Debug, Clone, Copy)]
struct Grid {
    k: usize,
    b: usize,
}

impl Grid {
    fn channel_blocks(&self) -> usize {
        (self.b + 1).pow(self.k as u32)
    }

    fn source_blocks(&self) -> usize {
        self.b.pow(self.k as u32)
    }

    fn digits(&self, mut t: usize) -> Vec<usize> {
        (0..self.k)
            .map(|_| {
                let d = t % (self.b + 1);
                t /= self.b + 1;
                d
            })
            .collect()
    }

    fn block(&self, d: &[usize]) -> usize {
        d.iter().rev().fold(0, |acc, &x| acc * (self.b + 1) + x)
    }

    fn source(&self, d: &[usize]) -> Option<usize> {
        d.iter().all(|&x| x < self.b).then(|| d.iter().rev().fold(0, |acc, &x| acc * self.b + x))
    }

    fn source_digits(&self, mut s: usize) -> Vec<usize> {
        (0..self.k)
            .map(|_| {
                let d = s % self.b;
                s /= self.b;
                d
            })
            .collect()
    }

    /// Source block carried at level `i` (1-based) in channel block `d`.
    fn level_source(&self, d: &[usize], i: usize) -> Option<usize> {
        if i == 1 {
            return self.source(d);
        }
        let mut d = d.to_vec();
        d[i - 2] = d[i - 2].checked_sub(1)?;
        self.source(&d)
    }

    /// Channel block from which terminal `j` decodes source block `s`.
    fn decode_block(&self, s: usize, j: usize) -> usize {
        let mut d = self.source_digits(s);
        if j >= 2 {
            d[j - 2] += 1;
        }
        self.block(&d)
    }

    /// Decoding order of terminal `j`: digits at or above `j` ascend,
    /// digits below descend, most significant digit first.
    fn order(&self, j: usize) -> Vec<usize> {
        let mut all: Vec<usize> = (0..self.source_blocks()).collect();
        all.sort_by_key(|&s| {
            let d = self.source_digits(s);
            (0..self.k)
                .rev()
                .map(|q| if q + 1 >= j { d[q] } else { self.b - 1 - d[q] })
                .collect::<Vec<_>>()
        });
        all
    }
}

/// Simulates the scheme on a single-destination network with `K <= 2`.
pub fn simulate_backward(spec: &NetworkSpec, params: &SimParams, rates: &BinRates) -> Result<SimResult> {
    params.check()?;
    let k = spec.k();
    if k > MAX_BACKWARD_RELAYS {
        return Err(Error::UnsupportedK(k));
    }
    if spec.l() != 1 {
        return Err(Error::PlanMismatch(format!("backward decoding needs one destination, network has {}", spec.l())));
    }
    if params.blocks == 0 {
        return Err(Error::BTooSmall { b: 0, min: 1 });
    }
    let (m, n, eps) = (params.m, params.n, params.epsilon);
    let grid = Grid { k, b: params.blocks };
    let bin_rates = rates.resolve(spec, m)?;
    let h0 = spec.sources().entropy(&["S0"])?;
    for &r in &bin_rates {
        if r < h0 - 1e-9 {
            bin_count(m, r)?;
        }
    }
    let codebook = source_codebook(spec, m, eps)?;
    let levels: Vec<usize> = (0..=k).collect();
    let law = level_law(spec, params.input_law.as_ref(), &levels)?;
    let joint = spec.joint(&law)?;
    let decoders: Vec<usize> = (1..=k + 1).collect();
    let chan = decoders.iter().map(|&j| channel_test(&joint, &levels, j, n, eps)).collect::<Result<Vec<_>>>()?;
    let src = decoders.iter().map(|&j| source_test(spec, j, m, eps)).collect::<Result<Vec<_>>>()?;
    let orders: Vec<Vec<usize>> = decoders.iter().map(|&j| grid.order(j)).collect();
    let env = Environment::new(spec);

    let counts = run_trials(params, decoders.len(), |ts| {
        let mut src_rng = seed::rng(ts, &[tag::SOURCE]);
        let blocks_src: Vec<Vec<Vec<usize>>> =
            (0..grid.source_blocks()).map(|_| env.draw_sources(&mut src_rng, m)).collect();
        let truth: Vec<Option<usize>> = blocks_src.iter().map(|s| codebook.index_of(&s[0])).collect();
        // bins[i - 1] partitions for terminal i.
        let bins = decoders
            .iter()
            .zip(&bin_rates)
            .map(|(&j, &r)| bins_for_rate(&codebook, j, r, h0, ts))
            .collect::<Result<Vec<_>>>()?;
        // est[j][s]: terminal j's view of source block s.
        let mut est: Vec<Vec<Option<usize>>> = vec![vec![None; grid.source_blocks()]; k + 2];
        est[0] = truth.clone();
        let stack = ChannelCodebookStack::new(&law, n, 1, ts)?;
        let mut noise = seed::rng(ts, &[tag::NOISE]);
        let mut received: Vec<Vec<Vec<usize>>> = Vec::with_capacity(grid.channel_blocks());
        let mut next = vec![0usize; decoders.len()];
        let mut flags = vec![false; decoders.len()];
        // Level messages 1..=K+1 at block d from one terminal's view.
        let messages = |view: &[Option<usize>], d: &[usize]| -> Vec<usize> {
            (1..=k + 1)
                .map(|i| grid.level_source(d, i).and_then(|s| view[s]).map_or(0, |w| bins[i - 1].bin_of(w)))
                .collect()
        };

        for t in 0..grid.channel_blocks() {
            let d = grid.digits(t);
            let words: Vec<_> = (0..=k).map(|j| stack.codeword(0, j, &messages(&est[j], &d)[j..])).collect();
            let mut inputs: Vec<Option<&[usize]>> = vec![None; spec.num_terminals()];
            for (j, w) in words.iter().enumerate() {
                inputs[j] = Some(w.as_slice());
            }
            received.push(env.transmit(&mut noise, &inputs, n));

            for (q, &j) in decoders.iter().enumerate() {
                while next[q] < orders[q].len() && grid.decode_block(orders[q][next[q]], j) <= t {
                    let s = orders[q][next[q]];
                    next[q] += 1;
                    let at = grid.decode_block(s, j);
                    let y = &received[at][j - 1];
                    let mut msgs = messages(&est[j], &grid.digits(at));
                    let fixed: Vec<_> = (j..=k).map(|l| stack.codeword(0, l, &msgs[l..])).collect();
                    let mut found = None;
                    let mut count = 0;
                    for w in 0..bins[j - 1].bins {
                        msgs[j - 1] = w;
                        let mut seqs: Vec<std::rc::Rc<Vec<usize>>> =
                            (0..j).map(|l| stack.codeword(0, l, &msgs[l..])).collect();
                        seqs.extend(fixed.iter().cloned());
                        let mut refs: Vec<&[usize]> = seqs.iter().map(|w| w.as_slice()).collect();
                        refs.push(y);
                        if chan[q].check(&refs) {
                            found = Some(w);
                            count += 1;
                            if count > 1 {
                                break;
                            }
                        }
                    }
                    let decided = match (count, found) {
                        (1, Some(bin)) => {
                            let side = &blocks_src[s][j];
                            let mut typical =
                                bins[j - 1].members(bin).iter().filter(|&&u| src[q].check(&[codebook.word(u), side]));
                            match (typical.next(), typical.next()) {
                                (Some(&u), None) => Some(u),
                                _ => None,
                            }
                        }
                        _ => None,
                    };
                    est[j][s] = decided;
                    if wrong(truth[s], decided) {
                        flags[q] = true;
                    }
                }
            }
        }
        Ok(flags)
    })?;

    let config = SimConfig {
        m,
        n,
        blocks: params.blocks,
        epsilon: eps,
        rate: m as f64 / n as f64,
        seed: params.seed,
        bin_rates,
        source_blocks: grid.source_blocks(),
        channel_blocks: grid.channel_blocks(),
        source_words: codebook.len(),
    };
    Ok(finish(Scheme::Backward, params, &decoders, counts, config))
}
