//! Regular encoding with sliding-window decoding.
//!
//! Plan position `l` holds the level-`l` codebook. In block `b` it sends
//! `x_l(w(b-l) | w(b-l-1), .., w(b-K))` built from its own estimates, where
//! `K` is the number of relays on the plan and out-of-range blocks carry
//! the padding index. Position `i >= 1` decodes source block `b - i + 1` at
//! the end of block `b` from its side information and the last `i`
//! received blocks, treating the levels below the ones it tests as noise.

use crate::error::{Error, Result};
use crate::network::NetworkSpec;
use crate::rate::{CooperationPlan, Mode};
use crate::seed::{self, tag};

use super::typical::CountTest;
use super::{
    channel_test, finish, level_law, run_trials, source_codebook, source_test, wrong, ChannelCodebookStack,
    Environment, Scheme, SimConfig, SimParams, SimResult,
};

/// Simulates the scheme along a single-destination plan over `B` channel
/// blocks carrying `B - K` source blocks.
pub fn simulate_sliding_window(spec: &NetworkSpec, plan: &CooperationPlan, params: &SimParams) -> Result<SimResult> {
    params.check()?;
    if plan.mode != Mode::SingleDestination {
        return Err(Error::PlanMismatch("sliding-window decoding needs a single-destination plan".into()));
    }
    plan.validate(spec).map_err(|e| Error::PlanMismatch(e.to_string()))?;
    let pi = &plan.pi;
    let top = pi.len() - 2;
    let blocks = params.blocks;
    if blocks < top + 1 {
        return Err(Error::BTooSmall { b: blocks, min: top + 1 });
    }
    let (m, n, eps) = (params.m, params.n, params.epsilon);
    let sources_total = blocks - top;
    let copies = top + 1;
    let codebook = source_codebook(spec, m, eps)?;
    let law = level_law(spec, params.input_law.as_ref(), &pi[..=top])?;
    let joint = spec.joint(&law)?;

    // chan[i][j]: decoder at position i, received block b - j, levels i-1-j..=top.
    let mut chan: Vec<Vec<CountTest>> = vec![Vec::new()];
    let mut src: Vec<Option<CountTest>> = vec![None];
    for i in 1..=top + 1 {
        let mut row = Vec::with_capacity(i);
        for j in 0..i {
            row.push(channel_test(&joint, &pi[i - 1 - j..=top], pi[i], n, eps)?);
        }
        chan.push(row);
        src.push(Some(source_test(spec, pi[i], m, eps)?));
    }
    let env = Environment::new(spec);
    let decoders: Vec<usize> = pi[1..].to_vec();

    let counts = run_trials(params, decoders.len(), |ts| {
        let mut src_rng = seed::rng(ts, &[tag::SOURCE]);
        let blocks_src: Vec<Vec<Vec<usize>>> = (0..sources_total).map(|_| env.draw_sources(&mut src_rng, m)).collect();
        let truth: Vec<Option<usize>> = blocks_src.iter().map(|s| codebook.index_of(&s[0])).collect();
        // est[l][s - 1]: what position l holds for source block s.
        let mut est: Vec<Vec<Option<usize>>> = vec![vec![None; sources_total]; top + 2];
        est[0] = truth.clone();
        let stack = ChannelCodebookStack::new(&law, n, copies, ts)?;
        let mut noise = seed::rng(ts, &[tag::NOISE]);
        let mut received: Vec<Vec<Vec<usize>>> = Vec::with_capacity(blocks);
        let index = |view: &[Option<usize>], s: isize| -> usize {
            if s < 1 || s as usize > sources_total {
                0
            } else {
                view[s as usize - 1].unwrap_or(0)
            }
        };
        let args_at = |view: &[Option<usize>], b: isize, level: usize| -> Vec<usize> {
            (level..=top).map(|l| index(view, b - l as isize)).collect()
        };
        let mut flags = vec![false; decoders.len()];

        for b in 1..=blocks as isize {
            let copy = (b as usize - 1) % copies;
            let words: Vec<_> = (0..=top).map(|l| stack.codeword(copy, l, &args_at(&est[l], b, l))).collect();
            let mut inputs: Vec<Option<&[usize]>> = vec![None; spec.num_terminals()];
            for (l, &t) in pi[..=top].iter().enumerate() {
                inputs[t] = Some(words[l].as_slice());
            }
            received.push(env.transmit(&mut noise, &inputs, n));

            for i in 1..=top + 1 {
                let s = b - i as isize + 1;
                if s < 1 || s as usize > sources_total {
                    continue;
                }
                let side = &blocks_src[s as usize - 1][pi[i]];
                let src_i = src[i].as_ref().expect("decoder tests exist");
                let mut view = est[i].clone();
                let mut found = None;
                let mut count = 0;
                for w in 0..codebook.len() {
                    if !src_i.check(&[codebook.word(w), side]) {
                        continue;
                    }
                    view[s as usize - 1] = Some(w);
                    let ok = (0..i).all(|j| {
                        let bj = b - j as isize;
                        let copy = (bj as usize - 1) % copies;
                        let lo = i - 1 - j;
                        let ws: Vec<_> = (lo..=top).map(|l| stack.codeword(copy, l, &args_at(&view, bj, l))).collect();
                        let mut seqs: Vec<&[usize]> = ws.iter().map(|w| w.as_slice()).collect();
                        seqs.push(&received[bj as usize - 1][pi[i] - 1]);
                        chan[i][j].check(&seqs)
                    });
                    if ok {
                        found = Some(w);
                        count += 1;
                        if count > 1 {
                            break;
                        }
                    }
                }
                let decided = if count == 1 { found } else { None };
                est[i][s as usize - 1] = decided;
                if wrong(truth[s as usize - 1], decided) {
                    flags[i - 1] = true;
                }
            }
        }
        Ok(flags)
    })?;

    let mut bin_rates = Vec::with_capacity(decoders.len());
    for _ in &decoders {
        bin_rates.push((codebook.len() as f64).log2() / m as f64);
    }
    let config = SimConfig {
        m,
        n,
        blocks,
        epsilon: eps,
        rate: m as f64 / n as f64,
        seed: params.seed,
        bin_rates,
        source_blocks: sources_total,
        channel_blocks: blocks,
        source_words: codebook.len(),
    };
    Ok(finish(Scheme::Sliding, params, &decoders, counts, config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn argument_checks() {
        let spec = catalog::noiseless_cascade();
        let p = SimParams::new(4, 8, 1, 2, 0);
        let plan = CooperationPlan::identity(&spec);
        assert_eq!(simulate_sliding_window(&spec, &plan, &p).unwrap_err().code(), "BTooSmall");
        let bad = CooperationPlan::new(Mode::RelayBroadcast, vec![0, 1, 2]);
        assert_eq!(simulate_sliding_window(&spec, &bad, &p).unwrap_err().code(), "PlanMismatch");
    }

    #[test]
    fn noiseless_cascade_decodes_with_spare_channel() {
        let spec = catalog::noiseless_cascade();
        let plan = CooperationPlan::identity(&spec);
        let p = SimParams::new(4, 12, 3, 40, 9).with_epsilon(5.0);
        let r = simulate_sliding_window(&spec, &plan, &p).unwrap();
        assert_eq!(r.per_terminal_errors.len(), 2);
        assert!(r.p_e < 0.2, "{r:?}");
    }
}
