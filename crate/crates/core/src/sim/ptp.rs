//! Point-to-point transmission with tunable binning.
//!
//! The encoder sends the codeword of the bin holding the source word. The
//! decoder accepts a bin when its codeword is typical with the channel
//! output and exactly one of its members is typical with the side
//! information; exactly one bin may be accepted.

use crate::error::{Error, Result};
use crate::network::NetworkSpec;
use crate::seed::{self, tag};

use super::{
    bins_for_rate, channel_test, finish, level_law, run_trials, source_codebook, source_test, wrong,
    ChannelCodebookStack, Environment, Scheme, SimConfig, SimParams, SimResult,
};

/// Simulates the scheme on a network with no relays and one destination.
/// `bin_rate` is `R` in bits per source symbol; `R >= H(S0)` means no
/// binning.
pub fn simulate_ptp(spec: &NetworkSpec, params: &SimParams, bin_rate: f64) -> Result<SimResult> {
    params.check()?;
    if spec.k() != 0 || spec.l() != 1 {
        return Err(Error::PlanMismatch(format!(
            "point-to-point needs K = 0 and L = 1, network has K = {} and L = {}",
            spec.k(),
            spec.l()
        )));
    }
    let max_rate = (spec.source_alphabets()[0] as f64).log2();
    if !(bin_rate.is_finite() && (0.0..=max_rate + 1e-9).contains(&bin_rate)) {
        return Err(Error::InvalidParameter(format!("bin rate must lie in [0, {max_rate}], got {bin_rate}")));
    }
    let (m, n, eps) = (params.m, params.n, params.epsilon);
    let codebook = source_codebook(spec, m, eps)?;
    let h0 = spec.sources().entropy(&["S0"])?;
    if bin_rate < h0 - 1e-9 {
        super::bin_count(m, bin_rate)?;
    }
    let law = level_law(spec, params.input_law.as_ref(), &[0])?;
    let joint = spec.joint(&law)?;
    let chan = channel_test(&joint, &[0], 1, n, eps)?;
    let src = source_test(spec, 1, m, eps)?;
    let env = Environment::new(spec);

    let counts = run_trials(params, 1, |ts| {
        let sources = env.draw_sources(&mut seed::rng(ts, &[tag::SOURCE]), m);
        let truth = codebook.index_of(&sources[0]);
        let bins = bins_for_rate(&codebook, 1, bin_rate, h0, ts)?;
        let stack = ChannelCodebookStack::new(&law, n, 1, ts)?;
        let x = stack.codeword(0, 0, &[truth.map_or(0, |w| bins.bin_of(w))]);
        let y = env.transmit(&mut seed::rng(ts, &[tag::NOISE]), &[Some(&x), None], n);

        let mut accepted = None;
        let mut count = 0;
        for b in 0..bins.bins {
            if !chan.check(&[&stack.codeword(0, 0, &[b]), &y[0]]) {
                continue;
            }
            let mut typical = bins.members(b).iter().filter(|&&u| src.check(&[codebook.word(u), &sources[1]]));
            if let (Some(&u), None) = (typical.next(), typical.next()) {
                accepted = Some(u);
                count += 1;
            }
        }
        let estimate = if count == 1 { accepted } else { None };
        Ok(vec![wrong(truth, estimate)])
    })?;

    let config = SimConfig {
        m,
        n,
        blocks: 1,
        epsilon: eps,
        rate: m as f64 / n as f64,
        seed: params.seed,
        bin_rates: vec![bin_rate],
        source_blocks: 1,
        channel_blocks: 1,
        source_words: codebook.len(),
    };
    Ok(finish(Scheme::Ptp, params, &[1], counts, config))
}
