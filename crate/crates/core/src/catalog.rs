//! Built-in test networks, addressable by name.
//!
//! | name              | K | L | channel                                   | side information          |
//! |-------------------|---|---|-------------------------------------------|---------------------------|
//! | `net-a`           | 0 | 1 | BSC(0.1)                                  | DSBS(0.25)                |
//! | `net-a-noiseless` | 0 | 1 | noiseless bit pipe                        | DSBS(0.25)                |
//! | `net-b`           | 1 | 1 | Y1 = X0+Z(0.1), Y2 = Y1+X1+Z(0.15)        | chain flips 0.1, 0.2      |
//! | `net-c`           | 1 | 1 | Y1 = X0, Y2 = X1                          | chain flips 0.1, 0.2      |
//! | `net-k2`          | 2 | 1 | Y1 = X0, Y2 = X1, Y3 = X2                 | chain flips 0.1, 0.2, 0.1 |
//! | `broadcast`       | 0 | 2 | Y1 = X0+Z(0.1), Y2 = X0+Z(0.2)            | S0 flipped 0.25 and 0.1   |
//! | `lemma`           | 0 | 2 | Y1 = X0+Z(0.1), Y2 = X0+X1+Z(0.15)        | chain flips 0.1, 0.2      |
//! | `non-degraded`    | 1 | 1 | Y1 = X0+Z(0.1), Y2 = X0+Z(0.15)           | chain flips 0.1, 0.2      |
//!
//! `+` is addition mod 2 and `Z(p)` an independent Bernoulli(p) noise.

use crate::error::{Error, Result};
use crate::info::JointPmf;
use crate::network::{s_label, ChannelModel, NetworkSpec};

pub const NAMES: &[&str] =
    &["net-a", "net-a-noiseless", "net-b", "net-c", "net-k2", "broadcast", "lemma", "non-degraded"];

pub fn by_name(name: &str) -> Result<NetworkSpec> {
    let spec = match name {
        "net-a" => net_a(),
        "net-a-noiseless" => net_a_noiseless(),
        "net-b" => net_b(),
        "net-c" => net_c(),
        "net-k2" => noiseless_cascade_k2(),
        "broadcast" => broadcast_pair(),
        "lemma" => single_relay_broadcast(),
        "non-degraded" => non_degraded(),
        other => return Err(Error::InvalidParameter(format!("unknown built-in network `{other}`"))),
    };
    Ok(spec.with_name(name))
}

fn flip(p: f64, a: usize, b: usize) -> f64 {
    if a == b {
        1.0 - p
    } else {
        p
    }
}

/// Uniform binary `S0` followed by a chain of binary symmetric flips:
/// `S{i} = S{i-1} + Z(flips[i-1])`.
pub fn side_chain(flips: &[f64]) -> JointPmf {
    let mut p = JointPmf::uniform(vec!["S0"], vec![2]).expect("uniform");
    for (i, &f) in flips.iter().enumerate() {
        p = p.with_conditional(&s_label(i + 1), 2, |s, v| flip(f, s[i], v)).expect("valid flip");
    }
    p
}

/// Uniform binary `S0` observed through independent flips at each terminal.
pub fn side_star(flips: &[f64]) -> JointPmf {
    let mut p = JointPmf::uniform(vec!["S0"], vec![2]).expect("uniform");
    for (i, &f) in flips.iter().enumerate() {
        p = p.with_conditional(&s_label(i + 1), 2, |s, v| flip(f, s[0], v)).expect("valid flip");
    }
    p
}

fn bsc_ptp(crossover: f64, side_flip: f64) -> NetworkSpec {
    let channel = ChannelModel::from_fn(vec![2, 1], vec![2], |x, y| flip(crossover, x[0], y[0])).expect("bsc");
    NetworkSpec::new(0, 1, channel, side_chain(&[side_flip])).expect("valid network")
}

pub fn net_a() -> NetworkSpec {
    bsc_ptp(0.1, 0.25)
}

pub fn net_a_noiseless() -> NetworkSpec {
    bsc_ptp(0.0, 0.25)
}

pub fn net_b() -> NetworkSpec {
    let channel = ChannelModel::from_fn(vec![2, 2, 1], vec![2, 2], |x, y| {
        flip(0.1, x[0], y[0]) * flip(0.15, y[0] ^ x[1], y[1])
    })
    .expect("net-b channel");
    NetworkSpec::new(1, 1, channel, side_chain(&[0.1, 0.2])).expect("valid network")
}

/// Noiseless single-relay cascade `Y1 = X0`, `Y2 = X1`.
pub fn noiseless_cascade() -> NetworkSpec {
    let channel =
        ChannelModel::from_fn(vec![2, 2, 1], vec![2, 2], |x, y| f64::from(y[0] == x[0] && y[1] == x[1]))
            .expect("cascade channel");
    NetworkSpec::new(1, 1, channel, side_chain(&[0.1, 0.2])).expect("valid network")
}

pub fn net_c() -> NetworkSpec {
    noiseless_cascade()
}

pub fn noiseless_cascade_k2() -> NetworkSpec {
    let channel = ChannelModel::from_fn(vec![2, 2, 2, 1], vec![2, 2, 2], |x, y| {
        f64::from(y[0] == x[0] && y[1] == x[1] && y[2] == x[2])
    })
    .expect("cascade channel");
    NetworkSpec::new(2, 1, channel, side_chain(&[0.1, 0.2, 0.1])).expect("valid network")
}

pub fn broadcast_pair() -> NetworkSpec {
    let channel = ChannelModel::from_fn(vec![2, 1, 1], vec![2, 2], |x, y| {
        flip(0.1, x[0], y[0]) * flip(0.2, x[0], y[1])
    })
    .expect("broadcast channel");
    NetworkSpec::new(0, 2, channel, side_star(&[0.25, 0.1])).expect("valid network")
}

pub fn single_relay_broadcast() -> NetworkSpec {
    let channel = ChannelModel::from_fn(vec![2, 2, 1], vec![2, 2], |x, y| {
        flip(0.1, x[0], y[0]) * flip(0.15, x[0] ^ x[1], y[1])
    })
    .expect("lemma channel");
    NetworkSpec::new(0, 2, channel, side_chain(&[0.1, 0.2])).expect("valid network")
}

/// The destination hears `X0` directly rather than through `Y1`.
pub fn non_degraded() -> NetworkSpec {
    let channel = ChannelModel::from_fn(vec![2, 2, 1], vec![2, 2], |x, y| {
        flip(0.1, x[0], y[0]) * flip(0.15, x[0], y[1])
    })
    .expect("non-degraded channel");
    NetworkSpec::new(1, 1, channel, side_chain(&[0.1, 0.2])).expect("valid network")
}
