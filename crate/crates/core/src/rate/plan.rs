use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::NetworkSpec;

/// Default cap on the number of enumerated plans.
pub const DEFAULT_PLAN_CAP: usize = 10_080;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// One destination `T_{K+1}`, whose input is constant.
    SingleDestination,
    /// Every destination `T_{K+1}..T_{K+L}` must decode and may relay.
    RelayBroadcast,
}

impl Mode {
    pub fn for_spec(spec: &NetworkSpec) -> Mode {
        if spec.l() == 1 {
            Mode::SingleDestination
        } else {
            Mode::RelayBroadcast
        }
    }
}

/// Ordered list of decoding terminals, `pi[0] = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CooperationPlan {
    pub mode: Mode,
    pub pi: Vec<usize>,
}

impl CooperationPlan {
    pub fn new(mode: Mode, pi: Vec<usize>) -> Self {
        CooperationPlan { mode, pi }
    }

    /// Every relay decodes, in index order, followed by the destinations.
    pub fn identity(spec: &NetworkSpec) -> Self {
        CooperationPlan { mode: Mode::for_spec(spec), pi: (0..spec.num_terminals()).collect() }
    }

    /// Parses `"0,1,3"`.
    pub fn parse(mode: Mode, text: &str) -> Result<Self> {
        let pi = text
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidParameter(format!("cannot parse plan `{text}`: {e}")))?;
        Ok(CooperationPlan { mode, pi })
    }

    /// Number of decoding terminals.
    pub fn n(&self) -> usize {
        self.pi.len().saturating_sub(1)
    }

    /// Terminals whose inputs are optimized: everyone in the plan except a
    /// single-destination sink.
    pub fn transmitters(&self) -> &[usize] {
        match self.mode {
            Mode::SingleDestination => &self.pi[..self.pi.len() - 1],
            Mode::RelayBroadcast => &self.pi,
        }
    }

    pub fn validate(&self, spec: &NetworkSpec) -> Result<()> {
        let bad = |reason: &str| Err(Error::InvalidPlan { plan: self.pi.clone(), reason: reason.to_string() });
        if self.pi.len() < 2 {
            return bad("a plan needs the source and at least one decoder");
        }
        if self.pi[0] != 0 {
            return bad("pi(0) must be the source terminal 0");
        }
        for (i, t) in self.pi.iter().enumerate() {
            if self.pi[..i].contains(t) {
                return bad("terminals must be distinct");
            }
            if *t >= spec.num_terminals() {
                return bad("terminal index out of range");
            }
        }
        let k = spec.k();
        match self.mode {
            Mode::SingleDestination => {
                if spec.l() != 1 {
                    return Err(Error::MultipleDestinations(spec.l()));
                }
                if *self.pi.last().unwrap() != k + 1 {
                    return bad("the last decoder must be the destination K+1");
                }
                if self.pi[1..self.pi.len() - 1].iter().any(|&t| t == 0 || t > k) {
                    return bad("intermediate decoders must be relays 1..K");
                }
            }
            Mode::RelayBroadcast => {
                if self.pi[1..].contains(&0) {
                    return bad("the source cannot decode");
                }
                if spec.destinations().any(|d| !self.pi.contains(&d)) {
                    return bad("every destination must decode");
                }
            }
        }
        Ok(())
    }
}

fn falling_factorial(n: u128, k: u128) -> u128 {
    (0..k).map(|i| n - i).product()
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of valid plans for `spec` in `mode`.
pub fn plan_count(spec: &NetworkSpec, mode: Mode) -> u128 {
    let k = spec.k() as u128;
    let l = spec.l() as u128;
    match mode {
        Mode::SingleDestination => (0..=k).map(|j| falling_factorial(k, j)).sum(),
        Mode::RelayBroadcast => (0..=k).map(|j| binomial(k, j) * falling_factorial(l + j, l + j)).sum(),
    }
}

/// All valid plans, shortest first and lexicographic within a length.
pub fn enumerate_plans(spec: &NetworkSpec, mode: Mode, cap: usize) -> Result<Vec<CooperationPlan>> {
    if mode == Mode::SingleDestination && spec.l() != 1 {
        return Err(Error::MultipleDestinations(spec.l()));
    }
    let count = plan_count(spec, mode);
    if count > cap as u128 {
        return Err(Error::TooManyPlans { count, cap });
    }
    let relays: Vec<usize> = (1..=spec.k()).collect();
    let destinations: Vec<usize> = spec.destinations().collect();
    let mut plans = Vec::with_capacity(count as usize);
    for j in 0..=relays.len() {
        let mut layer: Vec<Vec<usize>> = Vec::new();
        match mode {
            Mode::SingleDestination => {
                for_each_arrangement(&relays, j, &mut |seq| {
                    let mut pi = vec![0];
                    pi.extend_from_slice(seq);
                    pi.push(spec.k() + 1);
                    layer.push(pi);
                });
            }
            Mode::RelayBroadcast => {
                for_each_subset(&relays, j, &mut |subset| {
                    let mut members = subset.to_vec();
                    members.extend_from_slice(&destinations);
                    members.sort_unstable();
                    for_each_arrangement(&members, members.len(), &mut |seq| {
                        let mut pi = vec![0];
                        pi.extend_from_slice(seq);
                        layer.push(pi);
                    });
                });
            }
        }
        layer.sort();
        plans.extend(layer.into_iter().map(|pi| CooperationPlan { mode, pi }));
    }
    Ok(plans)
}

/// Visits every ordered selection of `len` distinct items, lexicographically.
fn for_each_arrangement(items: &[usize], len: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(items: &[usize], len: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == len {
            visit(cur);
            return;
        }
        for i in 0..items.len() {
            if !used[i] {
                used[i] = true;
                cur.push(items[i]);
                rec(items, len, used, cur, visit);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(items, len, &mut vec![false; items.len()], &mut Vec::with_capacity(len), visit);
}

fn for_each_subset(items: &[usize], size: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(items: &[usize], start: usize, size: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == size {
            visit(cur);
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, i + 1, size, cur, visit);
            cur.pop();
        }
    }
    rec(items, 0, size, &mut Vec::with_capacity(size), visit);
}
