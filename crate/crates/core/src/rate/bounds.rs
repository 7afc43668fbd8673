use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::JointPmf;
use crate::network::{s_label, x_label, y_label, NetworkSpec};

use super::eval::{first_terminal_starved, FreeInputs, MiTerm};
use super::optimize::{maximize_on_simplex, optimize_rate, OptimizerOptions, PlanChoice};
use super::plan::{CooperationPlan, Mode};
use super::{extended_f64, HopTerm, RateReport, ONE_HELPER_NOTE, ZERO_ENTROPY_TOL};

/// Tolerance used for the degradedness gates.
const DEGRADED_TOL: f64 = 1e-9;

/// One chain cut `{T_0..T_{i-1}}` of the ordered cut-set bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutTerm {
    pub cut: usize,
    /// `max_p I(X0..X{i-1}; Y{i}..Y{K+1} | X{i}..X{K+1})`.
    pub numerator: f64,
    /// `H(S0 | S{i}..S{K+1})`.
    pub denominator: f64,
    #[serde(with = "extended_f64")]
    pub ratio: f64,
    /// Full input law attaining the numerator.
    pub input_pmf: JointPmf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutsetBound {
    #[serde(with = "extended_f64")]
    pub bound: f64,
    pub per_cut: Vec<CutTerm>,
    pub bottleneck: Option<usize>,
}

/// Agreement between the achievable rate and the cut-set bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(with = "extended_f64")]
    pub achievable: f64,
    #[serde(with = "extended_f64")]
    pub bound: f64,
    /// `bound - achievable`; zero when both are unbounded.
    pub gap: f64,
    pub physically_degraded: bool,
    pub side_info_degraded: bool,
    pub certified: bool,
}

/// Upper bound `min_i max_p I(X_0^{i-1}; Y_i^{K+1} | X_i^{K+1}) / H(S_0 | S_i^{K+1})`
/// over the chain cuts `i = 1..=K+1`, with every input (including silent
/// relays and the destination) free.
pub fn ordered_cutset_bound(spec: &NetworkSpec, opts: &OptimizerOptions) -> Result<CutsetBound> {
    if spec.l() != 1 {
        return Err(Error::MultipleDestinations(spec.l()));
    }
    let last = spec.k() + 1;
    let all: Vec<usize> = (0..=last).collect();
    let inputs = FreeInputs::new(spec, &all);
    if inputs.cells > opts.max_cells {
        return Err(Error::TooLarge {
            what: "input joint alphabet",
            size: inputs.cells as u128,
            cap: opts.max_cells as u128,
        });
    }
    let mut per_cut = Vec::with_capacity(last);
    for i in 1..=last {
        let outputs: Vec<usize> = (i..=last).collect();
        let cond: Vec<usize> = (i..=last).collect();
        let term = MiTerm::new(spec, &inputs, &outputs, &cond);
        let given: Vec<String> = (i..=last).map(s_label).collect();
        let given: Vec<&str> = given.iter().map(String::as_str).collect();
        let denominator = spec.sources().conditional_entropy(&["S0"], &given)?;
        let best = maximize_on_simplex(inputs.cells, |p| term.value(p), opts)?;
        let ratio = if denominator <= ZERO_ENTROPY_TOL { f64::INFINITY } else { best.value / denominator };
        per_cut.push(CutTerm { cut: i, numerator: best.value, denominator, ratio, input_pmf: inputs.pmf(&best.p)? });
    }
    let mut bound = f64::INFINITY;
    let mut bottleneck = None;
    for c in &per_cut {
        if c.ratio < bound {
            bound = c.ratio;
            bottleneck = Some(c.cut);
        }
    }
    Ok(CutsetBound { bound, per_cut, bottleneck })
}

/// Capacity of a physically degraded network with degraded side
/// information: the identity-plan achievable rate, certified against
/// [`ordered_cutset_bound`].
pub fn degraded_capacity(spec: &NetworkSpec, opts: &OptimizerOptions) -> Result<RateReport> {
    let physical = spec.is_physically_degraded(DEGRADED_TOL)?;
    let side_info = spec.is_side_info_degraded(DEGRADED_TOL)?;
    if !(physical && side_info) {
        return Err(Error::NotDegraded { physical, side_info });
    }
    let mut report = optimize_rate(spec, &PlanChoice::Explicit(CooperationPlan::identity(spec)), opts)?;
    let bound = ordered_cutset_bound(spec, opts)?;
    let gap = if report.rate.is_infinite() && bound.bound.is_infinite() { 0.0 } else { bound.bound - report.rate };
    report.certificate = Some(Certificate {
        achievable: report.rate,
        bound: bound.bound,
        gap,
        physically_degraded: physical,
        side_info_degraded: side_info,
        certified: gap.abs() <= opts.certify_tol,
    });
    Ok(report)
}

/// `min_i I(X0; Y_i) / H(S0 | S_i)` for a relay-free network whose
/// destinations all have constant inputs.
pub fn broadcast_rate(spec: &NetworkSpec, input_pmf: &JointPmf) -> Result<RateReport> {
    if spec.k() != 0 {
        return Err(Error::NotBroadcastShape(format!("expected no relays, found K = {}", spec.k())));
    }
    if let Some(d) = spec.destinations().find(|&d| spec.input_alphabets()[d] != 1) {
        return Err(Error::NotBroadcastShape(format!(
            "destination {d} has input alphabet {}, expected 1",
            spec.input_alphabets()[d]
        )));
    }
    let joint = spec.joint(input_pmf)?;
    let mut per_hop = Vec::with_capacity(spec.l());
    for (k, d) in spec.destinations().enumerate() {
        let numerator = joint.mutual_information(&["X0"], &[&y_label(d)], &[])?;
        let denominator = spec.source_conditional_entropy(d)?;
        let ratio = if denominator <= ZERO_ENTROPY_TOL { f64::INFINITY } else { numerator / denominator };
        per_hop.push(HopTerm { hop: k + 1, terminal: d, numerator, denominator, ratio });
    }
    let mut rate = f64::INFINITY;
    let mut bottleneck = None;
    for h in &per_hop {
        if h.ratio < rate {
            rate = h.ratio;
            bottleneck = Some(h.hop);
        }
    }
    let input_pmf = joint.marginalize(&[&x_label(0)])?;
    Ok(RateReport {
        rate,
        per_hop,
        bottleneck,
        input_pmf,
        plan: CooperationPlan::new(Mode::RelayBroadcast, (0..spec.num_terminals()).collect()),
        notes: vec![],
        diagnostics: None,
        certificate: None,
    })
}

/// Capacity of a relay-free network where destination 1 may also transmit:
/// `sup_p min{ I(X0;Y1|X1)/H(S0|S1), I(X0,X1;Y_j)/H(S0|S_j), j >= 2 }`.
pub fn single_relay_broadcast_capacity(spec: &NetworkSpec, opts: &OptimizerOptions) -> Result<RateReport> {
    if spec.k() != 0 || spec.l() < 2 {
        return Err(Error::NotLemmaShape(format!("expected K = 0 and L >= 2, found K = {}, L = {}", spec.k(), spec.l())));
    }
    if let Some(d) = (2..spec.num_terminals()).find(|&d| spec.input_alphabets()[d] != 1) {
        return Err(Error::NotLemmaShape(format!(
            "only terminal 1 may transmit, terminal {d} has input alphabet {}",
            spec.input_alphabets()[d]
        )));
    }
    let plan = CooperationPlan::new(Mode::RelayBroadcast, (0..spec.num_terminals()).collect());
    let mut report = optimize_rate(spec, &PlanChoice::Explicit(plan), opts)?;
    if first_terminal_starved(spec)? && !report.notes.iter().any(|n| n == ONE_HELPER_NOTE) {
        report.notes.push(ONE_HELPER_NOTE.to_string());
    }
    Ok(report)
}
