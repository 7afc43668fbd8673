use crate::error::{Error, Result};
use crate::info::{entropy_bits, flat_index, JointPmf};
use crate::network::{x_label, NetworkSpec};

use super::plan::{CooperationPlan, Mode};
use super::{HopTerm, RateReport, BROADCAST_CONDITIONING_NOTE, ONE_HELPER_NOTE, ZERO_ENTROPY_TOL};

/// `I(A; Y_set | C)` as a function of the law of the free inputs, where `A`
/// is every free input outside `C`.
///
/// Evaluated as `H(Y | C) - H(Y | X_free)`; the second term is linear in the
/// input law and precomputed per cell.
#[derive(Debug, Clone)]
pub(crate) struct MiTerm {
    ny: usize,
    w: Vec<f64>,
    row_entropy: Vec<f64>,
    c_index: Vec<usize>,
    n_c: usize,
}

impl MiTerm {
    pub(crate) fn new(spec: &NetworkSpec, inputs: &FreeInputs, outputs: &[usize], cond: &[usize]) -> MiTerm {
        let out_sizes = spec.output_alphabets();
        let sub_sizes: Vec<usize> = outputs.iter().map(|&t| out_sizes[t - 1]).collect();
        let ny: usize = sub_sizes.iter().product();
        let total_out: usize = out_sizes.iter().product();
        let mut out_map = Vec::with_capacity(total_out);
        let mut y = vec![0usize; out_sizes.len()];
        for _ in 0..total_out {
            let sub: Vec<usize> = outputs.iter().map(|&t| y[t - 1]).collect();
            out_map.push(flat_index(&sub_sizes, &sub));
            crate::info::advance(&mut y, out_sizes);
        }

        let cond_pos: Vec<usize> =
            cond.iter().map(|t| inputs.terminals.iter().position(|f| f == t).expect("cond is free")).collect();
        let cond_sizes: Vec<usize> = cond_pos.iter().map(|&k| inputs.sizes[k]).collect();
        let n_c: usize = cond_sizes.iter().product();

        let mut w = vec![0.0; inputs.cells * ny];
        let mut row_entropy = Vec::with_capacity(inputs.cells);
        let mut c_index = Vec::with_capacity(inputs.cells);
        let mut x = vec![0usize; inputs.sizes.len()];
        for cell in 0..inputs.cells {
            let row = spec.channel().row(inputs.full_index[cell]);
            let slot = &mut w[cell * ny..(cell + 1) * ny];
            for (j, &py) in row.iter().enumerate() {
                slot[out_map[j]] += py;
            }
            row_entropy.push(entropy_bits(slot));
            let c: Vec<usize> = cond_pos.iter().map(|&k| x[k]).collect();
            c_index.push(flat_index(&cond_sizes, &c));
            crate::info::advance(&mut x, &inputs.sizes);
        }
        MiTerm { ny, w, row_entropy, c_index, n_c }
    }

    pub(crate) fn value(&self, p: &[f64]) -> f64 {
        let mut q = vec![0.0; self.n_c * self.ny];
        let mut pc = vec![0.0; self.n_c];
        let mut h_given_x = 0.0;
        for (cell, &px) in p.iter().enumerate() {
            if px <= 0.0 {
                continue;
            }
            h_given_x += px * self.row_entropy[cell];
            let c = self.c_index[cell];
            pc[c] += px;
            let dst = &mut q[c * self.ny..(c + 1) * self.ny];
            for (d, &wy) in dst.iter_mut().zip(&self.w[cell * self.ny..(cell + 1) * self.ny]) {
                *d += px * wy;
            }
        }
        (entropy_bits(&q) - entropy_bits(&pc) - h_given_x).max(0.0)
    }
}

/// The inputs being optimized, in ascending terminal order, and where each
/// of their joint cells sits in the full input tuple (others fixed to 0).
#[derive(Debug, Clone)]
pub(crate) struct FreeInputs {
    pub terminals: Vec<usize>,
    pub sizes: Vec<usize>,
    pub cells: usize,
    pub full_index: Vec<usize>,
}

impl FreeInputs {
    pub(crate) fn new(spec: &NetworkSpec, terminals: &[usize]) -> FreeInputs {
        let mut terminals = terminals.to_vec();
        terminals.sort_unstable();
        let all = spec.input_alphabets();
        let sizes: Vec<usize> = terminals.iter().map(|&t| all[t]).collect();
        let cells: usize = sizes.iter().product();
        let mut full_index = Vec::with_capacity(cells);
        let mut x = vec![0usize; sizes.len()];
        let mut full = vec![0usize; all.len()];
        for _ in 0..cells {
            for (k, &t) in terminals.iter().enumerate() {
                full[t] = x[k];
            }
            full_index.push(flat_index(all, &full));
            crate::info::advance(&mut x, &sizes);
        }
        FreeInputs { terminals, sizes, cells, full_index }
    }

    pub(crate) fn labels(&self) -> Vec<String> {
        self.terminals.iter().map(|&t| x_label(t)).collect()
    }

    pub(crate) fn pmf(&self, p: &[f64]) -> Result<JointPmf> {
        JointPmf::new(self.labels(), self.sizes.clone(), p.to_vec())
    }
}

/// Hop terms of one plan, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub(crate) struct PlanEvaluator {
    pub plan: CooperationPlan,
    pub inputs: FreeInputs,
    hops: Vec<(usize, MiTerm, f64)>,
}

impl PlanEvaluator {
    pub(crate) fn new(spec: &NetworkSpec, plan: &CooperationPlan) -> Result<Self> {
        plan.validate(spec)?;
        let inputs = FreeInputs::new(spec, plan.transmitters());
        let free = plan.transmitters();
        let mut hops = Vec::with_capacity(plan.n());
        for i in 1..plan.pi.len() {
            let terminal = plan.pi[i];
            let cond: Vec<usize> = plan.pi[i..].iter().copied().filter(|t| free.contains(t)).collect();
            let term = MiTerm::new(spec, &inputs, &[terminal], &cond);
            hops.push((terminal, term, spec.source_conditional_entropy(terminal)?));
        }
        Ok(PlanEvaluator { plan: plan.clone(), inputs, hops })
    }

    pub(crate) fn cells(&self) -> usize {
        self.inputs.cells
    }

    /// True when every hop's denominator vanishes.
    pub(crate) fn unbounded(&self) -> bool {
        self.hops.iter().all(|h| h.2 <= ZERO_ENTROPY_TOL)
    }

    /// `min_i ratio_i` for the free-input law `p`.
    pub(crate) fn objective(&self, p: &[f64]) -> f64 {
        self.hops
            .iter()
            .filter(|h| h.2 > ZERO_ENTROPY_TOL)
            .map(|(_, term, den)| term.value(p) / den)
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn report(&self, spec: &NetworkSpec, p: &[f64]) -> Result<RateReport> {
        let per_hop: Vec<HopTerm> = self
            .hops
            .iter()
            .enumerate()
            .map(|(k, (terminal, term, den))| {
                let numerator = term.value(p);
                let ratio = if *den <= ZERO_ENTROPY_TOL { f64::INFINITY } else { numerator / den };
                HopTerm { hop: k + 1, terminal: *terminal, numerator, denominator: *den, ratio }
            })
            .collect();
        let (rate, bottleneck) = minimum(&per_hop);
        let mut notes = Vec::new();
        if self.plan.mode == Mode::RelayBroadcast {
            notes.push(BROADCAST_CONDITIONING_NOTE.to_string());
        }
        if first_terminal_starved(spec)? {
            notes.push(ONE_HELPER_NOTE.to_string());
        }
        Ok(RateReport {
            rate,
            per_hop,
            bottleneck,
            input_pmf: self.inputs.pmf(p)?,
            plan: self.plan.clone(),
            notes,
            diagnostics: None,
            certificate: None,
        })
    }
}

/// Smallest ratio and the first hop attaining it.
fn minimum(per_hop: &[HopTerm]) -> (f64, Option<usize>) {
    let mut best = (f64::INFINITY, None);
    for h in per_hop {
        if h.ratio.is_finite() && h.ratio < best.0 {
            best = (h.ratio, Some(h.hop));
        }
    }
    best
}

/// Whether `Y1` carries nothing about `X0` while `T_1` still lacks `S0`.
pub(crate) fn first_terminal_starved(spec: &NetworkSpec) -> Result<bool> {
    if spec.num_terminals() < 3 || spec.source_conditional_entropy(1)? <= ZERO_ENTROPY_TOL {
        return Ok(false);
    }
    let all = FreeInputs::new(spec, &(0..spec.num_terminals()).collect::<Vec<_>>());
    let term = MiTerm::new(spec, &all, &[1], &[]);
    // Y1's law must not move with x0 for any fixed choice of the other inputs.
    let rest: usize = all.cells / all.sizes[0];
    for other in 0..rest {
        let base = &term.w[other * term.ny..(other + 1) * term.ny];
        for x0 in 1..all.sizes[0] {
            let cell = x0 * rest + other;
            let row = &term.w[cell * term.ny..(cell + 1) * term.ny];
            if row.iter().zip(base).any(|(a, b)| (a - b).abs() > 1e-12) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Evaluates the plan's hop ratios at a given input law.
///
/// `input_pmf` may cover any subset of the plan's transmitting inputs;
/// missing ones are fixed to symbol 0. Inputs of terminals outside the plan
/// may appear only if they are concentrated on symbol 0.
pub fn achievable_rate(spec: &NetworkSpec, input_pmf: &JointPmf, plan: &CooperationPlan) -> Result<RateReport> {
    let eval = PlanEvaluator::new(spec, plan)?;
    let free = eval.inputs.labels();
    let mut keep: Vec<&str> = Vec::new();
    for (v, &size) in input_pmf.variables().iter().zip(input_pmf.sizes()) {
        let terminal = v
            .strip_prefix('X')
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&t| t < spec.num_terminals())
            .ok_or_else(|| Error::AlphabetMismatch(format!("{v} is not a channel input of this network")))?;
        if size != spec.input_alphabets()[terminal] {
            return Err(Error::AlphabetMismatch(format!(
                "{v} has size {size}, network declares {}",
                spec.input_alphabets()[terminal]
            )));
        }
        if free.contains(v) {
            keep.push(v);
        } else {
            let marginal = input_pmf.marginalize(&[v])?;
            if marginal.probs()[0] < 1.0 - 1e-9 {
                return Err(Error::AlphabetMismatch(format!(
                    "{v} does not transmit under plan {:?} and must be fixed to symbol 0",
                    plan.pi
                )));
            }
        }
    }
    let mut law = if keep.is_empty() {
        JointPmf::point_mass(free.clone(), eval.inputs.sizes.clone(), &vec![0; free.len()])?
    } else {
        input_pmf.marginalize(&keep)?
    };
    for (label, &size) in free.iter().zip(&eval.inputs.sizes) {
        if !law.has_variable(label) {
            law = law.with_conditional(label, size, |_, x| f64::from(x == 0))?;
        }
    }
    let refs: Vec<&str> = free.iter().map(String::as_str).collect();
    let law = law.project(&refs)?;
    eval.report(spec, law.probs())
}
