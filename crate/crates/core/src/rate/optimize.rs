use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::NetworkSpec;
use crate::seed;

use super::eval::PlanEvaluator;
use super::plan::{enumerate_plans, CooperationPlan, Mode, DEFAULT_PLAN_CAP};
use super::{extended_f64, RateReport};

/// Largest number of grid points the oracle will visit.
const GRID_POINT_CAP: u128 = 20_000_000;

/// Pairwise exchange directions are polled only up to this many cells.
const PAIRWISE_CELL_CAP: usize = 32;

/// Random directions added to every poll.
const RANDOM_DIRECTIONS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerOptions {
    pub restarts: usize,
    pub tol: f64,
    pub certify_tol: f64,
    pub seed: u64,
    /// When set, replaces the search with an exhaustive simplex grid.
    pub grid_step: Option<f64>,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_iters: usize,
    pub max_cells: usize,
    pub plan_cap: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            restarts: 16,
            tol: 1e-4,
            certify_tol: 2e-3,
            seed: 0,
            grid_step: None,
            initial_step: 0.5,
            min_step: 1e-6,
            max_iters: 10_000,
            max_cells: 4096,
            plan_cap: DEFAULT_PLAN_CAP,
        }
    }
}

impl OptimizerOptions {
    fn check(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.initial_step > 0.0 && self.min_step > 0.0) {
            return Err(Error::InvalidParameter("tol and step sizes must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PlanChoice {
    Auto,
    Explicit(CooperationPlan),
}

/// Per-plan optimum recorded in auto mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub plan: Vec<usize>,
    #[serde(with = "extended_f64")]
    pub rate: f64,
    pub bottleneck: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub restarts: usize,
    pub evaluations: u64,
    /// False if some winning search hit the iteration cap while still
    /// improving by more than `tol`.
    pub converged: bool,
    pub best_restart: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<CandidateScore>,
}

/// Best point found by [`maximize_on_simplex`].
#[derive(Debug, Clone)]
pub(crate) struct SimplexOptimum {
    pub p: Vec<f64>,
    pub value: f64,
    pub evaluations: u64,
    pub converged: bool,
    pub best_restart: usize,
}

fn softmax(theta: &[f64]) -> Vec<f64> {
    let top = theta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = theta.iter().map(|t| (t - top).exp()).collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
    p
}

struct SearchOutcome {
    theta: Vec<f64>,
    value: f64,
    evaluations: u64,
    converged: bool,
}

/// Opportunistic pattern search on `theta`, objective `f(softmax(theta))`.
fn pattern_search<F>(f: &F, mut theta: Vec<f64>, opts: &OptimizerOptions, rng: &mut impl Rng) -> SearchOutcome
where
    F: Fn(&[f64]) -> f64,
{
    let c = theta.len();
    let mut fixed: Vec<Vec<f64>> = Vec::new();
    for a in 0..c {
        for sign in [1.0, -1.0] {
            let mut d = vec![0.0; c];
            d[a] = sign;
            fixed.push(d);
        }
    }
    if c <= PAIRWISE_CELL_CAP {
        for a in 0..c {
            for b in 0..c {
                if a != b {
                    let mut d = vec![0.0; c];
                    d[a] = 1.0;
                    d[b] = -1.0;
                    fixed.push(d);
                }
            }
        }
    }

    let mut value = f(&softmax(&theta));
    let mut evaluations = 1u64;
    let mut step = opts.initial_step;
    let mut iters = 0usize;
    let mut recent_gain = Vec::new();
    while step >= opts.min_step && iters < opts.max_iters {
        iters += 1;
        let random: Vec<Vec<f64>> = (0..RANDOM_DIRECTIONS)
            .map(|_| {
                let d: Vec<f64> = (0..c).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
                d.into_iter().map(|v| v / norm).collect()
            })
            .collect();
        let mut improved = false;
        for d in fixed.iter().chain(&random) {
            let trial: Vec<f64> = theta.iter().zip(d).map(|(t, dv)| t + step * dv).collect();
            let v = f(&softmax(&trial));
            evaluations += 1;
            if v > value {
                recent_gain.push(v - value);
                theta = trial;
                value = v;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let converged = step < opts.min_step || {
        let window = (opts.max_iters / 10).max(1);
        recent_gain.iter().rev().take(window).sum::<f64>() <= opts.tol
    };
    SearchOutcome { theta, value, evaluations, converged }
}

/// Multi-start maximization of `f` over the probability simplex on `cells`
/// points. Restart 0 starts from the uniform law; restart `r` draws its
/// start and directions from a stream keyed by `(seed, r)` only.
pub(crate) fn maximize_on_simplex<F>(cells: usize, f: F, opts: &OptimizerOptions) -> Result<SimplexOptimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    opts.check()?;
    if cells == 1 {
        return Ok(SimplexOptimum { p: vec![1.0], value: f(&[1.0]), evaluations: 1, converged: true, best_restart: 0 });
    }
    let outcomes: Vec<SearchOutcome> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed::rng(opts.seed, &[seed::tag::RESTART, r as u64]);
            let start: Vec<f64> =
                if r == 0 { vec![0.0; cells] } else { (0..cells).map(|_| rng.gen_range(-2.0..2.0)).collect() };
            pattern_search(&f, start, opts, &mut rng)
        })
        .collect();
    let mut best = 0;
    for (r, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best].value {
            best = r;
        }
    }
    Ok(SimplexOptimum {
        p: softmax(&outcomes[best].theta),
        value: outcomes[best].value,
        evaluations: outcomes.iter().map(|o| o.evaluations).sum(),
        converged: outcomes[best].converged,
        best_restart: best,
    })
}

fn check_cells(cells: usize, opts: &OptimizerOptions) -> Result<()> {
    if cells > opts.max_cells {
        return Err(Error::TooLarge { what: "input joint alphabet", size: cells as u128, cap: opts.max_cells as u128 });
    }
    Ok(())
}

fn optimize_plan(spec: &NetworkSpec, plan: &CooperationPlan, opts: &OptimizerOptions) -> Result<RateReport> {
    let eval = PlanEvaluator::new(spec, plan)?;
    check_cells(eval.cells(), opts)?;
    if eval.unbounded() {
        let p = vec![1.0 / eval.cells() as f64; eval.cells()];
        let mut report = eval.report(spec, &p)?;
        report.diagnostics =
            Some(Diagnostics { restarts: 0, evaluations: 0, converged: true, best_restart: 0, candidates: vec![] });
        return Ok(report);
    }
    if let Some(step) = opts.grid_step {
        return grid_on_evaluator(spec, &eval, step);
    }
    let best = maximize_on_simplex(eval.cells(), |p| eval.objective(p), opts)?;
    let mut report = eval.report(spec, &best.p)?;
    if !best.converged {
        report.notes.push(format!("search stopped at the iteration cap while still improving by more than {}", opts.tol));
    }
    report.diagnostics = Some(Diagnostics {
        restarts: opts.restarts,
        evaluations: best.evaluations,
        converged: best.converged,
        best_restart: best.best_restart,
        candidates: vec![],
    });
    Ok(report)
}

/// Maximizes the plan's rate over its input law; `Auto` also maximizes over
/// every enumerated plan, keeping the earliest plan among ties.
pub fn optimize_rate(spec: &NetworkSpec, plan: &PlanChoice, opts: &OptimizerOptions) -> Result<RateReport> {
    opts.check()?;
    match plan {
        PlanChoice::Explicit(p) => optimize_plan(spec, p, opts),
        PlanChoice::Auto => {
            let plans = enumerate_plans(spec, Mode::for_spec(spec), opts.plan_cap)?;
            let reports: Vec<RateReport> =
                plans.par_iter().map(|p| optimize_plan(spec, p, opts)).collect::<Result<_>>()?;
            let mut best = 0;
            for (i, r) in reports.iter().enumerate() {
                if r.rate > reports[best].rate {
                    best = i;
                }
            }
            let candidates = reports
                .iter()
                .map(|r| CandidateScore { plan: r.plan.pi.clone(), rate: r.rate, bottleneck: r.bottleneck })
                .collect();
            let evaluations = reports.iter().filter_map(|r| r.diagnostics.as_ref()).map(|d| d.evaluations).sum();
            let mut report = reports.into_iter().nth(best).expect("at least one plan");
            let diag = report.diagnostics.get_or_insert_with(|| Diagnostics {
                restarts: opts.restarts,
                evaluations: 0,
                converged: true,
                best_restart: 0,
                candidates: vec![],
            });
            diag.evaluations = evaluations;
            diag.candidates = candidates;
            Ok(report)
        }
    }
}

/// Visits every point of the simplex grid with spacing `1/k` on `cells`
/// points, in lexicographic order of the integer compositions.
pub(crate) fn for_each_grid_point(cells: usize, k: usize, visit: &mut dyn FnMut(&[f64])) {
    fn rec(pos: usize, left: usize, k: usize, counts: &mut Vec<usize>, p: &mut Vec<f64>, visit: &mut dyn FnMut(&[f64])) {
        let last = counts.len() - 1;
        if pos == last {
            counts[pos] = left;
            p[pos] = left as f64 / k as f64;
            visit(p);
            return;
        }
        for c in 0..=left {
            counts[pos] = c;
            p[pos] = c as f64 / k as f64;
            rec(pos + 1, left - c, k, counts, p, visit);
        }
    }
    rec(0, k, k, &mut vec![0; cells], &mut vec![0.0; cells], visit);
}

fn grid_resolution(step: f64) -> Result<usize> {
    let k = (1.0 / step).round();
    if !(step > 0.0 && step <= 1.0) || ((1.0 / step) - k).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!("grid step {step} must be 1/k for a positive integer k")));
    }
    Ok(k as usize)
}

fn grid_points(cells: usize, k: usize) -> u128 {
    // C(k + cells - 1, cells - 1)
    let n = (k + cells - 1) as u128;
    (0..(cells - 1) as u128).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn grid_on_evaluator(spec: &NetworkSpec, eval: &PlanEvaluator, step: f64) -> Result<RateReport> {
    let k = grid_resolution(step)?;
    let points = grid_points(eval.cells(), k);
    if points > GRID_POINT_CAP {
        return Err(Error::TooLarge { what: "grid points", size: points, cap: GRID_POINT_CAP });
    }
    let mut best_value = f64::NEG_INFINITY;
    let mut best_p = vec![];
    for_each_grid_point(eval.cells(), k, &mut |p| {
        let v = eval.objective(p);
        if v > best_value {
            best_value = v;
            best_p = p.to_vec();
        }
    });
    let mut report = eval.report(spec, &best_p)?;
    report.diagnostics = Some(Diagnostics {
        restarts: 0,
        evaluations: points as u64,
        converged: true,
        best_restart: 0,
        candidates: vec![],
    });
    Ok(report)
}

/// Exhaustive search over the simplex grid with spacing `step` (which must
/// be `1/k`). The first maximizer in grid order is reported.
pub fn grid_search_rate(spec: &NetworkSpec, plan: &CooperationPlan, step: f64) -> Result<RateReport> {
    let eval = PlanEvaluator::new(spec, plan)?;
    grid_on_evaluator(spec, &eval, step)
}
