//! Achievable rates, cut-set bounds and capacity results against oracles.

use relaynet::catalog;
use relaynet::info::binary_entropy as h2;
use relaynet::rate::{
    achievable_rate, broadcast_rate, degraded_capacity, grid_search_rate, optimize_rate, ordered_cutset_bound,
    single_relay_broadcast_capacity, CooperationPlan, Mode, OptimizerOptions, PlanChoice,
};
use relaynet::JointPmf;

fn opts() -> OptimizerOptions {
    OptimizerOptions::default()
}

#[test]
fn point_to_point_matches_closed_form() {
    let oracle = (1.0 - h2(0.1)) / h2(0.25);
    let r = optimize_rate(&catalog::net_a(), &PlanChoice::Auto, &opts()).unwrap();
    assert!((r.rate - oracle).abs() < 1e-3, "{} vs {oracle}", r.rate);
    assert!((oracle - 0.654528194957471).abs() < 1e-12);
    let b = ordered_cutset_bound(&catalog::net_a(), &opts()).unwrap();
    assert!((b.bound - r.rate).abs() < 1e-3);
}

#[test]
fn degraded_cascade_capacity_matches_grid_and_bound() {
    let spec = catalog::net_b();
    let report = degraded_capacity(&spec, &opts()).unwrap();
    let cert = report.certificate.clone().unwrap();
    assert!(cert.physically_degraded && cert.side_info_degraded && cert.certified);
    let bound = ordered_cutset_bound(&spec, &opts()).unwrap();
    assert!((report.rate - bound.bound).abs() < 2e-3);
    let grid = grid_search_rate(&spec, &CooperationPlan::identity(&spec), 0.02).unwrap();
    assert!((report.rate - grid.rate).abs() < 2e-3, "{} vs {}", report.rate, grid.rate);
    let closed = (1.0 - h2(0.22)) / h2(0.26);
    assert!((grid.rate - closed).abs() < 1e-9, "{} vs {closed}", grid.rate);
}

#[test]
fn more_restarts_never_hurt() {
    let spec = catalog::net_b();
    let plan = PlanChoice::Explicit(CooperationPlan::identity(&spec));
    let mut last = f64::NEG_INFINITY;
    for restarts in [1, 2, 4, 8, 16] {
        let o = OptimizerOptions { restarts, ..opts() };
        let r = optimize_rate(&spec, &plan, &o).unwrap().rate;
        assert!(r >= last - 1e-12, "{restarts}: {r} < {last}");
        last = r;
    }
}

#[test]
fn optimizer_is_deterministic() {
    let spec = catalog::noiseless_cascade_k2();
    let a = optimize_rate(&spec, &PlanChoice::Auto, &opts()).unwrap();
    let b = optimize_rate(&spec, &PlanChoice::Auto, &opts()).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a.diagnostics.unwrap().candidates.len(), 5);
}

#[test]
fn broadcast_reduction_agrees_with_plan_evaluation() {
    let spec = catalog::broadcast_pair();
    let input = JointPmf::uniform(vec!["X0"], vec![2]).unwrap();
    let direct = broadcast_rate(&spec, &input).unwrap();
    let via_plan = achievable_rate(&spec, &input, &CooperationPlan::new(Mode::RelayBroadcast, vec![0, 1, 2])).unwrap();
    assert!((direct.rate - via_plan.rate).abs() < 1e-9);
    let closed = ((1.0 - h2(0.1)) / h2(0.25)).min((1.0 - h2(0.2)) / h2(0.1));
    assert!((direct.rate - closed).abs() < 1e-3, "{} vs {closed}", direct.rate);
}

#[test]
fn single_relay_broadcast_is_an_optimized_plan() {
    let spec = catalog::single_relay_broadcast();
    let lemma = single_relay_broadcast_capacity(&spec, &opts()).unwrap();
    let plan = PlanChoice::Explicit(CooperationPlan::new(Mode::RelayBroadcast, vec![0, 1, 2]));
    let direct = optimize_rate(&spec, &plan, &opts()).unwrap();
    assert!((lemma.rate - direct.rate).abs() < 1e-9);
}

#[test]
fn noiseless_cascade_hops() {
    let spec = catalog::noiseless_cascade();
    let input = JointPmf::uniform(vec!["X0", "X1"], vec![2, 2]).unwrap();
    let r = achievable_rate(&spec, &input, &CooperationPlan::identity(&spec)).unwrap();
    assert!((r.per_hop[0].ratio - 1.0 / h2(0.1)).abs() < 1e-9);
    assert!((r.per_hop[1].ratio - 1.0 / h2(0.26)).abs() < 1e-9);
    assert_eq!(r.bottleneck, Some(2));
}

#[test]
fn non_degraded_networks_are_refused() {
    let err = degraded_capacity(&catalog::non_degraded(), &opts()).unwrap_err();
    assert_eq!(err.code(), "NotDegraded");
}
