//! Randomized identities of the information measures.

use proptest::prelude::*;
use relaynet::network::{compose_joint, ChannelModel};
use relaynet::JointPmf;

const TOL: f64 = 1e-9;

/// Independent entropy oracle straight from the definition.
fn h(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

fn pmf_strategy() -> impl Strategy<Value = JointPmf> {
    prop::collection::vec(1usize..=3, 3).prop_flat_map(|sizes| {
        let cells: usize = sizes.iter().product();
        (Just(sizes), prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], cells))
            .prop_filter_map("needs positive mass", |(sizes, w)| {
                let total: f64 = w.iter().sum();
                (total > 1e-6).then(|| {
                    let probs = w.iter().map(|x| x / total).collect();
                    JointPmf::new(vec!["A", "B", "C"], sizes, probs).unwrap()
                })
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn chain_rule_and_basic_bounds(p in pmf_strategy()) {
        let hab = p.entropy(&["A", "B"]).unwrap();
        let ha = p.entropy(&["A"]).unwrap();
        let hb_a = p.conditional_entropy(&["B"], &["A"]).unwrap();
        prop_assert!((hab - (ha + hb_a)).abs() < TOL);

        let habc = p.entropy(&["A", "B", "C"]).unwrap();
        let hc_ab = p.conditional_entropy(&["C"], &["A", "B"]).unwrap();
        prop_assert!((habc - (hab + hc_ab)).abs() < TOL);
        prop_assert!((habc - h(p.probs())).abs() < TOL);

        for (x, y, z) in [("A", "B", "C"), ("B", "C", "A"), ("C", "A", "B")] {
            let i = p.mutual_information(&[x], &[y], &[]).unwrap();
            let ic = p.mutual_information(&[x], &[y], &[z]).unwrap();
            prop_assert!(i >= -TOL && ic >= -TOL);
            let sym = p.mutual_information(&[y], &[x], &[z]).unwrap();
            prop_assert!((ic - sym).abs() < TOL);
            let hx = p.entropy(&[x]).unwrap();
            let hx_y = p.conditional_entropy(&[x], &[y]).unwrap();
            let hx_yz = p.conditional_entropy(&[x], &[y, z]).unwrap();
            prop_assert!(hx_y <= hx + TOL);
            prop_assert!(hx_yz <= hx_y + TOL);
            prop_assert!((i - (hx - hx_y)).abs() < TOL);
        }
    }

    #[test]
    fn relabeling_preserves_measures(p in pmf_strategy()) {
        let q = p.project(&["C", "A", "B"]).unwrap();
        prop_assert!((p.entropy(&["A", "C"]).unwrap() - q.entropy(&["C", "A"]).unwrap()).abs() < TOL);
        let a = p.mutual_information(&["A"], &["B", "C"], &[]).unwrap();
        let b = q.mutual_information(&["A"], &["C", "B"], &[]).unwrap();
        prop_assert!((a - b).abs() < TOL);
    }

    #[test]
    fn composed_joint_keeps_input_marginal(
        w in prop::collection::vec(0.01f64..1.0, 4),
        rows in prop::collection::vec(prop::collection::vec(0.01f64..1.0, 3), 4),
    ) {
        let total: f64 = w.iter().sum();
        let input = JointPmf::new(vec!["X0", "X1"], vec![2, 2], w.iter().map(|x| x / total).collect()).unwrap();
        let probs: Vec<f64> = rows.iter().flat_map(|r| {
            let s: f64 = r.iter().sum();
            r.iter().map(move |x| x / s)
        }).collect();
        let channel = ChannelModel::new(vec![2, 2], vec![3], probs).unwrap();
        let joint = compose_joint(&input, &channel).unwrap();
        let back = joint.project(&["X0", "X1"]).unwrap();
        for (x, y) in back.probs().iter().zip(input.probs()) {
            prop_assert!((x - y).abs() < TOL);
        }
    }
}

#[test]
fn binary_entropy_oracle_values() {
    let cases = [(0.25, 0.8112781244591328), (0.1, 0.4689955935892812), (0.2, 0.7219280948873623)];
    for (p, expected) in cases {
        assert!((relaynet::info::binary_entropy(p) - expected).abs() < 1e-12);
        assert!((h(&[p, 1.0 - p]) - expected).abs() < 1e-12);
    }
}

#[test]
fn markov_cascade_is_detected() {
    let p = relaynet::catalog::side_chain(&[0.1, 0.2]);
    assert!(p.is_markov_chain(&["S0", "S1", "S2"], 1e-9).unwrap());
    assert!(!p.is_markov_chain(&["S1", "S0", "S2"], 1e-9).unwrap());
}
