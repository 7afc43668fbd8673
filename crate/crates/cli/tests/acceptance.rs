//! Exit criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relaynet::catalog;
use relaynet::rate::{
    achievable_rate, broadcast_rate, degraded_capacity, ordered_cutset_bound, CooperationPlan, Mode,
    OptimizerOptions,
};
use relaynet::sim::Scheme;
use relaynet::JointPmf;
use relaynet_cli::{cmd_bound, cmd_rate, cmd_simulate, ExperimentConfig, LadderPoint, SimulationTable};

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.pass &= elapsed < limit;
    out.detail = format!("{}; {:.2}s (limit {}s)", out.detail, elapsed.as_secs_f64(), limit.as_secs());
    out
}

/// Mutual information `I(A; B)` in bits from a dense joint `p[a][b]`.
fn mi(p: &[Vec<f64>]) -> f64 {
    let pa: Vec<f64> = p.iter().map(|r| r.iter().sum()).collect();
    let pb: Vec<f64> = (0..p[0].len()).map(|b| p.iter().map(|r| r[b]).sum()).collect();
    let mut total = 0.0;
    for (a, row) in p.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            if v > 0.0 {
                total += v * (v / (pa[a] * pb[b])).log2();
            }
        }
    }
    total
}

/// Degraded-cascade rate of an input law `q[x0][x1]` computed by hand:
/// hop 1 `I(X0; Y1 | X1) / h2(0.1)`, hop 2 `I(X0 X1; Y2) / h2(0.26)`.
fn cascade_rate(q: [[f64; 2]; 2]) -> f64 {
    let bsc = |p: f64, x: usize, y: usize| if x == y { 1.0 - p } else { p };
    let mut hop1 = 0.0;
    for x1 in 0..2 {
        let px1 = q[0][x1] + q[1][x1];
        if px1 <= 0.0 {
            continue;
        }
        let joint: Vec<Vec<f64>> =
            (0..2).map(|x0| (0..2).map(|y1| q[x0][x1] / px1 * bsc(0.1, x0, y1)).collect()).collect();
        hop1 += px1 * mi(&joint);
    }
    let mut joint = vec![vec![0.0; 2]; 4];
    for x0 in 0..2 {
        for x1 in 0..2 {
            for y1 in 0..2 {
                for y2 in 0..2 {
                    joint[2 * x0 + x1][y2] += q[x0][x1] * bsc(0.1, x0, y1) * bsc(0.15, y1 ^ x1, y2);
                }
            }
        }
    }
    let hop2 = mi(&joint);
    (hop1 / h2(0.1)).min(hop2 / h2(0.1 * 0.8 + 0.9 * 0.2))
}

fn criterion_1() -> Outcome {
    timed(Duration::from_secs(10), || {
        let cfg = ExperimentConfig { network: "net-a".into(), ..ExperimentConfig::default() };
        let rate = cmd_rate(&cfg).unwrap().report.rate;
        let oracle = (1.0 - h2(0.1)) / h2(0.25);
        check((rate - oracle).abs() < 1e-3, format!("rate {rate:.6}, closed form {oracle:.6}"))
    })
}

fn criterion_2() -> Outcome {
    timed(Duration::from_secs(60), || {
        let spec = catalog::net_b();
        let opts = OptimizerOptions::default();
        let capacity = degraded_capacity(&spec, &opts).unwrap();
        let bound = ordered_cutset_bound(&spec, &opts).unwrap().bound;
        let steps = 50;
        let mut grid = f64::NEG_INFINITY;
        for a in 0..=steps {
            for b in 0..=steps - a {
                for c in 0..=steps - a - b {
                    let d = steps - a - b - c;
                    let s = steps as f64;
                    let q = [[a as f64 / s, b as f64 / s], [c as f64 / s, d as f64 / s]];
                    grid = grid.max(cascade_rate(q));
                }
            }
        }
        let cfg = ExperimentConfig { network: "net-b".into(), certify: true, ..ExperimentConfig::default() };
        let cert = cmd_bound(&cfg).unwrap().certificate.unwrap();
        let pass = (capacity.rate - bound).abs() < 2e-3
            && (capacity.rate - grid).abs() < 2e-3
            && (bound - grid).abs() < 2e-3
            && cert.gap.abs() <= 2e-3
            && cert.physically_degraded
            && cert.side_info_degraded;
        check(
            pass,
            format!("achievable {:.6}, cut-set {bound:.6}, grid {grid:.6}, certificate gap {:.2e}", capacity.rate, cert.gap),
        )
    })
}

fn criterion_3() -> Outcome {
    let spec = catalog::broadcast_pair();
    let input = JointPmf::uniform(vec!["X0"], vec![2]).unwrap();
    let direct = broadcast_rate(&spec, &input).unwrap().rate;
    let plan = CooperationPlan::new(Mode::RelayBroadcast, vec![0, 1, 2]);
    let via_plan = achievable_rate(&spec, &input, &plan).unwrap().rate;
    let closed = ((1.0 - h2(0.1)) / h2(0.25)).min((1.0 - h2(0.2)) / h2(0.1));
    check(
        (direct - via_plan).abs() < 1e-9 && (direct - closed).abs() < 1e-3,
        format!("broadcast {direct:.9}, plan {via_plan:.9}, closed form {closed:.6}"),
    )
}

fn ladder_config(scheme: Scheme, ms: &[usize], blocks: usize, factors: &[f64]) -> ExperimentConfig {
    let mut cfg = ExperimentConfig { network: "net-c".into(), seed: 2024, ..ExperimentConfig::default() };
    cfg.plan = "0,1,2".into();
    cfg.simulation.scheme = scheme;
    cfg.simulation.ladder = ms.iter().map(|&m| LadderPoint { m, n: None, blocks, trials: 300 }).collect();
    cfg.simulation.rate_scale = factors.to_vec();
    cfg
}

fn threshold_detail(t: &SimulationTable) -> String {
    t.rows
        .iter()
        .map(|r| format!("m={} n={} x{}: {:.3}", r.m, r.n, r.rate_scale.unwrap_or(f64::NAN), r.p_e))
        .collect::<Vec<_>>()
        .join(", ")
}

fn criterion_4() -> Outcome {
    timed(Duration::from_secs(120), || {
        let points = cmd_simulate(&ladder_config(Scheme::Sliding, &[6], 4, &[0.8, 1.5])).unwrap();
        let ladder = cmd_simulate(&ladder_config(Scheme::Sliding, &[4, 6, 8], 4, &[0.8])).unwrap();
        let (below, above) = (points.rows[0].p_e, points.rows[1].p_e);
        let monotone = ladder.rows.windows(2).all(|w| w[1].p_e <= w[0].p_e + 0.03);
        check(
            below < 0.1 && above >= 0.3 && monotone,
            format!("r* {:.4}; {}; ladder {}", points.threshold, threshold_detail(&points), threshold_detail(&ladder)),
        )
    })
}

fn criterion_5() -> Outcome {
    timed(Duration::from_secs(180), || {
        let points = cmd_simulate(&ladder_config(Scheme::Backward, &[6], 2, &[0.8, 1.5])).unwrap();
        let (below, above) = (points.rows[0].p_e, points.rows[1].p_e);
        check(below < 0.1 && above >= 0.3, format!("r* {:.4}; {}", points.threshold, threshold_detail(&points)))
    })
}

fn criterion_6() -> Outcome {
    let spec = catalog::net_a_noiseless();
    let m = 8;
    let hc = spec.source_conditional_entropy(1).unwrap();
    let run = |rate: f64| {
        let mut cfg = ExperimentConfig { network: "net-a-noiseless".into(), seed: 99, ..ExperimentConfig::default() };
        cfg.simulation.scheme = Scheme::Ptp;
        cfg.simulation.rate_scale.clear();
        cfg.simulation.ladder = vec![LadderPoint { m, n: Some(16), blocks: 1, trials: 500 }];
        // Any rate at or above log2|S0| is the unbinned scheme.
        cfg.simulation.bin_rate = Some(rate.min(1.0));
        cmd_simulate(&cfg).unwrap().rows[0].p_e
    };
    let no_bin = run(1.0);
    let binned = run(hc + 2.0 / m as f64);
    let under = run(hc - 0.3);
    check(
        no_bin < 0.05 && binned < 0.05 && under >= 0.3,
        format!("R=H(S0): {no_bin:.3}, R=H(S0|S1)+2/m: {binned:.3}, R=H(S0|S1)-0.3: {under:.3}"),
    )
}

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_relaynet")
}

fn run_cli(args: &[&str], threads: Option<&str>) -> Vec<u8> {
    let mut cmd = Command::new(binary());
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("RAYON_NUM_THREADS", t);
    }
    let out = cmd.output().expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn golden(name: &str) -> Vec<u8> {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read(path).expect("golden file")
}

fn criterion_7() -> Outcome {
    let sliding = run_cli(&["simulate", "--net", "net-k2", "--dry-run", "--B", "4"], None);
    let backward = run_cli(&["simulate", "--net", "net-k2", "--scheme", "backward", "--dry-run", "--m", "2", "--B", "2"], None);
    let a = sliding == golden("sliding_k2_b4.txt");
    let b = backward == golden("backward_k2_b2.txt");
    check(a && b, format!("sliding {}, backward {}", if a { "match" } else { "differ" }, if b { "match" } else { "differ" }))
}

fn random_pmf(rng: &mut ChaCha8Rng) -> JointPmf {
    let sizes: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=3)).collect();
    let cells: usize = sizes.iter().product();
    loop {
        let w: Vec<f64> = (0..cells).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() }).collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            return JointPmf::new(vec!["A", "B", "C"], sizes, w.iter().map(|x| x / total).collect()).unwrap();
        }
    }
}

fn criterion_8() -> Outcome {
    timed(Duration::from_secs(30), || {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let p = random_pmf(&mut rng);
            let h = |v: &[&str]| p.entropy(v).unwrap();
            let ch = |t: &[&str], g: &[&str]| p.conditional_entropy(t, g).unwrap();
            let i = |a: &[&str], b: &[&str], c: &[&str]| p.mutual_information(a, b, c).unwrap();
            let chain = (h(&["A", "B", "C"]) - h(&["A"]) - ch(&["B"], &["A"]) - ch(&["C"], &["A", "B"])).abs();
            let nonneg = (-i(&["A"], &["B"], &["C"])).max(-i(&["A"], &["C"], &[])).max(-h(&["B"]));
            let conditioning = (ch(&["A"], &["B"]) - h(&["A"])).max(ch(&["A"], &["B", "C"]) - ch(&["A"], &["B"]));
            let symmetry = (i(&["A"], &["B"], &["C"]) - i(&["B"], &["A"], &["C"])).abs();
            worst = worst.max(chain).max(nonneg).max(conditioning).max(symmetry);
        }
        check(worst <= 1e-9, format!("10000 pmfs, worst violation {worst:.2e}"))
    })
}

fn criterion_9() -> Outcome {
    let commands: [&[&str]; 4] = [
        &["rate", "--net", "net-k2", "--seed", "5"],
        &["bound", "--net", "net-b", "--certify", "--seed", "5"],
        &["simulate", "--net", "net-c", "--scheme", "sliding", "--m", "4", "--trials", "60", "--seed", "5"],
        &["simulate", "--net", "net-c", "--scheme", "backward", "--m", "4", "--B", "2", "--trials", "60", "--seed", "5"],
    ];
    let mut same = 0;
    for args in commands {
        let serial = run_cli(args, Some("1"));
        let parallel = run_cli(args, None);
        let again = run_cli(args, None);
        same += usize::from(serial == parallel && parallel == again);
    }
    check(same == commands.len(), format!("{same}/{} commands byte-identical across runs and thread counts", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 point-to-point capacity", criterion_1),
        ("2 degraded capacity coincidence", criterion_2),
        ("3 broadcast reduction", criterion_3),
        ("4 sliding-window threshold", criterion_4),
        ("5 backward threshold", criterion_5),
        ("6 binning equivalence", criterion_6),
        ("7 schedule golden files", criterion_7),
        ("8 information identities", criterion_8),
        ("9 determinism", criterion_9),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let out = f();
        println!("{} criterion {name}: {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        failed += usize::from(!out.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
