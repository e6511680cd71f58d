//! Acceptance gate. Each test prints one `acceptance <id>: PASS|FAIL` line;
//! run with `--nocapture` to see them.

mod common;

use std::time::Instant;

use rand::Rng;

use common::{bsc_rate, ge, mean, qge, std_err, verdict};
use qstate_ir::bounds::{lower_bound, AuxiliaryModel, AuxFamily, BscFamily};
use qstate_ir::channels::{build_bsc, validate, ChannelModel, InputLaw, TransferOperatorSet};
use qstate_ir::experiment::{run_experiment, ExperimentConfig, RunOptions};
use qstate_ir::operator::ComplexOperator;
use qstate_ir::oracle::{brute_force_oracle, path_sum, ExactTable};
use qstate_ir::random::{random_fsmc, random_quantum_channel};
use qstate_ir::rate::{dmc_information_rate, entropy_rate_estimates, forward_log_scales, sequence_log_probability};
use qstate_ir::trajectory::{rng_for_seed, sample_trajectory};

#[test]
fn criterion_1_dmc_rate_exact() {
    let u = InputLaw::uniform(2);
    let ps = [0.0, 0.05, 0.11, 0.3, 0.5, 0.95, 1.0];
    let channels: Vec<_> = ps.iter().map(|&p| build_bsc(p).unwrap()).collect();
    let start = Instant::now();
    let rates: Vec<f64> = channels.iter().map(|w| dmc_information_rate(&u, w).unwrap()).collect();
    let elapsed = start.elapsed();
    let worst = ps.iter().zip(&rates).map(|(&p, r)| (r - bsc_rate(p)).abs()).fold(0.0, f64::max);
    let ok = worst <= 1e-12 && elapsed.as_secs_f64() < 1e-3;
    verdict("1", ok, format!("max error {worst:.2e}, {:.1} us", elapsed.as_secs_f64() * 1e6));
}

fn worst_oracle_gap(model: &ChannelModel, q: &InputLaw, n: usize, count: usize, seed: u64) -> f64 {
    let table = brute_force_oracle(model, q, n).unwrap();
    let mut rng = rng_for_seed(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let x: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let lpy = sequence_log_probability(model, q, None, &y).unwrap();
        let lpxy = sequence_log_probability(model, q, Some(&x), &y).unwrap();
        worst = worst.max((lpy - table.marginal(&y).ln()).abs());
        worst = worst.max((lpxy - table.joint(&x, &y).ln()).abs());
    }
    worst
}

#[test]
fn criterion_2_oracle_equivalence() {
    let start = Instant::now();
    let q = InputLaw::uniform(2);
    let quantum = worst_oracle_gap(&ChannelModel::Quantum(qge(0.05, 0.95, 1.0)), &q, 6, 100, 21);
    let classical = worst_oracle_gap(&ChannelModel::Classical(ge()), &q, 6, 100, 22);
    let secs = start.elapsed().as_secs_f64();
    let ok = quantum <= 1e-9 && classical <= 1e-9 && secs < 10.0;
    verdict("2", ok, format!("quantum {quantum:.2e}, classical {classical:.2e}, {secs:.2} s"));
}

#[test]
fn criterion_3_model_property_suites() {
    let start = Instant::now();
    let mut rng = rng_for_seed(3);
    let q = InputLaw::new(vec![0.35, 0.65]).unwrap();
    let mut failures = Vec::new();
    let mut worst_sum = 0.0f64;
    let mut min_g = f64::INFINITY;
    for i in 0..50 {
        let f = random_fsmc(1 + i % 3, 2, 2, &mut rng);
        if !validate(&f).is_valid() {
            failures.push(format!("fsmc {i}"));
        }
        let table = brute_force_oracle(&ChannelModel::Classical(f), &q, 3).unwrap();
        worst_sum = worst_sum.max((table.total() - 1.0).abs());
        min_g = min_g.min(table.min_joint());

        let ch = random_quantum_channel(2, 2, 1 + i % 4, &mut rng);
        let t = TransferOperatorSet::compile(&ch).unwrap();
        if !validate(&ch).is_valid() || !validate(&t).is_valid() {
            failures.push(format!("quantum {i}"));
        }
        let mut total = 0.0;
        for xi in 0..8 {
            let x = ExactTable::sequence_from_index(xi, 2, 3);
            for yi in 0..8 {
                let y = ExactTable::sequence_from_index(yi, 2, 3);
                let (g, _) = path_sum(&t, &q, &x, &y).unwrap();
                total += g.re;
                min_g = min_g.min(g.re);
            }
        }
        worst_sum = worst_sum.max((total - 1.0f64).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = failures.is_empty() && worst_sum <= 1e-10 && min_g >= -1e-12 && secs < 30.0;
    verdict(
        "3",
        ok,
        format!("invalid {failures:?}, max |sum g - 1| {worst_sum:.2e}, min g {min_g:.2e}, {secs:.2} s"),
    );
}

#[test]
fn criterion_4_memoryless_reduction() {
    let start = Instant::now();
    let model = ChannelModel::Quantum(qge(0.05, 0.05, 1.0));
    let q = InputLaw::uniform(2);
    let traj = sample_trajectory(&model, &q, 100_000, 1).unwrap();
    let ir = entropy_rate_estimates(&model, &q, &traj).unwrap().ir;
    let secs = start.elapsed().as_secs_f64();
    let ok = (ir - 0.713603).abs() <= 0.01 && secs < 60.0;
    verdict("4", ok, format!("ir {ir:.6} vs 0.713603, {secs:.2} s"));
}

#[test]
fn criterion_5_frozen_state_reduction() {
    let start = Instant::now();
    let good = ComplexOperator::diag_real(&[1.0, 0.0]).unwrap();
    let t = qge(0.05, 0.95, 0.0).with_initial_state(good).unwrap();
    let model = ChannelModel::Quantum(t);
    let q = InputLaw::uniform(2);
    let traj = sample_trajectory(&model, &q, 100_000, 1).unwrap();
    let ir = entropy_rate_estimates(&model, &q, &traj).unwrap().ir;
    let secs = start.elapsed().as_secs_f64();
    let target = bsc_rate(0.05);
    let ok = (ir - target).abs() <= 0.01 && secs < 60.0;
    verdict("5", ok, format!("ir {ir:.6} vs {target:.6}, {secs:.2} s"));
}

#[test]
fn criterion_6_classical_quantum_bridge() {
    let f = ge();
    let native = ChannelModel::Classical(f.clone());
    let embedded = ChannelModel::Quantum(TransferOperatorSet::from_classical(&f).unwrap());
    let q = InputLaw::uniform(2);
    let traj = sample_trajectory(&native, &q, 10_000, 6).unwrap();
    let mut worst = 0.0f64;
    for x in [None, Some(traj.x.as_slice())] {
        let a = forward_log_scales(&native, &q, x, &traj.y).unwrap();
        let b = forward_log_scales(&embedded, &q, x, &traj.y).unwrap();
        worst = a.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(worst, f64::max);
    }
    verdict("6", worst <= 1e-12, format!("max |ln lambda difference| {worst:.2e} over 2 x 10^4 steps"));
}

#[test]
fn criterion_7_rate_decreases_in_p_b() {
    let start = Instant::now();
    let q = InputLaw::uniform(2);
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let irs: Vec<f64> = grid
        .iter()
        .map(|&p_b| {
            let model = ChannelModel::Quantum(qge(0.05, p_b, 1.0));
            let traj = sample_trajectory(&model, &q, 100_000, 1).unwrap();
            entropy_rate_estimates(&model, &q, &traj).unwrap().ir
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let monotone = irs.windows(2).all(|w| w[1] <= w[0] + 0.01);
    let ok = monotone && secs < 600.0;
    verdict("7", ok, format!("ir over p_b {grid:?} = {irs:.4?}, {secs:.2} s"));
}

#[test]
fn criterion_8_lower_bound_sanity() {
    let start = Instant::now();
    let q = InputLaw::uniform(2);

    // Matched auxiliary reproduces the estimate on every sequence.
    let f = ge();
    let true_model = ChannelModel::Quantum(TransferOperatorSet::from_classical(&f).unwrap());
    let aux = AuxiliaryModel::from_model(&true_model).unwrap();
    let mut worst_identity = 0.0f64;
    for seed in 0..10 {
        let traj = sample_trajectory(&true_model, &q, 5_000, seed).unwrap();
        let ir = entropy_rate_estimates(&true_model, &q, &traj).unwrap().ir;
        let lb = lower_bound(&traj, &aux, &q).unwrap().ir_lower;
        worst_identity = worst_identity.max((ir - lb).abs());
    }

    // BSC decoders on the quantum channel stay below the estimate.
    let model = ChannelModel::Quantum(qge(0.05, 0.95, 1.0));
    let trajs: Vec<_> = (0..20).map(|s| sample_trajectory(&model, &q, 10_000, 100 + s).unwrap()).collect();
    let irs: Vec<f64> = trajs.iter().map(|t| entropy_rate_estimates(&model, &q, t).unwrap().ir).collect();
    let mut violations = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for eps in [0.05, 0.1, 0.2, 0.3, 0.4, 0.5] {
        let aux = BscFamily.build(&[eps]).unwrap();
        let lbs: Vec<f64> = trajs.iter().map(|t| lower_bound(t, &aux, &q).unwrap().ir_lower).collect();
        let se = (std_err(&lbs).powi(2) + std_err(&irs).powi(2)).sqrt();
        best = best.max(mean(&lbs));
        if mean(&lbs) > mean(&irs) + 2.0 * se {
            violations.push(eps);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = worst_identity <= 1e-10 && violations.is_empty() && secs < 300.0;
    verdict(
        "8",
        ok,
        format!(
            "identity gap {worst_identity:.2e}, best BSC bound {best:.4} vs ir {:.4}, violations {violations:?}, {secs:.2} s",
            mean(&irs)
        ),
    );
}

#[test]
fn criterion_9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config = |sub: &str| {
        format!(
            r#"
n = 3000
seeds = [5, 6, 7]
estimators = ["ir", "aux_lower"]
[channel]
kind = "quantum_ge"
p_g = 0.05
p_b = 0.95
alpha = 1.0
[sweep]
parameter = "p_b"
values = [0.0, 0.5, 1.0]
[[auxiliary]]
id = "bsc"
kind = "bsc"
p = 0.2
[output]
dir = "{}"
"#,
            dir.path().join(sub).display()
        )
    };
    let mut outputs = Vec::new();
    for (sub, threads) in [("a", Some(1)), ("b", Some(4)), ("c", None)] {
        let cfg = ExperimentConfig::from_toml(&config(sub)).unwrap();
        let run = run_experiment(&cfg, &RunOptions { threads, write_svg: true, ..Default::default() }).unwrap();
        outputs.push(std::fs::read(run.csv_path).unwrap());
    }
    let ok = outputs.windows(2).all(|w| w[0] == w[1]);
    verdict("9", ok, format!("{} runs, {} bytes each", outputs.len(), outputs[0].len()));
}
