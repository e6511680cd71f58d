mod common;

use proptest::prelude::*;

use common::qge;
use qstate_ir::channels::{build_gilbert_elliott, validate, ChannelModel, ClassicalFsmc, InputLaw, TransferOperatorSet};
use qstate_ir::operator::{
    expm_skew_hermitian, hermitian_eigenvalues, is_psd, kron, partial_trace, ComplexOperator, Keep, Tolerance,
};
use qstate_ir::oracle::brute_force_oracle;
use qstate_ir::random::{random_density, random_fsmc, random_hermitian, random_operator, random_quantum_channel};
use qstate_ir::rate::{entropy_rate_estimates, forward_step_quantum, sequence_log_probability, StateOperator};
use qstate_ir::trajectory::{
    conditional_output_distribution, posterior_update, rng_for_seed, sample_trajectory, PosteriorState, Trajectory,
};

fn tol() -> Tolerance {
    Tolerance::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(da in 1usize..=4, db in 1usize..=4, dc in 1usize..=4, seed: u64) {
        let mut rng = rng_for_seed(seed);
        let (a, b, c) = (random_operator(da, &mut rng), random_operator(db, &mut rng), random_operator(dc, &mut rng));
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) <= 1e-12);
    }

    #[test]
    fn kron_trace_factorises(da in 1usize..=4, db in 1usize..=4, seed: u64) {
        let mut rng = rng_for_seed(seed);
        let (a, b) = (random_operator(da, &mut rng), random_operator(db, &mut rng));
        prop_assert!((kron(&a, &b).trace() - a.trace() * b.trace()).norm() <= 1e-12);
    }

    #[test]
    fn partial_trace_undoes_kron(da in 1usize..=4, db in 1usize..=4, seed: u64) {
        let mut rng = rng_for_seed(seed);
        let (a, b) = (random_operator(da, &mut rng), random_operator(db, &mut rng));
        let ab = kron(&a, &b);
        let first = partial_trace(&ab, (da, db), Keep::First).unwrap();
        prop_assert!(first.max_abs_diff(&a.scale(b.trace())) <= 1e-12);
        let second = partial_trace(&ab, (da, db), Keep::Second).unwrap();
        prop_assert!(second.max_abs_diff(&b.scale(a.trace())) <= 1e-12);
        prop_assert!((first.trace() - ab.trace()).norm() <= 1e-12);
    }

    #[test]
    fn expm_is_unitary(dim in 1usize..=6, seed: u64, scale in 0.0f64..=10.0) {
        let mut rng = rng_for_seed(seed);
        let h = random_hermitian(dim, &mut rng);
        let norm = h.max_abs() * dim as f64;
        let alpha = if norm > 0.0 { scale / norm } else { 0.0 };
        let u = expm_skew_hermitian(&h, alpha, &tol()).unwrap();
        prop_assert!(u.unitarity_residue() <= 1e-10);
    }

    #[test]
    fn gram_matrices_have_nonnegative_spectrum(dim in 1usize..=8, seed: u64) {
        let mut rng = rng_for_seed(seed);
        let a = random_operator(dim, &mut rng);
        let g = &a.dagger() * &a;
        let ev = hermitian_eigenvalues(&g, &tol()).unwrap();
        prop_assert!(ev[0] >= -1e-10);
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = ev.iter().sum();
        prop_assert!((sum - g.trace().re).abs() <= 1e-9 * dim as f64);
        prop_assert!(is_psd(&g, &tol()).psd);
    }

    #[test]
    fn compiled_random_channels_are_valid(sd in 1usize..=3, td in 1usize..=3, k in 1usize..=4, seed: u64) {
        let ch = random_quantum_channel(sd, td, k, &mut rng_for_seed(seed));
        let t = TransferOperatorSet::compile(&ch).unwrap();
        let report = validate(&t);
        prop_assert!(report.is_valid(), "{}", report);
    }

    #[test]
    fn gilbert_elliott_kernels_are_valid(p_g in 0.0f64..=1.0, p_b in 0.0f64..=1.0, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let f = build_gilbert_elliott(p_g, p_b, [[1.0 - a, a], [b, 1.0 - b]]).unwrap();
        prop_assert!(validate(&f).is_valid());
    }

    #[test]
    fn scale_of_initial_state_is_absorbed(seed: u64, c in 0.01f64..100.0, steps in 2usize..20) {
        let mut rng = rng_for_seed(seed);
        let t = TransferOperatorSet::compile(&random_quantum_channel(2, 2, 2, &mut rng)).unwrap();
        let q = InputLaw::uniform(2);
        let traj = sample_trajectory(&ChannelModel::Quantum(t.clone()), &q, steps, seed).unwrap();
        let mut a = StateOperator::initial(&t);
        let mut b = StateOperator::from_operator(&t.initial_state().scale_real(c));
        for (l, (&x, &y)) in traj.x.iter().zip(&traj.y).enumerate() {
            a = forward_step_quantum(&t, &q, &a, y, Some(x)).unwrap();
            b = forward_step_quantum(&t, &q, &b, y, Some(x)).unwrap();
            prop_assert!(a.sigma().max_abs_diff(&b.sigma()) <= 1e-12);
            if l > 0 {
                prop_assert!((a.last_log_scale() - b.last_log_scale()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn recursion_matches_oracle(seed: u64, n in 1usize..=5, quantum: bool) {
        let mut rng = rng_for_seed(seed);
        let model = if quantum {
            ChannelModel::Quantum(TransferOperatorSet::compile(&random_quantum_channel(2, 2, 2, &mut rng)).unwrap())
        } else {
            ChannelModel::Classical(random_fsmc(3, 2, 2, &mut rng))
        };
        let q = InputLaw::new(vec![0.4, 0.6]).unwrap();
        let table = brute_force_oracle(&model, &q, n).unwrap();
        prop_assert!((table.total() - 1.0).abs() <= 1e-10);
        let traj = sample_trajectory(&model, &q, n, seed ^ 1).unwrap();
        let lpy = sequence_log_probability(&model, &q, None, &traj.y).unwrap();
        let lpxy = sequence_log_probability(&model, &q, Some(&traj.x), &traj.y).unwrap();
        prop_assert!((lpy - table.marginal(&traj.y).ln()).abs() <= 1e-9);
        prop_assert!((lpxy - table.joint(&traj.x, &traj.y).ln()).abs() <= 1e-9);
    }

    #[test]
    fn output_law_and_posterior_stay_normalised(seed: u64) {
        let mut rng = rng_for_seed(seed);
        let t = TransferOperatorSet::compile(&random_quantum_channel(2, 2, 3, &mut rng)).unwrap();
        let mut st = PosteriorState::new(random_density(2, &mut rng)).unwrap();
        for l in 0..50 {
            let x = l % 2;
            let p = conditional_output_distribution(&t, &st, x).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            let y = if p[0] >= p[1] { 0 } else { 1 };
            st = posterior_update(&t, &st, x, y).unwrap();
            prop_assert!((st.sigma().trace().re - 1.0).abs() <= 1e-12);
            prop_assert!(is_psd(st.sigma(), &tol()).psd);
        }
    }

    #[test]
    fn estimates_are_consistent(seed: u64, p_b in 0.0f64..=1.0, alpha in -1.5f64..=1.5) {
        let model = ChannelModel::Quantum(qge(0.05, p_b, alpha));
        let q = InputLaw::uniform(2);
        let traj = sample_trajectory(&model, &q, 400, seed).unwrap();
        let e = entropy_rate_estimates(&model, &q, &traj).unwrap();
        prop_assert_eq!(e.ir, e.hx + e.hy - e.hxy);
        prop_assert!(e.ir <= 1.0 + 0.005);
    }

    #[test]
    fn trajectory_text_round_trip(x in prop::collection::vec(0usize..5, 1..50), seed: u64) {
        let y: Vec<usize> = x.iter().map(|v| (v * 7 + 3) % 4).collect();
        let t = Trajectory::new(x, y, seed, "chacha8-v1").unwrap();
        prop_assert_eq!(Trajectory::from_text(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn embedded_posterior_matches_classical_forward(seed: u64) {
        let mut rng = rng_for_seed(seed);
        let f: ClassicalFsmc = random_fsmc(3, 2, 2, &mut rng);
        let t = TransferOperatorSet::from_classical(&f).unwrap();
        let traj = sample_trajectory(&ChannelModel::Classical(f.clone()), &InputLaw::uniform(2), 30, seed).unwrap();
        let mut st = PosteriorState::initial(&t);
        let mut mu = f.initial().to_vec();
        for (&x, &y) in traj.x.iter().zip(&traj.y) {
            st = posterior_update(&t, &st, x, y).unwrap();
            let mut next = vec![0.0; 3];
            for (s, &m) in mu.iter().enumerate() {
                for (sn, v) in next.iter_mut().enumerate() {
                    *v += m * f.kernel(s, x, sn, y);
                }
            }
            let z: f64 = next.iter().sum();
            mu = next.iter().map(|v| v / z).collect();
            let sigma: &ComplexOperator = st.sigma();
            for i in 0..3 {
                prop_assert!((sigma[(i, i)].re - mu[i]).abs() <= 1e-12);
            }
        }
    }
}
