use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{ComplexOperator, Tolerance, MAX_DIM};

use super::validate::validate_transfer;
use super::{ClassicalFsmc, QuantumMemoryChannel, Validate, ValidationReport};

/// Compiled per-use transfer operators `W^(y|x)` and the initial state.
///
/// `operator(x, y)` has rows `(s_prev, s_next)` and columns
/// `(s_prev', s_next')`, both flattened as `prev * state_dim + next`.
/// Alongside each operator the set caches its reshuffled form acting on
/// vectorised state operators, so a forward step is one matrix-vector
/// product.
#[derive(Debug, Clone)]
pub struct TransferOperatorSet {
    state_dim: usize,
    inputs: usize,
    outputs: usize,
    ops: Vec<ComplexOperator>,
    /// `maps[x * outputs + y][(t, t'), (s, s')] = W((s, t), (s', t'))`.
    maps: Vec<Vec<Complex64>>,
    initial_state: ComplexOperator,
}

impl TransferOperatorSet {
    /// Assembles and validates a transfer set from explicit operators,
    /// indexed `x * outputs + y`.
    pub fn new(
        state_dim: usize,
        inputs: usize,
        outputs: usize,
        ops: Vec<ComplexOperator>,
        initial_state: ComplexOperator,
    ) -> Result<Self> {
        let t = Self::from_parts_unchecked(state_dim, inputs, outputs, ops, initial_state)?;
        t.validate_with(&Tolerance::default()).into_result()?;
        Ok(t)
    }

    pub fn from_parts_unchecked(
        state_dim: usize,
        inputs: usize,
        outputs: usize,
        ops: Vec<ComplexOperator>,
        initial_state: ComplexOperator,
    ) -> Result<Self> {
        let d2 = state_dim * state_dim;
        if state_dim == 0 || d2 > MAX_DIM {
            return Err(Error::DimensionMismatch(format!("state dimension {state_dim} unsupported")));
        }
        if ops.len() != inputs * outputs || inputs == 0 || outputs == 0 {
            return Err(Error::DimensionMismatch(format!(
                "expected {} transfer operators, got {}",
                inputs * outputs,
                ops.len()
            )));
        }
        if ops.iter().any(|w| w.dim() != d2) {
            return Err(Error::DimensionMismatch(format!("transfer operators must be {d2}x{d2}")));
        }
        if initial_state.dim() != state_dim {
            return Err(Error::DimensionMismatch("initial state dimension".into()));
        }
        let maps = ops.iter().map(|w| reshuffle(w, state_dim)).collect();
        Ok(TransferOperatorSet { state_dim, inputs, outputs, ops, maps, initial_state })
    }

    /// Compiles a quantum memory channel by closing the box over the
    /// transmit, received and environment indices.
    pub fn compile(ch: &QuantumMemoryChannel) -> Result<Self> {
        let report = ch.validate_with(&Tolerance::default());
        report.into_result()?;

        let sd = ch.state_dim();
        let td = ch.transmit_dim();
        let joint = |s: usize, a: usize| s * td + a;
        let lifted_meas: Vec<ComplexOperator> = ch
            .measurements()
            .iter()
            .map(|m| crate::operator::kron(&ComplexOperator::identity(sd), m))
            .collect();
        let kraus = ch.effective_kraus();

        let mut ops = Vec::with_capacity(ch.inputs() * ch.outputs());
        for rho in ch.encodings() {
            for meas in &lifted_meas {
                let mut w = vec![Complex64::new(0.0, 0.0); sd * sd * sd * sd];
                for e in &kraus {
                    let a = meas * e;
                    // v[(c, t)][(s, a')] = sum_a A((t, c), (s, a)) rho(a, a')
                    for t in 0..sd {
                        for cc in 0..td {
                            let row = joint(t, cc);
                            let mut v = vec![Complex64::new(0.0, 0.0); sd * td];
                            for s in 0..sd {
                                for ap in 0..td {
                                    let mut acc = Complex64::new(0.0, 0.0);
                                    for aa in 0..td {
                                        acc += a[(row, joint(s, aa))] * rho[(aa, ap)];
                                    }
                                    v[s * td + ap] = acc;
                                }
                            }
                            for tp in 0..sd {
                                let rowp = joint(tp, cc);
                                for s in 0..sd {
                                    for sp in 0..sd {
                                        let mut acc = Complex64::new(0.0, 0.0);
                                        for ap in 0..td {
                                            acc += v[s * td + ap] * a[(rowp, joint(sp, ap))].conj();
                                        }
                                        w[(s * sd + t) * sd * sd + sp * sd + tp] += acc;
                                    }
                                }
                            }
                        }
                    }
                }
                ops.push(ComplexOperator::new(sd * sd, w)?);
            }
        }
        let set = Self::from_parts_unchecked(sd, ch.inputs(), ch.outputs(), ops, ch.initial_state().clone())?;
        set.validate_with(&Tolerance::default()).into_result()?;
        Ok(set)
    }

    /// Embeds a classical FSMC as a diagonal transfer set:
    /// `W((s, t), (s', t')) = delta(s, s') delta(t, t') W(t, y | s, x)`.
    pub fn from_classical(f: &ClassicalFsmc) -> Result<Self> {
        let sd = f.states();
        let mut ops = Vec::with_capacity(f.inputs() * f.outputs());
        for x in 0..f.inputs() {
            for y in 0..f.outputs() {
                let diag: Vec<f64> = (0..sd * sd).map(|idx| f.kernel(idx / sd, x, idx % sd, y)).collect();
                ops.push(ComplexOperator::diag_real(&diag)?);
            }
        }
        let initial = ComplexOperator::diag_real(f.initial())?;
        Self::from_parts_unchecked(sd, f.inputs(), f.outputs(), ops, initial)
    }

    pub fn with_initial_state(&self, rho: ComplexOperator) -> Result<Self> {
        Self::from_parts_unchecked(self.state_dim, self.inputs, self.outputs, self.ops.clone(), rho)
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn initial_state(&self) -> &ComplexOperator {
        &self.initial_state
    }

    /// `W^(y|x)`.
    pub fn operator(&self, x: usize, y: usize) -> &ComplexOperator {
        &self.ops[x * self.outputs + y]
    }

    /// Reshuffled `W^(y|x)` mapping `vec(sigma)` (index `s * d + s'`) to
    /// `vec(sigma')` (index `t * d + t'`), row-major.
    pub fn state_map(&self, x: usize, y: usize) -> &[Complex64] {
        &self.maps[x * self.outputs + y]
    }

    /// `out += weight * W^(y|x)` applied to the vectorised operator `sigma`.
    #[inline]
    pub fn apply_accumulate(&self, x: usize, y: usize, weight: f64, sigma: &[Complex64], out: &mut [Complex64]) {
        let d2 = self.state_dim * self.state_dim;
        let map = &self.maps[x * self.outputs + y];
        for (row, o) in map.chunks_exact(d2).zip(out.iter_mut()) {
            let acc: Complex64 = row.iter().zip(sigma).map(|(m, s)| m * s).sum();
            *o += acc * weight;
        }
    }
}

fn reshuffle(w: &ComplexOperator, sd: usize) -> Vec<Complex64> {
    let d2 = sd * sd;
    let mut out = vec![Complex64::new(0.0, 0.0); d2 * d2];
    for s in 0..sd {
        for t in 0..sd {
            for sp in 0..sd {
                for tp in 0..sd {
                    out[(t * sd + tp) * d2 + s * sd + sp] = w[(s * sd + t, sp * sd + tp)];
                }
            }
        }
    }
    out
}

impl Validate for TransferOperatorSet {
    fn validate_with(&self, tol: &Tolerance) -> ValidationReport {
        validate_transfer(self, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{build_bsc, build_gilbert_elliott, build_quantum_gilbert_elliott, validate, Condition};
    use crate::operator::{is_psd, kron, pauli_x, partial_trace, Keep};
    use crate::random::{random_fsmc, random_quantum_channel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Direct index-sum evaluation of the transfer operator definition,
    /// written against the raw Kraus/measurement entries.
    fn transfer_entry_oracle(ch: &QuantumMemoryChannel, x: usize, y: usize, s: usize, t: usize, sp: usize, tp: usize) -> Complex64 {
        let td = ch.transmit_dim();
        let j = |st: usize, a: usize| st * td + a;
        let m = &ch.measurements()[y];
        let rho = &ch.encodings()[x];
        let mut acc = Complex64::new(0.0, 0.0);
        for e in ch.effective_kraus() {
            for a in 0..td {
                for ap in 0..td {
                    for b in 0..td {
                        for bp in 0..td {
                            for cc in 0..td {
                                acc += m[(cc, b)]
                                    * e[(j(t, b), j(s, a))]
                                    * rho[(a, ap)]
                                    * e[(j(tp, bp), j(sp, ap))].conj()
                                    * m[(cc, bp)].conj();
                            }
                        }
                    }
                }
            }
        }
        acc
    }

    #[test]
    fn compiled_operators_match_index_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ch = random_quantum_channel(2, 2, 3, &mut rng);
        let set = TransferOperatorSet::compile(&ch).unwrap();
        let sd = 2;
        for x in 0..2 {
            for y in 0..2 {
                let w = set.operator(x, y);
                for s in 0..sd {
                    for t in 0..sd {
                        for sp in 0..sd {
                            for tp in 0..sd {
                                let o = transfer_entry_oracle(&ch, x, y, s, t, sp, tp);
                                assert!((w[(s * sd + t, sp * sd + tp)] - o).norm() < 1e-13);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn noiseless_quantum_ge_never_flips() {
        let ch = build_quantum_gilbert_elliott(0.0, 0.0, &pauli_x(), 0.7).unwrap();
        let set = TransferOperatorSet::compile(&ch).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                if x != y {
                    assert!(set.operator(x, y).max_abs() < 1e-15);
                }
            }
            // Closing over the next state leaves the identity on the previous state.
            let w = set.operator(x, x);
            for s in 0..2 {
                for sp in 0..2 {
                    let acc: Complex64 = (0..2).map(|u| w[(s * 2 + u, sp * 2 + u)]).sum();
                    let target = if s == sp { 1.0 } else { 0.0 };
                    assert!((acc - target).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn quantum_ge_operators_are_psd() {
        let ch = build_quantum_gilbert_elliott(0.05, 0.95, &pauli_x(), 1.0).unwrap();
        let set = TransferOperatorSet::compile(&ch).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert!(is_psd(set.operator(x, y), &Tolerance::default()).psd);
            }
        }
        assert!(validate(&set).is_valid());
    }

    #[test]
    fn trace_consistency_for_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let ch = random_quantum_channel(2, 2, 2, &mut rng);
            let set = TransferOperatorSet::compile(&ch).unwrap();
            let r = validate(&set);
            let c = r.check(Condition::TransferTraceConsistent).unwrap();
            assert!(c.witness < 1e-12, "witness {}", c.witness);
            assert!(r.is_valid());
        }
    }

    #[test]
    fn output_probability_matches_operator_formula() {
        // p(y) = Tr(M_y Tr_S(sum_k E_k (rho_x ⊗ sigma) E_k^H) M_y^H), with the
        // state as the first tensor factor.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let ch = random_quantum_channel(2, 2, 2, &mut rng);
        let set = TransferOperatorSet::compile(&ch).unwrap();
        let sigma = crate::random::random_density(2, &mut rng);
        for x in 0..2 {
            let joint_in = kron(&sigma, &ch.encodings()[x]);
            let mut out = ComplexOperator::zeros(4);
            for e in ch.effective_kraus() {
                out = &out + &(&(&e * &joint_in) * &e.dagger());
            }
            let received = partial_trace(&out, (2, 2), Keep::Second).unwrap();
            for y in 0..2 {
                let m = &ch.measurements()[y];
                let p_direct = (&(m * &received) * &m.dagger()).trace();
                let w = set.operator(x, y);
                let mut p = Complex64::new(0.0, 0.0);
                for s in 0..2 {
                    for sp in 0..2 {
                        for t in 0..2 {
                            p += sigma[(s, sp)] * w[(s * 2 + t, sp * 2 + t)];
                        }
                    }
                }
                assert!((p - p_direct).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn classical_embedding_is_valid() {
        let bsc = ClassicalFsmc::from_dmc(&build_bsc(0.2).unwrap());
        let set = TransferOperatorSet::from_classical(&bsc).unwrap();
        assert_eq!(set.operator(0, 1).dim(), 1);
        assert!((set.operator(0, 1)[(0, 0)].re - 0.2).abs() < 1e-15);
        assert!((set.operator(1, 1)[(0, 0)].re - 0.8).abs() < 1e-15);

        let ge = build_gilbert_elliott(0.1, 0.4, [[0.9, 0.1], [0.2, 0.8]]).unwrap();
        assert!(validate(&TransferOperatorSet::from_classical(&ge).unwrap()).is_valid());
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..10 {
            let f = random_fsmc(3, 2, 3, &mut rng);
            assert!(validate(&TransferOperatorSet::from_classical(&f).unwrap()).is_valid());
        }
    }

    #[test]
    fn broken_closure_is_reported() {
        let bsc = ClassicalFsmc::from_dmc(&build_bsc(0.2).unwrap());
        let set = TransferOperatorSet::from_classical(&bsc).unwrap();
        let mut ops: Vec<ComplexOperator> = (0..2)
            .flat_map(|x| (0..2).map(move |y| (x, y)))
            .map(|(x, y)| set.operator(x, y).clone())
            .collect();
        ops[0] = ops[0].scale_real(0.5);
        let broken = TransferOperatorSet::from_parts_unchecked(1, 2, 2, ops, ComplexOperator::identity(1)).unwrap();
        let r = validate(&broken);
        let c = r.check(Condition::TransferTraceConsistent).unwrap();
        assert!(!c.passed);
        assert!((c.witness - 0.4).abs() < 1e-12);
        assert!(r.check(Condition::TransferPsd).unwrap().passed);
    }
}
