use crate::error::{Error, Result};
use crate::operator::{c, expm_skew_hermitian, kron, pauli_x, ComplexOperator, Tolerance};

use super::validate::validate_quantum;
use super::{check_probability, Validate, ValidationReport};

/// A channel whose memory is a finite-dimensional quantum system.
///
/// Each use prepares `encodings[x]` on the transmit system, applies the
/// Kraus operators to the joint (state, transmit) system, measures the
/// transmit system with `measurements` and finally evolves the state with
/// the inter-use unitary.
///
/// Joint operators use the state index as the slow index:
/// `joint = state * transmit_dim + transmit`. The transmit system is
/// measured in the space it is sent in, so Kraus operators are square.
#[derive(Debug, Clone)]
pub struct QuantumMemoryChannel {
    state_dim: usize,
    transmit_dim: usize,
    encodings: Vec<ComplexOperator>,
    kraus: Vec<ComplexOperator>,
    measurements: Vec<ComplexOperator>,
    inter_use_unitary: Option<ComplexOperator>,
    initial_state: ComplexOperator,
}

impl QuantumMemoryChannel {
    pub fn new(
        state_dim: usize,
        transmit_dim: usize,
        encodings: Vec<ComplexOperator>,
        kraus: Vec<ComplexOperator>,
        measurements: Vec<ComplexOperator>,
        inter_use_unitary: Option<ComplexOperator>,
        initial_state: ComplexOperator,
    ) -> Result<Self> {
        let ch = Self::from_parts_unchecked(
            state_dim,
            transmit_dim,
            encodings,
            kraus,
            measurements,
            inter_use_unitary,
            initial_state,
        )?;
        ch.validate_with(&Tolerance::default()).into_result()?;
        Ok(ch)
    }

    /// Checks shapes only.
    pub fn from_parts_unchecked(
        state_dim: usize,
        transmit_dim: usize,
        encodings: Vec<ComplexOperator>,
        kraus: Vec<ComplexOperator>,
        measurements: Vec<ComplexOperator>,
        inter_use_unitary: Option<ComplexOperator>,
        initial_state: ComplexOperator,
    ) -> Result<Self> {
        let joint = state_dim * transmit_dim;
        let shape = |what: &str, got: usize, want: usize| -> Result<()> {
            if got != want {
                Err(Error::DimensionMismatch(format!("{what} has dimension {got}, expected {want}")))
            } else {
                Ok(())
            }
        };
        if encodings.is_empty() || kraus.is_empty() || measurements.is_empty() {
            return Err(Error::InvalidModel("encodings, Kraus and measurement sets must be nonempty".into()));
        }
        for (x, e) in encodings.iter().enumerate() {
            shape(&format!("encoding {x}"), e.dim(), transmit_dim)?;
        }
        for (k, e) in kraus.iter().enumerate() {
            if e.dim() != joint {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {k} has dimension {}, expected a square map on the \
                     {state_dim}x{transmit_dim} joint space (received and transmitted systems must match)",
                    e.dim()
                )));
            }
        }
        for (y, m) in measurements.iter().enumerate() {
            shape(&format!("measurement {y}"), m.dim(), transmit_dim)?;
        }
        if let Some(u) = &inter_use_unitary {
            shape("inter-use unitary", u.dim(), state_dim)?;
        }
        shape("initial state", initial_state.dim(), state_dim)?;
        if state_dim * state_dim > crate::operator::MAX_DIM {
            return Err(Error::DimensionMismatch(format!(
                "state dimension {state_dim} too large for transfer operators"
            )));
        }
        Ok(QuantumMemoryChannel {
            state_dim,
            transmit_dim,
            encodings,
            kraus,
            measurements,
            inter_use_unitary,
            initial_state,
        })
    }

    pub fn with_initial_state(mut self, rho: ComplexOperator) -> Result<Self> {
        if rho.dim() != self.state_dim {
            return Err(Error::DimensionMismatch("initial state dimension".into()));
        }
        self.initial_state = rho;
        self.validate_with(&Tolerance::default()).into_result()?;
        Ok(self)
    }

    pub fn with_inter_use_unitary(mut self, u: Option<ComplexOperator>) -> Result<Self> {
        if let Some(u) = &u {
            if u.dim() != self.state_dim {
                return Err(Error::DimensionMismatch("inter-use unitary dimension".into()));
            }
        }
        self.inter_use_unitary = u;
        self.validate_with(&Tolerance::default()).into_result()?;
        Ok(self)
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn transmit_dim(&self) -> usize {
        self.transmit_dim
    }

    pub fn inputs(&self) -> usize {
        self.encodings.len()
    }

    pub fn outputs(&self) -> usize {
        self.measurements.len()
    }

    pub fn encodings(&self) -> &[ComplexOperator] {
        &self.encodings
    }

    pub fn kraus(&self) -> &[ComplexOperator] {
        &self.kraus
    }

    pub fn measurements(&self) -> &[ComplexOperator] {
        &self.measurements
    }

    pub fn inter_use_unitary(&self) -> Option<&ComplexOperator> {
        self.inter_use_unitary.as_ref()
    }

    pub fn initial_state(&self) -> &ComplexOperator {
        &self.initial_state
    }

    /// Kraus operators with the inter-use evolution folded in: `(U ⊗ I) E_k`.
    pub fn effective_kraus(&self) -> Vec<ComplexOperator> {
        match &self.inter_use_unitary {
            None => self.kraus.clone(),
            Some(u) => {
                let lifted = kron(u, &ComplexOperator::identity(self.transmit_dim));
                self.kraus.iter().map(|e| &lifted * e).collect()
            }
        }
    }
}

impl Validate for QuantumMemoryChannel {
    fn validate_with(&self, tol: &Tolerance) -> ValidationReport {
        validate_quantum(self, tol)
    }
}

/// The two Kraus operators of the Quantum Gilbert-Elliott interaction on
/// (state qubit, transmit qubit): `E_0` is state-dependent attenuation and
/// `E_1` flips the transmit qubit with amplitude `sqrt(p_g)` or `sqrt(p_b)`.
pub fn quantum_gilbert_elliott_kraus(p_g: f64, p_b: f64) -> Result<[ComplexOperator; 2]> {
    check_probability(p_g, "p_g")?;
    check_probability(p_b, "p_b")?;
    let (a, b) = ((1.0 - p_g).sqrt(), (1.0 - p_b).sqrt());
    let (sg, sb) = (p_g.sqrt(), p_b.sqrt());
    let e0 = ComplexOperator::diag_real(&[a, a, b, b])?;
    let e1 = ComplexOperator::from_real_rows(&[
        &[0.0, sg, 0.0, 0.0],
        &[sg, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, sb],
        &[0.0, 0.0, sb, 0.0],
    ])?;
    Ok([e0, e1])
}

/// Default Hamiltonian for the state evolution: Pauli-X for a one-qubit
/// state, a fixed 4x4 Hermitian matrix with distinct eigenvalues for the
/// two-qubit state.
pub fn default_hamiltonian(state_dim: usize) -> Result<ComplexOperator> {
    match state_dim {
        2 => Ok(pauli_x()),
        4 => ComplexOperator::new(
            4,
            vec![
                c(0.5, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.2),
                c(0.3, 0.0),
                c(1.0, 0.0),
                c(-0.2, 0.0),
                c(0.7, 0.0),
                c(0.0, -0.1),
                c(0.0, -0.2),
                c(0.7, 0.0),
                c(0.1, 0.0),
                c(0.9, 0.0),
                c(0.3, 0.0),
                c(0.0, 0.1),
                c(0.9, 0.0),
                c(-0.6, 0.0),
            ],
        ),
        d => Err(Error::DimensionMismatch(format!("no default Hamiltonian for state dimension {d}"))),
    }
}

/// Quantum Gilbert-Elliott channel.
///
/// `h` must be Hermitian of dimension 2 (one state qubit) or 4 (two state
/// qubits, of which only the fast one interacts with the transmit qubit).
/// Encodings and measurements are the computational basis, the inter-use
/// unitary is `exp(-i alpha h)` and the initial state is maximally mixed.
pub fn build_quantum_gilbert_elliott(
    p_g: f64,
    p_b: f64,
    h: &ComplexOperator,
    alpha: f64,
) -> Result<QuantumMemoryChannel> {
    let tol = Tolerance::default();
    let state_dim = h.dim();
    if state_dim != 2 && state_dim != 4 {
        return Err(Error::DimensionMismatch(format!(
            "Quantum Gilbert-Elliott Hamiltonian must be 2x2 or 4x4, got {state_dim}x{state_dim}"
        )));
    }
    let u = expm_skew_hermitian(h, alpha, &tol)?;
    let [e0, e1] = quantum_gilbert_elliott_kraus(p_g, p_b)?;
    let kraus = if state_dim == 2 {
        vec![e0, e1]
    } else {
        let i2 = ComplexOperator::identity(2);
        vec![kron(&i2, &e0), kron(&i2, &e1)]
    };
    let basis0 = ComplexOperator::diag_real(&[1.0, 0.0])?;
    let basis1 = ComplexOperator::diag_real(&[0.0, 1.0])?;
    QuantumMemoryChannel::new(
        state_dim,
        2,
        vec![basis0.clone(), basis1.clone()],
        kraus,
        vec![basis0, basis1],
        Some(u),
        ComplexOperator::identity(state_dim).scale_real(1.0 / state_dim as f64),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{validate, Condition};
    use crate::operator::{completeness_sum, hermitian_eigenvalues};

    #[test]
    fn kraus_entries_match_printed_matrices() {
        let [e0, e1] = quantum_gilbert_elliott_kraus(0.05, 0.95).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| e0[(i, i)].re).collect();
        let expected = [0.95f64.sqrt(), 0.95f64.sqrt(), 0.05f64.sqrt(), 0.05f64.sqrt()];
        for (d, e) in diag.iter().zip(expected) {
            assert!((d - e).abs() < 1e-15);
        }
        assert!((e1[(0, 1)].re - 0.05f64.sqrt()).abs() < 1e-15);
        assert!((e1[(2, 3)].re - 0.95f64.sqrt()).abs() < 1e-15);
        assert_eq!(e1[(0, 2)], c(0.0, 0.0));
    }

    #[test]
    fn kraus_completeness_for_any_parameters() {
        for &(pg, pb) in &[(0.0, 0.0), (0.05, 0.95), (0.3, 0.7), (1.0, 0.0), (0.5, 1.0)] {
            let ks = quantum_gilbert_elliott_kraus(pg, pb).unwrap();
            let sum = completeness_sum(&ks).unwrap();
            assert!(sum.max_abs_diff(&ComplexOperator::identity(4)) < 1e-15);
        }
    }

    #[test]
    fn zero_alpha_gives_identity_evolution() {
        let ch = build_quantum_gilbert_elliott(0.05, 0.95, &pauli_x(), 0.0).unwrap();
        let u = ch.inter_use_unitary().unwrap();
        assert!(u.max_abs_diff(&ComplexOperator::identity(2)) < 1e-15);
    }

    #[test]
    fn builder_rejects_bad_inputs() {
        assert!(build_quantum_gilbert_elliott(1.2, 0.1, &pauli_x(), 1.0).is_err());
        let non_herm = ComplexOperator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(build_quantum_gilbert_elliott(0.1, 0.1, &non_herm, 1.0).is_err());
        assert!(build_quantum_gilbert_elliott(0.1, 0.1, &ComplexOperator::identity(3), 1.0).is_err());
    }

    #[test]
    fn two_qubit_variant_is_valid() {
        let h = default_hamiltonian(4).unwrap();
        let ev = hermitian_eigenvalues(&h, &Tolerance::default()).unwrap();
        assert!(ev.windows(2).all(|w| w[1] - w[0] > 1e-3), "eigenvalues {ev:?}");
        let ch = build_quantum_gilbert_elliott(0.05, 0.95, &h, 1.2).unwrap();
        assert_eq!(ch.state_dim(), 4);
        assert_eq!(ch.kraus()[0].dim(), 8);
        assert!(validate(&ch).is_valid());
    }

    #[test]
    fn missing_normalization_is_reported() {
        let [e0, _] = quantum_gilbert_elliott_kraus(0.1, 0.2).unwrap();
        let basis0 = ComplexOperator::diag_real(&[1.0, 0.0]).unwrap();
        let basis1 = ComplexOperator::diag_real(&[0.0, 1.0]).unwrap();
        let ch = QuantumMemoryChannel::from_parts_unchecked(
            2,
            2,
            vec![basis0.clone(), basis1.clone()],
            vec![e0],
            vec![basis0, basis1],
            None,
            ComplexOperator::identity(2).scale_real(0.5),
        )
        .unwrap();
        let r = validate(&ch);
        let k = r.check(Condition::KrausComplete).unwrap();
        assert!(!k.passed);
        assert!((k.witness - 0.2).abs() < 1e-12);
        assert!(r.check(Condition::MeasurementComplete).unwrap().passed);
    }

    #[test]
    fn rectangular_kraus_is_rejected() {
        let basis0 = ComplexOperator::diag_real(&[1.0, 0.0]).unwrap();
        let err = QuantumMemoryChannel::from_parts_unchecked(
            2,
            2,
            vec![basis0.clone()],
            vec![ComplexOperator::identity(8)],
            vec![basis0],
            None,
            ComplexOperator::identity(2).scale_real(0.5),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }
}
