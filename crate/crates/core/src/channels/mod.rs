//! Channel models.
//!
//! Three families are supported: discrete memoryless channels ([`Dmc`]),
//! finite-state-machine channels with a classical state ([`ClassicalFsmc`])
//! and channels whose memory is a quantum system
//! ([`QuantumMemoryChannel`]). Quantum models are compiled once into a
//! [`TransferOperatorSet`], which is also the form classical models take
//! when embedded for cross-checking.

mod classical;
mod quantum;
mod transfer;
mod validate;

pub use classical::{build_bsc, build_gilbert_elliott, ClassicalFsmc, Dmc};
pub use quantum::{
    build_quantum_gilbert_elliott, default_hamiltonian, quantum_gilbert_elliott_kraus, QuantumMemoryChannel,
};
pub use transfer::TransferOperatorSet;
pub use validate::{validate, Check, Condition, Validate, ValidationReport};

use crate::error::{Error, Result};
use crate::operator::Tolerance;

/// A channel law driven by a forward recursion: either a classical FSMC or
/// a compiled quantum-state channel.
#[derive(Debug, Clone)]
pub enum ChannelModel {
    Classical(ClassicalFsmc),
    Quantum(TransferOperatorSet),
}

impl ChannelModel {
    pub fn inputs(&self) -> usize {
        match self {
            ChannelModel::Classical(f) => f.inputs(),
            ChannelModel::Quantum(t) => t.inputs(),
        }
    }

    pub fn outputs(&self) -> usize {
        match self {
            ChannelModel::Classical(f) => f.outputs(),
            ChannelModel::Quantum(t) => t.outputs(),
        }
    }

    /// Number of classical states, or the Hilbert-space dimension of the
    /// state system.
    pub fn state_dim(&self) -> usize {
        match self {
            ChannelModel::Classical(f) => f.states(),
            ChannelModel::Quantum(t) => t.state_dim(),
        }
    }

    /// The model as a transfer set (classical models are embedded).
    pub fn to_transfer(&self) -> Result<TransferOperatorSet> {
        match self {
            ChannelModel::Classical(f) => TransferOperatorSet::from_classical(f),
            ChannelModel::Quantum(t) => Ok(t.clone()),
        }
    }
}

impl From<ClassicalFsmc> for ChannelModel {
    fn from(f: ClassicalFsmc) -> Self {
        ChannelModel::Classical(f)
    }
}

impl From<Dmc> for ChannelModel {
    fn from(d: Dmc) -> Self {
        ChannelModel::Classical(ClassicalFsmc::from_dmc(&d))
    }
}

impl From<TransferOperatorSet> for ChannelModel {
    fn from(t: TransferOperatorSet) -> Self {
        ChannelModel::Quantum(t)
    }
}

impl Validate for ChannelModel {
    fn validate_with(&self, tol: &Tolerance) -> ValidationReport {
        match self {
            ChannelModel::Classical(f) => f.validate_with(tol),
            ChannelModel::Quantum(t) => t.validate_with(tol),
        }
    }
}

/// Slack for "sums to one" checks on probability vectors.
pub const EPS_TRACE: f64 = 1e-10;

/// An i.i.d. per-symbol input law.
#[derive(Debug, Clone, PartialEq)]
pub struct InputLaw {
    p: Vec<f64>,
}

impl InputLaw {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        check_pmf(&p, "input law")?;
        Ok(InputLaw { p })
    }

    pub fn uniform(size: usize) -> Self {
        InputLaw { p: vec![1.0 / size as f64; size] }
    }

    /// Point mass on `symbol`.
    pub fn deterministic(size: usize, symbol: usize) -> Self {
        let mut p = vec![0.0; size];
        p[symbol] = 1.0;
        InputLaw { p }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn prob(&self, x: usize) -> f64 {
        self.p[x]
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    /// Per-symbol entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        self.p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum()
    }
}

/// Checks that `p` is a pmf within [`EPS_TRACE`].
pub(crate) fn check_pmf(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidProbability(format!("{what}: empty")));
    }
    if let Some(v) = p.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidProbability(format!("{what}: entry {v} is not a probability")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > EPS_TRACE {
        return Err(Error::InvalidProbability(format!("{what}: sums to {s}")));
    }
    Ok(())
}

pub(crate) fn check_probability(p: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(format!("{what} = {p} outside [0, 1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn input_law_validation() {
        assert!(InputLaw::new(vec![0.5, 0.5]).is_ok());
        assert!(InputLaw::new(vec![0.6, 0.5]).is_err());
        assert!(InputLaw::new(vec![-0.1, 1.1]).is_err());
        assert_eq!(InputLaw::uniform(4).entropy_bits(), 2.0);
        assert_eq!(InputLaw::deterministic(2, 0).entropy_bits(), 0.0);
    }
}
