//! Validity reports for channel models.

use std::fmt;

use crate::error::{Error, Result};
use crate::operator::{completeness_sum, is_psd, ComplexOperator, Tolerance};

use super::{ClassicalFsmc, Dmc, QuantumMemoryChannel, TransferOperatorSet};

/// A named validity condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    /// Every `W(y|x)` row of a DMC is a pmf.
    DmcRowsNormalized,
    /// All FSMC kernel entries are nonnegative.
    KernelNonnegative,
    /// For every `(s, x)`, the kernel sums to one over `(t, y)`.
    KernelNormalized,
    /// The initial classical state law is a pmf.
    InitialPmf,
    /// Each encoding is a density operator.
    EncodingDensity,
    /// `sum_k E_k† E_k = I`.
    KrausComplete,
    /// `sum_y M_y† M_y = I`.
    MeasurementComplete,
    /// The initial quantum state is a density operator.
    InitialDensity,
    /// The inter-use evolution is unitary.
    InterUseUnitary,
    /// Every transfer operator `W^(y|x)` is positive semidefinite.
    TransferPsd,
    /// Closing the box over `(s_l, s'_l, y_l)` leaves `delta(s'_{l-1}, s_{l-1})`.
    TransferTraceConsistent,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::DmcRowsNormalized => "channel law rows are pmfs",
            Condition::KernelNonnegative => "kernel W(t,y|s,x) >= 0",
            Condition::KernelNormalized => "sum_{t,y} W(t,y|s,x) = 1",
            Condition::InitialPmf => "initial state law is a pmf",
            Condition::EncodingDensity => "encodings are p.s.d. with unit trace",
            Condition::KrausComplete => "sum_k E_k^H E_k = I",
            Condition::MeasurementComplete => "sum_y M_y^H M_y = I",
            Condition::InitialDensity => "initial state is p.s.d. with unit trace",
            Condition::InterUseUnitary => "inter-use evolution is unitary",
            Condition::TransferPsd => "every W^(y|x) is p.s.d.",
            Condition::TransferTraceConsistent => {
                "sum_{s_l,s'_l,y} W^(y|x)(s_{l-1},s_l;s'_{l-1},s'_l) delta(s'_l,s_l) = delta(s'_{l-1},s_{l-1})"
            }
        };
        f.write_str(s)
    }
}

/// One checked condition with its worst observed deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub condition: Condition,
    pub passed: bool,
    /// Worst deviation from the condition (0 when exact).
    pub witness: f64,
    /// Where the worst deviation occurred.
    pub location: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} (witness {:.3e}{})",
            if self.passed { "pass" } else { "FAIL" },
            self.condition,
            self.witness,
            if self.location.is_empty() { String::new() } else { format!(" at {}", self.location) }
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, condition: Condition) -> Option<&Check> {
        self.checks.iter().find(|c| c.condition == condition)
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            return Ok(());
        }
        let msg = self.failures().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        Err(Error::InvalidModel(msg))
    }

    fn push(&mut self, condition: Condition, worst: Worst, threshold: f64) {
        self.checks.push(Check {
            condition,
            passed: worst.value <= threshold,
            witness: worst.value,
            location: worst.location,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Models that can report on their own validity.
pub trait Validate {
    fn validate_with(&self, tol: &Tolerance) -> ValidationReport;
}

/// Validates with default tolerances.
pub fn validate<M: Validate + ?Sized>(model: &M) -> ValidationReport {
    model.validate_with(&Tolerance::default())
}

#[derive(Default)]
struct Worst {
    value: f64,
    location: String,
}

impl Worst {
    fn offer(&mut self, value: f64, location: impl FnOnce() -> String) {
        if value > self.value || (value.is_nan() && !self.value.is_nan()) {
            self.value = value;
            self.location = location();
        }
    }
}

fn pmf_deviation(p: &[f64]) -> f64 {
    let neg = p.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
    let sum: f64 = p.iter().sum();
    neg.max((sum - 1.0).abs())
}

pub(crate) fn validate_dmc(d: &Dmc, tol: &Tolerance) -> ValidationReport {
    let mut worst = Worst::default();
    for x in 0..d.inputs() {
        worst.offer(pmf_deviation(d.row(x)), || format!("x={x}"));
    }
    let mut r = ValidationReport::default();
    r.push(Condition::DmcRowsNormalized, worst, tol.eps_trace);
    r
}

pub(crate) fn validate_fsmc(f: &ClassicalFsmc, tol: &Tolerance) -> ValidationReport {
    let mut r = ValidationReport::default();

    let mut neg = Worst::default();
    let mut norm = Worst::default();
    for s in 0..f.states() {
        for x in 0..f.inputs() {
            let block = f.kernel_block(s, x);
            for (idx, &v) in block.iter().enumerate() {
                let (t, y) = (idx / f.outputs(), idx % f.outputs());
                neg.offer(if v.is_finite() { (-v).max(0.0) } else { f64::INFINITY }, || {
                    format!("(s={s}, x={x}, t={t}, y={y})")
                });
            }
            let sum: f64 = block.iter().sum();
            norm.offer((sum - 1.0).abs(), || format!("(s={s}, x={x})"));
        }
    }
    r.push(Condition::KernelNonnegative, neg, 0.0);
    r.push(Condition::KernelNormalized, norm, tol.eps_trace);

    let mut init = Worst::default();
    init.offer(pmf_deviation(f.initial()), String::new);
    r.push(Condition::InitialPmf, init, tol.eps_trace);
    r
}

/// Deviation of `rho` from being a density operator.
fn density_deviation(rho: &ComplexOperator, tol: &Tolerance) -> f64 {
    let psd = is_psd(rho, tol);
    let herm = rho.hermitian_residue();
    let neg = psd.min_eigenvalue.map(|v| (-v).max(0.0)).unwrap_or(herm);
    let trace = (rho.trace() - 1.0).norm();
    let herm_excess = if herm > tol.eps_hermitian * rho.max_abs() { herm } else { 0.0 };
    let neg_excess = if psd.psd { 0.0 } else { neg };
    trace.max(herm_excess).max(neg_excess)
}

pub(crate) fn validate_quantum(q: &QuantumMemoryChannel, tol: &Tolerance) -> ValidationReport {
    let mut r = ValidationReport::default();

    let mut enc = Worst::default();
    for (x, rho) in q.encodings().iter().enumerate() {
        enc.offer(density_deviation(rho, tol), || format!("x={x}"));
    }
    r.push(Condition::EncodingDensity, enc, tol.eps_trace);

    let mut kraus = Worst::default();
    if let Some(sum) = completeness_sum(q.kraus()) {
        kraus.offer(sum.max_abs_diff(&ComplexOperator::identity(sum.dim())), String::new);
    } else {
        kraus.offer(f64::INFINITY, || "empty Kraus set".into());
    }
    r.push(Condition::KrausComplete, kraus, tol.eps_trace);

    let mut meas = Worst::default();
    if let Some(sum) = completeness_sum(q.measurements()) {
        meas.offer(sum.max_abs_diff(&ComplexOperator::identity(sum.dim())), String::new);
    } else {
        meas.offer(f64::INFINITY, || "empty measurement set".into());
    }
    r.push(Condition::MeasurementComplete, meas, tol.eps_trace);

    let mut init = Worst::default();
    init.offer(density_deviation(q.initial_state(), tol), String::new);
    r.push(Condition::InitialDensity, init, tol.eps_trace);

    let mut unitary = Worst::default();
    if let Some(u) = q.inter_use_unitary() {
        unitary.offer(u.unitarity_residue(), String::new);
    }
    r.push(Condition::InterUseUnitary, unitary, tol.eps_unitary);
    r
}

pub(crate) fn validate_transfer(t: &TransferOperatorSet, tol: &Tolerance) -> ValidationReport {
    let mut r = ValidationReport::default();
    let sd = t.state_dim();

    let mut psd = Worst::default();
    for x in 0..t.inputs() {
        for y in 0..t.outputs() {
            let w = t.operator(x, y);
            let check = is_psd(w, tol);
            if !check.psd {
                let v = match check.witness {
                    Some(crate::operator::PsdWitness::Asymmetry(a)) => a,
                    Some(crate::operator::PsdWitness::NegativeEigenvalue(e)) => -e,
                    None => 0.0,
                };
                psd.offer(v, || format!("(x={x}, y={y})"));
            }
        }
    }
    r.push(Condition::TransferPsd, psd, 0.0);

    let mut closure = Worst::default();
    for x in 0..t.inputs() {
        for s in 0..sd {
            for sp in 0..sd {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for y in 0..t.outputs() {
                    let w = t.operator(x, y);
                    for u in 0..sd {
                        acc += w[(s * sd + u, sp * sd + u)];
                    }
                }
                let target = if s == sp { 1.0 } else { 0.0 };
                closure.offer((acc - target).norm(), || format!("(x={x}, s={s}, s'={sp})"));
            }
        }
    }
    r.push(Condition::TransferTraceConsistent, closure, tol.eps_trace);

    let mut init = Worst::default();
    init.offer(density_deviation(t.initial_state(), tol), String::new);
    r.push(Condition::InitialDensity, init, tol.eps_trace);
    r
}
