#![allow(dead_code)]

use qstate_ir::channels::{build_gilbert_elliott, build_quantum_gilbert_elliott, ClassicalFsmc, TransferOperatorSet};
use qstate_ir::operator::pauli_x;
use qstate_ir::rate::h2;

pub fn qge(p_g: f64, p_b: f64, alpha: f64) -> TransferOperatorSet {
    TransferOperatorSet::compile(&build_quantum_gilbert_elliott(p_g, p_b, &pauli_x(), alpha).unwrap()).unwrap()
}

/// Symmetric Gilbert-Elliott channel used as the classical reference.
pub fn ge() -> ClassicalFsmc {
    build_gilbert_elliott(0.05, 0.95, [[0.9, 0.1], [0.2, 0.8]]).unwrap()
}

pub fn bsc_rate(p: f64) -> f64 {
    1.0 - h2(p)
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation.
pub fn std_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

pub fn std_err(v: &[f64]) -> f64 {
    std_dev(v) / (v.len() as f64).sqrt()
}

/// Prints the verdict line and fails the test when `ok` is false.
pub fn verdict(id: &str, ok: bool, detail: String) {
    println!("acceptance {id}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "acceptance {id} failed: {detail}");
}
