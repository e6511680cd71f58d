//! Validating hand-written channel descriptions. A broken Kraus set is
//! reported with the failed condition and its witness.

use qstate_ir::channels::{validate, QuantumMemoryChannel, TransferOperatorSet};
use qstate_ir::experiment::ExperimentConfig;
use qstate_ir::operator::{c, ComplexOperator};

fn main() -> qstate_ir::Result<()> {
    let basis = |i: usize| ComplexOperator::diag_real(&[(i == 0) as u8 as f64, (i == 1) as u8 as f64]);
    let (e0, e1) = (basis(0)?, basis(1)?);

    // Amplitude-damping-like interaction on one state qubit.
    let g: f64 = 0.2;
    let k0 = ComplexOperator::from_fn(4, |r, col| match (r, col) {
        (0, 0) | (1, 1) => c(1.0, 0.0),
        (2, 2) | (3, 3) => c((1.0 - g).sqrt(), 0.0),
        _ => c(0.0, 0.0),
    })?;
    let k1 = ComplexOperator::from_fn(4, |r, col| if (r, col) == (0, 2) || (r, col) == (1, 3) { c(g.sqrt(), 0.0) } else { c(0.0, 0.0) })?;
    let rho = ComplexOperator::diag_real(&[0.5, 0.5])?;
    let ch = QuantumMemoryChannel::new(2, 2, vec![e0.clone(), e1.clone()], vec![k0.clone(), k1], vec![e0.clone(), e1.clone()], None, rho.clone())?;
    print!("valid channel:\n{}", validate(&TransferOperatorSet::compile(&ch)?));

    let broken = QuantumMemoryChannel::from_parts_unchecked(2, 2, vec![e0.clone(), e1.clone()], vec![k0], vec![e0, e1], None, rho)?;
    print!("\nmissing Kraus operator:\n{}", validate(&broken));

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/custom_kraus.toml");
    let cfg = ExperimentConfig::from_file(path)?;
    println!("\n{path}: {} sweep point(s)", cfg.sweep_points()?.len());
    Ok(())
}
