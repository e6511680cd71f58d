//! Small dense operators: Kronecker products, partial traces, the spectral
//! exponential and positivity checks.

use qstate_ir::operator::{
    expm_skew_hermitian, hermitian_eigenvalues, is_psd, kron, partial_trace, pauli_x, ComplexOperator, Keep,
    Tolerance,
};

fn main() -> qstate_ir::Result<()> {
    let tol = Tolerance::default();
    let rho_s = ComplexOperator::diag_real(&[0.7, 0.3])?;
    let rho_a = ComplexOperator::diag_real(&[1.0, 0.0])?;

    // The state index is the slow one on joint spaces.
    let joint = kron(&rho_s, &rho_a);
    println!("state (x) transmit diagonal: {:?}", (0..4).map(|i| joint[(i, i)].re).collect::<Vec<_>>());
    let back = partial_trace(&joint, (2, 2), Keep::First)?;
    println!("trace over transmit recovers the state: {}", back.max_abs_diff(&rho_s) < 1e-15);

    let u = expm_skew_hermitian(&pauli_x(), 1.0, &tol)?;
    println!("exp(-i X) unitarity residue: {:.2e}", u.unitarity_residue());
    println!("eigenvalues of X: {:?}", hermitian_eigenvalues(&pauli_x(), &tol)?);

    let check = is_psd(&pauli_x(), &tol);
    println!("X is p.s.d.: {} (witness {:?})", check.psd, check.witness);
    Ok(())
}
