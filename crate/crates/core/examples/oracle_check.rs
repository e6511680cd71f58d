//! Exact enumeration against the forward recursion on short sequences.

use qstate_ir::channels::{ChannelModel, InputLaw};
use qstate_ir::oracle::{brute_force_oracle, path_sum};
use qstate_ir::rate::sequence_log_probability;
use qstate_ir::channels::{build_quantum_gilbert_elliott, TransferOperatorSet};
use qstate_ir::operator::pauli_x;

fn main() -> qstate_ir::Result<()> {
    let t = TransferOperatorSet::compile(&build_quantum_gilbert_elliott(0.05, 0.95, &pauli_x(), 1.0)?)?;
    let model = ChannelModel::Quantum(t.clone());
    let q = InputLaw::uniform(2);

    let table = brute_force_oracle(&model, &q, 6)?;
    println!("sum over all 2^12 sequence pairs: {:.15}", table.total());
    println!("smallest joint probability: {:.3e}", table.min_joint());

    let (x, y) = ([0, 1, 1, 0, 1, 0], [0, 1, 0, 0, 1, 1]);
    let exact = table.joint(&x, &y).ln();
    let rec = sequence_log_probability(&model, &q, Some(&x), &y)?;
    println!("ln p(x,y): exact {exact:.12}, recursion {rec:.12}");

    let (g, defect) = path_sum(&t, &q, &x[..3], &y[..3])?;
    println!("explicit state-path sum for n = 3: {g:.6e} (Hermitian defect {defect:.1e})");
    Ok(())
}
