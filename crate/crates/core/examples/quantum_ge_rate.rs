//! Information rate of the quantum Gilbert-Elliott channel.
//!
//! Usage: `cargo run --release --example quantum_ge_rate [p_g p_b alpha n]`

use qstate_ir::channels::{build_quantum_gilbert_elliott, validate, ChannelModel, InputLaw, TransferOperatorSet};
use qstate_ir::operator::pauli_x;
use qstate_ir::rate::{entropy_rate_estimates, h2};
use qstate_ir::trajectory::sample_trajectory;

fn main() -> qstate_ir::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let p_g = args.first().copied().unwrap_or(0.05);
    let p_b = args.get(1).copied().unwrap_or(0.95);
    let alpha = args.get(2).copied().unwrap_or(1.0);
    let n = args.get(3).map(|&v| v as usize).unwrap_or(100_000);

    let channel = build_quantum_gilbert_elliott(p_g, p_b, &pauli_x(), alpha)?;
    let transfer = TransferOperatorSet::compile(&channel)?;
    print!("{}", validate(&transfer));

    let model = ChannelModel::Quantum(transfer);
    let q = InputLaw::uniform(2);
    for seed in 1..=3 {
        let traj = sample_trajectory(&model, &q, n, seed)?;
        let e = entropy_rate_estimates(&model, &q, &traj)?;
        println!(
            "seed {seed}: H(X) {:.4}  H(Y) {:.4}  H(X,Y) {:.4}  I {:.4} bits/use",
            e.hx, e.hy, e.hxy, e.ir
        );
    }
    println!("memoryless reference 1 - h2(p_g) = {:.4}", 1.0 - h2(p_g));
    Ok(())
}
