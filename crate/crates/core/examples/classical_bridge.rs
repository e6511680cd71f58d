//! A classical Gilbert-Elliott channel run through both recursions: the
//! native state metric and its diagonal embedding as a quantum-state channel.

use qstate_ir::channels::{build_gilbert_elliott, ChannelModel, InputLaw, TransferOperatorSet};
use qstate_ir::rate::{entropy_rate_estimates_with, forward_log_scales, EstimateOptions};
use qstate_ir::trajectory::sample_trajectory;

fn main() -> qstate_ir::Result<()> {
    let f = build_gilbert_elliott(0.02, 0.3, [[0.97, 0.03], [0.1, 0.9]])?;
    let native = ChannelModel::Classical(f.clone());
    let embedded = ChannelModel::Quantum(TransferOperatorSet::from_classical(&f)?);
    let q = InputLaw::uniform(2);

    let traj = sample_trajectory(&native, &q, 20_000, 4)?;
    let a = forward_log_scales(&native, &q, None, &traj.y)?;
    let b = forward_log_scales(&embedded, &q, None, &traj.y)?;
    let gap = a.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    println!("largest per-step ln(lambda) difference: {gap:.2e}");

    let opts = EstimateOptions { burn_in: 1_000, keep_log_scales: false };
    let e = entropy_rate_estimates_with(&native, &q, &traj, opts)?;
    println!("I(X;Y) ~ {:.4} bits/use after discarding {} steps", e.ir, e.burn_in);
    Ok(())
}
