//! Mismatched-decoding lower bounds for the quantum Gilbert-Elliott channel,
//! with a grid over classical two-state auxiliaries.

use qstate_ir::bounds::{grid_sweep, lower_bound, AuxiliaryModel, BscFamily, GilbertElliottFamily};
use qstate_ir::channels::{build_quantum_gilbert_elliott, ChannelModel, InputLaw, TransferOperatorSet};
use qstate_ir::operator::pauli_x;
use qstate_ir::rate::entropy_rate_estimates;
use qstate_ir::trajectory::sample_trajectory;

fn main() -> qstate_ir::Result<()> {
    let t = TransferOperatorSet::compile(&build_quantum_gilbert_elliott(0.05, 0.6, &pauli_x(), 0.3)?)?;
    let model = ChannelModel::Quantum(t.clone());
    let q = InputLaw::uniform(2);
    let n = 20_000;
    let seeds = [1, 2, 3];

    let traj = sample_trajectory(&model, &q, n, seeds[0])?;
    let ir = entropy_rate_estimates(&model, &q, &traj)?.ir;
    let matched = lower_bound(&traj, &AuxiliaryModel::quantum(t)?, &q)?;
    println!("estimate {ir:.4}; matched quantum auxiliary {:.4}", matched.ir_lower);

    let bsc_grid: Vec<Vec<f64>> = (1..=9).map(|i| vec![0.05 * i as f64]).collect();
    let bsc = grid_sweep(&model, &q, &BscFamily, &bsc_grid, n, &seeds)?;
    println!("best BSC auxiliary eps = {:.2}: {:.4}", bsc.best_point().params[0], bsc.best_point().mean_ir_lower);

    let mut ge_grid = Vec::new();
    for p_b in [0.3, 0.6, 0.9] {
        for switch in [0.02, 0.1, 0.3] {
            ge_grid.push(vec![0.05, p_b, switch, switch]);
        }
    }
    let ge = grid_sweep(&model, &q, &GilbertElliottFamily, &ge_grid, n, &seeds)?;
    for p in &ge.table {
        println!("GE {:?}: mean bound {:.4}", p.params, p.mean_ir_lower);
    }
    let best = ge.best_point();
    println!("best GE auxiliary {:?}: {:.4}", best.params, best.mean_ir_lower);
    Ok(())
}
