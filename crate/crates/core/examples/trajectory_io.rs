//! Writing a trajectory to the text format, reading it back and scoring it
//! with an auxiliary model, as one would with samples from a physical
//! channel.

use qstate_ir::bounds::{lower_bound, GilbertElliottFamily, AuxFamily};
use qstate_ir::channels::{build_quantum_gilbert_elliott, ChannelModel, InputLaw, TransferOperatorSet};
use qstate_ir::operator::pauli_x;
use qstate_ir::trajectory::{sample_trajectory, Trajectory};

fn main() -> qstate_ir::Result<()> {
    let t = TransferOperatorSet::compile(&build_quantum_gilbert_elliott(0.05, 0.3, &pauli_x(), 0.5)?)?;
    let q = InputLaw::uniform(2);
    let traj = sample_trajectory(&ChannelModel::Quantum(t), &q, 5_000, 42)?;

    let path = std::env::temp_dir().join("qsir_example_trajectory.txt");
    traj.write_file(&path)?;
    let text = std::fs::read_to_string(&path)?;
    println!("{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));

    let loaded = Trajectory::read_file(&path)?;
    assert_eq!(loaded, traj);
    for params in [[0.05, 0.3, 0.1, 0.1], [0.05, 0.3, 0.02, 0.02], [0.15, 0.15, 0.5, 0.5]] {
        let b = lower_bound(&loaded, &GilbertElliottFamily.build(&params)?, &q)?;
        println!("GE auxiliary {params:?}: {:.4} bits/use over {} uses", b.ir_lower, b.n);
    }
    Ok(())
}
