//! Exact and simulated information rates of a binary symmetric channel.

use qstate_ir::channels::{build_bsc, ChannelModel, InputLaw};
use qstate_ir::rate::{dmc_information_rate, entropy_rate_estimates, h2};
use qstate_ir::trajectory::sample_trajectory;

fn main() -> qstate_ir::Result<()> {
    let q = InputLaw::uniform(2);
    println!("{:>6} {:>10} {:>10} {:>10}", "p", "exact", "1-h2(p)", "estimate");
    for p in [0.0, 0.05, 0.11, 0.3, 0.5] {
        let w = build_bsc(p)?;
        let exact = dmc_information_rate(&q, &w)?;
        let model = ChannelModel::from(w);
        let traj = sample_trajectory(&model, &q, 100_000, 1)?;
        let est = entropy_rate_estimates(&model, &q, &traj)?;
        println!("{p:>6} {exact:>10.6} {:>10.6} {:>10.6}", 1.0 - h2(p), est.ir);
    }
    Ok(())
}
