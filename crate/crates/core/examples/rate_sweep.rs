//! Configuration-driven sweep: rates (and optional bounds) over one channel
//! parameter, written as CSV and SVG.
//!
//! Usage: `cargo run --release --example rate_sweep [config.toml]`
//! (defaults to `examples/configs/pb_sweep.toml`).

use qstate_ir::experiment::{run_experiment, ExperimentConfig, RunOptions};

fn main() -> qstate_ir::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/pb_sweep.toml").to_string());
    let cfg = ExperimentConfig::from_file(&path)?;
    let out = run_experiment(&cfg, &RunOptions { write_svg: true, ..Default::default() })?;
    for r in &out.rows {
        let point = match r.sweep_value {
            Some(v) => format!("{}={v}", r.sweep_param),
            None => "-".to_string(),
        };
        match &r.values {
            Ok(v) => println!("{point:<10} {:<20} seed {:<3} I = {:.4}", r.estimator_id, r.seed, v.ir),
            Err((cat, msg)) => println!("{point:<10} {:<20} seed {:<3} {cat}: {msg}", r.estimator_id, r.seed),
        }
    }
    println!("csv: {}", out.csv_path.display());
    if let Some(svg) = out.svg_path {
        println!("svg: {}", svg.display());
    }
    Ok(())
}
