//! Command-line front end for configuration-driven runs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qstate_ir::experiment::{
    bound_trajectory, oracle_check, run_experiment, sample_first, EstimatorKind, ExperimentConfig, RunOptions,
};
use qstate_ir::trajectory::Trajectory;
use qstate_ir::{Error, Result};

#[derive(Parser)]
#[command(name = "qsir", version, about = "Information rates of channels with classical or quantum memory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    config: PathBuf,
    /// Comma-separated seeds replacing the configured list.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Trajectory length replacing the configured one.
    #[arg(long)]
    n: Option<usize>,
    /// Output directory replacing the configured one.
    #[arg(long)]
    out_dir: Option<String>,
    /// Skip the SVG plot.
    #[arg(long)]
    no_svg: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the config and validate every model it references.
    Validate(Common),
    /// Run the configured estimators over the sweep.
    Estimate(Common),
    /// Run the auxiliary lower bounds, or score an external trajectory.
    Bound {
        #[command(flatten)]
        common: Common,
        /// Trajectory file to score instead of sampling.
        #[arg(long)]
        traj: Option<PathBuf>,
    },
    /// Sample one trajectory (first sweep point, first seed).
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compare recursions with exact enumeration at small n.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Number of random sequence pairs checked per sweep point.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

fn load(c: &Common, default_n: Option<usize>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_file(&c.config)?;
    if let Some(seeds) = &c.seeds {
        if seeds.is_empty() {
            return Err(Error::Config { path: "--seeds".into(), msg: "empty seed list".into() });
        }
        cfg.seeds = seeds.clone();
    }
    if let Some(n) = c.n.or(default_n) {
        if n == 0 || cfg.burn_in >= n {
            return Err(Error::Config { path: "--n".into(), msg: format!("n = {n} must exceed burn_in") });
        }
        cfg.n = n;
    }
    if let Some(dir) = &c.out_dir {
        cfg.output.dir = dir.clone();
    }
    Ok(cfg)
}

fn options(c: &Common, estimators: Option<Vec<EstimatorKind>>) -> RunOptions {
    RunOptions { estimators, threads: c.threads, write_svg: !c.no_svg }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate(c) => {
            let cfg = load(&c, None)?;
            let points = cfg.sweep_points()?;
            println!("ok: {} sweep point(s), {} seed(s), n = {}", points.len(), cfg.seeds.len(), cfg.n);
        }
        Command::Estimate(c) => {
            let cfg = load(&c, None)?;
            let out = run_experiment(&cfg, &options(&c, None))?;
            println!("wrote {} rows to {}", out.rows.len(), out.csv_path.display());
            if let Some(p) = out.svg_path {
                println!("wrote {}", p.display());
            }
        }
        Command::Bound { common, traj } => {
            let cfg = load(&common, None)?;
            match traj {
                Some(path) => {
                    let t = Trajectory::read_file(&path)?;
                    println!("aux_id,n,ir_lower_bits,hx_bits,aux_hy_bits,aux_hxy_bits,floored");
                    for (id, b) in bound_trajectory(&cfg, &t)? {
                        println!("{id},{},{},{},{},{},{}", b.n, b.ir_lower, b.hx, b.aux_hy, b.aux_hxy, b.floored);
                    }
                }
                None => {
                    let out = run_experiment(&cfg, &options(&common, Some(vec![EstimatorKind::AuxLower])))?;
                    println!("wrote {} rows to {}", out.rows.len(), out.csv_path.display());
                }
            }
        }
        Command::Sample { common, output } => {
            let cfg = load(&common, None)?;
            let t = sample_first(&cfg)?;
            t.write_file(&output)?;
            println!("wrote {} symbols to {}", t.len(), output.display());
        }
        Command::Oracle { common, samples } => {
            let cfg = load(&common, Some(6))?;
            let mut all_pass = true;
            println!("sweep_value,n,total,min_joint,max_log_py_error,max_log_pxy_error,pass");
            for r in oracle_check(&cfg, cfg.n, samples, cfg.seeds[0])? {
                let pass = r.passes(1e-9);
                all_pass &= pass;
                let v = r.sweep_value.map(|v| v.to_string()).unwrap_or_default();
                println!(
                    "{v},{},{},{:e},{:e},{:e},{pass}",
                    r.n, r.total_probability, r.min_joint, r.max_log_py_error, r.max_log_pxy_error
                );
            }
            if !all_pass {
                return Err(Error::NumericalCorruption { step: 0, detail: "oracle disagreement".into() });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.category());
            ExitCode::from(match e.category() {
                "validation" => 2,
                "runtime" => 3,
                _ => 4,
            })
        }
    }
}
