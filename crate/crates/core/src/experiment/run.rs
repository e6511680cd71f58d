use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::config::{EstimatorKind, ExperimentConfig};
use super::svg::render_svg;
use crate::bounds::{lower_bound_with, AuxiliaryModel};
use crate::channels::{ChannelModel, InputLaw};
use crate::error::{Error, Result};
use crate::oracle::{brute_force_oracle, ExactTable};
use crate::rate::{entropy_rate_estimates_with, sequence_log_probability, EstimateOptions};
use crate::trajectory::{rng_for_seed, sample_trajectory, Trajectory};

pub const CSV_HEADER: &str = "sweep_param,sweep_value,estimator_id,seed,n,ir_bits,hx_bits,hy_bits,hxy_bits,wallclock_seconds";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowValues {
    pub ir: f64,
    pub hx: f64,
    pub hy: f64,
    pub hxy: f64,
}

/// One (sweep value, estimator, seed) result.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub sweep_param: String,
    pub sweep_value: Option<f64>,
    pub estimator_id: String,
    pub seed: u64,
    pub n: usize,
    /// Error category and message for failed rows.
    pub values: std::result::Result<RowValues, (String, String)>,
    pub wallclock_seconds: f64,
    order: (usize, usize, usize),
}

impl ResultRow {
    pub fn is_ok(&self) -> bool {
        self.values.is_ok()
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Replaces the configured estimator list.
    pub estimators: Option<Vec<EstimatorKind>>,
    /// Worker threads; all cores when absent.
    pub threads: Option<usize>,
    pub write_svg: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub csv: String,
    pub csv_path: PathBuf,
    pub svg_path: Option<PathBuf>,
}

struct PreparedPoint {
    value: Option<f64>,
    model: ChannelModel,
    auxes: Vec<(String, AuxiliaryModel)>,
}

fn prepare(cfg: &ExperimentConfig) -> Result<Vec<PreparedPoint>> {
    cfg.sweep_points()?
        .into_iter()
        .map(|pt| {
            let model = pt.channel.build("channel")?;
            let auxes = cfg
                .auxiliaries_at(pt.value)?
                .into_iter()
                .enumerate()
                .map(|(i, (id, spec))| Ok((id, AuxiliaryModel::from_model(&spec.build(&format!("auxiliary[{i}]"))?)?)))
                .collect::<Result<_>>()?;
            Ok(PreparedPoint { value: pt.value, model, auxes })
        })
        .collect()
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::Config { path: "threads".into(), msg: e.to_string() })?;
    Ok(pool.install(f))
}

fn err_cell(e: &Error) -> (String, String) {
    (e.category().to_string(), e.to_string())
}

/// Rows for one (point, seed): every estimator on one shared trajectory.
fn run_unit(
    cfg: &ExperimentConfig,
    q: &InputLaw,
    estimators: &[EstimatorKind],
    pt: &PreparedPoint,
    order: (usize, usize),
    seed: u64,
    over_budget: bool,
) -> Vec<ResultRow> {
    let timing = cfg.output.timing;
    let opts = EstimateOptions { burn_in: cfg.burn_in, keep_log_scales: false };
    let mut ids = Vec::new();
    for e in estimators {
        match e {
            EstimatorKind::Ir => ids.push((None, "ir".to_string())),
            EstimatorKind::AuxLower => {
                ids.extend(pt.auxes.iter().enumerate().map(|(i, (id, _))| (Some(i), format!("aux_lower:{id}"))))
            }
        }
    }
    let row = |k: usize, id: &str, values, secs: f64| ResultRow {
        sweep_param: cfg.sweep_parameter().to_string(),
        sweep_value: pt.value,
        estimator_id: id.to_string(),
        seed,
        n: cfg.n,
        values,
        wallclock_seconds: if timing { secs } else { 0.0 },
        order: (order.0, k, order.1),
    };
    if over_budget {
        let e = ("runtime".to_string(), "point wall-clock budget exhausted".to_string());
        return ids.iter().enumerate().map(|(k, (_, id))| row(k, id, Err(e.clone()), 0.0)).collect();
    }
    let start = Instant::now();
    let traj = sample_trajectory(&pt.model, q, cfg.n, seed);
    let sample_secs = start.elapsed().as_secs_f64();
    ids.iter()
        .enumerate()
        .map(|(k, (aux, id))| {
            let t0 = Instant::now();
            let values = match &traj {
                Err(e) => Err(err_cell(e)),
                Ok(traj) => match aux {
                    None => entropy_rate_estimates_with(&pt.model, q, traj, opts)
                        .map(|r| RowValues { ir: r.ir, hx: r.hx, hy: r.hy, hxy: r.hxy }),
                    Some(i) => lower_bound_with(traj, &pt.auxes[*i].1, q, cfg.burn_in)
                        .map(|b| RowValues { ir: b.ir_lower, hx: b.hx, hy: b.aux_hy, hxy: b.aux_hxy }),
                }
                .map_err(|e| err_cell(&e)),
            };
            row(k, id, values, sample_secs + t0.elapsed().as_secs_f64())
        })
        .collect()
}

/// Computes all rows, sorted by sweep position, estimator and seed position.
pub fn collect_rows(cfg: &ExperimentConfig, estimators: &[EstimatorKind], threads: Option<usize>) -> Result<Vec<ResultRow>> {
    let q = cfg.input_law()?;
    let points = prepare(cfg)?;
    let budget = cfg.output.point_budget_seconds.filter(|_| cfg.output.timing);
    let mut rows: Vec<ResultRow> = in_pool(threads, || {
        if let Some(limit) = budget {
            // Seeds run in order within a point so the budget has a meaning.
            points
                .par_iter()
                .enumerate()
                .flat_map_iter(|(pi, pt)| {
                    let start = Instant::now();
                    cfg.seeds
                        .iter()
                        .enumerate()
                        .flat_map(|(si, &seed)| {
                            let over = start.elapsed().as_secs_f64() > limit;
                            run_unit(cfg, &q, estimators, pt, (pi, si), seed, over)
                        })
                        .collect::<Vec<_>>()
                })
                .collect()
        } else {
            let units: Vec<(usize, usize)> =
                (0..points.len()).flat_map(|p| (0..cfg.seeds.len()).map(move |s| (p, s))).collect();
            units
                .par_iter()
                .flat_map_iter(|&(pi, si)| run_unit(cfg, &q, estimators, &points[pi], (pi, si), cfg.seeds[si], false))
                .collect()
        }
    })?;
    rows.sort_by_key(|r| r.order);
    Ok(rows)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// CSV text; a trailing `status` column appears only when some row failed.
pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let with_status = rows.iter().any(|r| !r.is_ok());
    let mut s = String::from(CSV_HEADER);
    if with_status {
        s.push_str(",status");
    }
    s.push('\n');
    for r in rows {
        write!(s, "{},{},{},{},{},", r.sweep_param, fmt_opt(r.sweep_value), r.estimator_id, r.seed, r.n).unwrap();
        match &r.values {
            Ok(v) => write!(s, "{},{},{},{},{}", v.ir, v.hx, v.hy, v.hxy, r.wallclock_seconds).unwrap(),
            Err(_) => write!(s, ",,,,{}", r.wallclock_seconds).unwrap(),
        }
        if with_status {
            match &r.values {
                Ok(_) => s.push_str(",ok"),
                Err((cat, _)) => write!(s, ",error:{cat}").unwrap(),
            }
        }
        s.push('\n');
    }
    s
}

/// Runs the experiment and writes the CSV (and SVG when asked) under
/// `cfg.output.dir`.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutput> {
    let estimators = opts.estimators.clone().unwrap_or_else(|| cfg.estimators.clone());
    if estimators.contains(&EstimatorKind::AuxLower) && cfg.auxiliary.is_empty() {
        return Err(Error::Config { path: "auxiliary".into(), msg: "no auxiliary models configured".into() });
    }
    let rows = collect_rows(cfg, &estimators, opts.threads)?;
    let csv = rows_to_csv(&rows);
    let dir = Path::new(&cfg.output.dir);
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(&cfg.output.csv);
    std::fs::write(&csv_path, &csv)?;
    let svg_path = match (&cfg.output.svg, opts.write_svg) {
        (Some(name), true) => {
            let path = dir.join(name);
            std::fs::write(&path, render_svg(&rows, cfg.sweep_parameter()))?;
            Some(path)
        }
        _ => None,
    };
    Ok(RunOutput { rows, csv, csv_path, svg_path })
}

/// The trajectory used at the first sweep point for the first seed.
pub fn sample_first(cfg: &ExperimentConfig) -> Result<Trajectory> {
    let pt = prepare(cfg)?.into_iter().next().expect("config has a sweep point");
    sample_trajectory(&pt.model, &cfg.input_law()?, cfg.n, cfg.seeds[0])
}

/// Lower bounds of every configured auxiliary (at the first sweep point) on
/// an externally supplied trajectory.
pub fn bound_trajectory(cfg: &ExperimentConfig, traj: &Trajectory) -> Result<Vec<(String, crate::bounds::LowerBoundEstimate)>> {
    let pt = prepare(cfg)?.into_iter().next().expect("config has a sweep point");
    if pt.auxes.is_empty() {
        return Err(Error::Config { path: "auxiliary".into(), msg: "no auxiliary models configured".into() });
    }
    let q = cfg.input_law()?;
    pt.auxes.iter().map(|(id, aux)| Ok((id.clone(), lower_bound_with(traj, aux, &q, cfg.burn_in)?))).collect()
}

/// Exact-versus-recursion comparison at one sweep point.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub sweep_value: Option<f64>,
    pub n: usize,
    pub total_probability: f64,
    pub min_joint: f64,
    pub sequences_checked: usize,
    pub max_log_py_error: f64,
    pub max_log_pxy_error: f64,
}

impl OracleReport {
    pub fn passes(&self, tol: f64) -> bool {
        (self.total_probability - 1.0).abs() <= 1e-10
            && self.min_joint >= -1e-12
            && self.max_log_py_error <= tol
            && self.max_log_pxy_error <= tol
    }
}

/// Compares recursion log-likelihoods with the exact table on `samples`
/// random sequence pairs (drawn with `seed`) at every sweep point.
pub fn oracle_check(cfg: &ExperimentConfig, n: usize, samples: usize, seed: u64) -> Result<Vec<OracleReport>> {
    let q = cfg.input_law()?;
    prepare(cfg)?
        .iter()
        .map(|pt| {
            let table = brute_force_oracle(&pt.model, &q, n)?;
            Ok(compare_with_table(&pt.model, &q, &table, pt.value, samples, seed))
        })
        .collect()
}

pub(crate) fn compare_with_table(
    model: &ChannelModel,
    q: &InputLaw,
    table: &ExactTable,
    value: Option<f64>,
    samples: usize,
    seed: u64,
) -> OracleReport {
    let n = table.n();
    let mut rng = rng_for_seed(seed);
    let mut max_py = 0.0f64;
    let mut max_pxy = 0.0f64;
    let mut checked = 0;
    while checked < samples {
        let x: Vec<usize> = (0..n).map(|_| rng.random_range(0..model.inputs())).collect();
        let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..model.outputs())).collect();
        let exact_xy = table.joint(&x, &y);
        if exact_xy <= 0.0 {
            // Zero-probability pairs cannot be scored by a normalised recursion.
            if table.marginal(&y) <= 0.0 {
                continue;
            }
        } else {
            match sequence_log_probability(model, q, Some(&x), &y) {
                Ok(lp) => max_pxy = max_pxy.max((lp - exact_xy.ln()).abs()),
                Err(_) => max_pxy = f64::INFINITY,
            }
        }
        match sequence_log_probability(model, q, None, &y) {
            Ok(lp) => max_py = max_py.max((lp - table.marginal(&y).ln()).abs()),
            Err(_) => max_py = f64::INFINITY,
        }
        checked += 1;
    }
    OracleReport {
        sweep_value: value,
        n,
        total_probability: table.total(),
        min_joint: table.min_joint(),
        sequences_checked: checked,
        max_log_py_error: max_py,
        max_log_pxy_error: max_pxy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(extra: &str) -> ExperimentConfig {
        let text = format!(
            r#"
n = 2000
seeds = [3, 1]
estimators = ["ir", "aux_lower"]
[channel]
kind = "quantum_ge"
p_g = 0.05
p_b = 0.95
alpha = 1.0
[sweep]
parameter = "p_b"
values = [0.95, 0.05]
[[auxiliary]]
id = "bsc10"
kind = "bsc"
p = 0.1
{extra}"#
        );
        ExperimentConfig::from_toml(&text).unwrap()
    }

    #[test]
    fn rows_are_sorted_and_consistent() {
        let rows = collect_rows(&cfg(""), &[EstimatorKind::Ir, EstimatorKind::AuxLower], Some(2)).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2);
        let keys: Vec<_> = rows.iter().map(|r| (r.sweep_value.unwrap(), r.estimator_id.clone(), r.seed)).collect();
        assert_eq!(keys[0], (0.95, "ir".to_string(), 3));
        assert_eq!(keys[1], (0.95, "ir".to_string(), 1));
        assert_eq!(keys[2], (0.95, "aux_lower:bsc10".to_string(), 3));
        assert_eq!(keys[4].0, 0.05);
        for r in &rows {
            let v = r.values.clone().unwrap();
            assert_eq!(v.ir, v.hx + v.hy - v.hxy);
            assert_eq!(r.wallclock_seconds, 0.0);
        }
    }

    #[test]
    fn csv_shape() {
        let rows = collect_rows(&cfg(""), &[EstimatorKind::Ir], Some(1)).unwrap();
        let csv = rows_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 10);
        assert_eq!(&first[..5], &["p_b", "0.95", "ir", "3", "2000"]);
    }

    #[test]
    fn failed_rows_add_status_column() {
        let text = r#"
n = 50
seeds = [1]
estimators = ["aux_lower"]
[channel]
kind = "bsc"
p = 0.2
[[auxiliary]]
id = "noiseless"
kind = "custom_kraus"
state_dim = 1
transmit_dim = 2
encodings = [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]], [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]]
kraus = [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]
measurements = [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]], [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]]
"#;
        let c = ExperimentConfig::from_toml(text).unwrap();
        let rows = collect_rows(&c, &[EstimatorKind::AuxLower], Some(1)).unwrap();
        let csv = rows_to_csv(&rows);
        assert!(csv.starts_with(&format!("{CSV_HEADER},status\n")));
        assert!(csv.lines().nth(1).unwrap().ends_with(",error:runtime"));
    }

    #[test]
    fn oracle_check_agrees() {
        let reports = oracle_check(&cfg(""), 4, 20, 7).unwrap();
        assert_eq!(reports.len(), 2);
        for r in reports {
            assert!(r.passes(1e-9), "{r:?}");
        }
    }
}
