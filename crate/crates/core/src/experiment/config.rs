//! TOML experiment description.
//!
//! ```toml
//! n = 100000
//! seeds = [1, 2, 3]
//! estimators = ["ir", "aux_lower"]
//!
//! [channel]
//! kind = "quantum_ge"
//! p_g = 0.05
//! p_b = 0.5
//! alpha = 1.0
//!
//! [sweep]
//! parameter = "p_b"
//! values = [0.0, 0.25, 0.5, 0.75, 1.0]
//!
//! [[auxiliary]]
//! id = "bsc"
//! kind = "bsc"
//! p = 0.1
//! ```
//!
//! Matrices are row-major lists of rows, each entry an `[re, im]` pair.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::channels::{
    build_bsc, build_gilbert_elliott, build_quantum_gilbert_elliott, default_hamiltonian, validate, ChannelModel,
    ClassicalFsmc, InputLaw, QuantumMemoryChannel, TransferOperatorSet,
};
use crate::error::{Error, Result};
use crate::operator::{expm_skew_hermitian, ComplexOperator, Tolerance};

pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Bsc,
    GilbertElliott,
    QuantumGe,
    #[serde(rename = "quantum_ge_2qubit")]
    QuantumGe2qubit,
    CustomKraus,
    CustomFsmc,
}

impl ChannelKind {
    /// Scalar parameters this kind reads (and that a sweep may vary).
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            ChannelKind::Bsc => &["p"],
            ChannelKind::GilbertElliott => &["p_g", "p_b", "g2b", "b2g"],
            ChannelKind::QuantumGe | ChannelKind::QuantumGe2qubit => &["p_g", "p_b", "alpha"],
            ChannelKind::CustomKraus => &["alpha"],
            ChannelKind::CustomFsmc => &[],
        }
    }

    fn required(self) -> &'static [&'static str] {
        match self {
            ChannelKind::CustomKraus => &[],
            other => other.parameters(),
        }
    }
}

/// A channel (or auxiliary model) description.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub p: Option<f64>,
    pub p_g: Option<f64>,
    pub p_b: Option<f64>,
    /// Good-to-bad transition probability.
    pub g2b: Option<f64>,
    /// Bad-to-good transition probability.
    pub b2g: Option<f64>,
    pub alpha: Option<f64>,
    pub hamiltonian: Option<MatrixSpec>,
    pub initial_state: Option<MatrixSpec>,
    pub state_dim: Option<usize>,
    pub transmit_dim: Option<usize>,
    pub encodings: Option<Vec<MatrixSpec>>,
    pub kraus: Option<Vec<MatrixSpec>>,
    pub measurements: Option<Vec<MatrixSpec>>,
    pub unitary: Option<MatrixSpec>,
    pub states: Option<usize>,
    pub inputs: Option<usize>,
    pub outputs: Option<usize>,
    /// Rows indexed `prev * inputs + x`, entries `next * outputs + y`.
    pub kernel: Option<Vec<Vec<f64>>>,
    pub initial: Option<Vec<f64>>,
}

/// An auxiliary model for lower bounds.
#[derive(Debug, Clone, Deserialize)]
pub struct AuxiliarySpec {
    pub id: String,
    /// Apply each sweep value to this model as well.
    #[serde(default)]
    pub follow_sweep: bool,
    #[serde(flatten)]
    pub channel: ChannelSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub values: Vec<f64>,
    /// Values skipped entirely, e.g. slow-mixing points.
    #[serde(default)]
    pub exclude: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Ir,
    AuxLower,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "default_csv")]
    pub csv: String,
    #[serde(default = "default_svg")]
    pub svg: Option<String>,
    /// Record wall-clock seconds per row. Off by default so that reruns
    /// produce identical bytes.
    #[serde(default)]
    pub timing: bool,
    /// Per-point wall-clock budget; seeds started after it is spent are
    /// reported as errors. Only honoured with `timing = true`.
    pub point_budget_seconds: Option<f64>,
}

fn default_dir() -> String {
    "out".into()
}

fn default_csv() -> String {
    "results.csv".into()
}

fn default_svg() -> Option<String> {
    Some("results.svg".into())
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: default_dir(), csv: default_csv(), svg: default_svg(), timing: false, point_budget_seconds: None }
    }
}

/// A validated experiment.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub channel: ChannelSpec,
    /// Input pmf; uniform when absent.
    pub input: Option<Vec<f64>>,
    pub n: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorKind>,
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub auxiliary: Vec<AuxiliarySpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

fn default_estimators() -> Vec<EstimatorKind> {
    vec![EstimatorKind::Ir]
}

fn cfg_err(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Config { path: path.into(), msg: msg.into() }
}

fn matrix(spec: &MatrixSpec, path: &str) -> Result<ComplexOperator> {
    let dim = spec.len();
    if dim == 0 || spec.iter().any(|r| r.len() != dim) {
        return Err(cfg_err(path, "matrix must be square and non-empty"));
    }
    let data = spec.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
    ComplexOperator::new(dim, data).map_err(|e| cfg_err(path, e.to_string()))
}

fn matrices(spec: &Option<Vec<MatrixSpec>>, path: &str) -> Result<Vec<ComplexOperator>> {
    let list = spec.as_ref().ok_or_else(|| cfg_err(path, "missing"))?;
    list.iter().enumerate().map(|(i, m)| matrix(m, &format!("{path}[{i}]"))).collect()
}

impl ChannelSpec {
    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "p" => self.p,
            "p_g" => self.p_g,
            "p_b" => self.p_b,
            "g2b" => self.g2b,
            "b2g" => self.b2g,
            "alpha" => self.alpha,
            _ => None,
        }
    }

    /// Sets a scalar parameter known to this kind.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !self.kind.parameters().contains(&name) {
            return Err(cfg_err("sweep.parameter", format!("{:?} has no parameter {name:?}", self.kind)));
        }
        let slot = match name {
            "p" => &mut self.p,
            "p_g" => &mut self.p_g,
            "p_b" => &mut self.p_b,
            "g2b" => &mut self.g2b,
            "b2g" => &mut self.b2g,
            "alpha" => &mut self.alpha,
            _ => unreachable!(),
        };
        *slot = Some(value);
        Ok(())
    }

    fn scalar(&self, name: &str, prefix: &str) -> Result<f64> {
        self.get(name).ok_or_else(|| cfg_err(format!("{prefix}.{name}"), "missing"))
    }

    /// Builds and validates the model. `prefix` names the table in errors.
    pub fn build(&self, prefix: &str) -> Result<ChannelModel> {
        for name in self.kind.required() {
            self.scalar(name, prefix)?;
        }
        let at = |field: &str| format!("{prefix}.{field}");
        let wrap = |field: &'static str| move |e: Error| cfg_err(at(field), e.to_string());
        let model = match self.kind {
            ChannelKind::Bsc => ChannelModel::from(build_bsc(self.scalar("p", prefix)?).map_err(wrap("p"))?),
            ChannelKind::GilbertElliott => {
                let g2b = self.scalar("g2b", prefix)?;
                let b2g = self.scalar("b2g", prefix)?;
                let f = build_gilbert_elliott(
                    self.scalar("p_g", prefix)?,
                    self.scalar("p_b", prefix)?,
                    [[1.0 - g2b, g2b], [b2g, 1.0 - b2g]],
                )
                .map_err(wrap("kind"))?;
                ChannelModel::Classical(f)
            }
            ChannelKind::QuantumGe | ChannelKind::QuantumGe2qubit => {
                let dim = if self.kind == ChannelKind::QuantumGe { 2 } else { 4 };
                let h = match &self.hamiltonian {
                    Some(m) => matrix(m, &at("hamiltonian"))?,
                    None => default_hamiltonian(dim)?,
                };
                if h.dim() != dim {
                    return Err(cfg_err(at("hamiltonian"), format!("expected {dim}x{dim}")));
                }
                let mut ch = build_quantum_gilbert_elliott(
                    self.scalar("p_g", prefix)?,
                    self.scalar("p_b", prefix)?,
                    &h,
                    self.scalar("alpha", prefix)?,
                )
                .map_err(wrap("kind"))?;
                if let Some(rho) = &self.initial_state {
                    ch = ch.with_initial_state(matrix(rho, &at("initial_state"))?).map_err(wrap("initial_state"))?;
                }
                ChannelModel::Quantum(TransferOperatorSet::compile(&ch).map_err(wrap("kind"))?)
            }
            ChannelKind::CustomKraus => self.build_custom_kraus(prefix)?,
            ChannelKind::CustomFsmc => self.build_custom_fsmc(prefix)?,
        };
        let report = validate(&model);
        if !report.is_valid() {
            return Err(cfg_err(prefix, report.to_string()));
        }
        Ok(model)
    }

    fn build_custom_kraus(&self, prefix: &str) -> Result<ChannelModel> {
        let at = |field: &str| format!("{prefix}.{field}");
        let state_dim = self.state_dim.ok_or_else(|| cfg_err(at("state_dim"), "missing"))?;
        let transmit_dim = self.transmit_dim.ok_or_else(|| cfg_err(at("transmit_dim"), "missing"))?;
        let encodings = matrices(&self.encodings, &at("encodings"))?;
        let kraus = matrices(&self.kraus, &at("kraus"))?;
        let measurements = matrices(&self.measurements, &at("measurements"))?;
        let unitary = match (&self.unitary, &self.hamiltonian) {
            (Some(_), Some(_)) => return Err(cfg_err(at("unitary"), "give either unitary or hamiltonian")),
            (Some(u), None) => Some(matrix(u, &at("unitary"))?),
            (None, Some(h)) => {
                let alpha = self.alpha.ok_or_else(|| cfg_err(at("alpha"), "required with hamiltonian"))?;
                let h = matrix(h, &at("hamiltonian"))?;
                Some(expm_skew_hermitian(&h, alpha, &Tolerance::default()).map_err(|e| cfg_err(at("hamiltonian"), e.to_string()))?)
            }
            (None, None) => None,
        };
        let initial = match &self.initial_state {
            Some(m) => matrix(m, &at("initial_state"))?,
            None => ComplexOperator::identity(state_dim).scale_real(1.0 / state_dim as f64),
        };
        let ch = QuantumMemoryChannel::from_parts_unchecked(
            state_dim,
            transmit_dim,
            encodings,
            kraus,
            measurements,
            unitary,
            initial,
        )
        .map_err(|e| cfg_err(at("kraus"), e.to_string()))?;
        let report = validate(&ch);
        if !report.is_valid() {
            return Err(cfg_err(prefix, report.to_string()));
        }
        Ok(ChannelModel::Quantum(TransferOperatorSet::compile(&ch)?))
    }

    fn build_custom_fsmc(&self, prefix: &str) -> Result<ChannelModel> {
        let at = |field: &str| format!("{prefix}.{field}");
        let states = self.states.ok_or_else(|| cfg_err(at("states"), "missing"))?;
        let inputs = self.inputs.ok_or_else(|| cfg_err(at("inputs"), "missing"))?;
        let outputs = self.outputs.ok_or_else(|| cfg_err(at("outputs"), "missing"))?;
        let rows = self.kernel.as_ref().ok_or_else(|| cfg_err(at("kernel"), "missing"))?;
        if rows.len() != states * inputs || rows.iter().any(|r| r.len() != states * outputs) {
            return Err(cfg_err(
                at("kernel"),
                format!("expected {} rows of {} entries", states * inputs, states * outputs),
            ));
        }
        let initial = self.initial.clone().unwrap_or_else(|| vec![1.0 / states as f64; states]);
        let f = ClassicalFsmc::from_parts_unchecked(states, inputs, outputs, rows.concat(), initial)
            .map_err(|e| cfg_err(at("kernel"), e.to_string()))?;
        let report = validate(&f);
        if !report.is_valid() {
            return Err(cfg_err(prefix, report.to_string()));
        }
        Ok(ChannelModel::Classical(f))
    }
}

/// One sweep point: the value and its channel spec.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: Option<f64>,
    pub channel: ChannelSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let path = e.span().map(|s| format!("bytes {}..{}", s.start, s.end)).unwrap_or_else(|| "<root>".into());
            cfg_err(path, e.message().to_string())
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// The input pmf.
    pub fn input_law(&self) -> Result<InputLaw> {
        match &self.input {
            Some(p) => InputLaw::new(p.clone()).map_err(|e| cfg_err("input", e.to_string())),
            None => Ok(InputLaw::uniform(self.channel.build("channel")?.inputs())),
        }
    }

    pub fn sweep_parameter(&self) -> &str {
        self.sweep.as_ref().map(|s| s.parameter.as_str()).unwrap_or("none")
    }

    /// Sweep points in configuration order, minus exclusions.
    pub fn sweep_points(&self) -> Result<Vec<SweepPoint>> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![SweepPoint { value: None, channel: self.channel.clone() }]);
        };
        let mut out = Vec::new();
        for &v in &sweep.values {
            if sweep.exclude.contains(&v) {
                continue;
            }
            let mut ch = self.channel.clone();
            ch.set(&sweep.parameter, v)?;
            out.push(SweepPoint { value: Some(v), channel: ch });
        }
        Ok(out)
    }

    /// Auxiliary specs at a sweep point.
    pub fn auxiliaries_at(&self, value: Option<f64>) -> Result<Vec<(String, ChannelSpec)>> {
        self.auxiliary
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let mut ch = a.channel.clone();
                if let (true, Some(v), Some(s)) = (a.follow_sweep, value, &self.sweep) {
                    ch.set(&s.parameter, v).map_err(|_| {
                        cfg_err(format!("auxiliary[{i}].follow_sweep"), format!("no parameter {:?}", s.parameter))
                    })?;
                }
                Ok((a.id.clone(), ch))
            })
            .collect()
    }

    /// Structural checks and a build of every model the run will use.
    fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(cfg_err("n", "must be at least 1"));
        }
        if self.burn_in >= self.n {
            return Err(cfg_err("burn_in", "must be smaller than n"));
        }
        if self.seeds.is_empty() {
            return Err(cfg_err("seeds", "at least one seed required"));
        }
        if self.estimators.is_empty() {
            return Err(cfg_err("estimators", "at least one estimator required"));
        }
        if self.estimators.contains(&EstimatorKind::AuxLower) && self.auxiliary.is_empty() {
            return Err(cfg_err("auxiliary", "aux_lower estimator needs at least one auxiliary"));
        }
        let mut ids = BTreeMap::new();
        for (i, a) in self.auxiliary.iter().enumerate() {
            if a.id.is_empty() || a.id.contains([',', '"', '\n']) {
                return Err(cfg_err(format!("auxiliary[{i}].id"), "must be non-empty without commas or quotes"));
            }
            if ids.insert(a.id.clone(), i).is_some() {
                return Err(cfg_err(format!("auxiliary[{i}].id"), format!("duplicate id {:?}", a.id)));
            }
        }
        if let Some(s) = &self.sweep {
            if !self.channel.kind.parameters().contains(&s.parameter.as_str()) {
                return Err(cfg_err(
                    "sweep.parameter",
                    format!(
                        "{:?} is not a parameter of {:?} (known: {:?})",
                        s.parameter,
                        self.channel.kind,
                        self.channel.kind.parameters()
                    ),
                ));
            }
            if s.values.is_empty() || s.values.iter().any(|v| !v.is_finite()) {
                return Err(cfg_err("sweep.values", "need at least one finite value"));
            }
        }
        let points = self.sweep_points()?;
        if points.is_empty() {
            return Err(cfg_err("sweep.exclude", "every sweep value is excluded"));
        }
        let q = self.input_law()?;
        for pt in &points {
            let model = pt.channel.build("channel").map_err(|e| match (e, pt.value) {
                (Error::Config { path, msg }, Some(v)) => cfg_err(path, format!("at sweep value {v}: {msg}")),
                (e, _) => e,
            })?;
            if model.inputs() != q.len() {
                return Err(cfg_err("input", format!("{} entries for {} channel inputs", q.len(), model.inputs())));
            }
            for (i, (_, spec)) in self.auxiliaries_at(pt.value)?.iter().enumerate() {
                let aux = spec.build(&format!("auxiliary[{i}]"))?;
                if aux.inputs() != model.inputs() || aux.outputs() != model.outputs() {
                    return Err(cfg_err(format!("auxiliary[{i}]"), "alphabets differ from the channel's"));
                }
            }
        }
        if let Some(b) = self.output.point_budget_seconds {
            if !(b > 0.0) {
                return Err(cfg_err("output.point_budget_seconds", "must be positive"));
            }
        }
        Ok(())
    }
}
