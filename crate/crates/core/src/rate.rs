//! Information-rate estimation.
//!
//! Entropy rates are read off the normalisers of scaled forward recursions:
//! a probability vector over classical states ([`StateMetric`]) or a unit
//! trace operator on the state system ([`StateOperator`]). Each step divides
//! by the total mass `Z` and records `ln λ = -ln Z`, so the accumulated value
//! is `-ln p` of the sequence seen so far. Logs are natural internally and
//! every reported rate is in bits.

use num_complex::Complex64;

use crate::channels::{ChannelModel, ClassicalFsmc, Dmc, InputLaw, TransferOperatorSet};
use crate::error::{Error, Result};
use crate::operator::ComplexOperator;
use crate::trajectory::Trajectory;

/// Largest Hermiticity residue repaired silently in a σ-step.
pub const HERMITIAN_REPAIR_LIMIT: f64 = 1e-9;

/// Binary entropy in bits.
pub fn h2(p: f64) -> f64 {
    let term = |v: f64| if v > 0.0 { -v * v.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Mutual information of a DMC under `q`, in bits per use.
pub fn dmc_information_rate(q: &InputLaw, w: &Dmc) -> Result<f64> {
    if q.len() != w.inputs() {
        return Err(Error::DimensionMismatch(format!(
            "input law over {} symbols for a DMC with {} inputs",
            q.len(),
            w.inputs()
        )));
    }
    let out: Vec<f64> = (0..w.outputs())
        .map(|y| (0..w.inputs()).map(|x| q.prob(x) * w.law(x, y)).sum())
        .collect();
    let mut rate = 0.0;
    for x in 0..w.inputs() {
        for (y, &qy) in out.iter().enumerate() {
            let joint = q.prob(x) * w.law(x, y);
            if joint > 0.0 {
                assert!(qy > 0.0, "positive joint mass with zero output mass");
                rate += joint * (w.law(x, y) / qy).log2();
            }
        }
    }
    Ok(rate)
}

/// Normalised forward metric of a classical FSMC.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMetric {
    mu: Vec<f64>,
    log_scale_accum: f64,
    last_log_scale: f64,
    steps: usize,
}

impl StateMetric {
    pub fn initial(f: &ClassicalFsmc) -> Self {
        StateMetric { mu: f.initial().to_vec(), log_scale_accum: 0.0, last_log_scale: 0.0, steps: 0 }
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// `Σ ln λ` over the steps taken, i.e. `-ln p` of the observations.
    pub fn log_scale_accum(&self) -> f64 {
        self.log_scale_accum
    }

    /// `ln λ` of the most recent step.
    pub fn last_log_scale(&self) -> f64 {
        self.last_log_scale
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// Normalised forward state operator of a quantum-state channel, stored
/// vectorised with index `s * d + s'`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateOperator {
    dim: usize,
    sigma: Vec<Complex64>,
    log_scale_accum: f64,
    last_log_scale: f64,
    steps: usize,
}

impl StateOperator {
    pub fn initial(t: &TransferOperatorSet) -> Self {
        Self::from_operator(t.initial_state())
    }

    /// Starts a recursion from an arbitrary (possibly unnormalised) operator.
    pub fn from_operator(rho: &ComplexOperator) -> Self {
        StateOperator {
            dim: rho.dim(),
            sigma: rho.entries().to_vec(),
            log_scale_accum: 0.0,
            last_log_scale: 0.0,
            steps: 0,
        }
    }

    pub fn sigma(&self) -> ComplexOperator {
        ComplexOperator::new(self.dim, self.sigma.clone()).expect("state operator entries are finite")
    }

    pub fn log_scale_accum(&self) -> f64 {
        self.log_scale_accum
    }

    pub fn last_log_scale(&self) -> f64 {
        self.last_log_scale
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

fn input_weights(q: &InputLaw, x_obs: Option<usize>) -> Vec<(usize, f64)> {
    match x_obs {
        Some(x) => vec![(x, q.prob(x))],
        None => q.probs().iter().copied().enumerate().filter(|&(_, p)| p > 0.0).collect(),
    }
}

/// One step of the classical forward recursion on output `y_obs`, summing
/// over inputs unless `x_obs` is given.
pub fn forward_step_classical(
    f: &ClassicalFsmc,
    q: &InputLaw,
    m: &StateMetric,
    y_obs: usize,
    x_obs: Option<usize>,
) -> Result<StateMetric> {
    let ns = f.states();
    let mut next = vec![0.0; ns];
    for (x, px) in input_weights(q, x_obs) {
        for (s, &mass) in m.mu.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let block = f.kernel_block(s, x);
            let w = mass * px;
            for (sn, acc) in next.iter_mut().enumerate() {
                *acc += w * block[sn * f.outputs() + y_obs];
            }
        }
    }
    let step = m.steps + 1;
    let z: f64 = next.iter().sum();
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::ImpossibleObservation { step, normalizer: z });
    }
    next.iter_mut().for_each(|v| *v /= z);
    let log_lambda = -z.ln();
    Ok(StateMetric { mu: next, log_scale_accum: m.log_scale_accum + log_lambda, last_log_scale: log_lambda, steps: step })
}

/// One step of the quantum forward recursion on output `y_obs`.
pub fn forward_step_quantum(
    t: &TransferOperatorSet,
    q: &InputLaw,
    s: &StateOperator,
    y_obs: usize,
    x_obs: Option<usize>,
) -> Result<StateOperator> {
    let d = t.state_dim();
    if s.dim != d {
        return Err(Error::DimensionMismatch(format!("state operator of dim {} for a {d}-dim model", s.dim)));
    }
    let mut next = vec![Complex64::new(0.0, 0.0); d * d];
    for (x, px) in input_weights(q, x_obs) {
        t.apply_accumulate(x, y_obs, px, &s.sigma, &mut next);
    }
    let step = s.steps + 1;
    let z = (0..d).map(|i| next[i * d + i].re).sum::<f64>();
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::ImpossibleObservation { step, normalizer: z });
    }
    let mut residue = 0.0f64;
    let mut repaired = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            let a = next[i * d + j] / z;
            let b = next[j * d + i].conj() / z;
            residue = residue.max((a - b).norm());
            repaired[i * d + j] = (a + b) * 0.5;
        }
    }
    if residue > HERMITIAN_REPAIR_LIMIT {
        return Err(Error::NumericalCorruption { step, detail: format!("Hermiticity residue {residue:.3e}") });
    }
    let log_lambda = -z.ln();
    Ok(StateOperator {
        dim: d,
        sigma: repaired,
        log_scale_accum: s.log_scale_accum + log_lambda,
        last_log_scale: log_lambda,
        steps: step,
    })
}

/// Per-step `ln λ` of the two recursions behind an estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct LogScales {
    pub y: Vec<f64>,
    pub xy: Vec<f64>,
}

/// Entropy and information-rate estimates from one trajectory, in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    pub n: usize,
    pub burn_in: usize,
    pub hx: f64,
    pub hy: f64,
    pub hxy: f64,
    pub ir: f64,
    pub per_step_log_scales: Option<LogScales>,
}

/// Knobs for [`entropy_rate_estimates_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EstimateOptions {
    /// Leading steps excluded from the averages (the recursions still run
    /// over them).
    pub burn_in: usize,
    pub keep_log_scales: bool,
}

/// Runs the forward recursion over `y`, conditioning on `x` when given,
/// and returns the per-step `ln λ`.
pub fn forward_log_scales(model: &ChannelModel, q: &InputLaw, x: Option<&[usize]>, y: &[usize]) -> Result<Vec<f64>> {
    if q.len() != model.inputs() {
        return Err(Error::DimensionMismatch(format!(
            "input law over {} symbols for a channel with {} inputs",
            q.len(),
            model.inputs()
        )));
    }
    if let Some(x) = x {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch("input and output sequences differ in length".into()));
        }
    }
    if let Some(&bad) = y.iter().find(|&&v| v >= model.outputs()) {
        return Err(Error::DimensionMismatch(format!("output symbol {bad} outside alphabet")));
    }
    if let Some(&bad) = x.into_iter().flatten().find(|&&v| v >= model.inputs()) {
        return Err(Error::DimensionMismatch(format!("input symbol {bad} outside alphabet")));
    }
    let x_at = |l: usize| x.map(|v| v[l]);
    let mut logs = Vec::with_capacity(y.len());
    match model {
        ChannelModel::Classical(f) => {
            let mut m = StateMetric::initial(f);
            for (l, &yv) in y.iter().enumerate() {
                m = forward_step_classical(f, q, &m, yv, x_at(l))?;
                logs.push(m.last_log_scale);
            }
        }
        ChannelModel::Quantum(t) => {
            let mut s = StateOperator::initial(t);
            for (l, &yv) in y.iter().enumerate() {
                s = forward_step_quantum(t, q, &s, yv, x_at(l))?;
                logs.push(s.last_log_scale);
            }
        }
    }
    Ok(logs)
}

/// Natural-log probability of `y` (or of `(x, y)` when `x` is given).
pub fn sequence_log_probability(model: &ChannelModel, q: &InputLaw, x: Option<&[usize]>, y: &[usize]) -> Result<f64> {
    Ok(-forward_log_scales(model, q, x, y)?.iter().sum::<f64>())
}

/// Entropy-rate estimates with no burn-in.
pub fn entropy_rate_estimates(model: &ChannelModel, q: &InputLaw, traj: &Trajectory) -> Result<RateEstimate> {
    entropy_rate_estimates_with(model, q, traj, EstimateOptions::default())
}

/// Closed-form `-(1/m) Σ log₂ p_X(x_l)` over `x`.
pub(crate) fn input_entropy_bits(q: &InputLaw, x: &[usize]) -> Result<f64> {
    let mut acc = 0.0;
    for (l, &xv) in x.iter().enumerate() {
        let p = q.prob(xv);
        if p <= 0.0 {
            return Err(Error::ImpossibleObservation { step: l + 1, normalizer: p });
        }
        acc -= p.log2();
    }
    Ok(acc / x.len() as f64)
}

pub fn entropy_rate_estimates_with(
    model: &ChannelModel,
    q: &InputLaw,
    traj: &Trajectory,
    opts: EstimateOptions,
) -> Result<RateEstimate> {
    traj.check_alphabets(model.inputs(), model.outputs())?;
    let n = traj.len();
    if opts.burn_in >= n {
        return Err(Error::DimensionMismatch(format!("burn-in {} leaves no steps out of {n}", opts.burn_in)));
    }
    let ly = forward_log_scales(model, q, None, &traj.y)?;
    let lxy = forward_log_scales(model, q, Some(&traj.x), &traj.y)?;
    let b = opts.burn_in;
    let kept = (n - b) as f64;
    let hx = input_entropy_bits(q, &traj.x[b..])?;
    let hy = ly[b..].iter().sum::<f64>() / kept / std::f64::consts::LN_2;
    let hxy = lxy[b..].iter().sum::<f64>() / kept / std::f64::consts::LN_2;
    Ok(RateEstimate {
        n,
        burn_in: b,
        hx,
        hy,
        hxy,
        ir: hx + hy - hxy,
        per_step_log_scales: opts.keep_log_scales.then_some(LogScales { y: ly, xy: lxy }),
    })
}
