//! Auxiliary-channel lower bounds.
//!
//! The true channel only supplies the trajectory. Both output and joint
//! likelihoods are then computed under an auxiliary model, classical or
//! quantum, with the same forward recursions used for rate estimation, and
//! combined with the true input entropy.

use rayon::prelude::*;

use crate::channels::{
    build_bsc, build_gilbert_elliott, validate, ChannelModel, ClassicalFsmc, InputLaw, TransferOperatorSet,
};
use crate::error::{Error, Result};
use crate::rate::{forward_log_scales, input_entropy_bits};
use crate::trajectory::{sample_trajectory, Trajectory};

/// Kernel floor applied to classical auxiliaries.
pub const AUX_KERNEL_FLOOR: f64 = 1e-12;

/// A decoding metric: a validated model whose likelihoods replace the true
/// channel's.
#[derive(Debug, Clone)]
pub struct AuxiliaryModel {
    model: ChannelModel,
    floored: bool,
}

impl AuxiliaryModel {
    /// Classical auxiliary; kernel entries below [`AUX_KERNEL_FLOOR`] are
    /// raised and renormalised.
    pub fn classical(f: &ClassicalFsmc) -> Result<Self> {
        validate(f).into_result()?;
        let (f, floored) = f.floored(AUX_KERNEL_FLOOR);
        Ok(AuxiliaryModel { model: ChannelModel::Classical(f), floored })
    }

    /// Quantum auxiliary, used as is.
    pub fn quantum(t: TransferOperatorSet) -> Result<Self> {
        validate(&t).into_result()?;
        Ok(AuxiliaryModel { model: ChannelModel::Quantum(t), floored: false })
    }

    pub fn from_model(model: &ChannelModel) -> Result<Self> {
        match model {
            ChannelModel::Classical(f) => Self::classical(f),
            ChannelModel::Quantum(t) => Self::quantum(t.clone()),
        }
    }

    pub fn model(&self) -> &ChannelModel {
        &self.model
    }

    /// Whether flooring changed the kernel.
    pub fn was_floored(&self) -> bool {
        self.floored
    }
}

/// Mismatched-decoding rate estimate in bits per use.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundEstimate {
    pub ir_lower: f64,
    pub hx: f64,
    pub aux_hy: f64,
    pub aux_hxy: f64,
    pub n: usize,
    pub seed: u64,
    pub floored: bool,
}

fn aux_log_scales(aux: &AuxiliaryModel, q: &InputLaw, x: Option<&[usize]>, y: &[usize]) -> Result<Vec<f64>> {
    forward_log_scales(&aux.model, q, x, y).map_err(|e| match e {
        Error::ImpossibleObservation { step, .. } => Error::ZeroAuxiliaryLikelihood { step },
        other => other,
    })
}

pub fn lower_bound(true_traj: &Trajectory, aux: &AuxiliaryModel, q: &InputLaw) -> Result<LowerBoundEstimate> {
    lower_bound_with(true_traj, aux, q, 0)
}

/// [`lower_bound`] with the first `burn_in` steps left out of the averages.
pub fn lower_bound_with(
    true_traj: &Trajectory,
    aux: &AuxiliaryModel,
    q: &InputLaw,
    burn_in: usize,
) -> Result<LowerBoundEstimate> {
    true_traj.check_alphabets(aux.model.inputs(), aux.model.outputs())?;
    let n = true_traj.len();
    if burn_in >= n {
        return Err(Error::DimensionMismatch(format!("burn-in {burn_in} leaves no steps out of {n}")));
    }
    let ly = aux_log_scales(aux, q, None, &true_traj.y)?;
    let lxy = aux_log_scales(aux, q, Some(&true_traj.x), &true_traj.y)?;
    let kept = (n - burn_in) as f64;
    let hx = input_entropy_bits(q, &true_traj.x[burn_in..])?;
    let aux_hy = ly[burn_in..].iter().sum::<f64>() / kept / std::f64::consts::LN_2;
    let aux_hxy = lxy[burn_in..].iter().sum::<f64>() / kept / std::f64::consts::LN_2;
    Ok(LowerBoundEstimate {
        ir_lower: hx + aux_hy - aux_hxy,
        hx,
        aux_hy,
        aux_hxy,
        n,
        seed: true_traj.seed,
        floored: aux.floored,
    })
}

/// A parameterised set of auxiliary models.
pub trait AuxFamily: Sync {
    fn build(&self, params: &[f64]) -> Result<AuxiliaryModel>;
}

impl<F> AuxFamily for F
where
    F: Fn(&[f64]) -> Result<AuxiliaryModel> + Sync,
{
    fn build(&self, params: &[f64]) -> Result<AuxiliaryModel> {
        self(params)
    }
}

/// `[eps]` ↦ memoryless BSC(eps).
#[derive(Debug, Clone, Copy, Default)]
pub struct BscFamily;

impl AuxFamily for BscFamily {
    fn build(&self, params: &[f64]) -> Result<AuxiliaryModel> {
        let [eps] = params else {
            return Err(Error::InvalidModel(format!("BSC family takes 1 parameter, got {}", params.len())));
        };
        AuxiliaryModel::classical(&ClassicalFsmc::from_dmc(&build_bsc(*eps)?))
    }
}

/// `[p_g, p_b, g2b, b2g]` ↦ two-state Gilbert-Elliott channel.
#[derive(Debug, Clone, Copy, Default)]
pub struct GilbertElliottFamily;

impl AuxFamily for GilbertElliottFamily {
    fn build(&self, params: &[f64]) -> Result<AuxiliaryModel> {
        let [p_g, p_b, g2b, b2g] = params else {
            return Err(Error::InvalidModel(format!("GE family takes 4 parameters, got {}", params.len())));
        };
        let f = build_gilbert_elliott(*p_g, *p_b, [[1.0 - g2b, *g2b], [*b2g, 1.0 - b2g]])?;
        AuxiliaryModel::classical(&f)
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub params: Vec<f64>,
    /// One estimate per seed, in seed order.
    pub estimates: Vec<LowerBoundEstimate>,
    pub mean_ir_lower: f64,
}

#[derive(Debug, Clone)]
pub struct GridSweep {
    /// Points in grid order.
    pub table: Vec<GridPoint>,
    /// Index into `table` of the largest mean bound (first on ties).
    pub best: usize,
}

impl GridSweep {
    pub fn best_point(&self) -> &GridPoint {
        &self.table[self.best]
    }
}

/// Evaluates every grid point on the same true-channel trajectories, one per
/// seed.
pub fn grid_sweep(
    true_model: &ChannelModel,
    q: &InputLaw,
    family: &dyn AuxFamily,
    grid: &[Vec<f64>],
    n: usize,
    seeds: &[u64],
) -> Result<GridSweep> {
    if grid.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidModel("grid sweep needs at least one point and one seed".into()));
    }
    let trajs: Vec<Trajectory> =
        seeds.par_iter().map(|&s| sample_trajectory(true_model, q, n, s)).collect::<Result<_>>()?;
    let table: Vec<GridPoint> = grid
        .par_iter()
        .map(|params| {
            let aux = family.build(params)?;
            let estimates: Vec<LowerBoundEstimate> =
                trajs.iter().map(|t| lower_bound(t, &aux, q)).collect::<Result<_>>()?;
            let mean_ir_lower = estimates.iter().map(|e| e.ir_lower).sum::<f64>() / estimates.len() as f64;
            Ok(GridPoint { params: params.clone(), estimates, mean_ir_lower })
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, p) in table.iter().enumerate() {
        if p.mean_ir_lower > table[best].mean_ir_lower {
            best = i;
        }
    }
    Ok(GridSweep { table, best })
}
