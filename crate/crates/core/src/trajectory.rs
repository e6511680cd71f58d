//! Sampling of channel input/output sequences.
//!
//! Quantum-state channels are simulated by keeping the conditional state of
//! the memory given everything sent and received so far: at each use the
//! output is drawn from its conditional law and the state is updated by the
//! measurement outcome. Kraus indices are never sampled; they are summed out.
//!
//! All randomness comes from a ChaCha8 stream seeded with the trajectory
//! seed, see [`GENERATOR_ID`].

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{ChannelModel, ClassicalFsmc, InputLaw, TransferOperatorSet};
use crate::error::{Error, Result};
use crate::operator::{is_psd, ComplexOperator, Tolerance};

/// Identifies the pseudo-random generator behind every sampled trajectory:
/// `rand_chacha::ChaCha8Rng::seed_from_u64(seed)`, uniform doubles from
/// `rand`'s `StandardUniform` (53-bit mantissa).
pub const GENERATOR_ID: &str = "chacha8-v1";

/// Roundoff allowed before a negative probability is treated as corruption.
pub const NEGATIVE_PROBABILITY_SLACK: f64 = 1e-9;

/// Imaginary residue allowed in a computed probability.
pub const IMAGINARY_SLACK: f64 = 1e-9;

pub fn rng_for_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A sampled pair of input and output sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub seed: u64,
    pub generator_id: String,
}

impl Trajectory {
    pub fn new(x: Vec<usize>, y: Vec<usize>, seed: u64, generator_id: impl Into<String>) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "trajectory needs equal nonzero lengths, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        let generator_id = generator_id.into();
        if generator_id.is_empty() || generator_id.contains(char::is_whitespace) {
            return Err(Error::InvalidModel(format!("invalid generator id {generator_id:?}")));
        }
        Ok(Trajectory { x, y, seed, generator_id })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Checks that all symbols fall inside the given alphabets.
    pub fn check_alphabets(&self, inputs: usize, outputs: usize) -> Result<()> {
        if let Some(i) = self.x.iter().position(|&v| v >= inputs) {
            return Err(Error::DimensionMismatch(format!("input symbol {} at {i} outside alphabet", self.x[i])));
        }
        if let Some(i) = self.y.iter().position(|&v| v >= outputs) {
            return Err(Error::DimensionMismatch(format!("output symbol {} at {i} outside alphabet", self.y[i])));
        }
        Ok(())
    }

    /// Text form: a header `n=<int> seed=<u64> gen=<id>` and one `x y` pair
    /// per line.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.len() * 4 + 64);
        writeln!(s, "n={} seed={} gen={}", self.len(), self.seed, self.generator_id).unwrap();
        for (x, y) in self.x.iter().zip(&self.y) {
            writeln!(s, "{x} {y}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::TrajectoryFormat { line, msg };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
        let mut n = None;
        let mut seed = None;
        let mut generator = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| err(1, format!("header field {field:?} is not key=value")))?;
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|e| err(1, format!("n: {e}")))?),
                "seed" => seed = Some(value.parse::<u64>().map_err(|e| err(1, format!("seed: {e}")))?),
                "gen" => generator = Some(value.to_string()),
                other => return Err(err(1, format!("unknown header field {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| err(1, "header lacks n".into()))?;
        let seed = seed.ok_or_else(|| err(1, "header lacks seed".into()))?;
        let generator = generator.ok_or_else(|| err(1, "header lacks gen".into()))?;

        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let parse = |tok: Option<&str>, what: &str| -> Result<usize> {
                tok.ok_or_else(|| err(lineno, format!("missing {what}")))?
                    .parse::<usize>()
                    .map_err(|e| err(lineno, format!("{what}: {e}")))
            };
            let xv = parse(parts.next(), "x")?;
            let yv = parse(parts.next(), "y")?;
            if parts.next().is_some() {
                return Err(err(lineno, "expected exactly two symbols".into()));
            }
            x.push(xv);
            y.push(yv);
        }
        if x.len() != n {
            return Err(err(1, format!("header says n={n} but body has {} pairs", x.len())));
        }
        Trajectory::new(x, y, seed, generator).map_err(|e| err(1, e.to_string()))
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Inverse-CDF draw over a short weight vector with compensated running sums.
pub(crate) fn sample_index(weights: &[f64], u: f64) -> usize {
    let total: f64 = weights.iter().sum();
    let target = u * total;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
        }
        let yk = w - comp;
        let t = sum + yk;
        comp = (t - sum) - yk;
        sum = t;
        if target < sum && w > 0.0 {
            return i;
        }
    }
    last_positive
}

/// i.i.d. draws from `q`.
pub fn sample_input<R: Rng + ?Sized>(q: &InputLaw, n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| sample_index(q.probs(), rng.random::<f64>())).collect()
}

/// Normalised conditional state of the channel memory.
#[derive(Debug, Clone)]
pub struct PosteriorState {
    sigma: ComplexOperator,
}

impl PosteriorState {
    pub fn new(sigma: ComplexOperator) -> Result<Self> {
        let tol = Tolerance::default();
        let check = is_psd(&sigma, &tol);
        if !check.psd {
            return Err(Error::InvalidModel(format!("posterior state is not p.s.d.: {:?}", check.witness)));
        }
        if (sigma.trace() - 1.0).norm() > 1e-9 {
            return Err(Error::InvalidModel(format!("posterior state has trace {}", sigma.trace())));
        }
        Ok(PosteriorState { sigma })
    }

    /// The model's initial state.
    pub fn initial(t: &TransferOperatorSet) -> Self {
        PosteriorState { sigma: t.initial_state().clone() }
    }

    pub fn sigma(&self) -> &ComplexOperator {
        &self.sigma
    }
}

/// Cleans a raw complex-valued output law: rejects corruption, clips
/// roundoff negatives and renormalises.
fn clean_pmf(raw: &[Complex64], step: usize) -> Result<Vec<f64>> {
    let mut p = Vec::with_capacity(raw.len());
    for z in raw {
        if z.im.abs() > IMAGINARY_SLACK {
            return Err(Error::NumericalCorruption {
                step,
                detail: format!("output probability has imaginary part {:.3e}", z.im),
            });
        }
        if z.re < -NEGATIVE_PROBABILITY_SLACK || !z.re.is_finite() {
            return Err(Error::NumericalCorruption { step, detail: format!("output probability {:.3e}", z.re) });
        }
        p.push(z.re.max(0.0));
    }
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        return Err(Error::ImpossibleObservation { step, normalizer: total });
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NumericalCorruption { step, detail: format!("output law sums to {total}") });
    }
    p.iter_mut().for_each(|v| *v /= total);
    Ok(p)
}

/// Vectorised state `s * d + s'`.
fn vectorise(sigma: &ComplexOperator) -> Vec<Complex64> {
    sigma.entries().to_vec()
}

fn closure_trace(v: &[Complex64], d: usize) -> Complex64 {
    (0..d).map(|i| v[i * d + i]).sum()
}

/// Law of the next output given the current posterior state and input `x`.
pub fn conditional_output_distribution(
    t: &TransferOperatorSet,
    state: &PosteriorState,
    x: usize,
) -> Result<Vec<f64>> {
    output_law(t, &vectorise(&state.sigma), x, 0)
}

fn output_law(t: &TransferOperatorSet, sigma: &[Complex64], x: usize, step: usize) -> Result<Vec<f64>> {
    let d = t.state_dim();
    let mut buf = vec![Complex64::new(0.0, 0.0); d * d];
    let raw: Vec<Complex64> = (0..t.outputs())
        .map(|y| {
            buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
            t.apply_accumulate(x, y, 1.0, sigma, &mut buf);
            closure_trace(&buf, d)
        })
        .collect();
    clean_pmf(&raw, step)
}

/// Posterior state after sending `x` and observing `y`.
pub fn posterior_update(t: &TransferOperatorSet, state: &PosteriorState, x: usize, y: usize) -> Result<PosteriorState> {
    let d = t.state_dim();
    let mut next = vec![Complex64::new(0.0, 0.0); d * d];
    t.apply_accumulate(x, y, 1.0, &vectorise(&state.sigma), &mut next);
    let tr = closure_trace(&next, d).re;
    if tr <= 0.0 {
        return Err(Error::ImpossibleObservation { step: 0, normalizer: tr });
    }
    next.iter_mut().for_each(|v| *v /= tr);
    let sigma = ComplexOperator::new(d, next)?.hermitian_part();
    Ok(PosteriorState { sigma })
}

/// Samples `n` channel uses under the i.i.d. input law `q`.
pub fn sample_trajectory(model: &ChannelModel, q: &InputLaw, n: usize, seed: u64) -> Result<Trajectory> {
    if q.len() != model.inputs() {
        return Err(Error::DimensionMismatch(format!(
            "input law over {} symbols for a channel with {} inputs",
            q.len(),
            model.inputs()
        )));
    }
    if n == 0 {
        return Err(Error::DimensionMismatch("trajectory length must be at least 1".into()));
    }
    let mut rng = rng_for_seed(seed);
    let x = sample_input(q, n, &mut rng);
    let y = match model {
        ChannelModel::Classical(f) => sample_classical_outputs(f, &x, &mut rng),
        ChannelModel::Quantum(t) => sample_quantum_outputs(t, &x, &mut rng)?,
    };
    Trajectory::new(x, y, seed, GENERATOR_ID)
}

fn sample_classical_outputs<R: Rng + ?Sized>(f: &ClassicalFsmc, x: &[usize], rng: &mut R) -> Vec<usize> {
    let mut state = sample_index(f.initial(), rng.random::<f64>());
    x.iter()
        .map(|&xv| {
            let joint = sample_index(f.kernel_block(state, xv), rng.random::<f64>());
            state = joint / f.outputs();
            joint % f.outputs()
        })
        .collect()
}

fn sample_quantum_outputs<R: Rng + ?Sized>(t: &TransferOperatorSet, x: &[usize], rng: &mut R) -> Result<Vec<usize>> {
    let d = t.state_dim();
    let mut sigma = vectorise(t.initial_state());
    let mut candidates = vec![vec![Complex64::new(0.0, 0.0); d * d]; t.outputs()];
    let mut raw = vec![Complex64::new(0.0, 0.0); t.outputs()];
    let mut out = Vec::with_capacity(x.len());
    for (step, &xv) in x.iter().enumerate() {
        for (y, cand) in candidates.iter_mut().enumerate() {
            cand.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
            t.apply_accumulate(xv, y, 1.0, &sigma, cand);
            raw[y] = closure_trace(cand, d);
        }
        let p = clean_pmf(&raw, step + 1)?;
        let y = sample_index(&p, rng.random::<f64>());
        let tr = raw[y].re;
        let next = &candidates[y];
        // Renormalise and restore Hermiticity.
        for i in 0..d {
            for j in 0..d {
                sigma[i * d + j] = (next[i * d + j] + next[j * d + i].conj()) * (0.5 / tr);
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{build_bsc, build_quantum_gilbert_elliott, ClassicalFsmc};
    use crate::operator::pauli_x;

    fn qge(p_g: f64, p_b: f64, alpha: f64) -> TransferOperatorSet {
        TransferOperatorSet::compile(&build_quantum_gilbert_elliott(p_g, p_b, &pauli_x(), alpha).unwrap()).unwrap()
    }

    #[test]
    fn deterministic_input_is_constant() {
        let mut rng = rng_for_seed(1);
        let xs = sample_input(&InputLaw::deterministic(2, 0), 1000, &mut rng);
        assert!(xs.iter().all(|&v| v == 0));
    }

    #[test]
    fn uniform_input_frequency() {
        let mut rng = rng_for_seed(20240101);
        let xs = sample_input(&InputLaw::uniform(2), 100_000, &mut rng);
        let zeros = xs.iter().filter(|&&v| v == 0).count() as f64 / 1e5;
        assert!((0.495..=0.505).contains(&zeros), "frequency {zeros}");
    }

    #[test]
    fn seeds_determine_sequences() {
        let a = sample_input(&InputLaw::uniform(3), 500, &mut rng_for_seed(7));
        let b = sample_input(&InputLaw::uniform(3), 500, &mut rng_for_seed(7));
        let c = sample_input(&InputLaw::uniform(3), 500, &mut rng_for_seed(8));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sample_index_skips_zero_weights() {
        assert_eq!(sample_index(&[0.0, 1.0, 0.0], 0.0), 1);
        assert_eq!(sample_index(&[0.0, 1.0, 0.0], 0.999_999), 1);
        assert_eq!(sample_index(&[0.3, 0.7], 0.3 - 1e-12), 0);
        assert_eq!(sample_index(&[0.3, 0.7], 0.3 + 1e-12), 1);
    }

    #[test]
    fn good_state_output_law_is_bsc() {
        let t = qge(0.05, 0.95, 0.0);
        let good = PosteriorState::new(ComplexOperator::diag_real(&[1.0, 0.0]).unwrap()).unwrap();
        let p = conditional_output_distribution(&t, &good, 0).unwrap();
        assert!((p[0] - 0.95).abs() < 1e-14 && (p[1] - 0.05).abs() < 1e-14);
        let bad = PosteriorState::new(ComplexOperator::diag_real(&[0.0, 1.0]).unwrap()).unwrap();
        let p = conditional_output_distribution(&t, &bad, 1).unwrap();
        assert!((p[0] - 0.95).abs() < 1e-14 && (p[1] - 0.05).abs() < 1e-14);
    }

    #[test]
    fn noiseless_channel_outputs_inputs() {
        let t = qge(0.0, 0.0, 1.0);
        let traj = sample_trajectory(&ChannelModel::Quantum(t.clone()), &InputLaw::uniform(2), 2000, 3).unwrap();
        assert_eq!(traj.x, traj.y);
        // The state never changes for a noiseless channel frozen in time.
        let frozen = qge(0.0, 0.0, 0.0);
        let mut st = PosteriorState::initial(&frozen);
        for (&x, &y) in traj.x.iter().zip(&traj.y).take(50) {
            st = posterior_update(&frozen, &st, x, y).unwrap();
            assert!(st.sigma().max_abs_diff(frozen.initial_state()) < 1e-14);
        }
        assert!(posterior_update(&frozen, &st, 0, 1).is_err());
        let p = conditional_output_distribution(&t, &PosteriorState::initial(&t), 1).unwrap();
        assert_eq!(p, vec![0.0, 1.0]);
    }

    #[test]
    fn diagonal_states_stay_diagonal_without_evolution() {
        let t = qge(0.1, 0.7, 0.0);
        let mut st = PosteriorState::new(ComplexOperator::diag_real(&[0.3, 0.7]).unwrap()).unwrap();
        for (x, y) in [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)] {
            st = posterior_update(&t, &st, x, y).unwrap();
            assert!(st.sigma()[(0, 1)].norm() < 1e-15);
            assert!((st.sigma().trace() - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn embedded_bsc_half_flip_rate() {
        let t = TransferOperatorSet::from_classical(&ClassicalFsmc::from_dmc(&build_bsc(0.5).unwrap())).unwrap();
        let traj = sample_trajectory(&ChannelModel::Quantum(t), &InputLaw::uniform(2), 100_000, 99).unwrap();
        let flips = traj.x.iter().zip(&traj.y).filter(|(a, b)| a != b).count() as f64 / 1e5;
        assert!((0.495..=0.505).contains(&flips), "flip rate {flips}");
    }

    #[test]
    fn quantum_ge_equal_crossovers_flip_rate() {
        let p = 0.1;
        let t = qge(p, p, 1.0);
        let n = 100_000usize;
        let traj = sample_trajectory(&ChannelModel::Quantum(t), &InputLaw::uniform(2), n, 5).unwrap();
        let flips = traj.x.iter().zip(&traj.y).filter(|(a, b)| a != b).count() as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((flips - p).abs() <= 3.0 * sigma, "flip rate {flips}");
    }

    #[test]
    fn text_round_trip_and_errors() {
        let t = Trajectory::new(vec![0, 1, 1], vec![1, 1, 0], 42, GENERATOR_ID).unwrap();
        let text = t.to_text();
        assert!(text.starts_with("n=3 seed=42 gen=chacha8-v1\n"));
        assert_eq!(Trajectory::from_text(&text).unwrap(), t);

        let bad_n = "n=4 seed=1 gen=g\n0 1\n1 1\n";
        assert!(matches!(Trajectory::from_text(bad_n), Err(Error::TrajectoryFormat { line: 1, .. })));
        let bad_line = "n=2 seed=1 gen=g\n0 1\n1 x\n";
        assert!(matches!(Trajectory::from_text(bad_line), Err(Error::TrajectoryFormat { line: 3, .. })));
        assert!(Trajectory::from_text("").is_err());
    }

    #[test]
    fn trajectory_invariants() {
        assert!(Trajectory::new(vec![], vec![], 0, "g").is_err());
        assert!(Trajectory::new(vec![0], vec![0, 1], 0, "g").is_err());
        let t = Trajectory::new(vec![0, 2], vec![1, 1], 0, "g").unwrap();
        assert!(t.check_alphabets(2, 2).is_err());
        assert!(t.check_alphabets(3, 2).is_ok());
    }
}
