use crate::error::{Error, Result};

use super::validate::{validate_dmc, validate_fsmc};
use super::{check_pmf, check_probability, Validate};
use crate::operator::Tolerance;

/// Discrete memoryless channel, `w[x][y] = W(y|x)` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dmc {
    inputs: usize,
    outputs: usize,
    w: Vec<f64>,
}

impl Dmc {
    pub fn new(inputs: usize, outputs: usize, w: Vec<f64>) -> Result<Self> {
        let dmc = Self::from_parts_unchecked(inputs, outputs, w)?;
        validate_dmc(&dmc, &Tolerance::default()).into_result()?;
        Ok(dmc)
    }

    /// Only checks shapes; see [`Validate`] for the probability conditions.
    pub fn from_parts_unchecked(inputs: usize, outputs: usize, w: Vec<f64>) -> Result<Self> {
        if inputs == 0 || outputs == 0 || w.len() != inputs * outputs {
            return Err(Error::DimensionMismatch(format!(
                "DMC law needs {inputs}x{outputs} entries, got {}",
                w.len()
            )));
        }
        Ok(Dmc { inputs, outputs, w })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    /// `W(y|x)`.
    pub fn law(&self, x: usize, y: usize) -> f64 {
        self.w[x * self.outputs + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.w[x * self.outputs..(x + 1) * self.outputs]
    }
}

/// Binary symmetric channel with crossover probability `p`.
pub fn build_bsc(p: f64) -> Result<Dmc> {
    check_probability(p, "crossover probability")?;
    Dmc::new(2, 2, vec![1.0 - p, p, p, 1.0 - p])
}

/// Finite-state-machine channel with kernel `W(t, y | s, x)` and initial
/// state pmf.
///
/// The kernel is stored flat with index order `[s][x][t][y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalFsmc {
    states: usize,
    inputs: usize,
    outputs: usize,
    kernel: Vec<f64>,
    initial: Vec<f64>,
}

impl ClassicalFsmc {
    pub fn new(states: usize, inputs: usize, outputs: usize, kernel: Vec<f64>, initial: Vec<f64>) -> Result<Self> {
        let f = Self::from_parts_unchecked(states, inputs, outputs, kernel, initial)?;
        validate_fsmc(&f, &Tolerance::default()).into_result()?;
        Ok(f)
    }

    /// Only checks shapes; see [`Validate`] for the probability conditions.
    pub fn from_parts_unchecked(
        states: usize,
        inputs: usize,
        outputs: usize,
        kernel: Vec<f64>,
        initial: Vec<f64>,
    ) -> Result<Self> {
        if states == 0 || inputs == 0 || outputs == 0 {
            return Err(Error::DimensionMismatch("FSMC alphabets must be nonempty".into()));
        }
        if kernel.len() != states * inputs * states * outputs {
            return Err(Error::DimensionMismatch(format!(
                "FSMC kernel needs {} entries, got {}",
                states * inputs * states * outputs,
                kernel.len()
            )));
        }
        if initial.len() != states {
            return Err(Error::DimensionMismatch(format!(
                "initial pmf needs {states} entries, got {}",
                initial.len()
            )));
        }
        Ok(ClassicalFsmc { states, inputs, outputs, kernel, initial })
    }

    /// A memoryless channel as a single-state FSMC.
    pub fn from_dmc(dmc: &Dmc) -> Self {
        ClassicalFsmc {
            states: 1,
            inputs: dmc.inputs,
            outputs: dmc.outputs,
            kernel: dmc.w.clone(),
            initial: vec![1.0],
        }
    }

    pub fn with_initial(mut self, initial: Vec<f64>) -> Result<Self> {
        if initial.len() != self.states {
            return Err(Error::DimensionMismatch("initial pmf length".into()));
        }
        check_pmf(&initial, "initial state pmf")?;
        self.initial = initial;
        Ok(self)
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// `W(next, y | prev, x)`.
    #[inline]
    pub fn kernel(&self, prev: usize, x: usize, next: usize, y: usize) -> f64 {
        self.kernel[((prev * self.inputs + x) * self.states + next) * self.outputs + y]
    }

    /// The `(next, y)` block for a fixed `(prev, x)`, index `next * outputs + y`.
    pub fn kernel_block(&self, prev: usize, x: usize) -> &[f64] {
        let len = self.states * self.outputs;
        let start = (prev * self.inputs + x) * len;
        &self.kernel[start..start + len]
    }

    pub fn kernel_entries(&self) -> &[f64] {
        &self.kernel
    }

    /// Raises every kernel entry to at least `floor` and renormalizes each
    /// `(prev, x)` block. Returns the new model and whether anything changed.
    pub fn floored(&self, floor: f64) -> (Self, bool) {
        let mut out = self.clone();
        let mut changed = false;
        let len = self.states * self.outputs;
        for block in out.kernel.chunks_mut(len) {
            if block.iter().any(|&v| v < floor) {
                changed = true;
                block.iter_mut().for_each(|v| *v = v.max(floor));
                let s: f64 = block.iter().sum();
                block.iter_mut().for_each(|v| *v /= s);
            }
        }
        (out, changed)
    }
}

/// Gilbert-Elliott channel: a two-state Markov chain (0 = good, 1 = bad),
/// independent of the input, selecting BSC(`p_g`) or BSC(`p_b`).
///
/// `transition[s][t]` is the probability of moving from `s` to `t`. The
/// initial pmf is the stationary distribution when it is unique and uniform
/// otherwise.
pub fn build_gilbert_elliott(p_g: f64, p_b: f64, transition: [[f64; 2]; 2]) -> Result<ClassicalFsmc> {
    check_probability(p_g, "p_g")?;
    check_probability(p_b, "p_b")?;
    for row in &transition {
        check_pmf(row, "transition row")?;
    }
    let crossover = [p_g, p_b];
    let mut kernel = Vec::with_capacity(16);
    for s in 0..2 {
        for x in 0..2 {
            for t in 0..2 {
                for y in 0..2 {
                    let bsc = if x == y { 1.0 - crossover[s] } else { crossover[s] };
                    kernel.push(transition[s][t] * bsc);
                }
            }
        }
    }
    let g2b = transition[0][1];
    let b2g = transition[1][0];
    let initial = if g2b + b2g > 0.0 {
        vec![b2g / (g2b + b2g), g2b / (g2b + b2g)]
    } else {
        vec![0.5, 0.5]
    };
    ClassicalFsmc::new(2, 2, 2, kernel, initial)
}

impl Validate for Dmc {
    fn validate_with(&self, tol: &Tolerance) -> super::ValidationReport {
        validate_dmc(self, tol)
    }
}

impl Validate for ClassicalFsmc {
    fn validate_with(&self, tol: &Tolerance) -> super::ValidationReport {
        validate_fsmc(self, tol)
    }
}
