//! Exact small-n reference computations.
//!
//! [`brute_force_oracle`] tabulates `p(x, y)` for every pair of length-`n`
//! sequences by unnormalised contraction straight from the kernel or the
//! transfer-operator entries. [`path_sum`] goes further and sums the global
//! function over every pair of state paths, which is only feasible for a
//! handful of symbols but uses nothing except the definition.

use num_complex::Complex64;

use crate::channels::{ChannelModel, ClassicalFsmc, InputLaw, TransferOperatorSet};
use crate::error::{Error, Result};

/// Work budget (innermost terms) for exact enumeration.
pub const TERM_BUDGET: u128 = 100_000_000;

/// All joint and output-marginal probabilities of length-`n` sequences.
///
/// Sequences are indexed in base `|X|` (resp. `|Y|`) with the first symbol
/// most significant.
#[derive(Debug, Clone)]
pub struct ExactTable {
    n: usize,
    inputs: usize,
    outputs: usize,
    joint: Vec<f64>,
    marginal_y: Vec<f64>,
    max_imaginary: f64,
}

impl ExactTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn input_count(&self) -> usize {
        self.inputs.pow(self.n as u32)
    }

    pub fn output_count(&self) -> usize {
        self.outputs.pow(self.n as u32)
    }

    pub fn sequence_index(symbols: &[usize], base: usize) -> usize {
        symbols.iter().fold(0, |acc, &s| acc * base + s)
    }

    pub fn sequence_from_index(mut index: usize, base: usize, n: usize) -> Vec<usize> {
        let mut out = vec![0; n];
        for slot in out.iter_mut().rev() {
            *slot = index % base;
            index /= base;
        }
        out
    }

    /// `p(x, y)`.
    pub fn joint(&self, x: &[usize], y: &[usize]) -> f64 {
        let xi = Self::sequence_index(x, self.inputs);
        let yi = Self::sequence_index(y, self.outputs);
        self.joint[xi * self.output_count() + yi]
    }

    /// `p(y)`.
    pub fn marginal(&self, y: &[usize]) -> f64 {
        self.marginal_y[Self::sequence_index(y, self.outputs)]
    }

    /// Flat joint table, row `x`, column `y`.
    pub fn joint_entries(&self) -> &[f64] {
        &self.joint
    }

    pub fn total(&self) -> f64 {
        self.joint.iter().sum()
    }

    pub fn min_joint(&self) -> f64 {
        self.joint.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest imaginary part dropped from a joint probability.
    pub fn max_imaginary(&self) -> f64 {
        self.max_imaginary
    }
}

fn check_budget(terms: u128) -> Result<()> {
    if terms > TERM_BUDGET {
        return Err(Error::BudgetExceeded { terms, budget: TERM_BUDGET });
    }
    Ok(())
}

fn pow_u128(base: usize, exp: usize) -> u128 {
    (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX)
}

/// Exact `p(x, y)` and `p(y)` for all length-`n` sequences.
pub fn brute_force_oracle(model: &ChannelModel, q: &InputLaw, n: usize) -> Result<ExactTable> {
    if n == 0 {
        return Err(Error::DimensionMismatch("oracle needs n >= 1".into()));
    }
    if q.len() != model.inputs() {
        return Err(Error::DimensionMismatch(format!(
            "input law over {} symbols for a channel with {} inputs",
            q.len(),
            model.inputs()
        )));
    }
    let (nx, ny, d) = (model.inputs(), model.outputs(), model.state_dim());
    let terms = pow_u128(nx, n)
        .saturating_mul(pow_u128(ny, n))
        .saturating_mul(pow_u128(d, 4));
    check_budget(terms)?;

    let xs = nx.pow(n as u32);
    let ys = ny.pow(n as u32);
    let mut joint = vec![0.0; xs * ys];
    let mut max_imaginary = 0.0f64;
    match model {
        ChannelModel::Classical(f) => classical_table(f, q, n, &mut joint),
        ChannelModel::Quantum(t) => quantum_table(t, q, n, &mut joint, &mut max_imaginary),
    }
    let mut marginal_y = vec![0.0; ys];
    for row in joint.chunks_exact(ys) {
        for (m, v) in marginal_y.iter_mut().zip(row) {
            *m += v;
        }
    }
    Ok(ExactTable { n, inputs: nx, outputs: ny, joint, marginal_y, max_imaginary })
}

/// Depth-first contraction over `(x_l, y_l)` with one unnormalised message
/// per depth. `extend` maps a parent message to a child for one symbol pair
/// and `close` reduces a full-length message to a probability.
fn enumerate<M: Clone>(
    n: usize,
    nx: usize,
    ny: usize,
    root: M,
    extend: &dyn Fn(&M, usize, usize, &mut M),
    close: &mut dyn FnMut(usize, usize, &M),
) {
    let mut stack: Vec<M> = vec![root; n + 1];
    let mut xi = vec![0usize; n];
    let mut yi = vec![0usize; n];
    fn rec<M: Clone>(
        depth: usize,
        n: usize,
        nx: usize,
        ny: usize,
        stack: &mut [M],
        xi: &mut [usize],
        yi: &mut [usize],
        xacc: usize,
        yacc: usize,
        extend: &dyn Fn(&M, usize, usize, &mut M),
        close: &mut dyn FnMut(usize, usize, &M),
    ) {
        if depth == n {
            close(xacc, yacc, &stack[n]);
            return;
        }
        for x in 0..nx {
            for y in 0..ny {
                let (lo, hi) = stack.split_at_mut(depth + 1);
                extend(&lo[depth], x, y, &mut hi[0]);
                xi[depth] = x;
                yi[depth] = y;
                rec(depth + 1, n, nx, ny, stack, xi, yi, xacc * nx + x, yacc * ny + y, extend, close);
            }
        }
    }
    rec(0, n, nx, ny, &mut stack, &mut xi, &mut yi, 0, 0, extend, close);
}

fn classical_table(f: &ClassicalFsmc, q: &InputLaw, n: usize, joint: &mut [f64]) {
    let (nx, ny, ns) = (f.inputs(), f.outputs(), f.states());
    let ys = ny.pow(n as u32);
    let extend = |parent: &Vec<f64>, x: usize, y: usize, child: &mut Vec<f64>| {
        for (sn, c) in child.iter_mut().enumerate() {
            *c = (0..ns).map(|s| parent[s] * q.prob(x) * f.kernel(s, x, sn, y)).sum();
        }
    };
    let mut close = |xa: usize, ya: usize, m: &Vec<f64>| joint[xa * ys + ya] = m.iter().sum();
    enumerate(n, nx, ny, f.initial().to_vec(), &extend, &mut close);
}

fn quantum_table(t: &TransferOperatorSet, q: &InputLaw, n: usize, joint: &mut [f64], max_imag: &mut f64) {
    let (nx, ny, d) = (t.inputs(), t.outputs(), t.state_dim());
    let ys = ny.pow(n as u32);
    // Message m(s, s') indexed s * d + s'; each step contracts the previous
    // pair against the row/column labels of W.
    let extend = |parent: &Vec<Complex64>, x: usize, y: usize, child: &mut Vec<Complex64>| {
        let w = t.operator(x, y);
        let px = q.prob(x);
        for sn in 0..d {
            for spn in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for s in 0..d {
                    for sp in 0..d {
                        acc += parent[s * d + sp] * w[(s * d + sn, sp * d + spn)];
                    }
                }
                child[sn * d + spn] = acc * px;
            }
        }
    };
    let root = t.initial_state().entries().to_vec();
    let mut close = |xa: usize, ya: usize, m: &Vec<Complex64>| {
        let v: Complex64 = (0..d).map(|s| m[s * d + s]).sum();
        *max_imag = max_imag.max(v.im.abs());
        joint[xa * ys + ya] = v.re;
    };
    enumerate(n, nx, ny, root, &extend, &mut close);
}

/// Global-function sum for one sequence pair by explicit enumeration of all
/// state paths `s_0..s_n` and `s'_0..s'_n` with `s_n = s'_n`.
///
/// Returns the complex value (whose imaginary part should vanish) and the
/// largest Hermitian-symmetry defect `|g(s, s') - conj g(s', s)|` over paths.
pub fn path_sum(t: &TransferOperatorSet, q: &InputLaw, x: &[usize], y: &[usize]) -> Result<(Complex64, f64)> {
    let n = x.len();
    if n == 0 || y.len() != n {
        return Err(Error::DimensionMismatch("path sum needs equal nonzero lengths".into()));
    }
    let d = t.state_dim();
    check_budget(pow_u128(d, 2 * (n + 1)))?;
    let paths = d.pow((n + 1) as u32);
    let decode = |mut idx: usize| -> Vec<usize> {
        let mut s = vec![0; n + 1];
        for slot in s.iter_mut().rev() {
            *slot = idx % d;
            idx /= d;
        }
        s
    };
    let all: Vec<Vec<usize>> = (0..paths).map(decode).collect();
    let rho = t.initial_state();
    let px: f64 = x.iter().map(|&v| q.prob(v)).product();
    let g = |s: &[usize], sp: &[usize]| -> Complex64 {
        let mut v = rho[(s[0], sp[0])];
        for l in 0..n {
            v *= t.operator(x[l], y[l])[(s[l] * d + s[l + 1], sp[l] * d + sp[l + 1])];
        }
        v * px
    };
    let mut total = Complex64::new(0.0, 0.0);
    let mut defect = 0.0f64;
    for s in &all {
        for sp in &all {
            let v = g(s, sp);
            defect = defect.max((v - g(sp, s).conj()).norm());
            if s[n] == sp[n] {
                total += v;
            }
        }
    }
    Ok((total, defect))
}
