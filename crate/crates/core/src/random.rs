//! Random valid operators and channel models.
//!
//! Used by property tests and examples. Kraus sets come from slicing an
//! isometry obtained by Gram-Schmidt on a complex Gaussian matrix, so
//! completeness holds by construction.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::{ClassicalFsmc, QuantumMemoryChannel};
use crate::operator::{ComplexOperator, MAX_DIM};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Operator with i.i.d. complex Gaussian entries.
pub fn random_operator<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexOperator {
    ComplexOperator::from_fn(dim, |_, _| gaussian(rng)).expect("valid dimension")
}

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexOperator {
    random_operator(dim, rng).hermitian_part()
}

/// Random full-rank density operator `G G† / Tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexOperator {
    let g = random_operator(dim, rng);
    let rho = &g * &g.dagger();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}

/// Orthonormal columns: a `rows x cols` isometry, stored column-major as
/// `cols` vectors of length `rows`.
fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Vec<Vec<Complex64>> {
    assert!(cols <= rows);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    while basis.len() < cols {
        let mut v: Vec<Complex64> = (0..rows).map(|_| gaussian(rng)).collect();
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex64 = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        basis.push(v);
    }
    basis
}

/// Haar-like random unitary.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexOperator {
    let cols = random_isometry(dim, dim, rng);
    ComplexOperator::from_fn(dim, |i, j| cols[j][i]).expect("valid dimension")
}

/// `count` square operators of dimension `dim` with `sum_k E_k† E_k = I`.
pub fn random_kraus_set<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Vec<ComplexOperator> {
    assert!(dim * count <= 4096);
    let cols = random_isometry(dim * count, dim, rng);
    (0..count)
        .map(|k| ComplexOperator::from_fn(dim, |i, j| cols[j][k * dim + i]).expect("valid dimension"))
        .collect()
}

/// A random quantum memory channel with binary input and output.
///
/// Encodings are random density operators, Kraus operators random
/// completions on the joint space, measurements a random two-outcome
/// instrument, and the inter-use unitary Haar-like.
pub fn random_quantum_channel<R: Rng + ?Sized>(
    state_dim: usize,
    transmit_dim: usize,
    kraus_count: usize,
    rng: &mut R,
) -> QuantumMemoryChannel {
    assert!(state_dim * transmit_dim <= MAX_DIM);
    let encodings = (0..2).map(|_| random_density(transmit_dim, rng)).collect();
    let kraus = random_kraus_set(state_dim * transmit_dim, kraus_count, rng);
    let measurements = random_kraus_set(transmit_dim, 2, rng);
    let unitary = random_unitary(state_dim, rng);
    let initial = random_density(state_dim, rng);
    QuantumMemoryChannel::new(state_dim, transmit_dim, encodings, kraus, measurements, Some(unitary), initial)
        .expect("random channel is valid by construction")
}

/// A random classical FSMC with strictly positive kernel.
pub fn random_fsmc<R: Rng + ?Sized>(states: usize, inputs: usize, outputs: usize, rng: &mut R) -> ClassicalFsmc {
    let mut kernel = vec![0.0; states * inputs * states * outputs];
    for block in kernel.chunks_mut(states * outputs) {
        for v in block.iter_mut() {
            *v = rng.random::<f64>() + 0.01;
        }
        let s: f64 = block.iter().sum();
        block.iter_mut().for_each(|v| *v /= s);
    }
    let mut initial: Vec<f64> = (0..states).map(|_| rng.random::<f64>() + 0.01).collect();
    let s: f64 = initial.iter().sum();
    initial.iter_mut().for_each(|v| *v /= s);
    ClassicalFsmc::new(states, inputs, outputs, kernel, initial).expect("random FSMC is valid by construction")
}
