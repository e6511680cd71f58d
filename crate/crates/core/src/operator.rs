//! Dense complex operators for small Hilbert spaces.
//!
//! Everything here is sized for dimensions up to [`MAX_DIM`]: density
//! operators, Kraus operators, measurement operators, unitaries and the
//! transfer operators compiled from them. Storage is row-major.
//!
//! Joint spaces are built with [`kron`], whose first argument carries the
//! slow (most significant) index. Channel models in this crate place the
//! state system first, so a joint index is `state * transmit_dim + transmit`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported operator dimension.
pub const MAX_DIM: usize = 64;

/// Numerical tolerances for operator predicates.
///
/// `eps_hermitian` and `eps_psd` are relative to the largest entry magnitude
/// of the operator under test; `eps_trace` and `eps_unitary` are absolute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eps_hermitian: f64,
    pub eps_psd: f64,
    pub eps_trace: f64,
    pub eps_unitary: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps_hermitian: 1e-10,
            eps_psd: 1e-9,
            eps_trace: 1e-10,
            eps_unitary: 1e-9,
        }
    }
}

/// A dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexOperator {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexOperator({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexOperator {
    /// Builds an operator from row-major entries.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionMismatch(format!(
                "operator dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexOperator { dim, data })
    }

    /// Builds a real operator from rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch("rows must be square".into()));
            }
            data.extend(row.iter().map(|&v| Complex64::new(v, 0.0)));
        }
        Self::new(dim, data)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self::new(dim, data)
    }

    pub(crate) fn from_raw(dim: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        ComplexOperator { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_raw(dim, vec![Complex64::new(0.0, 0.0); dim * dim])
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal operator with real entries.
    pub fn diag_real(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        Self::from_fn(dim, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn diag(values: &[Complex64]) -> Result<Self> {
        let dim = values.len();
        Self::from_fn(dim, |i, j| if i == j { values[i] } else { Complex64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_raw(self.dim, self.data.iter().map(|z| z * factor).collect())
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &ComplexOperator) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise magnitude of `A - A†`.
    pub fn hermitian_residue(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: &Tolerance) -> bool {
        self.hermitian_residue() <= tol.eps_hermitian * self.max_abs()
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        Self::from_raw(
            n,
            (0..n * n)
                .map(|idx| {
                    let (i, j) = (idx / n, idx % n);
                    (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5
                })
                .collect(),
        )
    }

    /// Largest entrywise magnitude of `U†U - I`.
    pub fn unitarity_residue(&self) -> f64 {
        (&self.dagger() * self).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: &Tolerance) -> bool {
        self.unitarity_residue() <= tol.eps_unitary
    }
}

impl std::ops::Index<(usize, usize)> for ComplexOperator {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexOperator {
    type Output = ComplexOperator;

    fn mul(self, rhs: &ComplexOperator) -> ComplexOperator {
        assert_eq!(self.dim, rhs.dim, "operator product: dimension mismatch");
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        ComplexOperator::from_raw(n, out)
    }
}

impl Add for &ComplexOperator {
    type Output = ComplexOperator;

    fn add(self, rhs: &ComplexOperator) -> ComplexOperator {
        assert_eq!(self.dim, rhs.dim, "operator sum: dimension mismatch");
        ComplexOperator::from_raw(
            self.dim,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        )
    }
}

impl Sub for &ComplexOperator {
    type Output = ComplexOperator;

    fn sub(self, rhs: &ComplexOperator) -> ComplexOperator {
        assert_eq!(self.dim, rhs.dim, "operator difference: dimension mismatch");
        ComplexOperator::from_raw(
            self.dim,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        )
    }
}

/// Kronecker product; the row index of `a` is the slow index.
///
/// Panics if the product exceeds [`MAX_DIM`].
pub fn kron(a: &ComplexOperator, b: &ComplexOperator) -> ComplexOperator {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    assert!(n <= MAX_DIM, "kron: dimension {n} exceeds {MAX_DIM}");
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for ia in 0..da {
        for ja in 0..da {
            let x = a.data[ia * da + ja];
            for ib in 0..db {
                for jb in 0..db {
                    out[(ia * db + ib) * n + ja * db + jb] = x * b.data[ib * db + jb];
                }
            }
        }
    }
    ComplexOperator::from_raw(n, out)
}

/// Which tensor factor survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Partial trace over one factor of a `d1 * d2` dimensional operator.
pub fn partial_trace(
    a: &ComplexOperator,
    (d1, d2): (usize, usize),
    keep: Keep,
) -> Result<ComplexOperator> {
    if d1 == 0 || d2 == 0 || d1 * d2 != a.dim {
        return Err(Error::DimensionMismatch(format!(
            "partial trace over {d1}x{d2} of a {}-dimensional operator",
            a.dim
        )));
    }
    let n = a.dim;
    let out = match keep {
        Keep::First => ComplexOperator::from_fn(d1, |i, j| {
            (0..d2).map(|k| a.data[(i * d2 + k) * n + j * d2 + k]).sum()
        })?,
        Keep::Second => ComplexOperator::from_fn(d2, |i, j| {
            (0..d1).map(|k| a.data[(k * d2 + i) * n + k * d2 + j]).sum()
        })?,
    };
    Ok(out)
}

/// Eigen-decomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `values`.
    pub vectors: ComplexOperator,
}

/// Cyclic Jacobi diagonalisation of a Hermitian operator.
pub fn hermitian_eigen(a: &ComplexOperator, tol: &Tolerance) -> Result<HermitianEigen> {
    let residue = a.hermitian_residue();
    if residue > tol.eps_hermitian * a.max_abs() {
        return Err(Error::NotHermitian { residue });
    }
    let n = a.dim;
    let mut m = a.hermitian_part().data;
    let mut v = ComplexOperator::identity(n).data;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] restricted to (p, q).
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = Complex64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;

                // m <- m G
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = mkp * g_pp + mkq * g_qp;
                    m[k * n + q] = mkp * g_pq + mkq * g_qq;
                }
                // m <- G^H m
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = g_pp.conj() * mpk + g_qp.conj() * mqk;
                    m[q * n + k] = g_pq.conj() * mpk + g_qq.conj() * mqk;
                }
                m[p * n + q] = Complex64::new(0.0, 0.0);
                m[q * n + p] = Complex64::new(0.0, 0.0);
                // v <- v G
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * g_pp + vkq * g_qp;
                    v[k * n + q] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.total_cmp(&m[j * n + j].re));
    let values = order.iter().map(|&i| m[i * n + i].re).collect();
    let vectors = ComplexOperator::from_fn(n, |r, c| v[r * n + order[c]])?;
    Ok(HermitianEigen { values, vectors })
}

/// Ascending real eigenvalues of a Hermitian operator.
pub fn hermitian_eigenvalues(a: &ComplexOperator, tol: &Tolerance) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(a, tol)?.values)
}

/// `exp(-i * alpha * h)` for Hermitian `h`, via its spectral decomposition.
pub fn expm_skew_hermitian(h: &ComplexOperator, alpha: f64, tol: &Tolerance) -> Result<ComplexOperator> {
    let eig = hermitian_eigen(h, tol)?;
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&lambda| Complex64::from_polar(1.0, -alpha * lambda))
        .collect();
    let d = ComplexOperator::diag(&phases)?;
    Ok(&(&eig.vectors * &d) * &eig.vectors.dagger())
}

/// Why an operator failed the p.s.d. test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsdWitness {
    /// Largest entry of `A - A†`.
    Asymmetry(f64),
    /// The offending (most negative) eigenvalue.
    NegativeEigenvalue(f64),
}

/// Outcome of [`is_psd`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub psd: bool,
    pub min_eigenvalue: Option<f64>,
    pub witness: Option<PsdWitness>,
}

/// Positive semi-definiteness within tolerance.
pub fn is_psd(a: &ComplexOperator, tol: &Tolerance) -> PsdCheck {
    let scale = a.max_abs();
    let residue = a.hermitian_residue();
    if residue > tol.eps_hermitian * scale {
        return PsdCheck {
            psd: false,
            min_eigenvalue: None,
            witness: Some(PsdWitness::Asymmetry(residue)),
        };
    }
    let relaxed = Tolerance { eps_hermitian: f64::INFINITY, ..*tol };
    let min = hermitian_eigenvalues(&a.hermitian_part(), &relaxed)
        .expect("Hermitian part is Hermitian")
        .first()
        .copied()
        .unwrap_or(0.0);
    let psd = min >= -tol.eps_psd * scale;
    PsdCheck {
        psd,
        min_eigenvalue: Some(min),
        witness: (!psd).then_some(PsdWitness::NegativeEigenvalue(min)),
    }
}

/// `sum_k A_k† A_k`.
pub fn completeness_sum(ops: &[ComplexOperator]) -> Option<ComplexOperator> {
    let first = ops.first()?;
    let mut acc = ComplexOperator::zeros(first.dim());
    for op in ops {
        acc = &acc + &(&op.dagger() * op);
    }
    Some(acc)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_x() -> ComplexOperator {
    ComplexOperator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
}

pub fn pauli_y() -> ComplexOperator {
    ComplexOperator::new(2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap()
}

pub fn pauli_z() -> ComplexOperator {
    ComplexOperator::diag_real(&[1.0, -1.0]).unwrap()
}
