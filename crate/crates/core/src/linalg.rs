//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here targets joint dimensions of at most ~100, so all storage
//! is dense row-major `Vec<Complex64>` and the eigensolver cost is
//! negligible. Values are immutable after construction and safe to share
//! across threads.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity / eigendecomposition checks.
pub const ATOL_HERM: f64 = 1e-10;
/// State-vector normalization.
pub const ATOL_NORM: f64 = 1e-12;
/// Eigenvalues closer than this form a degenerate cluster; only cluster
/// projectors are meaningful, never individual degenerate eigenvectors.
pub const DEGEN_GAP: f64 = 1e-9;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex vector, the substrate for kets.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![C_ZERO; dim],
        }
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self {
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    /// Computational basis state |index⟩ in `dim` dimensions.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut data = vec![C_ZERO; dim];
        data[index] = C_ONE;
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.data[i]
    }

    pub fn set(&mut self, i: usize, value: Complex64) {
        self.data[i] = value;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scale(Complex64::new(1.0 / n, 0.0))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            data: self.data.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Inner product ⟨self|other⟩ (conjugate-linear in `self`).
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Tensor product |self⟩ ⊗ |other⟩.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Self { data }
    }

    /// Projector |self⟩⟨self|.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.data[i] * self.data[j].conj());
            }
        }
        m
    }
}

/// Dense complex matrix (row-major), the substrate for all operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C_ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, C_ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from rows of real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn add_assign_at(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] += value;
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C_ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        let mut out = ComplexVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = C_ZERO;
            for j in 0..self.cols {
                acc += self.get(i, j) * v.get(j);
            }
            out.set(i, acc);
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Conjugate transpose M†.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest elementwise deviation from M = M†.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows == self.cols && self.hermiticity_defect() <= tol
    }

    /// Expectation value ⟨v|M|v⟩.
    pub fn expectation(&self, v: &ComplexVector) -> Complex64 {
        v.inner(&self.mul_vec(v))
    }

    /// Tr[M ρ] for same-sized square matrices.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut acc = C_ZERO;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += self.get(i, j) * other.get(j, i);
            }
        }
        acc
    }
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a.get(i, j);
            if aij == C_ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out.set(i * br + k, j * bc + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending,
/// eigenvectors orthonormal (stored as columns).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> ComplexVector {
        let n = self.eigenvectors.rows();
        let mut v = ComplexVector::zeros(n);
        for r in 0..n {
            v.set(r, self.eigenvectors.get(r, i));
        }
        v
    }

    /// Σᵢ eᵢ |vᵢ⟩⟨vᵢ|, for checking against the input.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            let v = self.eigenvector(i);
            out = out.add(&v.projector().scale(Complex64::new(self.eigenvalues[i], 0.0)));
        }
        out
    }

    /// Largest eigenvalue strictly below `cutoff` (used for the
    /// second-largest eigenvalue of a strategy via cutoff slightly under 1).
    pub fn max_eigenvalue_below(&self, cutoff: f64) -> Option<f64> {
        self.eigenvalues
            .iter()
            .rev()
            .find(|&&e| e < cutoff)
            .copied()
    }

    /// Index ranges of eigenvalues closer than [`DEGEN_GAP`]. Individual
    /// eigenvectors inside a cluster are basis-dependent; only the cluster
    /// projector is well defined.
    pub fn degenerate_clusters(&self) -> Vec<std::ops::Range<usize>> {
        let mut clusters = Vec::new();
        let mut start = 0;
        for i in 1..=self.eigenvalues.len() {
            if i == self.eigenvalues.len()
                || self.eigenvalues[i] - self.eigenvalues[i - 1] >= DEGEN_GAP
            {
                clusters.push(start..i);
                start = i;
            }
        }
        clusters
    }

    /// Projector onto the span of the eigenvectors in `range`.
    pub fn cluster_projector(&self, range: std::ops::Range<usize>) -> ComplexMatrix {
        let n = self.eigenvectors.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in range {
            out = out.add(&self.eigenvector(i).projector());
        }
        out
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
///
/// The input is symmetrized as (M + M†)/2 before solving so that float
/// noise below the Hermiticity tolerance cannot leak into the spectrum.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_eig needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermiticity_defect();
    if defect > ATOL_HERM {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.rows();
    let na =
        DMatrix::from_fn(n, n, |i, j| (m.get(i, j) + m.get(j, i).conj()) * 0.5);
    let eig = na.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Transpose on one tensor factor of a (d₁·d₂)-dimensional operator.
///
/// `subsystem` 0 transposes the first factor, 1 the second. Applying the
/// same partial transpose twice returns the input exactly.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    dims: (usize, usize),
    subsystem: usize,
) -> Result<ComplexMatrix> {
    let (d1, d2) = dims;
    let n = d1 * d2;
    if rho.rows() != n || rho.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "partial_transpose: operator is {}x{}, dims give {}",
            rho.rows(),
            rho.cols(),
            n
        )));
    }
    if subsystem > 1 {
        return Err(Error::IndexOutOfRange(format!(
            "subsystem index {subsystem}, expected 0 or 1"
        )));
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..d1 {
        for j in 0..d2 {
            for k in 0..d1 {
                for l in 0..d2 {
                    // row index (i, j), column index (k, l)
                    let value = rho.get(i * d2 + j, k * d2 + l);
                    let (r, c) = if subsystem == 0 {
                        (k * d2 + j, i * d2 + l)
                    } else {
                        (i * d2 + l, k * d2 + j)
                    };
                    out.set(r, c, value);
                }
            }
        }
    }
    Ok(out)
}

fn check_density_matrix(rho: &ComplexMatrix) -> Result<()> {
    let defect = rho.hermiticity_defect();
    if defect > ATOL_HERM {
        return Err(Error::InvalidDensityMatrix(format!(
            "not Hermitian (defect {defect:.3e})"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > ATOL_HERM || tr.im.abs() > ATOL_HERM {
        return Err(Error::InvalidDensityMatrix(format!(
            "trace is {tr}, expected 1"
        )));
    }
    Ok(())
}

/// Negativity: absolute sum of the negative eigenvalues of the partial
/// transpose. Zero for separable states, (d−1)/2 for a maximally entangled
/// pair of qudits.
pub fn negativity(rho: &ComplexMatrix, dims: (usize, usize)) -> Result<f64> {
    check_density_matrix(rho)?;
    let pt = partial_transpose(rho, dims, 1)?;
    let eig = hermitian_eig(&pt)?;
    Ok(eig
        .eigenvalues
        .iter()
        .filter(|&&e| e < 0.0)
        .map(|e| -e)
        .sum())
}
