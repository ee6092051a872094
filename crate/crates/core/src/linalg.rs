//! Dense complex Hermitian primitives used by every other module:
//! density-matrix validation, eigensolves, PSD square roots, partial
//! transposition, and the generalized Gell-Mann (Bloch) basis.
//!
//! All matrices are stored in the energy eigenbasis with 0-based indices;
//! physics-style subscripts in the docs (`ϱ_1d` and the like) are 1-based.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Dense complex matrix type used throughout the crate.
pub type CMatrix = DMatrix<C64>;

/// Maximum allowed Hermiticity violation `|m[i][j] − conj(m[j][i])|`.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Maximum allowed unit-trace violation `|Tr ϱ − 1|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues of a nearly-PSD matrix in `[PSD_FLOOR, 0]` are clipped to
/// zero; anything below the floor is a genuine positivity violation.
/// The floor survives double-precision eigensolves at d ≤ 8 while still
/// rejecting states that are negative by construction.
pub const PSD_FLOOR: f64 = -1e-9;
/// Iteration cap for the symmetric QR eigensolver.
pub const EIG_MAX_ITER: usize = 4096;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max |m[i][j] - conj(m[j][i])| = {0:.3e}")]
    NotHermitian(f64),
    #[error("trace differs from one by {0:.3e}")]
    TraceNotOne(f64),
    #[error("matrix is not positive semidefinite: min eigenvalue = {0:.3e}")]
    NotPSD(f64),
    #[error("eigensolver failed to converge within {0} iterations")]
    ConvergenceFailure(usize),
    #[error("subsystem dimensions {d1}x{d2} do not factor the total dimension {dim}")]
    BadFactorization { d1: usize, d2: usize, dim: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("energies must be nondecreasing, but energies[{0}] > energies[{1}]")]
    EnergiesNotSorted(usize, usize),
    #[error("dimension must be at least 1")]
    EmptyDimension,
}

/// A d×d density matrix: Hermitian, unit trace, positive semidefinite,
/// expressed in the energy eigenbasis.
///
/// Construction goes through [`DensityMatrix::validate`], which reports
/// which invariant failed and by how much. Values are immutable after
/// construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validate an arbitrary complex matrix as a density matrix.
    ///
    /// Checks, in order: Hermiticity within [`HERMITICITY_TOL`], unit trace
    /// within [`TRACE_TOL`], and positive semidefiniteness down to
    /// [`PSD_FLOOR`]. The returned error carries the measured violation.
    pub fn validate(mat: CMatrix) -> Result<Self, LinalgError> {
        if mat.nrows() != mat.ncols() {
            return Err(LinalgError::NotSquare(mat.nrows(), mat.ncols()));
        }
        let d = mat.nrows();
        if d == 0 {
            return Err(LinalgError::EmptyDimension);
        }
        let mut herm = 0.0f64;
        for i in 0..d {
            for j in i..d {
                herm = herm.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if herm > HERMITICITY_TOL {
            return Err(LinalgError::NotHermitian(herm));
        }
        let trace_dev = (mat.trace().re - 1.0).abs().max(mat.trace().im.abs());
        if trace_dev > TRACE_TOL {
            return Err(LinalgError::TraceNotOne(trace_dev));
        }
        let (eigs, _) = hermitian_eig(&mat)?;
        let min_eig = eigs[0];
        if min_eig < PSD_FLOOR {
            return Err(LinalgError::NotPSD(min_eig));
        }
        Ok(Self { dim: d, mat })
    }

    /// Wrap a matrix that is PSD/unit-trace/Hermitian by construction.
    /// Skips the eigensolve; used on hot sampling and optimizer paths.
    pub(crate) fn trusted(mat: CMatrix) -> Self {
        let dim = mat.nrows();
        debug_assert_eq!(dim, mat.ncols());
        Self { dim, mat }
    }

    /// Validate a row-major `dim*dim` matrix given as separate real and
    /// imaginary parts (the layout used across the C boundary).
    pub fn from_row_major_parts(dim: usize, re: &[f64], im: &[f64]) -> Result<Self, LinalgError> {
        if re.len() != dim * dim || im.len() != dim * dim {
            return Err(LinalgError::DimensionMismatch(
                re.len().min(im.len()),
                dim * dim,
            ));
        }
        Self::validate(CMatrix::from_fn(dim, dim, |i, j| {
            C64::new(re[i * dim + j], im[i * dim + j])
        }))
    }

    /// The maximally mixed state 𝕀/d.
    pub fn maximally_mixed(d: usize) -> Self {
        Self::trusted(CMatrix::identity(d, d).unscale(d as f64))
    }

    /// The projector onto (the normalization of) `ket`.
    pub fn from_pure(ket: &DVector<C64>) -> Self {
        let n = ket.norm();
        let v = ket.unscale(n);
        let mat = &v * v.adjoint();
        Self::trusted(mat)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// Purity κ = Tr[ϱ²] = Σᵢϱᵢᵢ² + Σ_{i≠j}|ϱᵢⱼ|².
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Number of eigenvalues above 1e-9.
    pub fn rank(&self) -> usize {
        let (eigs, _) = hermitian_eig(&self.mat).expect("stored matrix is Hermitian");
        eigs.iter().filter(|&&x| x > 1e-9).count()
    }

    /// Bloch coefficients r_j = Tr[ϱσ_j] for j = 1..d²−1; the j = 0
    /// component is fixed at 1/√d by the unit trace.
    pub fn bloch_vector(&self, basis: &OrthonormalBasis) -> Result<DVector<f64>, LinalgError> {
        if basis.dim() != self.dim {
            return Err(LinalgError::DimensionMismatch(basis.dim(), self.dim));
        }
        Ok(DVector::from_fn(self.dim * self.dim - 1, |j, _| {
            hs_inner(basis.element(j + 1), &self.mat)
        }))
    }
}

/// Real part of the Hilbert-Schmidt inner product Tr[a†b] of two Hermitian
/// matrices (the imaginary part vanishes identically).
fn hs_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// A time-independent Hamiltonian given by its nondecreasing energy
/// spectrum E₁ ≤ … ≤ E_d (ħ = 1, units of angular frequency).
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    energies: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(energies: Vec<f64>) -> Result<Self, LinalgError> {
        if energies.is_empty() {
            return Err(LinalgError::EmptyDimension);
        }
        for i in 1..energies.len() {
            if energies[i] < energies[i - 1] {
                return Err(LinalgError::EnergiesNotSorted(i - 1, i));
            }
        }
        Ok(Self { energies })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Bohr frequency ω_ij = E_j − E_i (nonnegative for i ≤ j; 0-based).
    pub fn bohr(&self, i: usize, j: usize) -> f64 {
        self.energies[j] - self.energies[i]
    }

    /// Largest gap ω_1d = E_d − E_1.
    pub fn max_gap(&self) -> f64 {
        self.energies[self.dim() - 1] - self.energies[0]
    }

    /// Diagonal matrix representation in its own eigenbasis.
    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if i == j {
                C64::new(self.energies[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

/// Hilbert-Schmidt orthonormal Hermitian basis {σ_a}: σ₀ = 𝕀/√d followed by
/// the d²−1 traceless generalized Gell-Mann matrices.
///
/// Ordering is fixed so CSV Bloch columns are stable: symmetric pair
/// matrices first (row-major over i < j), then antisymmetric pairs in the
/// same order, then the d−1 diagonal matrices.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    dim: usize,
    mats: Vec<CMatrix>,
}

impl OrthonormalBasis {
    pub fn gell_mann(d: usize) -> Result<Self, LinalgError> {
        if d == 0 {
            return Err(LinalgError::EmptyDimension);
        }
        let mut mats = Vec::with_capacity(d * d);
        mats.push(CMatrix::identity(d, d).unscale((d as f64).sqrt()));
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..d {
            for j in (i + 1)..d {
                let mut m = CMatrix::zeros(d, d);
                m[(i, j)] = C64::new(inv_sqrt2, 0.0);
                m[(j, i)] = C64::new(inv_sqrt2, 0.0);
                mats.push(m);
            }
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let mut m = CMatrix::zeros(d, d);
                m[(i, j)] = C64::new(0.0, -inv_sqrt2);
                m[(j, i)] = C64::new(0.0, inv_sqrt2);
                mats.push(m);
            }
        }
        for l in 1..d {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut m = CMatrix::zeros(d, d);
            for k in 0..l {
                m[(k, k)] = C64::new(norm, 0.0);
            }
            m[(l, l)] = C64::new(-(l as f64) * norm, 0.0);
            mats.push(m);
        }
        Ok(Self { dim: d, mats })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis element σ_a; index 0 is 𝕀/√d.
    pub fn element(&self, a: usize) -> &CMatrix {
        &self.mats[a]
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    /// Rebuild σ₀/√d + Σ r_j σ_j from Bloch coefficients.
    pub fn reconstruct(&self, r: &DVector<f64>) -> Result<CMatrix, LinalgError> {
        let d = self.dim;
        if r.len() != d * d - 1 {
            return Err(LinalgError::DimensionMismatch(r.len(), d * d - 1));
        }
        let mut m = CMatrix::identity(d, d).unscale(d as f64);
        for (j, rj) in r.iter().enumerate() {
            m += self.mats[j + 1].scale(*rj);
        }
        Ok(m)
    }
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted
/// ascending and orthonormal eigenvector columns in matching order.
///
/// Within a degenerate cluster the eigenvector gauge is unspecified (but
/// orthonormal); no consumer in this crate depends on that gauge.
pub fn hermitian_eig(m: &CMatrix) -> Result<(DVector<f64>, CMatrix), LinalgError> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NotSquare(m.nrows(), m.ncols()));
    }
    let d = m.nrows();
    let mut herm = 0.0f64;
    for i in 0..d {
        for j in i..d {
            herm = herm.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    if herm > 1e-10 {
        return Err(LinalgError::NotHermitian(herm));
    }
    // Work on the exactly hermitized matrix so the solver sees a clean input.
    let mut h = m.clone();
    for i in 0..d {
        h[(i, i)] = C64::new(h[(i, i)].re, 0.0);
        for j in (i + 1)..d {
            let avg = (h[(i, j)] + h[(j, i)].conj()).unscale(2.0);
            h[(i, j)] = avg;
            h[(j, i)] = avg.conj();
        }
    }
    let se = h
        .try_symmetric_eigen(f64::EPSILON, EIG_MAX_ITER)
        .ok_or(LinalgError::ConvergenceFailure(EIG_MAX_ITER))?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let eigs = DVector::from_fn(d, |k, _| se.eigenvalues[order[k]]);
    let vecs = CMatrix::from_fn(d, d, |i, k| se.eigenvectors[(i, order[k])]);
    Ok((eigs, vecs))
}

/// Principal square root of a PSD Hermitian matrix.
///
/// Eigenvalues in `[PSD_FLOOR, 0]` are clipped to zero before taking the
/// root; anything below the floor is a [`LinalgError::NotPSD`] error.
pub fn matrix_sqrt_psd(m: &CMatrix) -> Result<CMatrix, LinalgError> {
    let (eigs, vecs) = hermitian_eig(m)?;
    if eigs[0] < PSD_FLOOR {
        return Err(LinalgError::NotPSD(eigs[0]));
    }
    let d = m.nrows();
    let sqrt_diag = CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(eigs[i].max(0.0).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut s = &vecs * sqrt_diag * vecs.adjoint();
    // Hermitize exactly; the eigensolve leaves ~1e-16 asymmetry behind.
    for i in 0..d {
        s[(i, i)] = C64::new(s[(i, i)].re, 0.0);
        for j in (i + 1)..d {
            let avg = (s[(i, j)] + s[(j, i)].conj()).unscale(2.0);
            s[(i, j)] = avg;
            s[(j, i)] = avg.conj();
        }
    }
    Ok(s)
}

/// Which tensor factor a partial operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial transpose of a d₁×d₂-partitioned matrix with respect to one
/// subsystem. Basis index n = a·d₂ + b with a the first-factor index.
///
/// The operation is an involution and preserves both trace and
/// Hermiticity.
pub fn partial_transpose(
    m: &CMatrix,
    d1: usize,
    d2: usize,
    subsystem: Subsystem,
) -> Result<CMatrix, LinalgError> {
    let dim = m.nrows();
    if m.ncols() != dim {
        return Err(LinalgError::NotSquare(m.nrows(), m.ncols()));
    }
    if d1 * d2 != dim {
        return Err(LinalgError::BadFactorization { d1, d2, dim });
    }
    let mut out = CMatrix::zeros(dim, dim);
    for a in 0..d1 {
        for b in 0..d2 {
            for ap in 0..d1 {
                for bp in 0..d2 {
                    let (row, col) = (a * d2 + b, ap * d2 + bp);
                    let (src_row, src_col) = match subsystem {
                        Subsystem::First => (ap * d2 + b, a * d2 + bp),
                        Subsystem::Second => (a * d2 + bp, ap * d2 + b),
                    };
                    out[(row, col)] = m[(src_row, src_col)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}
