//! Uniform random density matrices ϱ = U ϱ_diag U† with ϱ_diag drawn
//! uniformly from the probability simplex and U from the Haar measure.
//!
//! Determinism contract: every draw is derived from a `(seed, stream)`
//! pair of a counter-based generator, so parallel runs partition the work
//! without sharing generator state and reproduce bit-identical streams for
//! any thread count.
//!
//! Stream layout for [`SamplerConfig`]: spectrum `i` uses stream
//! `i·(n_unitary+1)` and unitary `(i, j)` uses stream
//! `i·(n_unitary+1) + 1 + j`, so sample `s = i·n_unitary + j` is fully
//! determined by `(seed, i, j)`.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::linalg::{CMatrix, DensityMatrix};

/// Configuration of the two-step random-state generator: `n_diag` random
/// spectra, each conjugated by `n_unitary` random unitaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub dim: usize,
    pub seed: u64,
    pub n_diag: u64,
    pub n_unitary: u64,
}

impl SamplerConfig {
    pub fn new(dim: usize, seed: u64, n_diag: u64, n_unitary: u64) -> Self {
        assert!(n_diag >= 1 && n_unitary >= 1, "sample counts must be >= 1");
        Self {
            dim,
            seed,
            n_diag,
            n_unitary,
        }
    }

    /// Total number of samples n_diag · n_unitary.
    pub fn total(&self) -> u64 {
        self.n_diag * self.n_unitary
    }

    fn rng_for(&self, stream: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// The spectrum shared by samples i·n_unitary .. (i+1)·n_unitary.
    pub fn spectrum(&self, diag_index: u64) -> Vec<f64> {
        let mut rng = self.rng_for(diag_index * (self.n_unitary + 1));
        sample_simplex(self.dim, &mut rng)
    }

    /// The state at flat index s = i·n_unitary + j, independent of how the
    /// index range is partitioned across workers.
    pub fn state(&self, index: u64) -> DensityMatrix {
        assert!(index < self.total(), "sample index out of range");
        let i = index / self.n_unitary;
        let j = index % self.n_unitary;
        let p = self.spectrum(i);
        let mut rng = self.rng_for(i * (self.n_unitary + 1) + 1 + j);
        let u = sample_haar_unitary(self.dim, &mut rng);
        conjugated_density(&p, &u)
    }
}

/// Uniform point on the (d−1)-simplex via normalized unit-rate exponential
/// variates (a Dirichlet(1,…,1) draw).
pub fn sample_simplex<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut p: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = p.iter().sum();
    for x in &mut p {
        *x /= total;
    }
    p
}

/// Haar-distributed unitary: complex standard-normal (Ginibre) matrix,
/// QR orthonormalization, then a column phase fix by the phases of the
/// triangular factor's diagonal. Without the phase fix the distribution
/// is not Haar.
pub fn sample_haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * inv_sqrt2, im * inv_sqrt2)
    });
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 {
            rkk / rkk.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            u[(i, k)] *= phase;
        }
    }
    u
}

/// ϱ = U diag(p) U†, hermitized exactly.
fn conjugated_density(p: &[f64], u: &CMatrix) -> DensityMatrix {
    let d = p.len();
    let lam = CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(p[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut m = u * lam * u.adjoint();
    for i in 0..d {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..d {
            let avg = (m[(i, j)] + m[(j, i)].conj()).unscale(2.0);
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    DensityMatrix::trusted(m)
}

/// One uniform random density matrix from a caller-provided generator.
pub fn sample_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let p = sample_simplex(d, rng);
    let u = sample_haar_unitary(d, rng);
    conjugated_density(&p, &u)
}

/// Random Hermitian matrix (G + G†)/2 with Ginibre G, normalized to unit
/// Hilbert-Schmidt norm. Used as an isotropic perturbation direction.
pub fn sample_hermitian_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let h = (&g + g.adjoint()).unscale(2.0);
    let n = h.norm();
    if n > 0.0 {
        h.unscale(n)
    } else {
        CMatrix::identity(d, d).unscale((d as f64).sqrt())
    }
}
