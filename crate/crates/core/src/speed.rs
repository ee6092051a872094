//! Speed functionals for unitary and open evolution, in mutually
//! cross-checkable forms.
//!
//! For unitary dynamics under a time-independent `H` the Euclidean squared
//! speed is constant in time and admits three equivalent expressions: the
//! Bohr-frequency sum `Σ |ϱ_ij|² ω_ij²`, the commutator norm `‖[H,ϱ]‖²_HS`,
//! and the squared rate of change `Σ ṙ_j²` of the generalized Bloch vector.
//! The first is the production evaluator; the other two are validation
//! paths. The speed is bounded by `2(ΔH)²` with equality exactly on pure
//! states; the gap is `2 Σ_{i<j} μ_ij ω_ij²` with `μ_ij = ϱᵢᵢϱⱼⱼ − |ϱᵢⱼ|²`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::linalg::{
    matrix_sqrt_psd, CMatrix, DensityMatrix, Hamiltonian, LinalgError, OrthonormalBasis,
};

/// All speed quantities for one state, cross-checkable against each other.
#[derive(Debug, Clone, Copy)]
pub struct SpeedReport {
    /// Bohr-frequency form Σ |ϱ_ij|² ω_ij² (squared angular frequency).
    pub euclid_sq: f64,
    /// Commutator form ‖[H,ϱ]‖²_HS.
    pub euclid_sq_commutator: f64,
    /// Central finite difference of the Bloch vector (validation path).
    pub euclid_sq_bloch: f64,
    /// Wigner-Yanase form −Tr[H,√ϱ]².
    pub wy_sq: f64,
    /// Upper bound 2(ΔH)², saturated exactly on pure states.
    pub variance_bound: f64,
    /// κ = Tr[ϱ²].
    pub purity: f64,
}

fn check_dims(h: &Hamiltonian, rho: &DensityMatrix) -> Result<(), LinalgError> {
    if h.dim() != rho.dim() {
        return Err(LinalgError::DimensionMismatch(h.dim(), rho.dim()));
    }
    Ok(())
}

/// Euclidean squared speed Σ_{i≠j} |ϱ_ij|² ω_ij², the production evaluator.
///
/// Vanishes exactly on states diagonal in the energy eigenbasis; a fully
/// degenerate spectrum gives zero for every state (all ω_ij = 0).
pub fn squared_speed(h: &Hamiltonian, rho: &DensityMatrix) -> Result<f64, LinalgError> {
    check_dims(h, rho)?;
    let d = h.dim();
    let mut v2 = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let w = h.bohr(i, j);
            v2 += 2.0 * rho.entry(i, j).norm_sqr() * w * w;
        }
    }
    Ok(v2)
}

/// Same speed as ‖[H,ϱ]‖²_HS, evaluated through the explicit commutator.
pub fn squared_speed_commutator(h: &Hamiltonian, rho: &DensityMatrix) -> Result<f64, LinalgError> {
    check_dims(h, rho)?;
    let hm = h.matrix();
    let comm = &hm * rho.matrix() - rho.matrix() * &hm;
    Ok(comm.iter().map(|z| z.norm_sqr()).sum())
}

/// Unitarily evolved state e^{−iHt} ϱ e^{iHt}; entrywise phases
/// ϱ_ij ↦ ϱ_ij e^{iω_ij t} in the energy eigenbasis.
pub fn evolve_unitary(h: &Hamiltonian, rho: &DensityMatrix, t: f64) -> CMatrix {
    let d = h.dim();
    CMatrix::from_fn(d, d, |i, j| {
        rho.entry(i, j) * C64::from_polar(1.0, h.bohr(i, j) * t)
    })
}

/// Default finite-difference step: 1e-5 over the largest Bohr frequency.
pub fn default_bloch_dt(h: &Hamiltonian) -> f64 {
    let wmax = h.max_gap();
    if wmax > 0.0 {
        1e-5 / wmax
    } else {
        1e-5
    }
}

/// Squared speed as Σ ṙ_j², with ṙ from a central finite difference of the
/// Bloch vector of the evolved state. A validation path, not the production
/// evaluator: agrees with [`squared_speed`] to O(dt²).
pub fn squared_speed_bloch(
    h: &Hamiltonian,
    rho: &DensityMatrix,
    basis: &OrthonormalBasis,
    dt: f64,
) -> Result<f64, LinalgError> {
    check_dims(h, rho)?;
    if basis.dim() != rho.dim() {
        return Err(LinalgError::DimensionMismatch(basis.dim(), rho.dim()));
    }
    assert!(dt > 0.0, "finite-difference step must be positive");
    let fwd = DensityMatrix::trusted(evolve_unitary(h, rho, dt));
    let bwd = DensityMatrix::trusted(evolve_unitary(h, rho, -dt));
    let rf = fwd.bloch_vector(basis)?;
    let rb = bwd.bloch_vector(basis)?;
    Ok((rf - rb).unscale(2.0 * dt).norm_squared())
}

/// Energy variance (ΔH)² = Σ_{i<j} ϱᵢᵢ ϱⱼⱼ ω_ij², equal to
/// Tr[H²ϱ] − (Tr[Hϱ])² for unit-trace states.
pub fn energy_variance(h: &Hamiltonian, rho: &DensityMatrix) -> Result<f64, LinalgError> {
    check_dims(h, rho)?;
    let d = h.dim();
    let mut var = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let w = h.bohr(i, j);
            var += rho.entry(i, i).re * rho.entry(j, j).re * w * w;
        }
    }
    Ok(var)
}

/// The bound gap and its certificate: μ_ij = ϱᵢᵢϱⱼⱼ − |ϱᵢⱼ|² ≥ 0 for PSD ϱ,
/// stored upper-triangular, and gap = 2 Σ_{i<j} μ_ij ω_ij² so that
/// v² = 2(ΔH)² − gap. The gap vanishes exactly on pure states.
pub fn mu_gap(h: &Hamiltonian, rho: &DensityMatrix) -> Result<(f64, DMatrix<f64>), LinalgError> {
    check_dims(h, rho)?;
    let d = h.dim();
    let mut mu = DMatrix::<f64>::zeros(d, d);
    let mut gap = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let m = rho.entry(i, i).re * rho.entry(j, j).re - rho.entry(i, j).norm_sqr();
            mu[(i, j)] = m;
            let w = h.bohr(i, j);
            gap += 2.0 * m * w * w;
        }
    }
    Ok((gap, mu))
}

/// Wigner-Yanase squared speed −Tr[H,√ϱ]² = Σ |(√ϱ)_ij|² ω_ij², generic
/// eigensolve path for the matrix square root.
pub fn wy_squared_speed(h: &Hamiltonian, rho: &DensityMatrix) -> Result<f64, LinalgError> {
    check_dims(h, rho)?;
    let s = matrix_sqrt_psd(rho.matrix())?;
    let d = h.dim();
    let mut v2 = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let w = h.bohr(i, j);
            v2 += 2.0 * s[(i, j)].norm_sqr() * w * w;
        }
    }
    Ok(v2)
}

/// Wigner-Yanase squared speed through the closed-form square root of an
/// X-state: each secondary-diagonal 2×2 block [[a, c], [c̄, b]] has
/// √M = (M + √(det M)·𝕀) / √(tr M + 2√(det M)), so only the pair blocks
/// contribute. The caller guarantees the X zero pattern; entries off the
/// main and secondary diagonals are ignored.
pub fn wy_squared_speed_xstate(h: &Hamiltonian, rho: &DensityMatrix) -> Result<f64, LinalgError> {
    check_dims(h, rho)?;
    let d = h.dim();
    let mut v2 = 0.0;
    for i in 0..d / 2 {
        let j = d - 1 - i;
        let a = rho.entry(i, i).re;
        let b = rho.entry(j, j).re;
        let c2 = rho.entry(i, j).norm_sqr();
        let det = (a * b - c2).max(0.0);
        let denom = a + b + 2.0 * det.sqrt();
        let sq_off = if denom > 0.0 { c2 / denom } else { 0.0 };
        let w = h.bohr(i, j);
        v2 += 2.0 * sq_off * w * w;
    }
    Ok(v2)
}

/// A set of Lindblad jump operators L_k (entries in units of √rate).
#[derive(Debug, Clone, Default)]
pub struct LindbladSet {
    ops: Vec<CMatrix>,
}

impl LindbladSet {
    pub fn new(ops: Vec<CMatrix>) -> Self {
        Self { ops }
    }

    pub fn empty() -> Self {
        Self { ops: Vec::new() }
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.ops
    }

    /// 𝒟ϱ = Σ_k [L_k ϱ L_k† − ½(L_k†L_k ϱ + ϱ L_k†L_k)].
    pub fn dissipator(&self, rho: &CMatrix) -> CMatrix {
        let d = rho.nrows();
        let mut out = CMatrix::zeros(d, d);
        for l in &self.ops {
            let ldag = l.adjoint();
            let ldl = &ldag * l;
            out += l * rho * &ldag - (&ldl * rho + rho * &ldl).unscale(2.0);
        }
        out
    }
}

/// Open-system squared speed Tr[(ℒϱ)²] with ℒϱ = −i[H,ϱ] + 𝒟ϱ, evaluated
/// directly. An evaluator only; no optimization is done over open dynamics.
pub fn squared_speed_open(
    h: &Hamiltonian,
    ls: &LindbladSet,
    rho: &DensityMatrix,
) -> Result<f64, LinalgError> {
    check_dims(h, rho)?;
    for l in ls.operators() {
        if l.nrows() != h.dim() || l.ncols() != h.dim() {
            return Err(LinalgError::DimensionMismatch(l.nrows(), h.dim()));
        }
    }
    let hm = h.matrix();
    let comm = &hm * rho.matrix() - rho.matrix() * &hm;
    let lrho = comm.scale(-1.0) * C64::i() + ls.dissipator(rho.matrix());
    Ok((&lrho * &lrho).trace().re)
}

/// The three-term split of the open-system squared speed:
/// `(unitary, dissipative, incompatibility)` with
/// unitary = 2Tr[H[H,ϱ]ϱ], dissipative = Tr[(𝒟ϱ)²], and
/// incompatibility = −2i Tr[ϱ[𝒟ϱ, H]]. Their sum equals
/// [`squared_speed_open`].
pub fn squared_speed_open_terms(
    h: &Hamiltonian,
    ls: &LindbladSet,
    rho: &DensityMatrix,
) -> Result<(f64, f64, f64), LinalgError> {
    check_dims(h, rho)?;
    let hm = h.matrix();
    let comm = &hm * rho.matrix() - rho.matrix() * &hm;
    let unitary = (&hm * &comm * rho.matrix()).trace().re * 2.0;
    let diss = ls.dissipator(rho.matrix());
    let dissipative = (&diss * &diss).trace().re;
    let dh = &diss * &hm - &hm * &diss;
    let incompat = (C64::new(0.0, -2.0) * (rho.matrix() * dh).trace()).re;
    Ok((unitary, dissipative, incompat))
}

/// Evaluate every speed quantity for one state, using the default
/// finite-difference step for the Bloch form.
pub fn speed_report(h: &Hamiltonian, rho: &DensityMatrix) -> Result<SpeedReport, LinalgError> {
    let basis = OrthonormalBasis::gell_mann(h.dim())?;
    let report = SpeedReport {
        euclid_sq: squared_speed(h, rho)?,
        euclid_sq_commutator: squared_speed_commutator(h, rho)?,
        euclid_sq_bloch: squared_speed_bloch(h, rho, &basis, default_bloch_dt(h))?,
        wy_sq: wy_squared_speed(h, rho)?,
        variance_bound: 2.0 * energy_variance(h, rho)?,
        purity: rho.purity(),
    };
    debug_assert!(
        (report.euclid_sq - report.euclid_sq_commutator).abs()
            <= 1e-10 * report.euclid_sq.max(1.0)
    );
    debug_assert!(report.euclid_sq <= report.variance_bound + 1e-10);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    fn psi1(d: usize, w1d: f64) -> (Hamiltonian, DensityMatrix) {
        let energies: Vec<f64> = (0..d).map(|i| w1d * i as f64 / (d - 1) as f64).collect();
        let h = Hamiltonian::new(energies).unwrap();
        let mut ket = DVector::from_element(d, C64::new(0.0, 0.0));
        ket[0] = C64::new(1.0, 0.0);
        ket[d - 1] = C64::new(1.0, 0.0);
        (h, DensityMatrix::from_pure(&ket))
    }

    #[test]
    fn incoherent_states_have_zero_speed() {
        let h = Hamiltonian::new(vec![0.0, 0.4, 1.3]).unwrap();
        let mm = DensityMatrix::maximally_mixed(3);
        assert_abs_diff_eq!(squared_speed(&h, &mm).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            squared_speed_commutator(&h, &mm).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn psi1_speed_is_half_gap_squared() {
        // With ω_1d = √2 the optimal pure-state speed normalizes to 1.
        let (h, rho) = psi1(4, std::f64::consts::SQRT_2);
        assert_abs_diff_eq!(squared_speed(&h, &rho).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            squared_speed_commutator(&h, &rho).unwrap(),
            0.5 * h.max_gap().powi(2),
            epsilon = 1e-12
        );
        // ΔH² = ¼ω_1d² on Ψ₁, so the bound 2(ΔH)² is saturated.
        assert_abs_diff_eq!(
            energy_variance(&h, &rho).unwrap(),
            0.25 * h.max_gap().powi(2),
            epsilon = 1e-14
        );
    }

    #[test]
    fn commutator_form_matches_bohr_sum_on_random_states() {
        let h = Hamiltonian::new(vec![0.0, 0.2, 0.9, 1.7]).unwrap();
        let mut r = rng(5);
        for _ in 0..20 {
            let rho = sampling::sample_density(4, &mut r);
            let a = squared_speed(&h, &rho).unwrap();
            let b = squared_speed_commutator(&h, &rho).unwrap();
            assert!((a - b).abs() <= 1e-10 * a.max(1.0));
        }
    }

    #[test]
    fn bloch_finite_difference_matches() {
        let h = Hamiltonian::new(vec![0.0, 0.2, 0.9, 1.7]).unwrap();
        let basis = OrthonormalBasis::gell_mann(4).unwrap();
        let mut r = rng(6);
        let dt = default_bloch_dt(&h);
        for _ in 0..10 {
            let rho = sampling::sample_density(4, &mut r);
            let a = squared_speed(&h, &rho).unwrap();
            let b = squared_speed_bloch(&h, &rho, &basis, dt).unwrap();
            assert!((a - b).abs() <= 1e-6 * a.max(1.0), "a={a} b={b}");
        }
        let mm = DensityMatrix::maximally_mixed(4);
        assert_abs_diff_eq!(
            squared_speed_bloch(&h, &mm, &basis, dt).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn variance_two_level_maximally_mixed() {
        let w = 0.7;
        let h = Hamiltonian::new(vec![0.0, w]).unwrap();
        let mm = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(
            energy_variance(&h, &mm).unwrap(),
            w * w / 4.0,
            epsilon = 1e-14
        );
        // Energy eigenstates have zero variance.
        let ground = DensityMatrix::validate(CMatrix::from_fn(2, 2, |i, j| {
            if i == 0 && j == 0 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
        .unwrap();
        assert_abs_diff_eq!(energy_variance(&h, &ground).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn variance_matches_moment_formula() {
        let h = Hamiltonian::new(vec![0.0, 0.2, 0.9, 1.7]).unwrap();
        let hm = h.matrix();
        let mut r = rng(7);
        for _ in 0..20 {
            let rho = sampling::sample_density(4, &mut r);
            let mean = (&hm * rho.matrix()).trace().re;
            let second = (&hm * &hm * rho.matrix()).trace().re;
            let var = energy_variance(&h, &rho).unwrap();
            assert!((var - (second - mean * mean)).abs() <= 1e-10);
            assert!(var >= 0.0);
        }
    }

    #[test]
    fn gap_certificate_matches_subtraction() {
        let h = Hamiltonian::new(vec![0.0, 0.2, 0.9, 1.7]).unwrap();
        let mut r = rng(8);
        for _ in 0..20 {
            let rho = sampling::sample_density(4, &mut r);
            let (gap, mu) = mu_gap(&h, &rho).unwrap();
            let bound = 2.0 * energy_variance(&h, &rho).unwrap();
            let v2 = squared_speed(&h, &rho).unwrap();
            assert!((gap - (bound - v2)).abs() <= 1e-10);
            assert!(mu.iter().all(|&m| m >= -1e-10));
            assert!(v2 <= bound + 1e-10);
        }
        // Pure state: gap vanishes, every μ_ij vanishes.
        let (h4, pure) = psi1(4, 1.0);
        let (gap, mu) = mu_gap(&h4, &pure).unwrap();
        assert_abs_diff_eq!(gap, 0.0, epsilon = 1e-12);
        assert!(mu.iter().all(|&m| m.abs() <= 1e-12));
        // Maximally mixed: gap equals the full bound.
        let mm = DensityMatrix::maximally_mixed(4);
        let (gap_mm, _) = mu_gap(&h, &mm).unwrap();
        assert_abs_diff_eq!(
            gap_mm,
            2.0 * energy_variance(&h, &mm).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn wy_equals_euclid_on_pure_states() {
        let (h, rho) = psi1(4, std::f64::consts::SQRT_2);
        let wy = wy_squared_speed(&h, &rho).unwrap();
        assert!((wy - squared_speed(&h, &rho).unwrap()).abs() <= 1e-8);
        let mm = DensityMatrix::maximally_mixed(4);
        assert_abs_diff_eq!(wy_squared_speed(&h, &mm).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn wy_xstate_path_matches_eigensolve_path() {
        // Low-purity maximal-speed state at κ = 0.3 for the γ₁ = 3/2 spectrum.
        let h = crate::cli::preset_energies("gamma-lt2").unwrap();
        let h = Hamiltonian::new(h).unwrap();
        let opt = crate::optimal::optimal_state(&h, 0.3).unwrap();
        let generic = wy_squared_speed(&h, &opt.state).unwrap();
        let closed = wy_squared_speed_xstate(&h, &opt.state).unwrap();
        assert!((generic - closed).abs() <= 1e-9, "{generic} vs {closed}");
    }

    #[test]
    fn open_speed_reduces_to_unitary_without_jump_operators() {
        let h = Hamiltonian::new(vec![0.0, 0.2, 0.9, 1.7]).unwrap();
        let mut r = rng(9);
        let rho = sampling::sample_density(4, &mut r);
        let open = squared_speed_open(&h, &LindbladSet::empty(), &rho).unwrap();
        assert!((open - squared_speed(&h, &rho).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn open_speed_pure_dissipation_and_term_identity() {
        let mut r = rng(10);
        // H = 0 with a single jump operator: only the dissipative term remains.
        let h0 = Hamiltonian::new(vec![0.0, 0.0]).unwrap();
        let l = CMatrix::from_fn(2, 2, |i, j| {
            if i == 0 && j == 1 {
                C64::new(0.8, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let ls = LindbladSet::new(vec![l]);
        let rho = sampling::sample_density(2, &mut r);
        let direct = squared_speed_open(&h0, &ls, &rho).unwrap();
        let diss = ls.dissipator(rho.matrix());
        assert!((direct - (&diss * &diss).trace().re).abs() <= 1e-12);

        // Generic d = 2: the three-term split matches the direct evaluation.
        let h = Hamiltonian::new(vec![0.0, 1.3]).unwrap();
        for _ in 0..10 {
            let rho = sampling::sample_density(2, &mut r);
            use rand::RngExt;
            let g = CMatrix::from_fn(2, 2, |_, _| {
                C64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5)
            });
            let ls = LindbladSet::new(vec![g]);
            let direct = squared_speed_open(&h, &ls, &rho).unwrap();
            let (u, dsp, inc) = squared_speed_open_terms(&h, &ls, &rho).unwrap();
            assert!(
                (direct - (u + dsp + inc)).abs() <= 1e-9 * direct.abs().max(1.0),
                "direct={direct} split={}",
                u + dsp + inc
            );
        }
    }

    #[test]
    fn degenerate_spectrum_gives_zero_speed_for_all_states() {
        let h = Hamiltonian::new(vec![1.0, 1.0, 1.0]).unwrap();
        let mut r = rng(11);
        for _ in 0..5 {
            let rho = sampling::sample_density(3, &mut r);
            assert_abs_diff_eq!(squared_speed(&h, &rho).unwrap(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let h = Hamiltonian::new(vec![0.0, 1.0]).unwrap();
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            squared_speed(&h, &rho),
            Err(LinalgError::DimensionMismatch(2, 3))
        ));
    }
}
