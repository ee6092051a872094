//! Entanglement and coherence diagnostics of the maximal-speed states:
//! negativity from the partial-transpose spectrum, Wootters concurrence
//! for two qubits, the l₁-norm of coherence, and the explicit product
//! decomposition witnessing separability below κ₀.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg::{
    hermitian_eig, kron, partial_transpose, CMatrix, DensityMatrix, Hamiltonian, LinalgError,
    Subsystem,
};
use crate::optimal::{self, OptimalState};

/// Partial-transpose eigenvalues above this (negative) cutoff count as
/// zero, so numerical noise cannot masquerade as entanglement.
pub const NEGATIVITY_CUTOFF: f64 = -1e-12;

#[derive(Debug, Clone, Error)]
pub enum ResourceError {
    #[error("concurrence requires a two-qubit (4-dimensional) state, got dimension {0}")]
    WrongDimension(usize),
    #[error("purity {kappa} above the separable band edge kappa0 = {kappa0}")]
    OutOfBand { kappa: f64, kappa0: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Optimal(#[from] Box<optimal::OptimalError>),
}

impl From<optimal::OptimalError> for ResourceError {
    fn from(e: optimal::OptimalError) -> Self {
        ResourceError::Optimal(Box::new(e))
    }
}

/// l₁-norm of coherence C(ϱ) = Σ_{i≠j} |ϱ_ij| in the energy eigenbasis.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    let mut c = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                c += rho.entry(i, j).norm();
            }
        }
    }
    c
}

/// Negativity 𝒩(ϱ) = ‖ϱ^{T₁}‖_tr − 1 = 2 Σ |negative eigenvalues of ϱ^{T₁}|
/// for a d₁×d₂ split.
pub fn negativity(rho: &DensityMatrix, d1: usize, d2: usize) -> Result<f64, ResourceError> {
    let pt = partial_transpose(rho.matrix(), d1, d2, Subsystem::First)?;
    let (eigs, _) = hermitian_eig(&pt)?;
    Ok(2.0
        * eigs
            .iter()
            .filter(|&&x| x < NEGATIVITY_CUTOFF)
            .map(|&x| -x)
            .sum::<f64>())
}

/// Eigenvalues of ϱ below this share of the unit trace count as exact
/// zeros when factoring ϱ, so rank-deficient states do not leak √ε noise
/// into the concurrence.
const CONCURRENCE_RANK_TOL: f64 = 1e-13;

/// Wootters concurrence of a two-qubit state:
/// max{0, λ₁ − λ₂ − λ₃ − λ₄} over the descending square roots of the
/// eigenvalues of ϱ·(σ_y⊗σ_y)ϱ*(σ_y⊗σ_y).
///
/// The λ_i are evaluated as the singular values of the complex symmetric
/// matrix Lᵀ(σ_y⊗σ_y)L with ϱ = LL†, which is exact on the zero modes of
/// rank-deficient states where the naive √-of-eigenvalue route loses half
/// the working precision.
pub fn concurrence_two_qubit(rho: &DensityMatrix) -> Result<f64, ResourceError> {
    if rho.dim() != 4 {
        return Err(ResourceError::WrongDimension(rho.dim()));
    }
    // σ_y ⊗ σ_y is real: anti-diagonal (−1, 1, 1, −1).
    let mut yy = CMatrix::zeros(4, 4);
    yy[(0, 3)] = C64::new(-1.0, 0.0);
    yy[(1, 2)] = C64::new(1.0, 0.0);
    yy[(2, 1)] = C64::new(1.0, 0.0);
    yy[(3, 0)] = C64::new(-1.0, 0.0);
    let (eigs, vecs) = hermitian_eig(rho.matrix())?;
    let kept: Vec<usize> = (0..4).filter(|&k| eigs[k] > CONCURRENCE_RANK_TOL).collect();
    if kept.is_empty() {
        return Ok(0.0);
    }
    let l = CMatrix::from_fn(4, kept.len(), |i, c| {
        vecs[(i, kept[c])].scale(eigs[kept[c]].sqrt())
    });
    let c_sym = l.transpose() * yy * &l;
    let svd = c_sym.svd(false, false);
    let mut lambdas: Vec<f64> = svd.singular_values.iter().copied().collect();
    lambdas.resize(4, 0.0);
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Closed-form concurrence 𝒞 = max{2(|ϱ₁₄| − ϱ₂₂), 0} of a d = 4
/// maximal-speed state, which coincides with both the Wootters value and
/// the negativity for these states.
pub fn concurrence_optimal_closed(opt: &OptimalState) -> Result<f64, ResourceError> {
    if opt.state.dim() != 4 {
        return Err(ResourceError::WrongDimension(opt.state.dim()));
    }
    let corner = opt.state.entry(0, 3).norm();
    let inner = opt.state.entry(1, 1).re;
    Ok((2.0 * (corner - inner)).max(0.0))
}

/// One weighted product term of a separable decomposition.
#[derive(Debug, Clone)]
pub struct DecompositionTerm {
    pub weight: f64,
    pub factor_a: DensityMatrix,
    pub factor_b: DensityMatrix,
}

/// An explicit convex combination Σ w·(A⊗B) reproducing a target state.
#[derive(Debug, Clone)]
pub struct ProductDecomposition {
    pub terms: Vec<DecompositionTerm>,
    pub target: DensityMatrix,
}

impl ProductDecomposition {
    /// Σ weight · (A ⊗ B).
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.target.dim();
        let mut m = CMatrix::zeros(d, d);
        for term in &self.terms {
            m += kron(term.factor_a.matrix(), term.factor_b.matrix()).scale(term.weight);
        }
        m
    }

    /// Max-norm defect of the reconstruction against the target.
    pub fn residual(&self) -> f64 {
        (self.reconstruct() - self.target.matrix()).norm()
    }
}

fn basis_projector(d: usize, k: usize) -> DensityMatrix {
    let mut ket = DVector::from_element(d, C64::new(0.0, 0.0));
    ket[k] = C64::new(1.0, 0.0);
    DensityMatrix::from_pure(&ket)
}

/// (|0⟩ + phase·|d−1⟩)/√2 as a projector.
fn corner_superposition(d: usize, phase: C64) -> DensityMatrix {
    let mut ket = DVector::from_element(d, C64::new(0.0, 0.0));
    ket[0] = C64::new(1.0, 0.0);
    ket[d - 1] = phase;
    DensityMatrix::from_pure(&ket)
}

/// Product-state decomposition of the low-purity maximal-speed state
/// (κ ≤ κ₀ = 1/d + 2/d²) for a d₁×d₂ split.
///
/// The diagonal carries weights 1/d − Δ_ij with Δ nonzero (= |ϱ_1d|) only
/// on the four corner product states; the corner coherence is assembled
/// from four phase-rotated product projectors built on
/// |±x⟩ = (|0⟩ ± e^{−iθ₁/2}|d₁−1⟩)/√2 and
/// |±y⟩ = (|0⟩ ± i e^{−iθ₁/2}|d₁−1⟩)/√2 (and their d₂ analogues), paired
/// as x⁺x⁺ + x⁻x⁻ + y⁺y⁻ + y⁻y⁺, each with weight |ϱ_1d|. All weights are
/// nonnegative exactly because |ϱ_1d| ≤ 1/d throughout the band.
pub fn separable_decomposition(
    h: &Hamiltonian,
    kappa: f64,
    d1: usize,
    d2: usize,
    theta1: f64,
) -> Result<ProductDecomposition, ResourceError> {
    let d = h.dim();
    if d1 * d2 != d {
        return Err(LinalgError::BadFactorization { d1, d2, dim: d }.into());
    }
    let params = optimal::regime_params(h)?;
    if kappa > params.kappa0 + 1e-12 {
        return Err(ResourceError::OutOfBand {
            kappa,
            kappa0: params.kappa0,
        });
    }
    let target = optimal::optimal_state_with_phases(h, kappa, theta1, 0.0)?;
    let corner = target.state.entry(0, d - 1).norm();
    let inv_d = 1.0 / d as f64;

    let mut terms = Vec::new();
    for i in 0..d1 {
        for j in 0..d2 {
            let corner_cell = (i == 0 || i == d1 - 1) && (j == 0 || j == d2 - 1) && corner > 0.0;
            let delta = if corner_cell { corner } else { 0.0 };
            let weight = inv_d - delta;
            if weight > 0.0 {
                terms.push(DecompositionTerm {
                    weight,
                    factor_a: basis_projector(d1, i),
                    factor_b: basis_projector(d2, j),
                });
            }
        }
    }
    if corner > 0.0 {
        let half_phase = C64::from_polar(1.0, -theta1 / 2.0);
        let px = |sign: f64| corner_superposition(d1, half_phase.scale(sign));
        let py = |sign: f64| corner_superposition(d1, (half_phase * C64::i()).scale(sign));
        let qx = |sign: f64| corner_superposition(d2, half_phase.scale(sign));
        let qy = |sign: f64| corner_superposition(d2, (half_phase * C64::i()).scale(sign));
        for (a, b) in [
            (px(1.0), qx(1.0)),
            (px(-1.0), qx(-1.0)),
            (py(1.0), qy(-1.0)),
            (py(-1.0), qy(1.0)),
        ] {
            terms.push(DecompositionTerm {
                weight: corner,
                factor_a: a,
                factor_b: b,
            });
        }
    }
    Ok(ProductDecomposition {
        terms,
        target: target.state,
    })
}

/// Reduced state over one tensor factor.
#[allow(dead_code)]
pub(crate) fn partial_trace(
    m: &CMatrix,
    d1: usize,
    d2: usize,
    keep: Subsystem,
) -> Result<CMatrix, LinalgError> {
    let dim = m.nrows();
    if d1 * d2 != dim {
        return Err(LinalgError::BadFactorization { d1, d2, dim });
    }
    Ok(match keep {
        Subsystem::First => CMatrix::from_fn(d1, d1, |a, ap| {
            (0..d2).map(|b| m[(a * d2 + b, ap * d2 + b)]).sum()
        }),
        Subsystem::Second => CMatrix::from_fn(d2, d2, |b, bp| {
            (0..d1).map(|a| m[(a * d2 + b, a * d2 + bp)]).sum()
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimal::{optimal_state, regime_params};
    use approx::assert_abs_diff_eq;

    fn preset(name: &str) -> Hamiltonian {
        Hamiltonian::new(crate::cli::preset_energies(name).unwrap()).unwrap()
    }

    fn bell_state() -> DensityMatrix {
        let mut ket = DVector::from_element(4, C64::new(0.0, 0.0));
        ket[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        ket[3] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        DensityMatrix::from_pure(&ket)
    }

    #[test]
    fn coherence_of_reference_states() {
        assert_abs_diff_eq!(
            l1_coherence(&DensityMatrix::maximally_mixed(4)),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(l1_coherence(&bell_state()), 1.0, epsilon = 1e-14);
        // X-structure collapses the sum to 2(|ϱ₁₄| + |ϱ₂₃|).
        let h = preset("gamma-lt2");
        let opt = optimal_state(&h, 0.53).unwrap();
        let expected = 2.0 * (opt.state.entry(0, 3).norm() + opt.state.entry(1, 2).norm());
        assert_abs_diff_eq!(l1_coherence(&opt.state), expected, epsilon = 1e-14);
    }

    #[test]
    fn negativity_of_product_and_bell_states() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(21);
        let a = crate::sampling::sample_density(2, &mut rng);
        let b = crate::sampling::sample_density(2, &mut rng);
        let prod = DensityMatrix::validate(kron(a.matrix(), b.matrix())).unwrap();
        assert!(negativity(&prod, 2, 2).unwrap() <= 1e-12);
        assert_abs_diff_eq!(
            negativity(&bell_state(), 2, 2).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn negativity_closed_form_on_the_ramp_band() {
        // d = 6 ramp state with x = 0.1: one negative PT eigenvalue
        // −xd/(d−2), so 𝒩 = 2xd/(d−2) = 0.3, for either split.
        let d = 6usize;
        let x = 0.1f64;
        let kappa = 4.0 * (1.0 / 6.0 + x).powi(2) + 4.0 * (1.0 / 6.0 - x / 2.0).powi(2);
        let h =
            Hamiltonian::new(vec![0.0, 0.25, 0.5, 0.9, 1.15, std::f64::consts::SQRT_2]).unwrap();
        let params = regime_params(&h).unwrap();
        assert!(
            params.gamma1().unwrap() >= 2.0,
            "spectrum must keep pairs off"
        );
        let opt = optimal_state(&h, kappa).unwrap();
        assert_abs_diff_eq!(
            opt.state.entry(0, 0).re,
            1.0 / d as f64 + x,
            epsilon = 1e-12
        );
        for (d1, d2) in [(2usize, 3usize), (3, 2)] {
            let n = negativity(&opt.state, d1, d2).unwrap();
            assert_abs_diff_eq!(n, 0.3, epsilon = 1e-10);
        }
        // The full negative-part bookkeeping agrees with the single
        // negative eigenvalue −xd/(d−2).
        let pt = partial_transpose(opt.state.matrix(), 2, 3, Subsystem::First).unwrap();
        let (eigs, _) = hermitian_eig(&pt).unwrap();
        assert_abs_diff_eq!(eigs[0], -x * 6.0 / 4.0, epsilon = 1e-10);
        assert!(eigs[1] >= -1e-12);
    }

    #[test]
    fn wootters_on_reference_states() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(31);
        let a = crate::sampling::sample_density(2, &mut rng);
        let b = crate::sampling::sample_density(2, &mut rng);
        let prod = DensityMatrix::validate(kron(a.matrix(), b.matrix())).unwrap();
        assert!(concurrence_two_qubit(&prod).unwrap() <= 1e-8);
        assert_abs_diff_eq!(
            concurrence_two_qubit(&bell_state()).unwrap(),
            1.0,
            epsilon = 1e-10
        );
        assert!(matches!(
            concurrence_two_qubit(&DensityMatrix::maximally_mixed(3)),
            Err(ResourceError::WrongDimension(3))
        ));
    }

    #[test]
    fn concurrence_coincides_with_closed_form_and_negativity() {
        for name in ["gamma-lt2", "gamma-ge2"] {
            let h = preset(name);
            for k in 0..20 {
                let kappa = 0.25 + 0.75 * k as f64 / 19.0;
                let opt = optimal_state(&h, kappa).unwrap();
                let wootters = concurrence_two_qubit(&opt.state).unwrap();
                let closed = concurrence_optimal_closed(&opt).unwrap();
                let neg = negativity(&opt.state, 2, 2).unwrap();
                assert!(
                    (wootters - closed).abs() <= 1e-10,
                    "{name} kappa={kappa}: wootters {wootters} closed {closed}"
                );
                assert!(
                    (closed - neg).abs() <= 1e-10,
                    "{name} kappa={kappa}: closed {closed} negativity {neg}"
                );
            }
        }
    }

    #[test]
    fn disentangled_below_kappa0_constant_on_the_pair_band() {
        let h = preset("gamma-lt2");
        for kappa in [0.25, 0.3, 0.35, 0.375] {
            let opt = optimal_state(&h, kappa).unwrap();
            assert!(concurrence_optimal_closed(&opt).unwrap() <= 1e-12);
            assert!(negativity(&opt.state, 2, 2).unwrap() <= 1e-10);
        }
        for kappa in [0.5, 0.52, 0.54, 5.0 / 9.0] {
            let opt = optimal_state(&h, kappa).unwrap();
            assert_abs_diff_eq!(
                concurrence_optimal_closed(&opt).unwrap(),
                1.0 / 3.0,
                epsilon = 1e-10
            );
        }
        assert_abs_diff_eq!(
            concurrence_optimal_closed(&optimal_state(&h, 1.0).unwrap()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn negativity_is_monotone_and_flat_where_expected() {
        // Ramp regime (γ₁ ≥ 2): negativity never decreases with purity.
        let h = preset("gamma-ge2");
        let mut last = -1.0f64;
        for k in 0..60 {
            let kappa = 0.25 + 0.75 * k as f64 / 59.0;
            let n = negativity(&optimal_state(&h, kappa).unwrap().state, 2, 2).unwrap();
            assert!(n >= last - 1e-10, "negativity dipped at kappa = {kappa}");
            last = n;
        }
        // Split regime: constant across the pair band.
        let h2 = preset("gamma-lt2");
        let p = regime_params(&h2).unwrap();
        let at = |k: f64| negativity(&optimal_state(&h2, k).unwrap().state, 2, 2).unwrap();
        let base = at(p.kappa1);
        for frac in [0.25, 0.5, 0.75, 1.0] {
            let k = p.kappa1 + (p.kappa2 - p.kappa1) * frac;
            assert_abs_diff_eq!(at(k), base, epsilon = 1e-10);
        }
    }

    #[test]
    fn separable_decomposition_reconstructs_the_low_band() {
        // d = 4 at the band edge, d = 6 strictly inside.
        let h4 = preset("gamma-lt2");
        let dec = separable_decomposition(&h4, 0.375, 2, 2, 0.4).unwrap();
        assert!(dec.residual() <= 1e-10, "residual {}", dec.residual());
        for term in &dec.terms {
            assert!(term.weight >= 0.0);
            DensityMatrix::validate(term.factor_a.matrix().clone()).unwrap();
            DensityMatrix::validate(term.factor_b.matrix().clone()).unwrap();
        }

        let h6 = Hamiltonian::new(vec![0.0, 0.1, 0.2, 1.2, 1.3, std::f64::consts::SQRT_2]).unwrap();
        let dec6 = separable_decomposition(&h6, 0.19, 2, 3, 0.0).unwrap();
        assert!(dec6.residual() <= 1e-10);

        // At κ = 1/d the decomposition is the bare diagonal product sum.
        let uniform = separable_decomposition(&h4, 0.25, 2, 2, 0.0).unwrap();
        assert_eq!(uniform.terms.len(), 4);
        assert!(uniform
            .terms
            .iter()
            .all(|t| (t.weight - 0.25).abs() <= 1e-15));
        assert!(uniform.residual() <= 1e-14);

        assert!(matches!(
            separable_decomposition(&h4, 0.5, 2, 2, 0.0),
            Err(ResourceError::OutOfBand { .. })
        ));
    }

    #[test]
    fn one_qubit_reductions_of_optimal_states_are_maximally_mixed() {
        // d = 4 (two qubits) and d = 8 (three qubits): tracing all other
        // qubits leaves 𝕀/2 at every purity.
        let h4 = preset("gamma-lt2");
        for kappa in [0.3, 0.5, 0.8, 1.0] {
            let opt = optimal_state(&h4, kappa).unwrap();
            for keep in [Subsystem::First, Subsystem::Second] {
                let red = partial_trace(opt.state.matrix(), 2, 2, keep).unwrap();
                assert!((red - CMatrix::identity(2, 2).unscale(2.0)).norm() <= 1e-12);
            }
        }
        let energies: Vec<f64> = (0..8)
            .map(|i| std::f64::consts::SQRT_2 * i as f64 / 7.0)
            .collect();
        let h8 = Hamiltonian::new(energies).unwrap();
        for kappa in [0.2, 0.5, 0.9] {
            let opt = optimal_state(&h8, kappa).unwrap();
            // First qubit: split 2×4; last qubit: split 4×2.
            let first = partial_trace(opt.state.matrix(), 2, 4, Subsystem::First).unwrap();
            let last = partial_trace(opt.state.matrix(), 4, 2, Subsystem::Second).unwrap();
            // Middle qubit: trace out the first (2×4), then keep the first
            // of the remaining 2×2 split.
            let tail = partial_trace(opt.state.matrix(), 2, 4, Subsystem::Second).unwrap();
            let middle = partial_trace(&tail, 2, 2, Subsystem::First).unwrap();
            for red in [first, last, middle] {
                assert!((red - CMatrix::identity(2, 2).unscale(2.0)).norm() <= 1e-10);
            }
        }
    }
}
