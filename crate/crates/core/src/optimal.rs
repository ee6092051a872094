//! Closed-form maximal-speed states at fixed purity.
//!
//! Every maximizer is a persymmetric X-state: nonzero entries live only on
//! the main and secondary diagonals, with ϱ_ij = ϱ_{d−j+1,d−i+1}. Which
//! secondary-diagonal coherences activate is decided by the purity band
//! and by the spectrum ratio γ₁ = ω₁d²/ω₂,d₋₁²:
//!
//! - `[1/d, κ₀]` with κ₀ = 1/d + 2/d²: uniform diagonal plus the single
//!   corner coherence |ϱ_1d| = √((κ−1/d)/2);
//! - `[κ₀, 1]` for γ₁ ≥ 2 (and all of `[κ₀, 1]` when d ≤ 3): weight
//!   2(1/d+x) on Ψ₁ = (|E₁⟩+e^{−iθ₁}|E_d⟩)/√2 over a uniform remainder;
//! - γ₁ < 2 splits further at κ₁ and κ₂: on `[κ₁, κ₂]` the pair coherence
//!   |ϱ_{2,d−1}| = √((κ−κ₁)/2) turns on at frozen x = x₀, and on
//!   `[κ₂, 1]` (closed-form for d = 4) the state is a two-projector
//!   mixture of Ψ₁ and Ψ₂;
//! - d > 4 with γ₁ < 2 and κ > κ₂ has no closed form here; the numeric
//!   ascent restricted to the persymmetric X ansatz stands in, labelled
//!   [`Regime::NumericFallback`].

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg::{CMatrix, DensityMatrix, Hamiltonian, LinalgError};
use crate::oracle::{self, Ansatz, OracleError};
use crate::speed::squared_speed;

/// Purity excursions below 1/d or above 1 up to this size are clamped;
/// anything larger is an error.
pub const KAPPA_CLAMP: f64 = 1e-12;

/// Seed and restart budget of the deterministic numeric fallback
/// constructor (d > 4, γ₁ < 2, κ > κ₂).
const FALLBACK_SEED: u64 = 0x51f1_5eed_0001;
const FALLBACK_RESTARTS: u32 = 16;

#[derive(Debug, Clone, Error)]
pub enum OptimalError {
    #[error("purity {0} outside [1/{1}, 1]")]
    OutOfRange(f64, usize),
    #[error("degenerate spectrum: the extremal gap vanishes")]
    DegenerateSpectrum,
    #[error("purity {kappa} below the band edge kappa0 = {kappa0}")]
    OutOfBand { kappa: f64, kappa0: f64 },
    #[error("threshold ratio {0} outside the open interval (1, 2)")]
    GammaOutOfRange(f64),
    #[error("stationarity check failed: {0}")]
    KktViolation(String),
    #[error("stationarity conditions are not defined for regime {0:?}")]
    KktUnsupported(Regime),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("numeric fallback failed: {0}")]
    Fallback(#[from] OracleError),
}

/// Purity band the constructed state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// κ ∈ [1/d, κ₀]: uniform diagonal, single corner coherence.
    LowPurity,
    /// κ ∈ [κ₀, κ₁]: Ψ₁ weight ramp (the whole of [κ₀, 1] when γ₁ ≥ 2 or d ≤ 3).
    Gamma1Ge2,
    /// γ₁ < 2, κ ∈ [κ₁, κ₂]: second pair coherence active at frozen x₀.
    MidBand,
    /// γ₁ < 2, κ ∈ [κ₂, 1], d = 4: mixture of the two pair projectors.
    TopBand,
    /// γ₁ < 2, κ > κ₂, d > 4: numeric ascent over the persymmetric X ansatz.
    NumericFallback,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::LowPurity => "LowPurity",
            Regime::Gamma1Ge2 => "Gamma1Ge2",
            Regime::MidBand => "MidBand",
            Regime::TopBand => "TopBand",
            Regime::NumericFallback => "NumericFallback",
        }
    }
}

/// Spectrum-derived threshold bundle classifying a (H, κ) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeParams {
    pub dim: usize,
    /// κ₀ = 1/d + 2/d², independent of the spectrum.
    pub kappa0: f64,
    /// Lower edge of the pair-coherence band; 1 when γ₁ ≥ 2 or d ≤ 3.
    pub kappa1: f64,
    /// Upper edge of the pair-coherence band; 1 when γ₁ ≥ 2 or d ≤ 3.
    pub kappa2: f64,
    /// γ_i = ω₁d²/ω_{i+1,d−i}² for i = 1..⌊d/2⌋−1 (empty for d ≤ 3).
    pub gamma: Vec<f64>,
    /// Frozen band parameter x₀; set only when 1 < γ₁ ≤ 2 and d ≥ 4.
    pub x0: Option<f64>,
}

impl RegimeParams {
    pub fn gamma1(&self) -> Option<f64> {
        self.gamma.first().copied()
    }

    /// True when the pair-coherence bands [κ₁, κ₂] and beyond exist.
    pub fn has_split_bands(&self) -> bool {
        self.dim >= 4 && self.gamma1().is_some_and(|g| g < 2.0)
    }
}

/// κ-independent regime thresholds for a spectrum.
///
/// For d ≥ 4 and γ₁ < 2 the thresholds are computed both from the γ₁
/// rational forms and from the x₀ substitution into the purity relation;
/// the two routes must agree to 1e-12.
pub fn regime_params(h: &Hamiltonian) -> Result<RegimeParams, OptimalError> {
    let d = h.dim();
    if d < 2 {
        return Err(OptimalError::OutOfRange(0.0, d));
    }
    let w1d = h.max_gap();
    if w1d <= 0.0 {
        return Err(OptimalError::DegenerateSpectrum);
    }
    let df = d as f64;
    let kappa0 = 1.0 / df + 2.0 / (df * df);
    let mut gamma = Vec::new();
    for i in 1..d / 2 {
        let w = h.bohr(i, d - 1 - i);
        gamma.push(if w > 0.0 {
            (w1d / w).powi(2)
        } else {
            f64::INFINITY
        });
    }
    let gamma1 = gamma.first().copied();
    let (kappa1, kappa2, x0) = match gamma1 {
        Some(g1) if d >= 4 && g1 <= 2.0 => {
            let x0 = x0_formula(g1, d);
            let k1_x0 = purity_of_x(x0, d);
            let k2_x0 = k1_x0 + 2.0 * (1.0 / df - 2.0 * x0 / (df - 2.0)).powi(2);
            // Rational forms in γ₁ for the same thresholds.
            let denom = (2.0 * (df - 1.0) - (df - 2.0) * g1).powi(2);
            let k1 = (4.0 + (df - 2.0) * (2.0 - g1).powi(2)) / denom;
            let k2 = (4.0 + df * (2.0 - g1).powi(2)) / denom;
            assert!(
                (k1 - k1_x0).abs() <= 1e-12 && (k2 - k2_x0).abs() <= 1e-12,
                "threshold cross-check failed: {k1} vs {k1_x0}, {k2} vs {k2_x0}"
            );
            (k1, k2, Some(x0))
        }
        _ => (1.0, 1.0, None),
    };
    Ok(RegimeParams {
        dim: d,
        kappa0,
        kappa1,
        kappa2,
        gamma,
        x0,
    })
}

/// κ = 4(1/d + x)² + (d−2)(1/d − 2x/(d−2))², the purity of the Ψ₁-ramp
/// state at band parameter x.
fn purity_of_x(x: f64, d: usize) -> f64 {
    let df = d as f64;
    4.0 * (1.0 / df + x).powi(2) + (df - 2.0) * (1.0 / df - 2.0 * x / (df - 2.0)).powi(2)
}

fn x0_formula(gamma1: f64, d: usize) -> f64 {
    let df = d as f64;
    (gamma1 - 1.0) / (df * (2.0 * (df - 1.0) / (df - 2.0) - gamma1))
}

/// Positive solution x ∈ [0, (d−2)/(2d)] of the purity relation
/// κ = 4(1/d+x)² + (d−2)(1/d − 2x/(d−2))², monotone increasing in κ.
pub fn x_of_kappa(kappa: f64, d: usize) -> Result<f64, OptimalError> {
    let df = d as f64;
    let kappa0 = 1.0 / df + 2.0 / (df * df);
    if kappa < kappa0 - KAPPA_CLAMP {
        return Err(OptimalError::OutOfBand { kappa, kappa0 });
    }
    if d == 2 {
        // κ₀ = 1 for d = 2: the band is the single point κ = 1 with x = 0.
        return Ok(0.0);
    }
    let arg = ((df - 1.0) * kappa - 1.0) / (df - 2.0);
    let x = (df - 2.0) / (2.0 * df * (df - 1.0)) * (-1.0 + df * arg.max(0.0).sqrt());
    Ok(x.clamp(0.0, (df - 2.0) / (2.0 * df)))
}

/// Frozen band parameter x₀ = (γ₁−1) / (d·[2(d−1)/(d−2) − γ₁]) for
/// 1 < γ₁ < 2.
pub fn x0_of_gamma(gamma1: f64, d: usize) -> Result<f64, OptimalError> {
    if !(gamma1 > 1.0 && gamma1 < 2.0) {
        return Err(OptimalError::GammaOutOfRange(gamma1));
    }
    Ok(x0_formula(gamma1, d))
}

/// A maximal-speed state with its construction metadata.
#[derive(Debug, Clone)]
pub struct OptimalState {
    pub state: DensityMatrix,
    pub regime: Regime,
    /// Which construction produced the state.
    pub construction: &'static str,
    pub theta1: f64,
    pub theta2: f64,
    /// Requested purity.
    pub kappa: f64,
    /// Band parameter x = ϱ₁₁ − 1/d where the Ψ₁-ramp parametrization
    /// applies; None for the numeric fallback.
    pub x: Option<f64>,
}

impl OptimalState {
    /// Largest magnitude of an entry off the main and secondary diagonals,
    /// plus the worst persymmetry defect ϱ_ij − ϱ_{d−j+1,d−i+1}.
    pub fn x_structure_residual(&self) -> f64 {
        persym_x_residual(self.state.matrix())
    }
}

/// Max deviation of a matrix from the persymmetric X pattern.
pub fn persym_x_residual(m: &CMatrix) -> f64 {
    let d = m.nrows();
    let mut res = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            if i != j && i + j != d - 1 {
                res = res.max(m[(i, j)].norm());
            }
            res = res.max((m[(i, j)] - m[(d - 1 - j, d - 1 - i)]).norm());
        }
    }
    res
}

fn clamp_kappa(kappa: f64, d: usize) -> Result<f64, OptimalError> {
    let lo = 1.0 / d as f64;
    if kappa < lo - KAPPA_CLAMP || kappa > 1.0 + KAPPA_CLAMP {
        return Err(OptimalError::OutOfRange(kappa, d));
    }
    Ok(kappa.clamp(lo, 1.0))
}

/// Build a persymmetric X matrix from pair data: diagonal value and
/// coherence per (i, d−1−i) pair, plus the centre value for odd d.
fn build_persym_x(
    d: usize,
    pair_diag: &[f64],
    pair_coh: &[C64],
    center: Option<f64>,
) -> DensityMatrix {
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d / 2 {
        let j = d - 1 - i;
        m[(i, i)] = C64::new(pair_diag[i], 0.0);
        m[(j, j)] = C64::new(pair_diag[i], 0.0);
        m[(i, j)] = pair_coh[i];
        m[(j, i)] = pair_coh[i].conj();
    }
    if d % 2 == 1 {
        m[(d / 2, d / 2)] = C64::new(center.expect("centre value required for odd d"), 0.0);
    }
    DensityMatrix::trusted(m)
}

/// Evaluate one band's construction at a given purity, regardless of which
/// band the purity belongs to. Useful for checking that adjacent branch
/// formulas agree entrywise at the shared band edges κ₀, κ₁, κ₂; square
/// roots of (κ − edge) are clamped at zero just outside the band.
pub fn band_state_at(
    h: &Hamiltonian,
    kappa: f64,
    regime: Regime,
    theta1: f64,
    theta2: f64,
) -> Result<OptimalState, OptimalError> {
    let d = h.dim();
    let kappa = clamp_kappa(kappa, d)?;
    let params = regime_params(h)?;
    let df = d as f64;
    let inv_d = 1.0 / df;

    let psi1_ramp = |x: f64, extra_coh: f64, regime: Regime, construction: &'static str| {
        let outer = inv_d + x;
        let inner = inv_d - 2.0 * x / (df - 2.0);
        let mut pair_diag = vec![inner; d / 2];
        let mut pair_coh = vec![C64::new(0.0, 0.0); d / 2];
        pair_diag[0] = outer;
        pair_coh[0] = C64::from_polar(outer, theta1);
        if d / 2 >= 2 {
            pair_coh[1] = C64::from_polar(extra_coh, theta2);
        }
        let center = (d % 2 == 1).then_some(inner);
        let state = build_persym_x(d, &pair_diag, &pair_coh, center);
        OptimalState {
            state,
            regime,
            construction,
            theta1,
            theta2,
            kappa,
            x: Some(x),
        }
    };

    match regime {
        Regime::LowPurity => {
            // Uniform diagonal with the single corner coherence
            // |ϱ_1d| = √((κ−1/d)/2).
            let corner = ((kappa - inv_d) / 2.0).max(0.0).sqrt();
            let mut pair_coh = vec![C64::new(0.0, 0.0); d / 2];
            if d >= 2 {
                pair_coh[0] = C64::from_polar(corner, theta1);
            }
            let state = build_persym_x(
                d,
                &vec![inv_d; d / 2],
                &pair_coh,
                (d % 2 == 1).then_some(inv_d),
            );
            Ok(OptimalState {
                state,
                regime: Regime::LowPurity,
                construction: "uniform-diagonal-corner",
                theta1,
                theta2,
                kappa,
                x: Some(0.0),
            })
        }
        Regime::Gamma1Ge2 => {
            let x = x_of_kappa(kappa, d)?;
            Ok(psi1_ramp(x, 0.0, Regime::Gamma1Ge2, "psi1-weight-ramp"))
        }
        Regime::MidBand => {
            let x0 = params.x0.ok_or(OptimalError::GammaOutOfRange(
                params.gamma1().unwrap_or(f64::NAN),
            ))?;
            let coh = ((kappa - params.kappa1) / 2.0).max(0.0).sqrt();
            Ok(psi1_ramp(
                x0,
                coh,
                Regime::MidBand,
                "frozen-x0-pair-coherence",
            ))
        }
        Regime::TopBand => {
            if d != 4 {
                return Err(OptimalError::OutOfRange(kappa, d));
            }
            // Two-projector mixture: weights (1 ± √(2κ−1))/2 on Ψ₁ and Ψ₂.
            let s = (2.0 * kappa - 1.0).max(0.0).sqrt();
            let p_half = (1.0 + s) / 4.0;
            let q_half = (1.0 - s) / 4.0;
            let state = build_persym_x(
                4,
                &[p_half, q_half],
                &[
                    C64::from_polar(p_half, theta1),
                    C64::from_polar(q_half, theta2),
                ],
                None,
            );
            Ok(OptimalState {
                state,
                regime: Regime::TopBand,
                construction: "two-projector-mixture",
                theta1,
                theta2,
                kappa,
                x: Some(p_half - inv_d),
            })
        }
        Regime::NumericFallback => Err(OptimalError::KktUnsupported(regime)),
    }
}

/// Closed-form constructor; `None` when the (d > 4, γ₁ < 2, κ > κ₂) gap is
/// hit. Shared by [`optimal_state`] and by the oracle's restart seeding.
pub(crate) fn closed_form_state(
    h: &Hamiltonian,
    kappa: f64,
    theta1: f64,
    theta2: f64,
) -> Result<Option<OptimalState>, OptimalError> {
    let d = h.dim();
    let kappa = clamp_kappa(kappa, d)?;
    let params = regime_params(h)?;
    let regime = if kappa <= params.kappa0 {
        Regime::LowPurity
    } else if !params.has_split_bands() || kappa <= params.kappa1 {
        Regime::Gamma1Ge2
    } else if kappa <= params.kappa2 {
        Regime::MidBand
    } else if d == 4 {
        Regime::TopBand
    } else {
        return Ok(None);
    };
    band_state_at(h, kappa, regime, theta1, theta2).map(Some)
}

/// The maximal-speed state at purity κ with both free phases set to 0.
pub fn optimal_state(h: &Hamiltonian, kappa: f64) -> Result<OptimalState, OptimalError> {
    optimal_state_with_phases(h, kappa, 0.0, 0.0)
}

/// The maximal-speed state at purity κ. θ₁ and θ₂ rotate the two pair
/// coherences and are otherwise free.
///
/// Outside the closed-form bands (d > 4, γ₁ < 2, κ > κ₂) the state comes
/// from the deterministic numeric ascent over the persymmetric X ansatz
/// and is flagged [`Regime::NumericFallback`].
pub fn optimal_state_with_phases(
    h: &Hamiltonian,
    kappa: f64,
    theta1: f64,
    theta2: f64,
) -> Result<OptimalState, OptimalError> {
    if let Some(state) = closed_form_state(h, kappa, theta1, theta2)? {
        return Ok(state);
    }
    let kappa = clamp_kappa(kappa, h.dim())?;
    let result =
        oracle::max_speed_bruteforce(h, kappa, FALLBACK_RESTARTS, FALLBACK_SEED, Ansatz::PersymX)?;
    Ok(OptimalState {
        state: result.argmax,
        regime: Regime::NumericFallback,
        construction: "persym-x-numeric-ascent",
        theta1,
        theta2,
        kappa,
        x: None,
    })
}

/// Maximal squared speed at purity κ, from the band closed forms:
/// (κ−1/d)ω₁d² below κ₀, then 2(1/d+x)²ω₁d² on the Ψ₁ ramp,
/// 2(1/d+x₀)²ω₁d² + (κ−κ₁)ω₂,d₋₁² on the pair band, and the two-projector
/// value for the d = 4 top band.
pub fn optimal_speed(h: &Hamiltonian, kappa: f64) -> Result<f64, OptimalError> {
    let d = h.dim();
    let kappa = clamp_kappa(kappa, d)?;
    let params = regime_params(h)?;
    let df = d as f64;
    let w1d_sq = h.max_gap().powi(2);
    if kappa <= params.kappa0 {
        return Ok((kappa - 1.0 / df) * w1d_sq);
    }
    if !params.has_split_bands() || kappa <= params.kappa1 {
        let x = x_of_kappa(kappa, d)?;
        return Ok(2.0 * (1.0 / df + x).powi(2) * w1d_sq);
    }
    let x0 = params.x0.expect("split bands imply x0");
    let w2_sq = h.bohr(1, d - 2).powi(2);
    if kappa <= params.kappa2 {
        return Ok(2.0 * (1.0 / df + x0).powi(2) * w1d_sq + (kappa - params.kappa1) * w2_sq);
    }
    if d == 4 {
        let s = (2.0 * kappa - 1.0).max(0.0).sqrt();
        let p_half = (1.0 + s) / 4.0;
        let q_half = (1.0 - s) / 4.0;
        return Ok(2.0 * p_half * p_half * w1d_sq + 2.0 * q_half * q_half * w2_sq);
    }
    let state = optimal_state(h, kappa)?;
    Ok(squared_speed(h, &state.state)?)
}

/// Stationarity report for a closed-form candidate.
#[derive(Debug, Clone)]
pub struct KktReport {
    /// Multiplier recovered from the ramp stationarity (or forced to
    /// ω₂,d₋₁² when the second pair coherence is active).
    pub mu: f64,
    /// Feasible window [ω₁d²/2, ω₁d²] for the multiplier.
    pub mu_lower: f64,
    pub mu_upper: f64,
    /// Per interior pair (i, j), 1-based: (i, j, |ϱ_ij|, |μ − ω_ij²|).
    /// Stationarity requires the coherence or the mismatch to vanish.
    pub pair_conditions: Vec<(usize, usize, f64, f64)>,
    /// Ω_j² = ω_1j² + ω_jd² for j = 2..d−1 (1-based): each is strictly
    /// below ω₁d², which is what forbids first-row coherences ϱ_1j.
    pub row_exclusion: Vec<(usize, f64)>,
}

/// Verify the Lagrange stationarity conditions on a closed-form candidate.
///
/// The multiplier is recovered from the ramp condition
/// x[2(d−1)/(d−2)·μ − ω₁d²] = (1/d)(ω₁d² − μ) using the candidate's
/// x = ϱ₁₁ − 1/d, except on the two-projector band where the active pair
/// coherence pins μ = ω₂,d₋₁² directly. μ must land in [ω₁d²/2, ω₁d²]; the
/// window is tight, saturating at κ = 1 (lower) and κ = κ₀ (upper).
pub fn kkt_check(h: &Hamiltonian, candidate: &OptimalState) -> Result<KktReport, OptimalError> {
    let d = h.dim();
    if candidate.state.dim() != d {
        return Err(LinalgError::DimensionMismatch(candidate.state.dim(), d).into());
    }
    if candidate.regime == Regime::NumericFallback {
        return Err(OptimalError::KktUnsupported(candidate.regime));
    }
    let w1d_sq = h.max_gap().powi(2);
    if w1d_sq <= 0.0 {
        return Err(OptimalError::DegenerateSpectrum);
    }
    let df = d as f64;
    let tol_mu = 1e-9 * w1d_sq.max(1.0);

    let mu = if candidate.regime == Regime::TopBand {
        h.bohr(1, d - 2).powi(2)
    } else {
        let x = candidate.state.entry(0, 0).re - 1.0 / df;
        if x.abs() < 1e-14 {
            // Ramp at x = 0: the condition degenerates to μ = ω₁d².
            w1d_sq
        } else {
            let denom = 2.0 * (df - 1.0) * x / (df - 2.0) + 1.0 / df;
            w1d_sq * (x + 1.0 / df) / denom
        }
    };
    if mu < w1d_sq / 2.0 - tol_mu || mu > w1d_sq + tol_mu {
        return Err(OptimalError::KktViolation(format!(
            "multiplier {mu} outside [{}, {}]",
            w1d_sq / 2.0,
            w1d_sq
        )));
    }

    let mut pair_conditions = Vec::new();
    for i in 1..d - 1 {
        for j in (i + 1)..d - 1 {
            let coh = candidate.state.entry(i, j).norm();
            let mismatch = (mu - h.bohr(i, j).powi(2)).abs();
            if coh > 1e-12 && mismatch > tol_mu {
                return Err(OptimalError::KktViolation(format!(
                    "active coherence at ({}, {}) with multiplier mismatch {mismatch:.3e}",
                    i + 1,
                    j + 1
                )));
            }
            pair_conditions.push((i + 1, j + 1, coh, mismatch));
        }
    }

    let mut row_exclusion = Vec::new();
    for j in 1..d - 1 {
        let omega_sq = h.bohr(0, j).powi(2) + h.bohr(j, d - 1).powi(2);
        if omega_sq > w1d_sq + 1e-12 {
            return Err(OptimalError::KktViolation(format!(
                "row exclusion failed at j = {}: {omega_sq} > {w1d_sq}",
                j + 1
            )));
        }
        row_exclusion.push((j + 1, omega_sq));
    }

    Ok(KktReport {
        mu,
        mu_lower: w1d_sq / 2.0,
        mu_upper: w1d_sq,
        pair_conditions,
        row_exclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn preset(name: &str) -> Hamiltonian {
        Hamiltonian::new(crate::cli::preset_energies(name).unwrap()).unwrap()
    }

    fn equal_spaced(d: usize) -> Hamiltonian {
        let energies = (0..d)
            .map(|i| std::f64::consts::SQRT_2 * i as f64 / (d - 1) as f64)
            .collect();
        Hamiltonian::new(energies).unwrap()
    }

    #[test]
    fn thresholds_for_the_reference_spectra() {
        // γ₁ = 3/2 gives κ₁ = 1/2, κ₂ = 5/9, x₀ = 1/12; κ₀ = 3/8 for d = 4.
        let p = regime_params(&preset("gamma-lt2")).unwrap();
        assert_abs_diff_eq!(p.gamma1().unwrap(), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.kappa0, 0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(p.kappa1, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.kappa2, 5.0 / 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.x0.unwrap(), 1.0 / 12.0, epsilon = 1e-14);

        let q = regime_params(&preset("gamma-ge2")).unwrap();
        assert_abs_diff_eq!(q.gamma1().unwrap(), 2.5, epsilon = 1e-12);
        assert_eq!((q.kappa1, q.kappa2), (1.0, 1.0));
        assert!(q.x0.is_none());
    }

    #[test]
    fn threshold_ordering_when_bands_split() {
        let p = regime_params(&preset("gamma-lt2")).unwrap();
        assert!(p.kappa0 <= p.kappa1 && p.kappa1 <= p.kappa2 && p.kappa2 <= 1.0);
        // γ ratios increase with pair depth for a d = 6 spectrum.
        let h6 = Hamiltonian::new(vec![0.0, 0.1, 0.4, 1.0, 1.3, std::f64::consts::SQRT_2]).unwrap();
        let p6 = regime_params(&h6).unwrap();
        assert_eq!(p6.gamma.len(), 2);
        assert!(p6.gamma[0] < p6.gamma[1]);
    }

    #[test]
    fn gamma_exactly_two_merges_the_bands() {
        // ω₂₃ = ω₁₄/√2 gives γ₁ = 2: x₀ = (d−2)/(2d) and κ₁ = κ₂ = 1, so the
        // pair band vanishes and the ramp covers [κ₀, 1] from either side.
        let w = 2.0;
        let inner = std::f64::consts::SQRT_2;
        let e1 = (w - inner) / 2.0;
        let h = Hamiltonian::new(vec![0.0, e1, e1 + inner, w]).unwrap();
        let p = regime_params(&h).unwrap();
        assert_abs_diff_eq!(p.gamma1().unwrap(), 2.0, epsilon = 1e-12);
        if let Some(x0) = p.x0 {
            assert_abs_diff_eq!(x0, 0.25, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(p.kappa1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.kappa2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn x_of_kappa_band_edges_and_monotonicity() {
        assert_abs_diff_eq!(x_of_kappa(0.375, 4).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x_of_kappa(1.0, 4).unwrap(), 0.25, epsilon = 1e-14);
        // κ = 0.5, d = 4: ϱ₁₁ = (1 + √(6κ−2))/6 = 1/3, so x = 1/3 − 1/4.
        assert_abs_diff_eq!(
            x_of_kappa(0.5, 4).unwrap(),
            1.0 / 3.0 - 0.25,
            epsilon = 1e-14
        );
        let mut last = -1.0;
        for k in 0..100 {
            let kappa = 0.375 + 0.625 * k as f64 / 99.0;
            let x = x_of_kappa(kappa, 4).unwrap();
            assert!(x > last, "x must increase with purity");
            last = x;
            assert_abs_diff_eq!(purity_of_x(x, 4), kappa, epsilon = 1e-12);
        }
        assert!(matches!(
            x_of_kappa(0.3, 4),
            Err(OptimalError::OutOfBand { .. })
        ));
    }

    #[test]
    fn x0_of_gamma_edges() {
        assert_abs_diff_eq!(x0_of_gamma(1.5, 4).unwrap(), 1.0 / 12.0, epsilon = 1e-15);
        assert!(x0_of_gamma(1.0 + 1e-12, 4).unwrap() < 1e-11);
        assert_abs_diff_eq!(x0_of_gamma(2.0 - 1e-12, 4).unwrap(), 0.25, epsilon = 1e-10);
        assert!(matches!(
            x0_of_gamma(2.0, 4),
            Err(OptimalError::GammaOutOfRange(_))
        ));
        assert!(matches!(
            x0_of_gamma(0.9, 4),
            Err(OptimalError::GammaOutOfRange(_))
        ));
    }

    #[test]
    fn qubit_state_and_speed() {
        let h = Hamiltonian::new(vec![0.0, 1.0]).unwrap();
        let opt = optimal_state(&h, 0.75).unwrap();
        assert_eq!(opt.regime, Regime::LowPurity);
        assert_abs_diff_eq!(opt.state.entry(0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            opt.state.entry(0, 1).norm(),
            (0.25f64 / 2.0).sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(optimal_speed(&h, 0.75).unwrap(), 0.25, epsilon = 1e-15);
        // κ = 1 lands exactly on the pure Ψ₁ projector.
        let pure = optimal_state(&h, 1.0).unwrap();
        assert_abs_diff_eq!(pure.state.purity(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn qutrit_band_edge_continuity() {
        // κ₀ = 5/9 for d = 3: the corner construction and the ramp give the
        // same state there, with ϱ₁₁ = |ϱ₁₃| = ϱ₂₂ = 1/3.
        let h = equal_spaced(3);
        let low = band_state_at(&h, 5.0 / 9.0, Regime::LowPurity, 0.0, 0.0).unwrap();
        let high = band_state_at(&h, 5.0 / 9.0, Regime::Gamma1Ge2, 0.0, 0.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((low.state.entry(i, j) - high.state.entry(i, j)).norm() <= 1e-10);
            }
        }
        assert_abs_diff_eq!(low.state.entry(0, 0).re, 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(low.state.entry(0, 2).norm(), 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(low.state.entry(1, 1).re, 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn d4_mid_band_entries() {
        // γ₁ = 3/2, κ = 0.53 ∈ [1/2, 5/9]: ϱ₁₁ = 1/3, |ϱ₂₃| = √(0.03/2).
        let h = preset("gamma-lt2");
        let opt = optimal_state(&h, 0.53).unwrap();
        assert_eq!(opt.regime, Regime::MidBand);
        assert_abs_diff_eq!(opt.state.entry(0, 0).re, 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            opt.state.entry(1, 2).norm(),
            (0.03f64 / 2.0).sqrt(),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(opt.state.purity(), 0.53, epsilon = 1e-12);
    }

    #[test]
    fn d4_full_range_purity_and_structure() {
        for name in ["gamma-lt2", "gamma-ge2"] {
            let h = preset(name);
            for k in 0..60 {
                let kappa = 0.25 + 0.75 * k as f64 / 59.0;
                let opt = optimal_state(&h, kappa).unwrap();
                assert!(
                    (opt.state.purity() - kappa).abs() <= 1e-10,
                    "purity drift at {kappa} ({name})"
                );
                assert!(opt.x_structure_residual() <= 1e-12);
                let direct = squared_speed(&h, &opt.state).unwrap();
                let closed = optimal_speed(&h, kappa).unwrap();
                assert!(
                    (direct - closed).abs() <= 1e-12,
                    "speed mismatch at {kappa}: {direct} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn adjacent_branch_formulas_agree_at_every_threshold() {
        let h = preset("gamma-lt2");
        let p = regime_params(&h).unwrap();
        let edges = [
            (p.kappa0, Regime::LowPurity, Regime::Gamma1Ge2),
            (p.kappa1, Regime::Gamma1Ge2, Regime::MidBand),
            (p.kappa2, Regime::MidBand, Regime::TopBand),
        ];
        for (edge, lower, upper) in edges {
            let below = band_state_at(&h, edge, lower, 0.0, 0.0).unwrap();
            let above = band_state_at(&h, edge, upper, 0.0, 0.0).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        (below.state.entry(i, j) - above.state.entry(i, j)).norm() <= 1e-10,
                        "branch mismatch at kappa = {edge}, entry ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn rank_ladder() {
        let h = preset("gamma-lt2");
        let p = regime_params(&h).unwrap();
        assert_eq!(optimal_state(&h, p.kappa0).unwrap().state.rank(), 3);
        assert_eq!(optimal_state(&h, 0.52).unwrap().state.rank(), 3);
        assert_eq!(optimal_state(&h, p.kappa2).unwrap().state.rank(), 2);
        assert_eq!(optimal_state(&h, 1.0).unwrap().state.rank(), 1);
        assert_eq!(optimal_state(&h, 0.25).unwrap().state.rank(), 4);
    }

    #[test]
    fn kernel_vectors_where_corner_saturates() {
        // Wherever ϱ₁₁ = |ϱ₁d|, Ψ₁ is an eigenvector with eigenvalue 2ϱ₁₁
        // and Ψ₁^⊥ is in the kernel.
        let h = preset("gamma-ge2");
        let theta1 = 0.7;
        let opt = optimal_state_with_phases(&h, 0.6, theta1, 0.0).unwrap();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = nalgebra::DVector::from_element(4, C64::new(0.0, 0.0));
        psi[0] = C64::new(inv_sqrt2, 0.0);
        psi[3] = C64::from_polar(inv_sqrt2, -theta1);
        let mut psi_perp = psi.clone();
        psi_perp[3] = -psi_perp[3];
        let rho_psi = opt.state.matrix() * &psi;
        let expected = psi.scale(2.0 * opt.state.entry(0, 0).re);
        assert!((rho_psi - expected).norm() <= 1e-10);
        assert!((opt.state.matrix() * psi_perp).norm() <= 1e-10);
    }

    #[test]
    fn optimal_speed_strictly_increases_with_purity() {
        for name in ["gamma-lt2", "gamma-ge2"] {
            let h = preset(name);
            let mut last = -1.0;
            for k in 0..100 {
                let kappa = 0.25 + 0.75 * k as f64 / 99.0;
                let v = optimal_speed(&h, kappa).unwrap();
                assert!(v > last, "speed must increase: {name} at {kappa}");
                last = v;
            }
        }
    }

    #[test]
    fn low_band_speed_law_and_kappa0_value() {
        for d in 2..=6 {
            let h = equal_spaced(d);
            let df = d as f64;
            let kappa0 = 1.0 / df + 2.0 / (df * df);
            let w_sq = h.max_gap().powi(2);
            assert_abs_diff_eq!(
                optimal_speed(&h, kappa0).unwrap(),
                2.0 / (df * df) * w_sq,
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(optimal_speed(&h, 1.0 / df).unwrap(), 0.0, epsilon = 1e-15);
        }
        // ω₁d = √2 normalizes the pure-state optimum to 1.
        let h4 = equal_spaced(4);
        assert_abs_diff_eq!(optimal_speed(&h4, 1.0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn out_of_range_purity_is_rejected_but_clamped_nearby() {
        let h = equal_spaced(4);
        assert!(matches!(
            optimal_state(&h, 0.2),
            Err(OptimalError::OutOfRange(..))
        ));
        assert!(matches!(
            optimal_state(&h, 1.1),
            Err(OptimalError::OutOfRange(..))
        ));
        assert!(optimal_state(&h, 0.25 - 5e-13).is_ok());
        assert!(optimal_state(&h, 1.0 + 5e-13).is_ok());
        let flat = Hamiltonian::new(vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            optimal_state(&flat, 0.5),
            Err(OptimalError::DegenerateSpectrum)
        ));
    }

    #[test]
    fn kkt_multiplier_window_and_pair_conditions() {
        // Ramp band, γ₁ = 5/2: μ inside the window, no active inner pairs.
        let h = preset("gamma-ge2");
        let opt = optimal_state(&h, 0.7).unwrap();
        let report = kkt_check(&h, &opt).unwrap();
        assert!(report.mu >= report.mu_lower && report.mu <= report.mu_upper);
        assert!(report
            .pair_conditions
            .iter()
            .all(|&(_, _, coh, _)| coh <= 1e-12));

        // Pair band, γ₁ = 3/2: the multiplier is pinned at ω₂₃².
        let h2 = preset("gamma-lt2");
        let mid = optimal_state(&h2, 0.53).unwrap();
        let report = kkt_check(&h2, &mid).unwrap();
        assert_abs_diff_eq!(report.mu, h2.bohr(1, 2).powi(2), epsilon = 1e-9);

        // Corner band at κ₀: the window's upper edge saturates.
        let low = optimal_state(&h2, 0.375).unwrap();
        let report = kkt_check(&h2, &low).unwrap();
        assert_abs_diff_eq!(report.mu, h2.max_gap().powi(2), epsilon = 1e-9);

        // Ω_j² = ω₁j² + ω_jd² stays strictly below ω₁d².
        assert!(report
            .row_exclusion
            .iter()
            .all(|&(_, omega_sq)| omega_sq < h2.max_gap().powi(2)));
    }

    #[test]
    fn numeric_fallback_band_for_d6() {
        // d = 6 with γ₁ < 2: beyond κ₂ there is no closed form.
        let w = std::f64::consts::SQRT_2;
        let inner = 1.2;
        let e1 = (w - inner) / 2.0;
        let h = Hamiltonian::new(vec![0.0, e1, e1 + 0.3, e1 + inner - 0.3, e1 + inner, w]).unwrap();
        let p = regime_params(&h).unwrap();
        assert!(p.gamma1().unwrap() < 2.0 && p.kappa2 < 1.0);
        let kappa = p.kappa2 + 0.6 * (1.0 - p.kappa2);
        let opt = optimal_state(&h, kappa).unwrap();
        assert_eq!(opt.regime, Regime::NumericFallback);
        assert!((opt.state.purity() - kappa).abs() <= 1e-8);
        assert!(opt.x_structure_residual() <= 1e-8);
        // The numeric branch must at least continue the mid-band value.
        let mid_edge = optimal_speed(&h, p.kappa2).unwrap();
        let v = squared_speed(&h, &opt.state).unwrap();
        assert!(v > mid_edge);
    }
}
