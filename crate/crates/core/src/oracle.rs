//! Brute-force maximizer of the squared speed at fixed purity, independent
//! of the closed-form constructors it cross-validates.
//!
//! The search is projected gradient ascent over Hermitian matrices. The
//! analytic gradient of v² = Σ|ϱ_ij|²ω_ij² is the entrywise map
//! ϱ_ij ↦ 2ω_ij²ϱ_ij; after each step the iterate is returned to the
//! feasible set {ϱ ⪰ 0, Tr ϱ = 1, Tr ϱ² = κ} by alternating an exact
//! Bloch-radius rescale with a PSD eigenvalue clip until the joint
//! residual drops below 1e-12. The purity rescale comes first because it
//! is exact; the clip is the expensive half.
//!
//! Restarts are embarrassingly parallel over per-restart derived RNG
//! streams; the reduction (max by value, ties by restart index) is
//! deterministic for any thread count.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{hermitian_eig, CMatrix, DensityMatrix, Hamiltonian, LinalgError};
use crate::optimal;
use crate::sampling;

/// Joint feasibility residual targeted by the alternating projection.
const PROJECTION_TOL: f64 = 1e-12;
/// Purity-constraint residual above which a run is reported as failed.
const CONSTRAINT_TOL: f64 = 1e-8;
/// Backtracking line search: initial and minimal step sizes.
const STEP_INIT: f64 = 0.1;
const STEP_MIN: f64 = 1e-13;

#[derive(Debug, Clone, Error)]
pub enum OracleError {
    #[error("projection failed to meet the purity constraint: residual {residual:.3e}")]
    NoConvergence { residual: f64 },
    #[error(
        "argmax violates the persymmetric X structure: off-pattern {off_pattern:.3e}, \
         diagonal asymmetry {persym_defect:.3e} at entry ({row}, {col})"
    )]
    StructureViolation {
        off_pattern: f64,
        persym_defect: f64,
        row: usize,
        col: usize,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Search space of the ascent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ansatz {
    /// All Hermitian matrices.
    Full,
    /// Persymmetric X matrices only: free pair diagonals and
    /// secondary-diagonal coherences.
    PersymX,
}

/// Outcome of one multi-restart search.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best_speed_sq: f64,
    pub argmax: DensityMatrix,
    pub restarts_used: u32,
    pub converged: bool,
    /// |purity(argmax) − κ| after the final polish.
    pub constraint_residual: f64,
}

/// Tunable knobs; the defaults match the documented tolerances.
#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub restarts: u32,
    pub seed: u64,
    pub ansatz: Ansatz,
    /// Ascent iteration cap per restart.
    pub max_iter: usize,
}

impl OracleOptions {
    pub fn new(restarts: u32, seed: u64, ansatz: Ansatz) -> Self {
        Self {
            restarts,
            seed,
            ansatz,
            max_iter: 3000,
        }
    }
}

fn hermitize(m: &mut CMatrix) {
    let d = m.nrows();
    for i in 0..d {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..d {
            let avg = (m[(i, j)] + m[(j, i)].conj()).unscale(2.0);
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Orthogonal projection onto the persymmetric X subspace: diagonal pairs
/// averaged, secondary-diagonal entries kept, everything else zeroed.
fn persym_x_project(m: &mut CMatrix) {
    let d = m.nrows();
    for i in 0..d {
        for j in 0..d {
            if i != j && i + j != d - 1 {
                m[(i, j)] = C64::new(0.0, 0.0);
            }
        }
    }
    for i in 0..d / 2 {
        let j = d - 1 - i;
        let avg = (m[(i, i)].re + m[(j, j)].re) / 2.0;
        m[(i, i)] = C64::new(avg, 0.0);
        m[(j, j)] = C64::new(avg, 0.0);
    }
    if d % 2 == 1 {
        let c = d / 2;
        m[(c, c)] = C64::new(m[(c, c)].re, 0.0);
    }
}

/// Alternating projection onto {Hermitian, Tr = 1, Tr ϱ² = κ, PSD}.
/// Returns the projected matrix and the final joint residual.
fn project_feasible(m: &CMatrix, kappa: f64, ansatz: Ansatz) -> (CMatrix, f64) {
    let d = m.nrows();
    let df = d as f64;
    let radius_sq = (kappa - 1.0 / df).max(0.0);
    let id_over_d = CMatrix::identity(d, d).unscale(df);
    let mut cur = m.clone();
    hermitize(&mut cur);
    if ansatz == Ansatz::PersymX {
        persym_x_project(&mut cur);
    }
    let mut residual = f64::INFINITY;
    for _ in 0..100 {
        // Exact trace and Bloch-radius normalization.
        let tr = cur.trace().re;
        let mut traceless = &cur - id_over_d.scale(tr);
        let norm_sq = traceless.norm_squared();
        if norm_sq < 1e-300 {
            if radius_sq == 0.0 {
                return (id_over_d, 0.0);
            }
            // Degenerate start at 𝕀/d: seed the corner direction.
            traceless[(0, d - 1)] = C64::new(1.0, 0.0);
            traceless[(d - 1, 0)] = C64::new(1.0, 0.0);
        }
        let alpha = (radius_sq / traceless.norm_squared()).sqrt();
        cur = &id_over_d + traceless.scale(alpha);

        let (eigs, vecs) = match hermitian_eig(&cur) {
            Ok(ev) => ev,
            Err(_) => break,
        };
        let min_eig = eigs[0];
        residual =
            (cur.iter().map(|z| z.norm_sqr()).sum::<f64>() - kappa).abs() + (-min_eig).max(0.0);
        if min_eig >= -PROJECTION_TOL {
            if residual <= PROJECTION_TOL {
                break;
            }
            if min_eig >= 0.0 {
                break;
            }
        }
        // Clip the negative part of the spectrum and renormalize.
        let clipped: Vec<f64> = eigs.iter().map(|&x| x.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let lam = CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(clipped[i] / total, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        cur = &vecs * lam * vecs.adjoint();
        hermitize(&mut cur);
        if ansatz == Ansatz::PersymX {
            persym_x_project(&mut cur);
        }
    }
    (cur, residual)
}

/// Entrywise speed gradient 2ω_ij²ϱ_ij = 2[H,[H,ϱ]].
fn speed_gradient(h: &Hamiltonian, rho: &CMatrix) -> CMatrix {
    let d = h.dim();
    CMatrix::from_fn(d, d, |i, j| {
        let w = h.bohr(i.min(j), i.max(j));
        rho[(i, j)].scale(2.0 * w * w)
    })
}

fn speed_of(h: &Hamiltonian, rho: &CMatrix) -> f64 {
    let d = h.dim();
    let mut v2 = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let w = h.bohr(i, j);
            v2 += 2.0 * rho[(i, j)].norm_sqr() * w * w;
        }
    }
    v2
}

/// One projected-ascent run from a given start.
fn ascend(
    h: &Hamiltonian,
    kappa: f64,
    init: &CMatrix,
    ansatz: Ansatz,
    max_iter: usize,
) -> (CMatrix, f64) {
    let (mut rho, _) = project_feasible(init, kappa, ansatz);
    let mut v2 = speed_of(h, &rho);
    let mut step_start = STEP_INIT;
    for _ in 0..max_iter {
        let mut grad = speed_gradient(h, &rho);
        if ansatz == Ansatz::PersymX {
            persym_x_project(&mut grad);
        }
        let mut step = step_start;
        let mut improved = false;
        while step >= STEP_MIN {
            let trial = &rho + grad.scale(step);
            let (cand, res) = project_feasible(&trial, kappa, ansatz);
            if res <= CONSTRAINT_TOL {
                let cand_v2 = speed_of(h, &cand);
                if cand_v2 > v2 {
                    rho = cand;
                    v2 = cand_v2;
                    improved = true;
                    // Next search resumes near the working step, capped at
                    // the initial 0.1.
                    step_start = (step * 4.0).min(STEP_INIT);
                    break;
                }
            }
            step *= 0.5;
        }
        if !improved {
            // The sweep is deterministic; repeating it cannot improve.
            break;
        }
    }
    (rho, v2)
}

/// Restart seed: even indices perturb the nearest closed-form state by an
/// isotropic Hermitian direction at a scale cycling through four sizes;
/// odd indices are fully random draws.
fn restart_init(
    h: &Hamiltonian,
    kappa: f64,
    restart: u32,
    rng: &mut ChaCha12Rng,
) -> Result<CMatrix, OracleError> {
    let d = h.dim();
    if restart.is_multiple_of(2) {
        let params =
            optimal::regime_params(h).map_err(|e| OracleError::InvalidInput(e.to_string()))?;
        // Clamp into the closed-form range so the seed never re-enters the
        // numeric fallback.
        let clamped = if params.has_split_bands() && d > 4 {
            kappa.min(params.kappa2)
        } else {
            kappa
        };
        let base = optimal::closed_form_state(h, clamped, 0.0, 0.0)
            .map_err(|e| OracleError::InvalidInput(e.to_string()))?
            .expect("clamped purity always has a closed form");
        let scale = [0.01, 0.05, 0.2, 0.5][(restart as usize / 2) % 4];
        let noise = sampling::sample_hermitian_direction(d, rng);
        Ok(base.state.matrix() + noise.scale(scale))
    } else {
        Ok(sampling::sample_density(d, rng).matrix().clone())
    }
}

/// Maximize the squared speed over states of purity κ.
///
/// `restarts` independent ascents run in parallel on derived RNG streams;
/// the best value wins, ties broken by restart index. The returned argmax
/// is re-projected and validated, with `constraint_residual` the final
/// purity defect.
pub fn max_speed_bruteforce(
    h: &Hamiltonian,
    kappa: f64,
    restarts: u32,
    seed: u64,
    ansatz: Ansatz,
) -> Result<OracleResult, OracleError> {
    max_speed_bruteforce_opts(h, kappa, &OracleOptions::new(restarts, seed, ansatz))
}

/// [`max_speed_bruteforce`] with explicit iteration caps.
pub fn max_speed_bruteforce_opts(
    h: &Hamiltonian,
    kappa: f64,
    opts: &OracleOptions,
) -> Result<OracleResult, OracleError> {
    let d = h.dim();
    let lo = 1.0 / d as f64;
    if !(lo - 1e-12..=1.0 + 1e-12).contains(&kappa) {
        return Err(OracleError::InvalidInput(format!(
            "purity {kappa} outside [1/{d}, 1]"
        )));
    }
    if opts.restarts == 0 {
        return Err(OracleError::InvalidInput("restarts must be >= 1".into()));
    }
    let kappa = kappa.clamp(lo, 1.0);

    let runs: Vec<Result<(f64, CMatrix), OracleError>> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha12Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            let init = restart_init(h, kappa, r, &mut rng)?;
            let (rho, v2) = ascend(h, kappa, &init, opts.ansatz, opts.max_iter);
            Ok((v2, rho))
        })
        .collect();

    let mut best: Option<(f64, CMatrix)> = None;
    for run in runs {
        let (v2, rho) = run?;
        // Strict comparison keeps the earliest restart on ties.
        if best.as_ref().is_none_or(|(bv, _)| v2 > *bv) {
            best = Some((v2, rho));
        }
    }
    let (best_v2, best_rho) = best.expect("at least one restart");

    let (polished, _) = project_feasible(&best_rho, kappa, opts.ansatz);
    let argmax = DensityMatrix::validate(polished)?;
    let constraint_residual = (argmax.purity() - kappa).abs();
    if constraint_residual > CONSTRAINT_TOL {
        return Err(OracleError::NoConvergence {
            residual: constraint_residual,
        });
    }
    let best_speed_sq = speed_of(h, argmax.matrix());
    debug_assert!((best_speed_sq - best_v2).abs() <= 1e-9 * best_v2.max(1.0));
    Ok(OracleResult {
        best_speed_sq,
        argmax,
        restarts_used: opts.restarts,
        converged: true,
        constraint_residual,
    })
}

/// Structure residuals of an unrestricted argmax. Entry magnitudes are
/// phase-gauge invariant, so no explicit gauge rotation is needed before
/// measuring them.
#[derive(Debug, Clone)]
pub struct StructureReport {
    /// Largest |ϱ_ij| off the main and secondary diagonals.
    pub off_pattern_max: f64,
    /// Largest |ϱ_ii − ϱ_{d−i+1,d−i+1}| over diagonal pairs.
    pub persym_defect: f64,
    pub oracle: OracleResult,
}

/// Run the unrestricted oracle and assert that the argmax is a
/// persymmetric X-state within 1e-5.
pub fn verify_x_structure(
    h: &Hamiltonian,
    kappa: f64,
    restarts: u32,
    seed: u64,
) -> Result<StructureReport, OracleError> {
    let oracle = max_speed_bruteforce(h, kappa, restarts, seed, Ansatz::Full)?;
    let m = oracle.argmax.matrix();
    let d = m.nrows();
    let mut off_pattern_max = 0.0f64;
    let mut worst = (0usize, 0usize);
    for i in 0..d {
        for j in 0..d {
            if i != j && i + j != d - 1 && m[(i, j)].norm() > off_pattern_max {
                off_pattern_max = m[(i, j)].norm();
                worst = (i, j);
            }
        }
    }
    let mut persym_defect = 0.0f64;
    for i in 0..d / 2 {
        let j = d - 1 - i;
        let defect = (m[(i, i)].re - m[(j, j)].re).abs();
        if defect > persym_defect {
            persym_defect = defect;
        }
    }
    if off_pattern_max > 1e-5 || persym_defect > 1e-5 {
        return Err(OracleError::StructureViolation {
            off_pattern: off_pattern_max,
            persym_defect,
            row: worst.0,
            col: worst.1,
        });
    }
    Ok(StructureReport {
        off_pattern_max,
        persym_defect,
        oracle,
    })
}
