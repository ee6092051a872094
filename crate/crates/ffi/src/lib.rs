//! C ABI over the qspeed library.
//!
//! Conventions: every fallible call returns a [`QspStatus`] and writes its
//! result through out-pointers; handles are opaque and freed with the
//! matching `_free` function; matrices cross the boundary as row-major
//! `dim*dim` arrays of separate real and imaginary parts. Panics are
//! caught at the boundary and surfaced as `QSP_STATUS_INTERNAL_ERROR`.

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use qspeed::linalg::{DensityMatrix, Hamiltonian, LinalgError};
use qspeed::optimal::{self, OptimalError, Regime};
use qspeed::oracle::{self, Ansatz, OracleError};
use qspeed::resources;
use qspeed::sampling::SamplerConfig;
use qspeed::speed;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QspStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotHermitian = 3,
    TraceNotOne = 4,
    NotPositiveSemidefinite = 5,
    BadFactorization = 6,
    DimensionMismatch = 7,
    DegenerateSpectrum = 8,
    PurityOutOfRange = 9,
    NoConvergence = 10,
    InternalError = 11,
}

fn status_of_linalg(e: &LinalgError) -> QspStatus {
    match e {
        LinalgError::NotHermitian(_) => QspStatus::NotHermitian,
        LinalgError::TraceNotOne(_) => QspStatus::TraceNotOne,
        LinalgError::NotPSD(_) => QspStatus::NotPositiveSemidefinite,
        LinalgError::ConvergenceFailure(_) => QspStatus::NoConvergence,
        LinalgError::BadFactorization { .. } => QspStatus::BadFactorization,
        LinalgError::DimensionMismatch(..) | LinalgError::NotSquare(..) => {
            QspStatus::DimensionMismatch
        }
        LinalgError::EnergiesNotSorted(..) | LinalgError::EmptyDimension => {
            QspStatus::InvalidArgument
        }
    }
}

fn status_of_optimal(e: &OptimalError) -> QspStatus {
    match e {
        OptimalError::OutOfRange(..) | OptimalError::OutOfBand { .. } => {
            QspStatus::PurityOutOfRange
        }
        OptimalError::DegenerateSpectrum => QspStatus::DegenerateSpectrum,
        OptimalError::GammaOutOfRange(_) => QspStatus::InvalidArgument,
        OptimalError::KktViolation(_) | OptimalError::KktUnsupported(_) => {
            QspStatus::InvalidArgument
        }
        OptimalError::Linalg(l) => status_of_linalg(l),
        OptimalError::Fallback(o) => status_of_oracle(o),
    }
}

fn status_of_oracle(e: &OracleError) -> QspStatus {
    match e {
        OracleError::NoConvergence { .. } => QspStatus::NoConvergence,
        OracleError::StructureViolation { .. } => QspStatus::InternalError,
        OracleError::InvalidInput(_) => QspStatus::InvalidArgument,
        OracleError::Linalg(l) => status_of_linalg(l),
    }
}

/// Human-readable description of a status code (static storage).
#[no_mangle]
pub extern "C" fn qsp_status_message(status: QspStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        QspStatus::Ok => b"ok\0",
        QspStatus::NullPointer => b"null pointer argument\0",
        QspStatus::InvalidArgument => b"invalid argument\0",
        QspStatus::NotHermitian => b"matrix is not Hermitian\0",
        QspStatus::TraceNotOne => b"trace is not one\0",
        QspStatus::NotPositiveSemidefinite => b"matrix is not positive semidefinite\0",
        QspStatus::BadFactorization => b"subsystem dimensions do not factor the total\0",
        QspStatus::DimensionMismatch => b"dimension mismatch\0",
        QspStatus::DegenerateSpectrum => b"degenerate spectrum\0",
        QspStatus::PurityOutOfRange => b"purity outside [1/d, 1]\0",
        QspStatus::NoConvergence => b"iteration failed to converge\0",
        QspStatus::InternalError => b"internal error\0",
    };
    msg.as_ptr() as *const c_char
}

/// Opaque Hamiltonian handle.
pub struct QspHamiltonian(Hamiltonian);
/// Opaque density-matrix handle.
pub struct QspDensityMatrix(DensityMatrix);
/// Opaque maximal-speed-state handle.
pub struct QspOptimalState(optimal::OptimalState);

/// Purity regime of a maximal-speed state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QspRegime {
    LowPurity = 0,
    Gamma1Ge2 = 1,
    MidBand = 2,
    TopBand = 3,
    NumericFallback = 4,
}

impl From<Regime> for QspRegime {
    fn from(r: Regime) -> Self {
        match r {
            Regime::LowPurity => QspRegime::LowPurity,
            Regime::Gamma1Ge2 => QspRegime::Gamma1Ge2,
            Regime::MidBand => QspRegime::MidBand,
            Regime::TopBand => QspRegime::TopBand,
            Regime::NumericFallback => QspRegime::NumericFallback,
        }
    }
}

/// All speed quantities for one state.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QspSpeedReport {
    pub euclid_sq: f64,
    pub euclid_sq_commutator: f64,
    pub euclid_sq_bloch: f64,
    pub wy_sq: f64,
    pub variance_bound: f64,
    pub purity: f64,
}

/// Spectrum-derived purity thresholds. `gamma1` and `x0` are meaningful
/// only when the matching `has_` flag is nonzero.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QspRegimeParams {
    pub kappa0: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub gamma1: f64,
    pub x0: f64,
    pub has_gamma1: u8,
    pub has_x0: u8,
}

fn guarded(job: impl FnOnce() -> QspStatus) -> QspStatus {
    match catch_unwind(AssertUnwindSafe(job)) {
        Ok(status) => status,
        Err(_) => QspStatus::InternalError,
    }
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> QspStatus {
    if out.is_null() {
        return QspStatus::NullPointer;
    }
    *out = Box::into_raw(Box::new(value));
    QspStatus::Ok
}

/// Build a Hamiltonian from `dim` nondecreasing energies (ħ = 1).
///
/// # Safety
/// `energies` must point to `dim` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsp_hamiltonian_new(
    energies: *const f64,
    dim: usize,
    out: *mut *mut QspHamiltonian,
) -> QspStatus {
    if energies.is_null() || out.is_null() {
        return QspStatus::NullPointer;
    }
    let slice = std::slice::from_raw_parts(energies, dim);
    guarded(|| match Hamiltonian::new(slice.to_vec()) {
        Ok(h) => write_handle(out, QspHamiltonian(h)),
        Err(e) => status_of_linalg(&e),
    })
}

/// # Safety
/// `h` must come from `qsp_hamiltonian_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qsp_hamiltonian_free(h: *mut QspHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live Hamiltonian handle.
#[no_mangle]
pub unsafe extern "C" fn qsp_hamiltonian_dim(h: *const QspHamiltonian) -> usize {
    if h.is_null() {
        return 0;
    }
    (*h).0.dim()
}

/// Validate a row-major `dim*dim` complex matrix (separate real and
/// imaginary parts) as a density matrix.
///
/// # Safety
/// `re` and `im` must each point to `dim*dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qsp_density_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut QspDensityMatrix,
) -> QspStatus {
    if re.is_null() || im.is_null() || out.is_null() {
        return QspStatus::NullPointer;
    }
    if dim == 0 {
        return QspStatus::InvalidArgument;
    }
    let re = std::slice::from_raw_parts(re, dim * dim);
    let im = std::slice::from_raw_parts(im, dim * dim);
    guarded(|| match DensityMatrix::from_row_major_parts(dim, re, im) {
        Ok(rho) => write_handle(out, QspDensityMatrix(rho)),
        Err(e) => status_of_linalg(&e),
    })
}

/// # Safety
/// `rho` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qsp_density_free(rho: *mut QspDensityMatrix) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// # Safety
/// `rho` must be a live density-matrix handle.
#[no_mangle]
pub unsafe extern "C" fn qsp_density_dim(rho: *const QspDensityMatrix) -> usize {
    if rho.is_null() {
        return 0;
    }
    (*rho).0.dim()
}

/// Copy the matrix out as row-major real and imaginary parts.
///
/// # Safety
/// `re` and `im` must each have room for `dim*dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn qsp_density_get(
    rho: *const QspDensityMatrix,
    re: *mut f64,
    im: *mut f64,
) -> QspStatus {
    if rho.is_null() || re.is_null() || im.is_null() {
        return QspStatus::NullPointer;
    }
    let d = (*rho).0.dim();
    for i in 0..d {
        for j in 0..d {
            let z = (*rho).0.entry(i, j);
            *re.add(i * d + j) = z.re;
            *im.add(i * d + j) = z.im;
        }
    }
    QspStatus::Ok
}

/// # Safety
/// `rho` must be a live density-matrix handle.
#[no_mangle]
pub unsafe extern "C" fn qsp_density_purity(rho: *const QspDensityMatrix) -> f64 {
    if rho.is_null() {
        return f64::NAN;
    }
    (*rho).0.purity()
}

/// Evaluate every speed quantity of a state under a Hamiltonian.
///
/// # Safety
/// All handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qsp_speed_report(
    h: *const QspHamiltonian,
    rho: *const QspDensityMatrix,
    out: *mut QspSpeedReport,
) -> QspStatus {
    if h.is_null() || rho.is_null() || out.is_null() {
        return QspStatus::NullPointer;
    }
    guarded(|| match speed::speed_report(&(*h).0, &(*rho).0) {
        Ok(r) => {
            *out = QspSpeedReport {
                euclid_sq: r.euclid_sq,
                euclid_sq_commutator: r.euclid_sq_commutator,
                euclid_sq_bloch: r.euclid_sq_bloch,
                wy_sq: r.wy_sq,
                variance_bound: r.variance_bound,
                purity: r.purity,
            };
            QspStatus::Ok
        }
        Err(e) => status_of_linalg(&e),
    })
}

/// Purity thresholds κ₀, κ₁, κ₂ and the ratio γ₁ for a spectrum.
///
/// # Safety
/// `h` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qsp_regime_params(
    h: *const QspHamiltonian,
    out: *mut QspRegimeParams,
) -> QspStatus {
    if h.is_null() || out.is_null() {
        return QspStatus::NullPointer;
    }
    guarded(|| match optimal::regime_params(&(*h).0) {
        Ok(p) => {
            *out = QspRegimeParams {
                kappa0: p.kappa0,
                kappa1: p.kappa1,
                kappa2: p.kappa2,
                gamma1: p.gamma1().unwrap_or(f64::NAN),
                x0: p.x0.unwrap_or(f64::NAN),
                has_gamma1: p.gamma1().is_some() as u8,
                has_x0: p.x0.is_some() as u8,
            };
            QspStatus::Ok
        }
        Err(e) => status_of_optimal(&e),
    })
}

/// Construct the maximal-speed state at purity `kappa` with coherence
/// phases `theta1`, `theta2`.
///
/// # Safety
/// `h` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qsp_optimal_state_new(
    h: *const QspHamiltonian,
    kappa: f64,
    theta1: f64,
    theta2: f64,
    out: *mut *mut QspOptimalState,
) -> QspStatus {
    if h.is_null() || out.is_null() {
        return QspStatus::NullPointer;
    }
    guarded(
        || match optimal::optimal_state_with_phases(&(*h).0, kappa, theta1, theta2) {
            Ok(opt) => write_handle(out, QspOptimalState(opt)),
            Err(e) => status_of_optimal(&e),
        },
    )
}

/// # Safety
/// `opt` must come from `qsp_optimal_state_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qsp_optimal_state_free(opt: *mut QspOptimalState) {
    if !opt.is_null() {
        drop(Box::from_raw(opt));
    }
}

/// # Safety
/// `opt` must be a live optimal-state handle.
#[no_mangle]
pub unsafe extern "C" fn qsp_optimal_state_regime(opt: *const QspOptimalState) -> QspRegime {
    if opt.is_null() {
        return QspRegime::NumericFallback;
    }
    (*opt).0.regime.into()
}

/// Copy of the underlying density matrix.
///
/// # Safety
/// `opt` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qsp_optimal_state_density(
    opt: *const QspOptimalState,
    out: *mut *mut QspDensityMatrix,
) -> QspStatus {
    if opt.is_null() || out.is_null() {
        return QspStatus::NullPointer;
    }
    write_handle(out, QspDensityMatrix((*opt).0.state.clone()))
}

/// Maximal squared speed at purity `kappa` from the band closed forms.
///
/// # Safety
/// `h` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qsp_optimal_speed(
    h: *const QspHamiltonian,
    kappa: f64,
    out: *mut f64,
) -> QspStatus {
    if h.is_null() || out.is_null() {
        return QspStatus::NullPointer;
    }
    guarded(|| match optimal::optimal_speed(&(*h).0, kappa) {
        Ok(v) => {
            *out = v;
            QspStatus::Ok
        }
        Err(e) => status_of_optimal(&e),
    })
}

/// l₁-norm of coherence Σ_{i≠j} |ϱ_ij|.
///
/// # Safety
/// `rho` must be a live density-matrix handle.
#[no_mangle]
pub unsafe extern "C" fn qsp_l1_coherence(rho: *const QspDensityMatrix) -> f64 {
    if rho.is_null() {
        return f64::NAN;
    }
    resources::l1_coherence(&(*rho).0)
}

/// Negativity for a d₁ × (dim/d₁) split.
///
/// # Safety
/// `rho` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qsp_negativity(
    rho: *const QspDensityMatrix,
    d1: usize,
    out: *mut f64,
) -> QspStatus {
    if rho.is_null() || out.is_null() {
        return QspStatus::NullPointer;
    }
    let d = (*rho).0.dim();
    if d1 == 0 || !d.is_multiple_of(d1) {
        return QspStatus::BadFactorization;
    }
    guarded(|| match resources::negativity(&(*rho).0, d1, d / d1) {
        Ok(n) => {
            *out = n;
            QspStatus::Ok
        }
        Err(_) => QspStatus::BadFactorization,
    })
}

/// Wootters concurrence of a two-qubit state.
///
/// # Safety
/// `rho` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qsp_concurrence_two_qubit(
    rho: *const QspDensityMatrix,
    out: *mut f64,
) -> QspStatus {
    if rho.is_null() || out.is_null() {
        return QspStatus::NullPointer;
    }
    guarded(|| match resources::concurrence_two_qubit(&(*rho).0) {
        Ok(c) => {
            *out = c;
            QspStatus::Ok
        }
        Err(_) => QspStatus::DimensionMismatch,
    })
}

/// Deterministic uniform random state: draw `index` of the stream defined
/// by `(dim, seed, n_diag, n_unitary)`; identical inputs give bit-identical
/// states on any platform and thread count.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qsp_sample_density(
    dim: usize,
    seed: u64,
    n_diag: u64,
    n_unitary: u64,
    index: u64,
    out: *mut *mut QspDensityMatrix,
) -> QspStatus {
    if out.is_null() {
        return QspStatus::NullPointer;
    }
    if dim == 0 || n_diag == 0 || n_unitary == 0 || index >= n_diag * n_unitary {
        return QspStatus::InvalidArgument;
    }
    guarded(|| {
        let cfg = SamplerConfig::new(dim, seed, n_diag, n_unitary);
        write_handle(out, QspDensityMatrix(cfg.state(index)))
    })
}

/// Projected-ascent maximum of the squared speed at fixed purity;
/// `persym_x` nonzero restricts the search to persymmetric X states.
///
/// # Safety
/// `h` must be live; `out_speed` must be valid; `out_state` may be null
/// when the argmax is not wanted.
#[no_mangle]
pub unsafe extern "C" fn qsp_max_speed_bruteforce(
    h: *const QspHamiltonian,
    kappa: f64,
    restarts: u32,
    seed: u64,
    persym_x: i32,
    out_speed: *mut f64,
    out_state: *mut *mut QspDensityMatrix,
) -> QspStatus {
    if h.is_null() || out_speed.is_null() {
        return QspStatus::NullPointer;
    }
    let ansatz = if persym_x != 0 {
        Ansatz::PersymX
    } else {
        Ansatz::Full
    };
    guarded(
        || match oracle::max_speed_bruteforce(&(*h).0, kappa, restarts, seed, ansatz) {
            Ok(res) => {
                *out_speed = res.best_speed_sq;
                if !out_state.is_null() {
                    return write_handle(out_state, QspDensityMatrix(res.argmax));
                }
                QspStatus::Ok
            }
            Err(e) => status_of_oracle(&e),
        },
    )
}
