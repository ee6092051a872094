//! Quantum evolution speed for mixed states under a fixed, time-independent
//! Hamiltonian.
//!
//! The crate computes the Euclidean squared speed `v²(ϱ) = Σ |ϱ_ij|² ω_ij²`
//! (with `ω_ij` the Bohr frequencies of the Hamiltonian) together with the
//! Wigner-Yanase variant built from `√ϱ`, and constructs, for every purity
//! `κ = Tr[ϱ²] ∈ [1/d, 1]`, the closed-form state of maximal Euclidean speed.
//! The maximizers are persymmetric X-states; which secondary-diagonal
//! coherences activate depends on the threshold ratio `γ₁ = ω₁d²/ω₂,d₋₁²`
//! and on the purity band `[1/d, κ₀]`, `[κ₀, κ₁]`, `[κ₁, κ₂]`, `[κ₂, 1]`.
//!
//! Modules:
//!
//! - [`linalg`] — dense complex Hermitian primitives, density-matrix
//!   validation, the generalized Gell-Mann basis;
//! - [`speed`] — every speed functional in cross-checkable forms, the
//!   variance bound `v² ≤ 2(ΔH)²` and its gap;
//! - [`optimal`] — purity-regime classification and the closed-form
//!   maximal-speed states;
//! - [`resources`] — negativity, two-qubit concurrence, l₁-coherence, and
//!   the explicit low-purity separable decomposition;
//! - [`sampling`] — uniform (Haar × simplex) random density matrices with
//!   deterministic per-stream RNG derivation;
//! - [`oracle`] — an independent projected-ascent maximizer of the speed at
//!   fixed purity, used to cross-validate the closed forms;
//! - [`cli`] — the `qspeed` command-line front end emitting reproducible CSV.

pub mod cli;
pub mod linalg;
pub mod optimal;
pub mod oracle;
pub mod resources;
pub mod sampling;
pub mod speed;

pub use linalg::{CMatrix, DensityMatrix, Hamiltonian, LinalgError, OrthonormalBasis};
pub use optimal::{OptimalState, Regime, RegimeParams};
pub use speed::SpeedReport;
