use thiserror::Error;

use crate::fock::Mode;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid trap configuration: {0}")]
    InvalidTrapConfig(String),

    #[error("equilibrium solver did not converge after {iterations} iterations (|grad| = {grad_norm:.3e})")]
    EquilibriumNonConvergence { iterations: usize, grad_norm: f64 },

    #[error("unstable crystal: {axis}-axis normal mode {mode_index} has non-positive eigenvalue {eigenvalue:.6e}")]
    UnstableCrystal {
        axis: char,
        mode_index: usize,
        eigenvalue: f64,
    },

    #[error("trilinear coupling constants are only defined for 2 ions, got {n_ions}")]
    UnsupportedIonCount { n_ions: usize },

    #[error("no real radial trap frequency satisfies the resonance condition (required rocking frequency {omega_rock:.6e} rad/s)")]
    NoResonanceSolution { omega_rock: f64 },

    #[error("state preparation exceeds the truncation: requested ({n_b}, {n_r}) with cutoffs ({cut_b}, {cut_r}) and margin {margin}")]
    StateExceedsCutoff {
        n_b: usize,
        n_r: usize,
        cut_b: usize,
        cut_r: usize,
        margin: usize,
    },

    #[error("operator/state built for a different space layout")]
    LayoutMismatch,

    #[error("drive configuration is for the other sensing case")]
    CaseMismatch,

    #[error("detuning must be non-zero for the dispersive expansion")]
    ZeroDetuning,

    #[error("truncation breach in the {mode} mode: population {mass:.3e} within 2 Fock levels of the cutoff exceeds {tol:.1e}")]
    TruncationBreach { mode: Mode, mass: f64, tol: f64 },

    #[error("state norm drifted to {norm} (tolerance {tol:.1e})")]
    NormDrift { norm: f64, tol: f64 },

    #[error("operator is not hermitian (max |M - M^dag| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("time grid must be non-decreasing")]
    NonMonotoneGrid,

    #[error("cutoff ladder must be ascending")]
    BadCutoffLadder,

    #[error("invalid probability vector: {0}")]
    InvalidPmf(String),

    #[error("Fisher information must be positive to form a Cramér-Rao bound, got {0:.3e}")]
    NonPositiveFisher(f64),

    #[error("{0}")]
    InvalidInput(String),
}
