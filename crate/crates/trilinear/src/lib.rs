//! Simulation and estimation toolkit for the trilinear phonon coupling
//! between the axial breathing mode and the radial rocking mode of a
//! two-ion crystal.
//!
//! The crate covers the full chain from trap physics to metrology:
//!
//! - [`trap`]: equilibrium geometry, normal modes, and the physical
//!   coupling constant of a linear ion crystal.
//! - [`fock`]: the truncated spin ⊗ breathing ⊗ rocking Hilbert space,
//!   with operator construction and state preparation.
//! - [`hamiltonians`]: rotating-frame sensing Hamiltonians for the two
//!   drive geometries, their dispersive (adiabatically eliminated)
//!   forms, and the generator of the eliminating transformation.
//! - [`propagation`]: exact unitary time evolution with truncation
//!   safety checks, by dense eigendecomposition or a Lanczos propagator.
//! - [`analytic`]: closed-form predictions of the dispersive theory
//!   (squeezed-vacuum, beam-splitter, and twin-Fock distributions,
//!   Ramsey populations).
//! - [`estimation`]: classical and quantum Fisher information and the
//!   Cramér-Rao sensitivity bounds.
//!
//! All Hamiltonian-like operators are stored divided by ħ, i.e. in
//! angular-frequency units (rad/s); all times are seconds. Conversion
//! from the "frequency/2π in kHz" convention used in configuration
//! files happens at the boundary, never inside the library.

// re-export the math backend so downstream crates stay version-aligned
pub use nalgebra;
pub use num_complex;

pub mod analytic;
pub mod constants;
pub mod estimation;
pub mod fock;
pub mod hamiltonians;
mod linalg;
pub mod propagation;
pub mod trap;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
