//! Physical constants (CODATA 2018), SI units.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054571817e-34;

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;

/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.8541878128e-12;

/// Atomic mass unit, kg.
pub const ATOMIC_MASS: f64 = 1.66053906660e-27;

/// Mass of a calcium-40 ion, kg. The workhorse species in the examples.
pub const CA40_MASS: f64 = 6.642e-26;
