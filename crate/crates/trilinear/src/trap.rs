//! Crystal geometry, normal-mode spectrum, and the physical trilinear
//! coupling constant of a linear ion chain in a harmonic trap.
//!
//! Lengths are measured in units of the Coulomb length scale
//! `l = (e^2 / 4 pi eps0 m omega_z^2)^(1/3)`; all frequencies are angular
//! (rad/s).

use crate::constants::{HBAR, VACUUM_PERMITTIVITY};
use crate::linalg::eigh_symmetric;
use crate::{Error, Result};

/// Trap axis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn as_char(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    /// Coulomb coupling sign/strength prefactor in the stiffness matrix:
    /// -1 for the radial directions, +2 for the axial one.
    fn coulomb_prefactor(self) -> f64 {
        match self {
            Axis::X | Axis::Y => -1.0,
            Axis::Z => 2.0,
        }
    }
}

/// Which of the two drive geometries a resonance condition refers to.
///
/// In the first, the spin is driven on the breathing-mode sidebands and the
/// trap satisfies `omega_b = 2 omega_rock + omega`; in the second, the spin
/// is driven on the rocking-mode sidebands and `omega_b = 2 omega_rock - omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensingCase {
    /// Spin coupled to the breathing mode (phonon-squeezing scheme).
    BreathingDrive,
    /// Spin coupled to the rocking mode (beam-splitter scheme).
    RockingDrive,
}

/// Physical trap and ion parameters. All frequencies are angular (rad/s).
#[derive(Debug, Clone, Copy)]
pub struct TrapConfig {
    pub ion_mass: f64,
    pub ion_charge: f64,
    pub omega_x: f64,
    pub omega_y: f64,
    pub omega_z: f64,
    pub n_ions: usize,
}

impl TrapConfig {
    /// Validating constructor. Radial frequencies must exceed the axial one
    /// (linear-crystal condition), and everything must be strictly positive.
    pub fn new(
        ion_mass: f64,
        ion_charge: f64,
        omega_x: f64,
        omega_y: f64,
        omega_z: f64,
        n_ions: usize,
    ) -> Result<Self> {
        if !ion_mass.is_finite() || ion_mass <= 0.0 {
            return Err(Error::InvalidTrapConfig(format!(
                "ion mass must be positive, got {ion_mass}"
            )));
        }
        if !ion_charge.is_finite() || ion_charge <= 0.0 {
            return Err(Error::InvalidTrapConfig(format!(
                "ion charge must be positive, got {ion_charge}"
            )));
        }
        for (name, w) in [
            ("omega_x", omega_x),
            ("omega_y", omega_y),
            ("omega_z", omega_z),
        ] {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidTrapConfig(format!(
                    "{name} must be positive and finite, got {w}"
                )));
            }
        }
        if omega_x <= omega_z || omega_y <= omega_z {
            return Err(Error::InvalidTrapConfig(
                "radial frequencies must exceed the axial frequency for a linear crystal"
                    .to_string(),
            ));
        }
        if n_ions == 0 {
            return Err(Error::InvalidTrapConfig(
                "need at least one ion".to_string(),
            ));
        }
        Ok(Self {
            ion_mass,
            ion_charge,
            omega_x,
            omega_y,
            omega_z,
            n_ions,
        })
    }

    /// Trap anisotropy `beta_alpha = omega_alpha / omega_z`.
    pub fn beta(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.omega_x / self.omega_z,
            Axis::Y => self.omega_y / self.omega_z,
            Axis::Z => 1.0,
        }
    }

    /// Coulomb length scale `l` (meters) setting the inter-ion distance.
    pub fn length_scale(&self) -> f64 {
        let coulomb =
            self.ion_charge * self.ion_charge / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY);
        (coulomb / (self.ion_mass * self.omega_z * self.omega_z)).cbrt()
    }
}

/// Normal-mode spectrum along one trap axis.
#[derive(Debug, Clone)]
pub struct ModeSpectrum {
    pub axis: Axis,
    /// Dimensionless stiffness eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors; column `p` (i.e. `eigenvectors[k][p]`)
    /// belongs to `eigenvalues[p]`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// Mode angular frequencies `sqrt(gamma_p) * omega_z`, rad/s.
    pub mode_frequencies: Vec<f64>,
}

/// Length scales and the trilinear coupling constant of the two-ion crystal.
#[derive(Debug, Clone, Copy)]
pub struct CouplingConstants {
    /// Coulomb length scale, m.
    pub length_scale: f64,
    /// Breathing-mode ground-state size `sqrt(hbar / 2 m omega_b)`, m.
    pub ground_state_size: f64,
    /// Trilinear coupling `omega_b * z_b / (2^(5/6) l)`, rad/s.
    pub lambda: f64,
    /// Breathing-mode frequency `sqrt(3) omega_z`, rad/s.
    pub omega_b: f64,
    /// x rocking-mode frequency `sqrt(omega_x^2 - omega_z^2)`, rad/s.
    pub omega_rock_x: f64,
    /// y rocking-mode frequency, rad/s.
    pub omega_rock_y: f64,
}

/// Outcome of solving a sideband resonance condition for the radial trap
/// frequency, with validity flags for the rotating-wave hierarchy.
#[derive(Debug, Clone, Copy)]
pub struct ResonanceReport {
    pub case: SensingCase,
    /// Detuning used in the condition, rad/s.
    pub omega: f64,
    /// Rocking frequency required by the resonance condition, rad/s.
    pub omega_rock: f64,
    /// Radial trap frequency realizing that rocking frequency, rad/s.
    pub required_omega_x: f64,
    /// lambda / omega_b.
    pub lambda_over_omega_b: f64,
    /// |omega_rock_y - omega_b| / lambda.
    pub y_mode_separation_over_lambda: f64,
    /// Ratio threshold the flags are tested against.
    pub threshold: f64,
    /// True when omega_b >= threshold * lambda.
    pub breathing_hierarchy_ok: bool,
    /// True when |omega_rock_y - omega_b| >= threshold * lambda.
    pub y_mode_separation_ok: bool,
}

/// Dimensionless potential of the chain: harmonic confinement plus mutual
/// Coulomb repulsion. Gradient and Hessian are analytic.
fn gradient(u: &[f64], grad: &mut [f64]) {
    let n = u.len();
    for k in 0..n {
        let mut g = u[k];
        for j in 0..n {
            if j != k {
                let d = u[k] - u[j];
                g -= d.signum() / (d * d);
            }
        }
        grad[k] = g;
    }
}

fn hessian(u: &[f64], hess: &mut [f64]) {
    let n = u.len();
    for k in 0..n {
        let mut diag = 1.0;
        for j in 0..n {
            if j != k {
                let d = (u[k] - u[j]).abs();
                let c = 2.0 / (d * d * d);
                diag += c;
                hess[k * n + j] = -c;
            }
        }
        hess[k * n + k] = diag;
    }
}

/// Solve the linear system `H x = b` in place by Gaussian elimination with
/// partial pivoting. `h` is overwritten.
fn solve_in_place(h: &mut [f64], b: &mut [f64], n: usize) -> bool {
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if h[r * n + col].abs() > h[piv * n + col].abs() {
                piv = r;
            }
        }
        if h[piv * n + col].abs() < 1e-300 {
            return false;
        }
        if piv != col {
            for c in 0..n {
                h.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let d = h[col * n + col];
        for r in col + 1..n {
            let f = h[r * n + col] / d;
            if f != 0.0 {
                for c in col..n {
                    h[r * n + c] -= f * h[col * n + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut x = b[col];
        for c in col + 1..n {
            x -= h[col * n + c] * b[c];
        }
        b[col] = x / h[col * n + col];
    }
    true
}

const EQUILIBRIUM_ITERATIONS: usize = 200;
const EQUILIBRIUM_TOL: f64 = 1e-13;

/// Dimensionless equilibrium positions of the chain, sorted ascending.
///
/// Damped Newton iteration on the analytic gradient, seeded by uniform
/// spacing. The returned configuration satisfies `max |grad| < 1e-13`
/// and sums to zero by symmetry of the potential's stationary point.
pub fn equilibrium_positions(cfg: &TrapConfig) -> Result<Vec<f64>> {
    let n = cfg.n_ions;
    if n < 2 {
        return Err(Error::InvalidTrapConfig(
            "equilibrium analysis needs at least 2 ions".to_string(),
        ));
    }
    // Uniform-spacing seed; the exact spacing only matters for the first
    // few Newton steps.
    let spacing = 1.26;
    let mut u: Vec<f64> = (0..n)
        .map(|k| spacing * (k as f64 - 0.5 * (n as f64 - 1.0)))
        .collect();

    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n * n];
    let mut step = vec![0.0; n];

    gradient(&u, &mut grad);
    let mut gnorm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));

    for _ in 0..EQUILIBRIUM_ITERATIONS {
        if gnorm < EQUILIBRIUM_TOL {
            u.sort_by(|a, b| a.partial_cmp(b).unwrap());
            return Ok(u);
        }
        hessian(&u, &mut hess);
        step.copy_from_slice(&grad);
        if !solve_in_place(&mut hess, &mut step, n) {
            break;
        }
        // Backtracking damping on the gradient norm; the Hessian is positive
        // definite near the minimum, so full steps win almost immediately.
        let mut damping = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = u
                .iter()
                .zip(&step)
                .map(|(ui, si)| ui - damping * si)
                .collect();
            // reject collisions / order flips
            let mut ordered = true;
            for k in 1..n {
                if trial[k] - trial[k - 1] < 1e-8 {
                    ordered = false;
                    break;
                }
            }
            if ordered {
                gradient(&trial, &mut grad);
                let trial_norm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
                if trial_norm < gnorm {
                    u = trial;
                    gnorm = trial_norm;
                    accepted = true;
                    break;
                }
            }
            damping *= 0.5;
        }
        if !accepted {
            gradient(&u, &mut grad);
            break;
        }
    }

    if gnorm < EQUILIBRIUM_TOL {
        u.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(u)
    } else {
        Err(Error::EquilibriumNonConvergence {
            iterations: EQUILIBRIUM_ITERATIONS,
            grad_norm: gnorm,
        })
    }
}

/// Dimensionless stiffness matrix of the chain along `axis`, evaluated at
/// the equilibrium configuration `u`.
///
/// Diagonal: `beta_alpha^2 + sum_{r != k} b_alpha / |u_k - u_r|^3`;
/// off-diagonal: `-b_alpha / |u_k - u_k'|^3`, with `b_x = b_y = -1`,
/// `b_z = 2`. Symmetric by construction.
pub fn stiffness_matrix(cfg: &TrapConfig, axis: Axis, u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let beta2 = cfg.beta(axis).powi(2);
    let b = axis.coulomb_prefactor();
    let mut a = vec![0.0; n * n];
    for k in 0..n {
        let mut diag = beta2;
        for r in 0..n {
            if r != k {
                let d = (u[k] - u[r]).abs();
                let c = b / (d * d * d);
                diag += c;
                a[k * n + r] = -c;
            }
        }
        a[k * n + k] = diag;
    }
    a
}

/// Diagonalize a stiffness matrix into a [`ModeSpectrum`].
///
/// Eigenpairs come out ascending with residual below 1e-10. A non-positive
/// eigenvalue on a radial axis means the linear crystal is unstable at the
/// requested anisotropy and is reported as an error.
pub fn normal_modes(cfg: &TrapConfig, axis: Axis, a: &[f64]) -> Result<ModeSpectrum> {
    let n = (a.len() as f64).sqrt().round() as usize;
    assert_eq!(n * n, a.len(), "stiffness matrix must be square");
    let (vals, vecs) = eigh_symmetric(a, n);
    for (p, &gamma) in vals.iter().enumerate() {
        if gamma <= 0.0 {
            return Err(Error::UnstableCrystal {
                axis: axis.as_char(),
                mode_index: p,
                eigenvalue: gamma,
            });
        }
    }
    let mode_frequencies = vals.iter().map(|g| g.sqrt() * cfg.omega_z).collect();
    let eigenvectors = (0..n)
        .map(|k| (0..n).map(|p| vecs[k * n + p]).collect())
        .collect();
    Ok(ModeSpectrum {
        axis,
        eigenvalues: vals,
        eigenvectors,
        mode_frequencies,
    })
}

/// Length scales and the trilinear coupling constant for the two-ion chain.
///
/// `lambda = omega_b z_b / (2^(5/6) l)` with `omega_b = sqrt(3) omega_z`
/// and `z_b = sqrt(hbar / 2 m omega_b)`. Anharmonic coefficients for
/// longer chains are out of scope, hence the two-ion restriction.
pub fn trilinear_coupling(cfg: &TrapConfig) -> Result<CouplingConstants> {
    if cfg.n_ions != 2 {
        return Err(Error::UnsupportedIonCount { n_ions: cfg.n_ions });
    }
    let l = cfg.length_scale();
    let omega_b = 3.0f64.sqrt() * cfg.omega_z;
    let z_b = (HBAR / (2.0 * cfg.ion_mass * omega_b)).sqrt();
    let lambda = omega_b * z_b / (2.0f64.powf(5.0 / 6.0) * l);
    let omega_rock_x = (cfg.omega_x * cfg.omega_x - cfg.omega_z * cfg.omega_z).sqrt();
    let omega_rock_y = (cfg.omega_y * cfg.omega_y - cfg.omega_z * cfg.omega_z).sqrt();
    Ok(CouplingConstants {
        length_scale: l,
        ground_state_size: z_b,
        lambda,
        omega_b,
        omega_rock_x,
        omega_rock_y,
    })
}

/// Default hierarchy-ratio threshold for [`resonance_check`].
pub const DEFAULT_HIERARCHY_THRESHOLD: f64 = 20.0;

/// Solve the chosen sideband resonance condition for the radial trap
/// frequency and report whether the rotating-wave hierarchy holds.
///
/// The two conditions are `omega_b = 2 omega_rock + omega` (breathing
/// drive) and `omega_b = 2 omega_rock - omega` (rocking drive). The flags
/// test `omega_b >= threshold * lambda` and
/// `|omega_rock_y - omega_b| >= threshold * lambda`.
pub fn resonance_check(
    cfg: &TrapConfig,
    case: SensingCase,
    omega: f64,
    threshold: Option<f64>,
) -> Result<ResonanceReport> {
    let threshold = threshold.unwrap_or(DEFAULT_HIERARCHY_THRESHOLD);
    let coupling = trilinear_coupling(cfg)?;
    let omega_b = coupling.omega_b;
    let omega_rock = match case {
        SensingCase::BreathingDrive => (omega_b - omega) / 2.0,
        SensingCase::RockingDrive => (omega_b + omega) / 2.0,
    };
    if omega_rock <= 0.0 {
        return Err(Error::NoResonanceSolution { omega_rock });
    }
    let required_omega_x = (omega_rock * omega_rock + cfg.omega_z * cfg.omega_z).sqrt();
    let lambda = coupling.lambda;
    let y_sep = (coupling.omega_rock_y - omega_b).abs();
    Ok(ResonanceReport {
        case,
        omega,
        omega_rock,
        required_omega_x,
        lambda_over_omega_b: lambda / omega_b,
        y_mode_separation_over_lambda: y_sep / lambda,
        threshold,
        breathing_hierarchy_ok: omega_b >= threshold * lambda,
        y_mode_separation_ok: y_sep >= threshold * lambda,
    })
}
