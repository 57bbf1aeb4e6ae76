//! Exact unitary time evolution under a time-independent Hamiltonian,
//! with observable time series and truncation safety checks.
//!
//! Two interchangeable methods: full hermitian eigendecomposition
//! (amortized across a time grid) and a Lanczos short-recurrence
//! propagator with full re-orthogonalization for larger spaces. Both are
//! deterministic for fixed inputs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::fock::{Ket, LinOp, Mode, SpaceLayout};
use crate::linalg::eigh_tridiagonal;
use crate::{Error, Result};

/// Propagation method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Dense hermitian eigendecomposition; exact up to rounding,
    /// one-time O(n^3) cost reused over a whole time grid.
    Eigendecomposition,
    /// Lanczos Krylov propagator with internal substepping.
    Krylov,
}

/// Knobs of the propagator. `time_step` is a sampling default for callers
/// that build uniform grids; it does not affect accuracy.
#[derive(Debug, Clone, Copy)]
pub struct PropagatorSettings {
    pub method: Method,
    pub krylov_dim: usize,
    pub time_step: f64,
    pub norm_tol: f64,
    pub tail_mass_tol: f64,
}

impl Default for PropagatorSettings {
    fn default() -> Self {
        Self {
            method: Method::Eigendecomposition,
            krylov_dim: 30,
            time_step: 1e-4,
            norm_tol: 1e-9,
            tail_mass_tol: 1e-6,
        }
    }
}

impl PropagatorSettings {
    fn validate(&self) -> Result<()> {
        if self.krylov_dim < 2 {
            return Err(Error::InvalidInput("krylov_dim must be at least 2".into()));
        }
        if !self.time_step.is_finite() || self.time_step <= 0.0 {
            return Err(Error::InvalidInput("time_step must be positive".into()));
        }
        for (name, tol) in [
            ("norm_tol", self.norm_tol),
            ("tail_mass_tol", self.tail_mass_tol),
        ] {
            if !tol.is_finite() || tol <= 0.0 || tol >= 1.0 {
                return Err(Error::InvalidInput(format!("{name} must lie in (0, 1)")));
            }
        }
        Ok(())
    }
}

/// Population within the last two Fock levels of `mode`'s cutoff.
pub fn tail_mass(psi: &Ket, mode: Mode) -> f64 {
    let layout = psi.layout();
    let cut = layout.cutoff(mode);
    let guard_from = cut.saturating_sub(1);
    psi.fock_probs(mode)[guard_from..].iter().sum()
}

fn check_state(psi: &Ket, settings: &PropagatorSettings) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > settings.norm_tol {
        return Err(Error::NormDrift {
            norm,
            tol: settings.norm_tol,
        });
    }
    let tb = tail_mass(psi, Mode::Breathing);
    let tr = tail_mass(psi, Mode::Rocking);
    let (mode, mass) = if tb >= tr {
        (Mode::Breathing, tb)
    } else {
        (Mode::Rocking, tr)
    };
    if mass > settings.tail_mass_tol {
        return Err(Error::TruncationBreach {
            mode,
            mass,
            tol: settings.tail_mass_tol,
        });
    }
    Ok(())
}

/// Cached hermitian eigendecomposition of a Hamiltonian, for repeated
/// propagation of states from the same operator.
pub struct SpectralPropagator {
    vectors: DMatrix<Complex64>,
    values: DVector<f64>,
    layout: SpaceLayout,
}

impl SpectralPropagator {
    pub fn new(h: &LinOp) -> Result<Self> {
        h.assert_hermitian(1e-10)?;
        let eig = h.matrix().clone().symmetric_eigen();
        Ok(Self {
            vectors: eig.eigenvectors,
            values: eig.eigenvalues,
            layout: h.layout(),
        })
    }

    /// Spectral coefficients `V^dag psi` of a state.
    pub fn coefficients(&self, psi: &Ket) -> DVector<Complex64> {
        self.vectors.adjoint() * psi.amplitudes()
    }

    /// `exp(-i H t) psi0` from precomputed coefficients.
    pub fn propagate_coefficients(
        &self,
        coeffs: &DVector<Complex64>,
        t: f64,
    ) -> DVector<Complex64> {
        let phased = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(self.values.iter())
                .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t)),
        );
        &self.vectors * phased
    }

    pub fn propagate(&self, psi0: &Ket, t: f64) -> Result<Ket> {
        if psi0.layout() != self.layout {
            return Err(Error::LayoutMismatch);
        }
        let coeffs = self.coefficients(psi0);
        Ket::from_amplitudes(self.layout, self.propagate_coefficients(&coeffs, t))
    }
}

/// Upper bound on the spectral spread of a hermitian matrix and its
/// center, from Gershgorin disks.
fn gershgorin(h: &DMatrix<Complex64>) -> (f64, f64) {
    let n = h.nrows();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let d = h[(i, i)].re;
        let mut radius = 0.0;
        for j in 0..n {
            if j != i {
                radius += h[(i, j)].norm();
            }
        }
        lo = lo.min(d - radius);
        hi = hi.max(d + radius);
    }
    (0.5 * (lo + hi), 0.5 * (hi - lo).max(0.0))
}

/// One Lanczos approximation of `exp(-i H tau) v` with `||v|| = 1`.
/// `H` must be hermitian; the tridiagonal coefficients are real.
fn lanczos_substep(
    h: &DMatrix<Complex64>,
    v: &DVector<Complex64>,
    tau: f64,
    m: usize,
) -> DVector<Complex64> {
    let n = v.len();
    let m = m.min(n);
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(m);
    let mut alpha: Vec<f64> = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m.saturating_sub(1));

    basis.push(v.clone());
    let mut w = h * &basis[0];
    alpha.push(basis[0].dotc(&w).re);
    w -= &basis[0] * Complex64::new(alpha[0], 0.0);

    for j in 1..m {
        // full re-orthogonalization keeps the recurrence stable
        for q in &basis {
            let overlap = q.dotc(&w);
            w -= q * overlap;
        }
        let b = w.norm();
        if b < 1e-13 {
            break; // happy breakdown: the Krylov space is invariant
        }
        beta.push(b);
        let q_next = &w / Complex64::new(b, 0.0);
        w = h * &q_next;
        alpha.push(q_next.dotc(&w).re);
        w -= &q_next * Complex64::new(alpha[j], 0.0);
        w -= &basis[j - 1] * Complex64::new(beta[j - 1], 0.0);
        basis.push(q_next);
    }

    let k = alpha.len();
    let (vals, vecs) = eigh_tridiagonal(&alpha, &beta[..k - 1]);
    // y = U exp(-i D tau) U^T e_1
    let mut y = vec![Complex64::new(0.0, 0.0); k];
    for (p, &val) in vals.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -val * tau);
        let weight = vecs[p]; // first row of U: e_1^T U
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += vecs[i * k + p] * phase * weight;
        }
    }
    let mut out = DVector::zeros(n);
    for (q, yi) in basis.iter().zip(&y) {
        out += q * *yi;
    }
    out
}

/// `exp(-i H t) psi0` by substepped Lanczos iteration. The step size is
/// chosen so each substep's Krylov polynomial degree comfortably covers
/// the Gershgorin spectral spread.
pub fn krylov_evolve(h: &LinOp, psi0: &Ket, t: f64, settings: &PropagatorSettings) -> Result<Ket> {
    h.assert_hermitian(1e-10)?;
    if psi0.layout() != h.layout() {
        return Err(Error::LayoutMismatch);
    }
    let (center, spread) = gershgorin(h.matrix());
    let m = settings.krylov_dim;
    // per-substep phase budget; error per step ~ (e theta / 2m)^m
    let theta_cap = 0.25 * m as f64;
    let steps = ((spread * t.abs()) / theta_cap).ceil().max(1.0) as usize;
    let tau = t / steps as f64;

    let shift = DMatrix::from_diagonal_element(
        h.matrix().nrows(),
        h.matrix().ncols(),
        Complex64::new(center, 0.0),
    );
    let centered = h.matrix() - shift;

    let mut v = psi0.amplitudes().clone();
    for _ in 0..steps {
        v = lanczos_substep(&centered, &v, tau, m);
        let norm = v.norm();
        v.scale_mut(1.0 / norm);
    }
    // restore the phase removed by centering
    let global = Complex64::from_polar(1.0, -center * t);
    Ket::from_amplitudes(psi0.layout(), v * global)
}

fn evolve_unchecked(h: &LinOp, psi0: &Ket, t: f64, settings: &PropagatorSettings) -> Result<Ket> {
    match settings.method {
        Method::Eigendecomposition => SpectralPropagator::new(h)?.propagate(psi0, t),
        Method::Krylov => krylov_evolve(h, psi0, t, settings),
    }
}

/// Evolve `psi0` for time `t` under the hermitian operator `h`.
///
/// The result is checked for norm drift and for truncation breaches
/// (population within two Fock levels of either cutoff above
/// `tail_mass_tol`); a breach is an error because squeezing-type growth
/// silently corrupts distributions once it reaches the boundary.
pub fn evolve(h: &LinOp, psi0: &Ket, t: f64, settings: &PropagatorSettings) -> Result<Ket> {
    settings.validate()?;
    let psi = evolve_unchecked(h, psi0, t, settings)?;
    check_state(&psi, settings)?;
    Ok(psi)
}

/// A single observable extracted from a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// Probability of Fock level `n` in `mode`'s marginal distribution.
    FockProb {
        mode: Mode,
        n: usize,
    },
    SpinDown,
    SpinUp,
}

impl Observable {
    /// Column label used in emitted tables.
    pub fn label(&self) -> String {
        match self {
            Observable::FockProb {
                mode: Mode::Breathing,
                n,
            } => format!("p_nb_{n}"),
            Observable::FockProb {
                mode: Mode::Rocking,
                n,
            } => format!("p_nr_{n}"),
            Observable::SpinDown => "p_down".to_string(),
            Observable::SpinUp => "p_up".to_string(),
        }
    }

    pub fn extract(&self, psi: &Ket) -> f64 {
        match self {
            Observable::FockProb { mode, n } => {
                psi.fock_probs(*mode).get(*n).copied().unwrap_or(0.0)
            }
            Observable::SpinDown => psi.spin_probs().0,
            Observable::SpinUp => psi.spin_probs().1,
        }
    }
}

/// Time series of observables: one row per grid point.
#[derive(Debug, Clone)]
pub struct SeriesTable {
    pub times: Vec<f64>,
    pub labels: Vec<String>,
    /// `values[row][col]` aligned with `times` and `labels`.
    pub values: Vec<Vec<f64>>,
}

/// Evaluate observables along a monotone time grid.
///
/// With the eigendecomposition method a single spectral factorization is
/// reused for every grid point.
pub fn observable_series(
    h: &LinOp,
    psi0: &Ket,
    t_grid: &[f64],
    observables: &[Observable],
    settings: &PropagatorSettings,
) -> Result<SeriesTable> {
    Ok(observable_series_with_final(h, psi0, t_grid, observables, settings)?.0)
}

/// [`observable_series`] that also hands back the state at the last grid
/// point, so callers needing final-state diagnostics avoid a second
/// factorization. The final state is `psi0` when the grid is empty.
pub fn observable_series_with_final(
    h: &LinOp,
    psi0: &Ket,
    t_grid: &[f64],
    observables: &[Observable],
    settings: &PropagatorSettings,
) -> Result<(SeriesTable, Ket)> {
    settings.validate()?;
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::NonMonotoneGrid);
    }
    let labels: Vec<String> = observables.iter().map(|o| o.label()).collect();
    let mut values = Vec::with_capacity(t_grid.len());
    let mut last = psi0.clone();

    match settings.method {
        Method::Eigendecomposition => {
            let prop = SpectralPropagator::new(h)?;
            let coeffs = prop.coefficients(psi0);
            for &t in t_grid {
                let amps = prop.propagate_coefficients(&coeffs, t);
                let psi = Ket::from_amplitudes(psi0.layout(), amps)?;
                check_state(&psi, settings)?;
                values.push(observables.iter().map(|o| o.extract(&psi)).collect());
                last = psi;
            }
        }
        Method::Krylov => {
            // step from sample to sample instead of restarting at 0
            let mut psi = psi0.clone();
            let mut t_prev = 0.0;
            for &t in t_grid {
                psi = krylov_evolve(h, &psi, t - t_prev, settings)?;
                t_prev = t;
                check_state(&psi, settings)?;
                values.push(observables.iter().map(|o| o.extract(&psi)).collect());
                last = psi.clone();
            }
        }
    }

    let table = SeriesTable {
        times: t_grid.to_vec(),
        labels,
        values,
    };
    Ok((table, last))
}

/// Convergence threshold of [`truncation_scan`].
pub const SCAN_CONVERGENCE_TOL: f64 = 1e-6;

/// One rung of a truncation scan.
#[derive(Debug, Clone)]
pub struct ScanEntry {
    pub layout: SpaceLayout,
    pub reported: Vec<f64>,
    pub tail_mass_b: f64,
    pub tail_mass_r: f64,
    /// Max-abs change of the reported probabilities against the previous
    /// rung; `None` on the first rung.
    pub max_abs_change: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub entries: Vec<ScanEntry>,
    /// True when the last rung changed by less than [`SCAN_CONVERGENCE_TOL`].
    pub converged: bool,
}

/// Re-run one evolution on an ascending ladder of cutoffs and report how
/// the observables settle. Tail-mass guarding is off inside the scan:
/// small rungs are expected to breach, that is what the scan measures.
pub fn truncation_scan<FH, FS>(
    build_h: FH,
    build_psi: FS,
    t: f64,
    ladder: &[SpaceLayout],
    observables: &[Observable],
    settings: &PropagatorSettings,
) -> Result<ScanReport>
where
    FH: Fn(SpaceLayout) -> Result<LinOp>,
    FS: Fn(SpaceLayout) -> Result<Ket>,
{
    if ladder.is_empty() {
        return Err(Error::BadCutoffLadder);
    }
    for w in ladder.windows(2) {
        let ascending = w[1].n_cut_b >= w[0].n_cut_b
            && w[1].n_cut_r >= w[0].n_cut_r
            && w[1].total_dim() > w[0].total_dim();
        if !ascending {
            return Err(Error::BadCutoffLadder);
        }
    }
    settings.validate()?;

    let mut entries: Vec<ScanEntry> = Vec::with_capacity(ladder.len());
    for &layout in ladder {
        let h = build_h(layout)?;
        let psi0 = build_psi(layout)?;
        let psi = evolve_unchecked(&h, &psi0, t, settings)?;
        let reported: Vec<f64> = observables.iter().map(|o| o.extract(&psi)).collect();
        let max_abs_change = entries.last().map(|prev| {
            reported
                .iter()
                .zip(&prev.reported)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        });
        entries.push(ScanEntry {
            layout,
            reported,
            tail_mass_b: tail_mass(&psi, Mode::Breathing),
            tail_mass_r: tail_mass(&psi, Mode::Rocking),
            max_abs_change,
        });
    }
    let converged = entries
        .last()
        .and_then(|e| e.max_abs_change)
        .map(|c| c < SCAN_CONVERGENCE_TOL)
        .unwrap_or(ladder.len() == 1);
    Ok(ScanReport { entries, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{pauli, MotionalSpec, PauliOp, Spin, SpinSpec, StateSpec};
    use crate::hamiltonians::{h_eff_case2, DriveCase, DriveConfig};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::TAU;

    fn settings() -> PropagatorSettings {
        PropagatorSettings::default()
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let l = SpaceLayout::new(4, 4);
        let h = LinOp::zeros(l);
        let psi0 = Ket::basis_state(l, Spin::Down, 1, 1);
        let psi = evolve(&h, &psi0, 1.0, &settings()).unwrap();
        assert_abs_diff_eq!((psi.inner(&psi0)).re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rabi_flopping_closed_form() {
        let l = SpaceLayout::new(2, 2);
        let rabi = TAU * 1e3;
        let h = pauli(l, PauliOp::X).scale(rabi / 2.0);
        let psi0 = Ket::basis_state(l, Spin::Down, 0, 0);
        for &t in &[0.0, 1.3e-4, 2.9e-4, 5.0e-4] {
            let psi = evolve(&h, &psi0, t, &settings()).unwrap();
            let (_, p_up) = psi.spin_probs();
            assert_abs_diff_eq!(p_up, (rabi * t / 2.0).sin().powi(2), epsilon = 1e-10);
        }
    }

    #[test]
    fn spin_ramsey_oscillation_under_effective_beam_splitter() {
        // Fig-4a-style parameters: theta = 2 g lambda / omega = 2pi * 40 Hz
        let l = SpaceLayout::new(4, 4);
        let cfg = DriveConfig {
            case: DriveCase::SpinRocking,
            g: TAU * 3.0e3,
            omega: TAU * 60e3,
            lambda: TAU * 400.0,
            duration: 5e-3,
        };
        let theta = 2.0 * cfg.g * cfg.lambda / cfg.omega;
        assert_abs_diff_eq!(theta, TAU * 40.0, epsilon = 1e-9);
        let h = h_eff_case2(l, &cfg, false).unwrap();
        let psi0 = crate::fock::prepare_state(
            l,
            &StateSpec {
                spin: SpinSpec::Down,
                motional: MotionalSpec::Binomial(1),
            },
        )
        .unwrap();
        for &t in &[0.0, 1e-3, 2.5e-3, 5e-3] {
            let psi = evolve(&h, &psi0, t, &settings()).unwrap();
            let (p_down, p_up) = psi.spin_probs();
            assert_abs_diff_eq!(p_down, (theta * t).cos().powi(2), epsilon = 1e-9);
            assert_abs_diff_eq!(p_up, (theta * t).sin().powi(2), epsilon = 1e-9);
        }
    }

    fn test_hamiltonian(l: SpaceLayout) -> LinOp {
        let cfg = DriveConfig {
            case: DriveCase::SpinRocking,
            g: TAU * 3.5e3,
            omega: TAU * 45e3,
            lambda: TAU * 150.0,
            duration: 1e-3,
        };
        crate::hamiltonians::h_case2(l, &cfg).unwrap()
    }

    #[test]
    fn unitarity_and_energy_conservation() {
        let l = SpaceLayout::new(8, 10);
        let h = test_hamiltonian(l);
        let psi0 = crate::fock::prepare_state(
            l,
            &StateSpec {
                spin: SpinSpec::Plus,
                motional: MotionalSpec::Fock { n_b: 2, n_r: 0 },
            },
        )
        .unwrap();
        let e0 = psi0.expectation(&h);
        for &t in &[1e-4, 1e-3, 5e-3] {
            let psi = evolve(&h, &psi0, t, &settings()).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-9);
            let e = psi.expectation(&h);
            assert!(((e - e0) / e0).abs() < 1e-8, "energy drift at t={t}");
        }
    }

    #[test]
    fn composition_property() {
        let l = SpaceLayout::new(8, 10);
        let h = test_hamiltonian(l);
        let psi0 = Ket::basis_state(l, Spin::Down, 1, 2);
        let (t1, t2) = (0.7e-3, 1.9e-3);
        let once = evolve(&h, &psi0, t1 + t2, &settings()).unwrap();
        let twice = evolve(
            &h,
            &evolve(&h, &psi0, t1, &settings()).unwrap(),
            t2,
            &settings(),
        )
        .unwrap();
        let overlap = once.inner(&twice).norm();
        assert!((overlap - 1.0).abs() < 1e-10);
        let max_diff = once
            .amplitudes()
            .iter()
            .zip(twice.amplitudes().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(max_diff < 1e-8);
    }

    #[test]
    fn krylov_agrees_with_eigendecomposition() {
        let l = SpaceLayout::new(8, 10);
        let h = test_hamiltonian(l);
        let psi0 = crate::fock::prepare_state(
            l,
            &StateSpec {
                spin: SpinSpec::Plus,
                motional: MotionalSpec::Fock { n_b: 2, n_r: 0 },
            },
        )
        .unwrap();
        let t = 2e-3;
        let eig = evolve(&h, &psi0, t, &settings()).unwrap();
        let mut kset = settings();
        kset.method = Method::Krylov;
        let kry = evolve(&h, &psi0, t, &kset).unwrap();
        let max_diff = eig
            .amplitudes()
            .iter()
            .zip(kry.amplitudes().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(max_diff < 1e-7, "eig-vs-krylov max diff {max_diff:.3e}");
    }

    #[test]
    fn series_reuses_decomposition_and_matches_single_shots() {
        let l = SpaceLayout::new(4, 6);
        let h = test_hamiltonian(l);
        let psi0 = Ket::basis_state(l, Spin::Down, 1, 0);
        let grid: Vec<f64> = (0..=10).map(|k| k as f64 * 2e-4).collect();
        let obs = [
            Observable::FockProb {
                mode: Mode::Breathing,
                n: 1,
            },
            Observable::SpinDown,
        ];
        let table = observable_series(&h, &psi0, &grid, &obs, &settings()).unwrap();
        assert_eq!(table.values.len(), grid.len());
        assert_eq!(
            table.labels,
            vec!["p_nb_1".to_string(), "p_down".to_string()]
        );
        for (row, &t) in table.values.iter().zip(&grid) {
            let psi = evolve(&h, &psi0, t, &settings()).unwrap();
            assert_abs_diff_eq!(row[0], psi.fock_probs(Mode::Breathing)[1], epsilon = 1e-10);
            assert_abs_diff_eq!(row[1], psi.spin_probs().0, epsilon = 1e-10);
        }
    }

    #[test]
    fn empty_and_single_point_grids() {
        let l = SpaceLayout::new(2, 2);
        let h = LinOp::zeros(l);
        let psi0 = Ket::basis_state(l, Spin::Up, 0, 0);
        let table = observable_series(&h, &psi0, &[], &[Observable::SpinUp], &settings()).unwrap();
        assert!(table.values.is_empty());
        let table =
            observable_series(&h, &psi0, &[0.0], &[Observable::SpinUp], &settings()).unwrap();
        assert_abs_diff_eq!(table.values[0][0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn non_monotone_grid_rejected() {
        let l = SpaceLayout::new(1, 1);
        let h = LinOp::zeros(l);
        let psi0 = Ket::basis_state(l, Spin::Down, 0, 0);
        let err = observable_series(
            &h,
            &psi0,
            &[0.0, 1.0, 0.5],
            &[Observable::SpinUp],
            &settings(),
        );
        assert!(matches!(err, Err(Error::NonMonotoneGrid)));
    }

    #[test]
    fn truncation_breach_is_reported_with_mode() {
        // a resonant drive walks the breathing ladder straight into the cutoff
        let l = SpaceLayout::new(3, 4);
        let a_b = crate::fock::annihilator(l, Mode::Breathing);
        let drive = a_b.add(&a_b.adjoint()).scale(TAU * 1e3);
        let psi0 = Ket::basis_state(l, Spin::Down, 0, 0);
        let err = evolve(&drive, &psi0, 1e-3, &settings()).unwrap_err();
        match err {
            Error::TruncationBreach { mode, mass, .. } => {
                assert_eq!(mode, Mode::Breathing);
                assert!(mass > 1e-6);
            }
            other => panic!("expected truncation breach, got {other}"),
        }
    }

    #[test]
    fn scan_trivially_converges_without_coupling() {
        let obs = [Observable::FockProb {
            mode: Mode::Breathing,
            n: 0,
        }];
        let ladder = [
            SpaceLayout::new(1, 1),
            SpaceLayout::new(2, 2),
            SpaceLayout::new(3, 3),
        ];
        let report = truncation_scan(
            |l| Ok(LinOp::zeros(l)),
            |l| Ok(Ket::basis_state(l, Spin::Down, 0, 0)),
            1.0,
            &ladder,
            &obs,
            &settings(),
        )
        .unwrap();
        assert!(report.converged);
        assert_eq!(report.entries.len(), 3);
        assert_abs_diff_eq!(
            report.entries[2].max_abs_change.unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn scan_rejects_non_ascending_ladder() {
        let obs = [Observable::SpinDown];
        let ladder = [SpaceLayout::new(3, 3), SpaceLayout::new(2, 4)];
        let err = truncation_scan(
            |l| Ok(LinOp::zeros(l)),
            |l| Ok(Ket::basis_state(l, Spin::Down, 0, 0)),
            1.0,
            &ladder,
            &obs,
            &settings(),
        );
        assert!(matches!(err, Err(Error::BadCutoffLadder)));
    }

    #[test]
    fn scan_tail_mass_decreases_with_cutoff() {
        let ladder = [
            SpaceLayout::new(4, 8),
            SpaceLayout::new(6, 12),
            SpaceLayout::new(8, 16),
        ];
        let obs = [Observable::FockProb {
            mode: Mode::Rocking,
            n: 0,
        }];
        let report = truncation_scan(
            |l| Ok(test_hamiltonian(l)),
            |l| {
                crate::fock::prepare_state(
                    l,
                    &StateSpec {
                        spin: SpinSpec::Plus,
                        motional: MotionalSpec::Fock { n_b: 2, n_r: 0 },
                    },
                )
            },
            2e-3,
            &ladder,
            &obs,
            &settings(),
        )
        .unwrap();
        let tails: Vec<f64> = report.entries.iter().map(|e| e.tail_mass_r).collect();
        assert!(tails[0] > tails[1] && tails[1] > tails[2], "{tails:?}");
    }
}
