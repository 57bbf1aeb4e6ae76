//! Numerical-hygiene checks over the shipped figure configurations:
//! norm preservation, energy conservation, agreement of the two
//! propagation methods, and truncation-scan convergence at the shipped
//! cutoffs. Each check prints one PASS/FAIL line.

use trilinear::fock::{prepare_state, Ket, SpaceLayout};
use trilinear::hamiltonians::DriveCase;
use trilinear::propagation::{
    evolve, truncation_scan, Method, Observable, SpectralPropagator, SCAN_CONVERGENCE_TOL,
};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::reproduce::{shipped_config, FIGURES};
use crate::runner::observables_for;

pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> CheckLine {
    CheckLine {
        name: name.to_string(),
        passed,
        detail,
    }
}

const NORM_DRIFT_TOL: f64 = 1e-9;
const ENERGY_DRIFT_TOL: f64 = 1e-8;
const METHOD_AGREEMENT_TOL: f64 = 1e-7;

fn build(cfg: &ExperimentConfig) -> Result<(trilinear::fock::LinOp, Ket), CliError> {
    let drive = cfg.drive();
    let layout = cfg.cutoffs;
    let h = match drive.case {
        DriveCase::SpinBreathing => trilinear::hamiltonians::h_case1(layout, &drive)?,
        DriveCase::SpinRocking => trilinear::hamiltonians::h_case2(layout, &drive)?,
    };
    let psi0 = prepare_state(layout, &cfg.state)?;
    Ok((h, psi0))
}

/// Norm and energy drift along the fig2 trajectory, measured on the raw
/// propagated amplitudes (before any renormalization).
fn drift_checks(out: &mut Vec<CheckLine>) -> Result<(), CliError> {
    let cfg = crate::config::parse(shipped_config("fig2")?)?;
    let (h, psi0) = build(&cfg)?;
    let prop = SpectralPropagator::new(&h)?;
    let coeffs = prop.coefficients(&psi0);
    let e0 = psi0.expectation(&h);
    let mut max_norm_drift: f64 = 0.0;
    let mut max_energy_drift: f64 = 0.0;
    for &t in &cfg.time_grid() {
        let raw = prop.propagate_coefficients(&coeffs, t);
        max_norm_drift = max_norm_drift.max((raw.norm() - 1.0).abs());
        let psi = Ket::from_amplitudes(cfg.cutoffs, raw)?;
        let e = psi.expectation(&h);
        max_energy_drift = max_energy_drift.max(((e - e0) / e0).abs());
    }
    out.push(check(
        "norm drift",
        max_norm_drift < NORM_DRIFT_TOL,
        format!("max |norm - 1| = {max_norm_drift:.3e} (tol {NORM_DRIFT_TOL:.0e})"),
    ));
    out.push(check(
        "energy conservation",
        max_energy_drift < ENERGY_DRIFT_TOL,
        format!("max relative <H> drift = {max_energy_drift:.3e} (tol {ENERGY_DRIFT_TOL:.0e})"),
    ));
    Ok(())
}

/// Eigendecomposition vs Lanczos propagation at fig2 parameters.
fn method_agreement(out: &mut Vec<CheckLine>) -> Result<(), CliError> {
    let cfg = crate::config::parse(shipped_config("fig2")?)?;
    let (h, psi0) = build(&cfg)?;
    let t = 2e-3;
    let mut settings = cfg.propagator_settings();
    settings.method = Method::Eigendecomposition;
    let eig = evolve(&h, &psi0, t, &settings)?;
    settings.method = Method::Krylov;
    let kry = evolve(&h, &psi0, t, &settings)?;
    let max_diff = eig
        .amplitudes()
        .iter()
        .zip(kry.amplitudes().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    out.push(check(
        "eig-vs-krylov agreement",
        max_diff < METHOD_AGREEMENT_TOL,
        format!("max amplitude difference = {max_diff:.3e} (tol {METHOD_AGREEMENT_TOL:.0e})"),
    ));
    Ok(())
}

/// Cutoff rungs approaching each shipped layout. The lower rungs must
/// already hold the reachable excitation sectors, otherwise the scan
/// reports their distortion instead of the shipped layout's convergence;
/// the squeezing run needs wide rocking steps because its distribution
/// has a slowly decaying tail.
fn ladder_for(fig: &str, layout: SpaceLayout) -> Vec<SpaceLayout> {
    let rungs: &[(usize, usize)] = match fig {
        "fig1" => &[(20, 36), (20, 40), (20, 44)],
        "fig2" => &[(6, 6), (7, 8), (8, 10)],
        "fig3" => &[(13, 14), (14, 15), (15, 16)],
        "fig4a" | "fig4b" => &[(6, 6), (7, 7), (8, 8)],
        _ => return vec![layout],
    };
    let ladder: Vec<SpaceLayout> = rungs.iter().map(|&(b, r)| SpaceLayout::new(b, r)).collect();
    debug_assert_eq!(
        *ladder.last().unwrap(),
        layout,
        "{fig} ladder must end at the shipped cutoffs"
    );
    ladder
}

fn scan_checks(out: &mut Vec<CheckLine>) -> Result<(), CliError> {
    for fig in FIGURES {
        let cfg = crate::config::parse(shipped_config(fig)?)?;
        let observables: Vec<Observable> = cfg
            .outputs
            .iter()
            .flat_map(|o| observables_for(&cfg, o))
            .collect();
        let drive = cfg.drive();
        let state = cfg.state;
        let report = truncation_scan(
            |layout| match drive.case {
                DriveCase::SpinBreathing => trilinear::hamiltonians::h_case1(layout, &drive),
                DriveCase::SpinRocking => trilinear::hamiltonians::h_case2(layout, &drive),
            },
            |layout| prepare_state(layout, &state),
            drive.duration,
            &ladder_for(fig, cfg.cutoffs),
            &observables,
            &cfg.propagator_settings(),
        )?;
        let change = report
            .entries
            .last()
            .and_then(|e| e.max_abs_change)
            .unwrap_or(0.0);
        out.push(check(
            &format!("truncation scan {fig}"),
            report.converged,
            format!(
                "max-abs change at shipped cutoffs = {change:.3e} (tol {SCAN_CONVERGENCE_TOL:.0e})"
            ),
        ));
    }
    Ok(())
}

/// Run every check; returns the lines (all must pass for a clean exit).
pub fn run_selftest() -> Result<Vec<CheckLine>, CliError> {
    let mut out = Vec::new();
    drift_checks(&mut out)?;
    method_agreement(&mut out)?;
    scan_checks(&mut out)?;
    Ok(out)
}
