//! Experiment execution: exact propagation, analytic overlays, Fisher
//! information, and CSV assembly. Artifacts are built fully in memory and
//! written only on success, so a failed run leaves no partial files.

use std::f64::consts::TAU;

use trilinear::analytic::{
    beam_splitter_pmf, ramsey_populations, squeezed_vacuum_pmf, twin_fock_pmf, EffectiveParams,
};
use trilinear::estimation::{
    cfi, cramer_rao, qfi_pure, qfi_squeezed_analytic, CfiReport, ProbabilityModel,
    DEFAULT_FD_REL_STEP,
};
use trilinear::fock::{prepare_state, Ket, LinOp, Mode, MotionalSpec, SpaceLayout};
use trilinear::hamiltonians::{h_case1, h_case2, DriveCase, DriveConfig, WeakCouplingReport};
use trilinear::propagation::{
    evolve, observable_series, observable_series_with_final, tail_mass, Observable, SeriesTable,
};

use crate::config::{EstimationSource, ExperimentConfig, Measurement, OutputSpec};
use crate::csvfmt::{render_table, sig12};
use crate::error::CliError;

/// A finished run: named CSV payloads plus a human-readable summary.
pub struct RunArtifacts {
    pub files: Vec<(String, String)>,
    pub summary: RunSummary,
}

pub struct RunSummary {
    pub name: String,
    pub scheme: DriveCase,
    pub weak: WeakCouplingReport,
    pub effective: EffectiveParams,
    pub t_final_ms: f64,
    /// Max |exact - analytic| over all overlaid series columns.
    pub analytic_max_dev: Option<f64>,
    pub cfi: Option<CfiReport>,
    pub qfi: Option<f64>,
    pub delta_lambda: Option<f64>,
    pub nu: u64,
    pub final_tail_b: f64,
    pub final_tail_r: f64,
}

impl RunSummary {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let scheme = match self.scheme {
            DriveCase::SpinBreathing => "case1 (breathing drive, rocking squeezing)",
            DriveCase::SpinRocking => "case2 (rocking drive, mode beam splitter)",
        };
        s.push_str(&format!("run: {}\n", self.name));
        s.push_str(&format!("scheme: {scheme}\n"));
        s.push_str(&format!(
            "weak coupling: g/omega = {:.4}, lambda/omega = {:.6}{}\n",
            self.weak.g_over_omega,
            self.weak.lambda_over_omega,
            if self.weak.warn {
                "  [WARNING: outside the dispersive regime]"
            } else {
                ""
            }
        ));
        match self.scheme {
            DriveCase::SpinBreathing => s.push_str(&format!(
                "effective squeeze parameter at t_final: r = {:.6} (phase {:.6} rad)\n",
                self.effective.squeeze_r, self.effective.squeeze_phi
            )),
            DriveCase::SpinRocking => s.push_str(&format!(
                "effective beam-splitter rate: theta/2pi = {:.6} kHz (theta*t_final = {:.6} rad)\n",
                self.effective.theta / TAU / 1e3,
                self.effective.theta * self.t_final_ms * 1e-3
            )),
        }
        s.push_str(&format!(
            "final tail mass: breathing {:.3e}, rocking {:.3e}\n",
            self.final_tail_b, self.final_tail_r
        ));
        if let Some(dev) = self.analytic_max_dev {
            s.push_str(&format!("analytic-vs-exact max deviation: {dev:.6e}\n"));
        }
        if let Some(c) = &self.cfi {
            s.push_str(&format!(
                "CFI: {:.6e} (dropped derivative mass {:.3e})\n",
                c.value, c.dropped_derivative_mass
            ));
        }
        if let Some(q) = self.qfi {
            s.push_str(&format!("QFI: {q:.6e}\n"));
        }
        if let Some(d) = self.delta_lambda {
            s.push_str(&format!(
                "Cramer-Rao bound at nu = {}: delta lambda = {:.6e} rad/s = 2pi * {:.6e} Hz\n",
                self.nu,
                d,
                d / TAU
            ));
        }
        s
    }
}

fn build_hamiltonian(layout: SpaceLayout, drive: &DriveConfig) -> Result<LinOp, CliError> {
    let h = match drive.case {
        DriveCase::SpinBreathing => h_case1(layout, drive)?,
        DriveCase::SpinRocking => h_case2(layout, drive)?,
    };
    Ok(h)
}

fn expand_indices(indices: &[usize], cutoff: usize) -> Vec<usize> {
    if indices.is_empty() {
        (0..=cutoff).collect()
    } else {
        indices.to_vec()
    }
}

/// Observables one output spec reads from the propagated state
/// (estimation outputs read none).
pub fn observables_for(cfg: &ExperimentConfig, out: &OutputSpec) -> Vec<Observable> {
    match out {
        OutputSpec::FockB(idx) => expand_indices(idx, cfg.cutoffs.n_cut_b)
            .into_iter()
            .map(|n| Observable::FockProb {
                mode: Mode::Breathing,
                n,
            })
            .collect(),
        OutputSpec::FockR(idx) => expand_indices(idx, cfg.cutoffs.n_cut_r)
            .into_iter()
            .map(|n| Observable::FockProb {
                mode: Mode::Rocking,
                n,
            })
            .collect(),
        OutputSpec::Spin => vec![Observable::SpinDown, Observable::SpinUp],
        OutputSpec::Cfi | OutputSpec::Qfi => Vec::new(),
    }
}

/// Analytic overlay for one Fock/spin series column, when the dispersive
/// theory provides one for this scheme and initial state.
enum OverlayKind {
    /// Squeezed-vacuum rocking distribution, r grows linearly in time.
    SqueezedRocking,
    /// Beam-splitter binomial distribution of an initial `|n_b, 0>`.
    BeamSplitter { n_b: usize },
    /// Twin-Fock interference distribution of an initial `|n, n>`.
    TwinFock { n: usize },
    /// Ramsey populations of the n-quanta binomial family.
    Ramsey { n: usize },
}

fn overlay_kind(cfg: &ExperimentConfig, out: &OutputSpec) -> Option<OverlayKind> {
    match (cfg.scheme, out, cfg.state.motional) {
        (DriveCase::SpinBreathing, OutputSpec::FockR(_), MotionalSpec::Fock { n_r: 0, .. }) => {
            Some(OverlayKind::SqueezedRocking)
        }
        (DriveCase::SpinRocking, OutputSpec::FockB(_), MotionalSpec::Fock { n_b, n_r: 0 }) => {
            Some(OverlayKind::BeamSplitter { n_b })
        }
        (DriveCase::SpinRocking, OutputSpec::FockB(_), MotionalSpec::Fock { n_b, n_r })
            if n_b == n_r =>
        {
            Some(OverlayKind::TwinFock { n: n_b })
        }
        (DriveCase::SpinRocking, OutputSpec::Spin, MotionalSpec::Binomial(n))
        | (DriveCase::SpinRocking, OutputSpec::Spin, MotionalSpec::NoonLike(n)) => {
            Some(OverlayKind::Ramsey { n })
        }
        _ => None,
    }
}

fn overlay_values(
    kind: &OverlayKind,
    eff: &EffectiveParams,
    t: f64,
    indices: &[usize],
) -> Result<Vec<f64>, CliError> {
    let theta_t = eff.theta * t;
    match kind {
        OverlayKind::SqueezedRocking => {
            let r = eff.theta * t; // squeeze rate equals 2 g lambda / omega
            let n_max = indices.iter().copied().max().unwrap_or(0);
            let (pmf, _) = squeezed_vacuum_pmf(r.abs(), n_max)?;
            Ok(indices.iter().map(|&i| pmf[i]).collect())
        }
        OverlayKind::BeamSplitter { n_b } => {
            let pmf = beam_splitter_pmf(*n_b, theta_t);
            Ok(indices
                .iter()
                .map(|&i| pmf.get(i).copied().unwrap_or(0.0))
                .collect())
        }
        OverlayKind::TwinFock { n } => {
            let pmf = twin_fock_pmf(*n, theta_t);
            Ok(indices
                .iter()
                .map(|&i| pmf.get(i).copied().unwrap_or(0.0))
                .collect())
        }
        OverlayKind::Ramsey { n } => {
            let (down, up) = ramsey_populations(*n, eff.theta, t);
            Ok(vec![down, up])
        }
    }
}

fn measurement_pmf(psi: &Ket, measurement: Measurement) -> Vec<f64> {
    match measurement {
        Measurement::FockBreathing => psi.fock_probs(Mode::Breathing),
        Measurement::FockRocking => psi.fock_probs(Mode::Rocking),
        Measurement::Spin => {
            let (down, up) = psi.spin_probs();
            vec![down, up]
        }
    }
}

/// Evolve the configured initial state at the configured coupling except
/// `lambda`, which is the model parameter.
fn exact_final_state(cfg: &ExperimentConfig, lambda: f64) -> trilinear::Result<Ket> {
    let mut drive = cfg.drive();
    drive.lambda = lambda;
    let layout = cfg.cutoffs;
    let h = match drive.case {
        DriveCase::SpinBreathing => h_case1(layout, &drive)?,
        DriveCase::SpinRocking => h_case2(layout, &drive)?,
    };
    let psi0 = prepare_state(layout, &cfg.state)?;
    evolve(&h, &psi0, drive.duration, &cfg.propagator_settings())
}

/// Closed-form outcome distribution of the configured scheme as a
/// function of lambda, in the dispersive approximation.
fn analytic_pmf(cfg: &ExperimentConfig, lambda: f64) -> trilinear::Result<Vec<f64>> {
    let drive = cfg.drive();
    let rate = 2.0 * drive.g / drive.omega; // theta = rate * lambda
    let t = drive.duration;
    match (cfg.scheme, cfg.measurement, cfg.state.motional) {
        (DriveCase::SpinBreathing, Measurement::FockRocking, MotionalSpec::Fock { n_r: 0, .. }) => {
            let r = (rate * lambda * t).abs();
            // grow the support until the truncated mass is negligible
            let mut n_max = cfg.cutoffs.n_cut_r.max(32);
            loop {
                let (pmf, captured) = squeezed_vacuum_pmf(r, n_max)?;
                if 1.0 - captured < 1e-10 || n_max > 65536 {
                    return Ok(pmf);
                }
                n_max *= 2;
            }
        }
        (
            DriveCase::SpinRocking,
            Measurement::FockBreathing,
            MotionalSpec::Fock { n_b, n_r: 0 },
        ) => Ok(beam_splitter_pmf(n_b, rate * lambda * t)),
        (DriveCase::SpinRocking, Measurement::FockBreathing, MotionalSpec::Fock { n_b, n_r })
            if n_b == n_r =>
        {
            Ok(twin_fock_pmf(n_b, rate * lambda * t))
        }
        (DriveCase::SpinRocking, Measurement::Spin, MotionalSpec::Binomial(n))
        | (DriveCase::SpinRocking, Measurement::Spin, MotionalSpec::NoonLike(n)) => {
            let (down, up) = ramsey_populations(n, rate * lambda, t);
            Ok(vec![down, up])
        }
        _ => Err(trilinear::Error::InvalidInput(
            "no closed-form distribution for this scheme/state/measurement combination".into(),
        )),
    }
}

/// Classical Fisher information of the configured estimation problem.
pub fn compute_cfi(cfg: &ExperimentConfig) -> Result<CfiReport, CliError> {
    let drive = cfg.drive();
    let lambda_floor = drive.g * drive.g / drive.omega.abs();
    let measurement = cfg.measurement;
    let model = match cfg.estimation_source {
        EstimationSource::Exact => ProbabilityModel::new(move |lambda: f64| {
            Ok(measurement_pmf(
                &exact_final_state(cfg, lambda)?,
                measurement,
            ))
        }),
        EstimationSource::Analytic => {
            ProbabilityModel::new(move |lambda: f64| analytic_pmf(cfg, lambda))
        }
    }
    .with_lambda_floor(lambda_floor);
    Ok(cfi(&model, drive.lambda)?)
}

/// Quantum Fisher information of the configured probe family.
pub fn compute_qfi(cfg: &ExperimentConfig) -> Result<f64, CliError> {
    let drive = cfg.drive();
    let lambda_floor = drive.g * drive.g / drive.omega.abs();
    match cfg.estimation_source {
        EstimationSource::Exact => Ok(qfi_pure(
            |lambda| exact_final_state(cfg, lambda),
            drive.lambda,
            DEFAULT_FD_REL_STEP,
            lambda_floor,
        )?),
        EstimationSource::Analytic => match cfg.scheme {
            DriveCase::SpinBreathing => {
                Ok(qfi_squeezed_analytic(drive.g, drive.omega, drive.duration, cfg.nu)?.qfi)
            }
            DriveCase::SpinRocking => Err(CliError::Numerical(
                "analytic QFI is only available for the squeezing scheme (case1)".into(),
            )),
        },
    }
}

/// Execute a full experiment. `name` prefixes the emitted file names.
pub fn run_experiment(cfg: &ExperimentConfig, name: &str) -> Result<RunArtifacts, CliError> {
    let drive = cfg.drive();
    let layout = cfg.cutoffs;
    let settings = cfg.propagator_settings();
    let eff = EffectiveParams::from_drive(&drive)?;
    let weak = drive.weak_coupling();

    let h = build_hamiltonian(layout, &drive)?;
    let psi0 = prepare_state(layout, &cfg.state)?;
    let grid = cfg.time_grid();

    // observables for all series outputs, in request order
    let mut series_plans: Vec<(&OutputSpec, Vec<Observable>, String)> = Vec::new();
    for out in &cfg.outputs {
        let obs = observables_for(cfg, out);
        if obs.is_empty() {
            continue;
        }
        let suffix = match out {
            OutputSpec::FockB(_) => "fock_b",
            OutputSpec::FockR(_) => "fock_r",
            OutputSpec::Spin => "spin",
            _ => unreachable!(),
        };
        series_plans.push((out, obs, format!("{name}_{suffix}.csv")));
    }

    // one propagation pass over the union of requested observables
    let mut all_obs: Vec<Observable> = Vec::new();
    for (_, obs, _) in &series_plans {
        for o in obs {
            if !all_obs.contains(o) {
                all_obs.push(*o);
            }
        }
    }
    let (table, psi_final): (Option<SeriesTable>, Ket) = if all_obs.is_empty() {
        (None, evolve(&h, &psi0, drive.duration, &settings)?)
    } else {
        let (table, last) = observable_series_with_final(&h, &psi0, &grid, &all_obs, &settings)?;
        (Some(table), last)
    };

    let mut files = Vec::new();
    let mut analytic_max_dev: Option<f64> = None;

    for (out, obs, filename) in &series_plans {
        let table = table.as_ref().expect("series outputs imply a table");
        let mut header = vec!["t_ms".to_string()];
        header.extend(obs.iter().map(|o| o.label()));
        let overlay = overlay_kind(cfg, out);
        if overlay.is_some() {
            header.extend(obs.iter().map(|o| format!("analytic_{}", o.label())));
        }

        let indices: Vec<usize> = match out {
            OutputSpec::FockB(idx) => expand_indices(idx, layout.n_cut_b),
            OutputSpec::FockR(idx) => expand_indices(idx, layout.n_cut_r),
            _ => Vec::new(),
        };

        let mut rows = Vec::with_capacity(grid.len());
        for (row_idx, &t) in grid.iter().enumerate() {
            let mut row = vec![t * 1e3];
            for o in obs {
                let col = table.labels.iter().position(|l| l == &o.label()).unwrap();
                row.push(table.values[row_idx][col]);
            }
            if let Some(kind) = &overlay {
                let analytic = overlay_values(kind, &eff, t, &indices)?;
                for (k, v) in analytic.iter().enumerate() {
                    let exact = row[1 + k];
                    let dev = (exact - v).abs();
                    analytic_max_dev = Some(analytic_max_dev.unwrap_or(0.0).max(dev));
                    row.push(*v);
                }
            }
            rows.push(row);
        }
        files.push((filename.clone(), render_table(&header, &rows)));
    }

    // estimation outputs
    let wants_cfi = cfg.outputs.contains(&OutputSpec::Cfi);
    let wants_qfi = cfg.outputs.contains(&OutputSpec::Qfi);
    let cfi_report = if wants_cfi {
        Some(compute_cfi(cfg)?)
    } else {
        None
    };
    let qfi_value = if wants_qfi {
        Some(compute_qfi(cfg)?)
    } else {
        None
    };
    let best_fisher = match (cfi_report.as_ref(), qfi_value) {
        (Some(c), Some(q)) => Some(c.value.max(q)),
        (Some(c), None) => Some(c.value),
        (None, Some(q)) => Some(q),
        (None, None) => None,
    };
    let delta_lambda = match best_fisher {
        Some(f) if f > 0.0 => Some(cramer_rao(f, cfg.nu)?),
        _ => None,
    };
    if wants_cfi || wants_qfi {
        let mut header = vec!["t_ms".to_string()];
        let mut row = vec![cfg.t_final_ms];
        if let Some(c) = &cfi_report {
            header.push("cfi".to_string());
            header.push("cfi_dropped_derivative_mass".to_string());
            row.push(c.value);
            row.push(c.dropped_derivative_mass);
        }
        if let Some(q) = qfi_value {
            header.push("qfi".to_string());
            row.push(q);
        }
        if let Some(d) = delta_lambda {
            header.push("delta_lambda_rad_per_s".to_string());
            header.push("nu".to_string());
            row.push(d);
            row.push(cfg.nu as f64);
        }
        files.push((
            format!("{name}_estimation.csv"),
            render_table(&header, &[row]),
        ));
    }

    // final-state diagnostics for the summary
    let summary = RunSummary {
        name: name.to_string(),
        scheme: cfg.scheme,
        weak,
        effective: eff,
        t_final_ms: cfg.t_final_ms,
        analytic_max_dev,
        cfi: cfi_report,
        qfi: qfi_value,
        delta_lambda,
        nu: cfg.nu,
        final_tail_b: tail_mass(&psi_final, Mode::Breathing),
        final_tail_r: tail_mass(&psi_final, Mode::Rocking),
    };

    Ok(RunArtifacts { files, summary })
}

/// Scalar quantities extracted by sweeps.
pub struct ScalarOutputs {
    pub cfi: Option<CfiReport>,
    pub delta_lambda: Option<f64>,
    pub qfi: Option<f64>,
    pub fit_freq_over_2pi_khz: Option<f64>,
}

/// Compute only the scalar outputs of a configuration (no CSV assembly).
pub fn compute_scalars(cfg: &ExperimentConfig) -> Result<ScalarOutputs, CliError> {
    let mut out = ScalarOutputs {
        cfi: None,
        delta_lambda: None,
        qfi: None,
        fit_freq_over_2pi_khz: None,
    };
    if cfg.outputs.contains(&OutputSpec::Cfi) {
        let report = compute_cfi(cfg)?;
        if report.value > 0.0 {
            out.delta_lambda = Some(cramer_rao(report.value, cfg.nu)?);
        }
        out.cfi = Some(report);
    }
    if cfg.outputs.contains(&OutputSpec::Qfi) {
        out.qfi = Some(compute_qfi(cfg)?);
    }
    if cfg.outputs.contains(&OutputSpec::Spin) {
        let drive = cfg.drive();
        let layout = cfg.cutoffs;
        let h = build_hamiltonian(layout, &drive)?;
        let psi0 = prepare_state(layout, &cfg.state)?;
        let grid = cfg.time_grid();
        let table = observable_series(
            &h,
            &psi0,
            &grid,
            &[Observable::SpinDown],
            &cfg.propagator_settings(),
        )?;
        let values: Vec<f64> = table.values.iter().map(|r| r[0]).collect();
        let w = crate::fit::fit_angular_frequency(&table.times, &values)
            .ok_or_else(|| CliError::Numerical("frequency fit failed".into()))?;
        out.fit_freq_over_2pi_khz = Some(w / TAU / 1e3);
    }
    Ok(out)
}

/// Format one sweep row; `None` cells stay empty.
pub fn scalar_row(axis_value: f64, scalars: &ScalarOutputs, columns: &[&str]) -> Vec<String> {
    let mut row = vec![sig12(axis_value)];
    for &col in columns {
        let cell = match col {
            "cfi" => scalars.cfi.as_ref().map(|c| sig12(c.value)),
            "delta_lambda_rad_per_s" => scalars.delta_lambda.map(sig12),
            "qfi" => scalars.qfi.map(sig12),
            "fit_freq_over_2pi_khz" => scalars.fit_freq_over_2pi_khz.map(sig12),
            _ => None,
        };
        row.push(cell.unwrap_or_default());
    }
    row.push(String::new()); // error column
    row
}
