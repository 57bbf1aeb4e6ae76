//! Trap-analysis report: equilibrium geometry, normal-mode table,
//! coupling constants, and sideband resonance solutions.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use trilinear::constants::ELEMENTARY_CHARGE;
use trilinear::trap::{
    equilibrium_positions, normal_modes, resonance_check, stiffness_matrix, trilinear_coupling,
    Axis, SensingCase, TrapConfig,
};

use crate::config::split_pairs;
use crate::csvfmt::render_table;
use crate::error::CliError;

pub struct ModesReport {
    pub text: String,
    pub csv: String,
}

fn take_f64(
    map: &mut BTreeMap<String, String>,
    key: &str,
    default: Option<f64>,
) -> Result<f64, CliError> {
    match (map.remove(key), default) {
        (Some(raw), _) => raw
            .parse()
            .map_err(|_| CliError::ConfigParse(format!("key '{key}': '{raw}' is not a number"))),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(CliError::ConfigParse(format!(
            "missing required key '{key}'"
        ))),
    }
}

/// Parse a trap description (flat `trap.*` / `resonance.*` keys) and
/// produce the full report.
pub fn modes_report(text: &str) -> Result<ModesReport, CliError> {
    let (mut map, outputs) = split_pairs(text)?;
    if !outputs.is_empty() {
        return Err(CliError::ConfigParse(
            "'output' lines have no meaning in a trap description".into(),
        ));
    }
    let mass = take_f64(&mut map, "trap.ion_mass_kg", None)?;
    let charge = take_f64(&mut map, "trap.ion_charge_c", Some(ELEMENTARY_CHARGE))?;
    let omega_x = TAU * 1e3 * take_f64(&mut map, "trap.omega_x_over_2pi_khz", None)?;
    let omega_y = TAU * 1e3 * take_f64(&mut map, "trap.omega_y_over_2pi_khz", None)?;
    let omega_z = TAU * 1e3 * take_f64(&mut map, "trap.omega_z_over_2pi_khz", None)?;
    let n_ions = take_f64(&mut map, "trap.n_ions", Some(2.0))? as usize;
    let detuning = TAU * 1e3 * take_f64(&mut map, "resonance.omega_over_2pi_khz", Some(0.0))?;
    let threshold = take_f64(&mut map, "resonance.threshold", Some(20.0))?;
    if let Some(unknown) = map.keys().next() {
        return Err(CliError::ConfigParse(format!("unknown key '{unknown}'")));
    }

    let cfg = TrapConfig::new(mass, charge, omega_x, omega_y, omega_z, n_ions)?;
    let u = equilibrium_positions(&cfg)?;

    let mut text_out = String::new();
    text_out.push_str(&format!(
        "trap: {} ion(s), omega/2pi = ({:.4}, {:.4}, {:.4}) kHz\n",
        n_ions,
        omega_x / TAU / 1e3,
        omega_y / TAU / 1e3,
        omega_z / TAU / 1e3
    ));
    text_out.push_str("equilibrium positions (units of the Coulomb length):\n");
    for (k, pos) in u.iter().enumerate() {
        text_out.push_str(&format!("  ion {k}: {pos:+.10}\n"));
    }

    let mut csv_rows: Vec<Vec<f64>> = Vec::new();
    text_out.push_str("normal modes:\n");
    for (axis_idx, axis) in [Axis::X, Axis::Y, Axis::Z].into_iter().enumerate() {
        let a = stiffness_matrix(&cfg, axis, &u);
        let spectrum = normal_modes(&cfg, axis, &a)?;
        for (p, (&gamma, &freq)) in spectrum
            .eigenvalues
            .iter()
            .zip(&spectrum.mode_frequencies)
            .enumerate()
        {
            text_out.push_str(&format!(
                "  {:?} mode {p}: gamma = {gamma:.8}, frequency/2pi = {:.6} kHz\n",
                axis,
                freq / TAU / 1e3
            ));
            csv_rows.push(vec![axis_idx as f64, p as f64, gamma, freq / TAU / 1e3]);
        }
    }

    if n_ions == 2 {
        let c = trilinear_coupling(&cfg)?;
        text_out.push_str(&format!(
            "length scale l = {:.6e} m\nground-state size z_b = {:.6e} m\n",
            c.length_scale, c.ground_state_size
        ));
        text_out.push_str(&format!(
            "trilinear coupling lambda/2pi = {:.6} kHz\n",
            c.lambda / TAU / 1e3
        ));
        for case in [SensingCase::BreathingDrive, SensingCase::RockingDrive] {
            let rep = resonance_check(&cfg, case, detuning, Some(threshold))?;
            let label = match case {
                SensingCase::BreathingDrive => "breathing drive (omega_b = 2 omega_rock + omega)",
                SensingCase::RockingDrive => "rocking drive (omega_b = 2 omega_rock - omega)",
            };
            text_out.push_str(&format!(
                "{label}: omega_rock/2pi = {:.6} kHz, required omega_x/2pi = {:.6} kHz\n",
                rep.omega_rock / TAU / 1e3,
                rep.required_omega_x / TAU / 1e3
            ));
            text_out.push_str(&format!(
                "  hierarchy omega_b/lambda = {:.1} ({}), y-mode separation/lambda = {:.1} ({})\n",
                1.0 / rep.lambda_over_omega_b,
                if rep.breathing_hierarchy_ok {
                    "ok"
                } else {
                    "VIOLATED"
                },
                rep.y_mode_separation_over_lambda,
                if rep.y_mode_separation_ok {
                    "ok"
                } else {
                    "VIOLATED"
                },
            ));
        }
    } else {
        text_out.push_str("(trilinear coupling constants are only defined for 2 ions)\n");
    }

    let header = vec![
        "axis_index".to_string(),
        "mode".to_string(),
        "gamma".to_string(),
        "freq_over_2pi_khz".to_string(),
    ];
    Ok(ModesReport {
        text: text_out,
        csv: render_table(&header, &csv_rows),
    })
}
