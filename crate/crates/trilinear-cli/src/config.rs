//! Flat key-value experiment configuration.
//!
//! One dotted key per line, `key = value`, `#` comments. Frequencies are
//! entered as "value of (rate / 2 pi) in kHz" and durations in ms,
//! matching how drive parameters are usually quoted; conversion to rad/s
//! and seconds happens here and nowhere else.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use trilinear::fock::{MotionalSpec, SpaceLayout, SpinSpec, StateSpec};
use trilinear::hamiltonians::{DriveCase, DriveConfig};
use trilinear::propagation::{Method, PropagatorSettings};

use crate::error::CliError;

/// Which marginal distribution feeds the Fisher-information estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measurement {
    FockBreathing,
    FockRocking,
    Spin,
}

impl Measurement {
    pub fn as_str(&self) -> &'static str {
        match self {
            Measurement::FockBreathing => "fock_b",
            Measurement::FockRocking => "fock_r",
            Measurement::Spin => "spin",
        }
    }
}

/// Whether estimation quantities come from full propagation or from the
/// closed-form dispersive distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationSource {
    Exact,
    Analytic,
}

/// One requested output artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputSpec {
    /// Breathing Fock probabilities at the listed indices (empty = all).
    FockB(Vec<usize>),
    /// Rocking Fock probabilities at the listed indices (empty = all).
    FockR(Vec<usize>),
    /// Spin populations over time.
    Spin,
    /// Classical Fisher information at the final time.
    Cfi,
    /// Quantum Fisher information of the propagated family at the final time.
    Qfi,
}

/// A parsed experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scheme: DriveCase,
    pub g_over_2pi_khz: f64,
    pub omega_over_2pi_khz: f64,
    pub lambda_over_2pi_khz: f64,
    pub t_final_ms: f64,
    pub n_time_samples: usize,
    pub state: StateSpec,
    pub cutoffs: SpaceLayout,
    pub outputs: Vec<OutputSpec>,
    pub method: Method,
    pub krylov_dim: usize,
    pub tail_mass_tol: f64,
    pub norm_tol: f64,
    pub measurement: Measurement,
    pub estimation_source: EstimationSource,
    pub nu: u64,
}

impl ExperimentConfig {
    pub fn drive(&self) -> DriveConfig {
        DriveConfig {
            case: self.scheme,
            g: TAU * self.g_over_2pi_khz * 1e3,
            omega: TAU * self.omega_over_2pi_khz * 1e3,
            lambda: TAU * self.lambda_over_2pi_khz * 1e3,
            duration: self.t_final_ms * 1e-3,
        }
    }

    pub fn propagator_settings(&self) -> PropagatorSettings {
        let mut s = PropagatorSettings {
            method: self.method,
            krylov_dim: self.krylov_dim,
            norm_tol: self.norm_tol,
            tail_mass_tol: self.tail_mass_tol,
            ..PropagatorSettings::default()
        };
        if self.n_time_samples > 1 {
            s.time_step = self.t_final_ms * 1e-3 / (self.n_time_samples - 1) as f64;
        }
        s
    }

    pub fn time_grid(&self) -> Vec<f64> {
        let t_final = self.t_final_ms * 1e-3;
        if self.n_time_samples <= 1 {
            return vec![t_final];
        }
        let n = self.n_time_samples;
        (0..n)
            .map(|k| t_final * k as f64 / (n - 1) as f64)
            .collect()
    }

    /// Serialize back to the config grammar; `parse` of the result gives
    /// the identical configuration.
    pub fn to_conf_string(&self) -> String {
        let mut s = String::new();
        let scheme = match self.scheme {
            DriveCase::SpinBreathing => "case1",
            DriveCase::SpinRocking => "case2",
        };
        s.push_str(&format!("scheme = {scheme}\n"));
        s.push_str(&format!(
            "drive.g_over_2pi_khz = {:e}\n",
            self.g_over_2pi_khz
        ));
        s.push_str(&format!(
            "drive.omega_over_2pi_khz = {:e}\n",
            self.omega_over_2pi_khz
        ));
        s.push_str(&format!(
            "drive.lambda_over_2pi_khz = {:e}\n",
            self.lambda_over_2pi_khz
        ));
        s.push_str(&format!("time.t_final_ms = {:e}\n", self.t_final_ms));
        s.push_str(&format!("time.n_samples = {}\n", self.n_time_samples));
        let spin = match self.state.spin {
            SpinSpec::Up => "up",
            SpinSpec::Down => "down",
            SpinSpec::Plus => "plus",
            SpinSpec::Minus => "minus",
        };
        s.push_str(&format!("state.spin = {spin}\n"));
        let motional = match self.state.motional {
            MotionalSpec::Fock { n_b, n_r } => format!("fock {n_b} {n_r}"),
            MotionalSpec::Binomial(n) => format!("binomial {n}"),
            MotionalSpec::NoonLike(n) => format!("noon_like {n}"),
        };
        s.push_str(&format!("state.motional = {motional}\n"));
        s.push_str(&format!("cutoff.n_b = {}\n", self.cutoffs.n_cut_b));
        s.push_str(&format!("cutoff.n_r = {}\n", self.cutoffs.n_cut_r));
        for out in &self.outputs {
            match out {
                OutputSpec::FockB(idx) => {
                    s.push_str("output = fock_b");
                    for i in idx {
                        s.push_str(&format!(" {i}"));
                    }
                    s.push('\n');
                }
                OutputSpec::FockR(idx) => {
                    s.push_str("output = fock_r");
                    for i in idx {
                        s.push_str(&format!(" {i}"));
                    }
                    s.push('\n');
                }
                OutputSpec::Spin => s.push_str("output = spin\n"),
                OutputSpec::Cfi => s.push_str("output = cfi\n"),
                OutputSpec::Qfi => s.push_str("output = qfi\n"),
            }
        }
        let method = match self.method {
            Method::Eigendecomposition => "eig",
            Method::Krylov => "krylov",
        };
        s.push_str(&format!("propagator.method = {method}\n"));
        s.push_str(&format!("propagator.krylov_dim = {}\n", self.krylov_dim));
        s.push_str(&format!(
            "propagator.tail_mass_tol = {:e}\n",
            self.tail_mass_tol
        ));
        s.push_str(&format!("propagator.norm_tol = {:e}\n", self.norm_tol));
        s.push_str(&format!(
            "estimation.measurement = {}\n",
            self.measurement.as_str()
        ));
        let source = match self.estimation_source {
            EstimationSource::Exact => "exact",
            EstimationSource::Analytic => "analytic",
        };
        s.push_str(&format!("estimation.source = {source}\n"));
        s.push_str(&format!("estimation.nu = {}\n", self.nu));
        s
    }
}

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::ConfigParse(msg.into())
}

/// Split a config text into its key-value map, preserving repeated
/// `output` lines. Duplicate scalar keys and unknown keys are errors.
pub fn split_pairs(text: &str) -> Result<(BTreeMap<String, String>, Vec<String>), CliError> {
    let mut map = BTreeMap::new();
    let mut outputs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("line {}: expected 'key = value'", lineno + 1)))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if value.is_empty() {
            return Err(parse_err(format!(
                "line {}: empty value for '{key}'",
                lineno + 1
            )));
        }
        if key == "output" {
            outputs.push(value);
        } else if map.insert(key.clone(), value).is_some() {
            return Err(parse_err(format!("duplicate key '{key}'")));
        }
    }
    Ok((map, outputs))
}

fn take_f64(map: &mut BTreeMap<String, String>, key: &str) -> Result<f64, CliError> {
    let raw = map
        .remove(key)
        .ok_or_else(|| parse_err(format!("missing required key '{key}'")))?;
    raw.parse()
        .map_err(|_| parse_err(format!("key '{key}': '{raw}' is not a number")))
}

fn take_f64_or(
    map: &mut BTreeMap<String, String>,
    key: &str,
    default: f64,
) -> Result<f64, CliError> {
    match map.remove(key) {
        None => Ok(default),
        Some(raw) => raw
            .parse()
            .map_err(|_| parse_err(format!("key '{key}': '{raw}' is not a number"))),
    }
}

fn take_usize(map: &mut BTreeMap<String, String>, key: &str) -> Result<usize, CliError> {
    let raw = map
        .remove(key)
        .ok_or_else(|| parse_err(format!("missing required key '{key}'")))?;
    raw.parse().map_err(|_| {
        parse_err(format!(
            "key '{key}': '{raw}' is not a non-negative integer"
        ))
    })
}

fn parse_output(value: &str) -> Result<OutputSpec, CliError> {
    let mut tokens = value.split_whitespace();
    let kind = tokens.next().unwrap_or_default();
    let indices: Result<Vec<usize>, _> = tokens.map(str::parse::<usize>).collect();
    let indices =
        indices.map_err(|_| parse_err(format!("output '{value}': indices must be integers")))?;
    match kind {
        "fock_b" => Ok(OutputSpec::FockB(indices)),
        "fock_r" => Ok(OutputSpec::FockR(indices)),
        "spin" | "cfi" | "qfi" if !indices.is_empty() => {
            Err(parse_err(format!("output '{kind}' takes no indices")))
        }
        "spin" => Ok(OutputSpec::Spin),
        "cfi" => Ok(OutputSpec::Cfi),
        "qfi" => Ok(OutputSpec::Qfi),
        other => Err(parse_err(format!("unknown output kind '{other}'"))),
    }
}

/// Parse a config text into an [`ExperimentConfig`].
pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
    let (mut map, output_lines) = split_pairs(text)?;

    let scheme = match map
        .remove("scheme")
        .ok_or_else(|| parse_err("missing required key 'scheme'"))?
        .as_str()
    {
        "case1" => DriveCase::SpinBreathing,
        "case2" => DriveCase::SpinRocking,
        other => {
            return Err(parse_err(format!(
                "scheme must be case1 or case2, got '{other}'"
            )))
        }
    };

    let g_over_2pi_khz = take_f64(&mut map, "drive.g_over_2pi_khz")?;
    let omega_over_2pi_khz = take_f64(&mut map, "drive.omega_over_2pi_khz")?;
    let lambda_over_2pi_khz = take_f64(&mut map, "drive.lambda_over_2pi_khz")?;
    let t_final_ms = take_f64(&mut map, "time.t_final_ms")?;
    let n_time_samples = take_usize(&mut map, "time.n_samples")?;
    if t_final_ms < 0.0 {
        return Err(parse_err("time.t_final_ms must be non-negative"));
    }
    if n_time_samples == 0 {
        return Err(parse_err("time.n_samples must be at least 1"));
    }
    if omega_over_2pi_khz == 0.0 {
        return Err(parse_err("drive.omega_over_2pi_khz must be non-zero"));
    }

    let spin = match map
        .remove("state.spin")
        .ok_or_else(|| parse_err("missing required key 'state.spin'"))?
        .as_str()
    {
        "up" => SpinSpec::Up,
        "down" => SpinSpec::Down,
        "plus" => SpinSpec::Plus,
        "minus" => SpinSpec::Minus,
        other => return Err(parse_err(format!("unknown spin '{other}'"))),
    };
    let motional_raw = map
        .remove("state.motional")
        .ok_or_else(|| parse_err("missing required key 'state.motional'"))?;
    let motional = parse_motional(&motional_raw)?;

    let cutoffs = SpaceLayout::new(
        take_usize(&mut map, "cutoff.n_b")?,
        take_usize(&mut map, "cutoff.n_r")?,
    );

    let method = match map.remove("propagator.method").as_deref() {
        None | Some("eig") => Method::Eigendecomposition,
        Some("krylov") => Method::Krylov,
        Some(other) => {
            return Err(parse_err(format!(
                "propagator.method must be eig or krylov, got '{other}'"
            )))
        }
    };
    let krylov_dim = match map.remove("propagator.krylov_dim") {
        None => 30,
        Some(raw) => raw
            .parse()
            .map_err(|_| parse_err(format!("propagator.krylov_dim: '{raw}' is not an integer")))?,
    };
    let tail_mass_tol = take_f64_or(&mut map, "propagator.tail_mass_tol", 1e-6)?;
    let norm_tol = take_f64_or(&mut map, "propagator.norm_tol", 1e-9)?;

    let measurement = match map.remove("estimation.measurement").as_deref() {
        None => default_measurement(scheme),
        Some("fock_b") => Measurement::FockBreathing,
        Some("fock_r") => Measurement::FockRocking,
        Some("spin") => Measurement::Spin,
        Some(other) => return Err(parse_err(format!("unknown measurement '{other}'"))),
    };
    let estimation_source = match map.remove("estimation.source").as_deref() {
        None | Some("exact") => EstimationSource::Exact,
        Some("analytic") => EstimationSource::Analytic,
        Some(other) => {
            return Err(parse_err(format!(
                "estimation.source must be exact or analytic, got '{other}'"
            )))
        }
    };
    let nu = match map.remove("estimation.nu") {
        None => 1,
        Some(raw) => raw
            .parse()
            .map_err(|_| parse_err(format!("estimation.nu: '{raw}' is not a positive integer")))?,
    };

    if let Some(unknown) = map.keys().next() {
        return Err(parse_err(format!("unknown key '{unknown}'")));
    }

    if output_lines.is_empty() {
        return Err(parse_err("at least one 'output = ...' line is required"));
    }
    let outputs: Result<Vec<OutputSpec>, CliError> =
        output_lines.iter().map(|v| parse_output(v)).collect();
    let outputs = outputs?;

    Ok(ExperimentConfig {
        scheme,
        g_over_2pi_khz,
        omega_over_2pi_khz,
        lambda_over_2pi_khz,
        t_final_ms,
        n_time_samples,
        state: StateSpec { spin, motional },
        cutoffs,
        outputs,
        method,
        krylov_dim,
        tail_mass_tol,
        norm_tol,
        measurement,
        estimation_source,
        nu,
    })
}

fn parse_motional(raw: &str) -> Result<MotionalSpec, CliError> {
    let tokens: Vec<&str> = raw.split_whitespace().collect();
    match tokens.as_slice() {
        ["fock", n_b, n_r] => Ok(MotionalSpec::Fock {
            n_b: n_b
                .parse()
                .map_err(|_| parse_err(format!("fock index '{n_b}' is not an integer")))?,
            n_r: n_r
                .parse()
                .map_err(|_| parse_err(format!("fock index '{n_r}' is not an integer")))?,
        }),
        ["binomial", n] => Ok(MotionalSpec::Binomial(n.parse().map_err(|_| {
            parse_err(format!("binomial quantum number '{n}' is not an integer"))
        })?)),
        ["noon_like", n] => Ok(MotionalSpec::NoonLike(n.parse().map_err(|_| {
            parse_err(format!("noon_like quantum number '{n}' is not an integer"))
        })?)),
        _ => Err(parse_err(format!(
            "state.motional must be 'fock NB NR', 'binomial N' or 'noon_like N', got '{raw}'"
        ))),
    }
}

fn default_measurement(scheme: DriveCase) -> Measurement {
    match scheme {
        DriveCase::SpinBreathing => Measurement::FockRocking,
        DriveCase::SpinRocking => Measurement::FockBreathing,
    }
}

/// Apply a sweep override `key = value` on top of a parsed text, returning
/// the re-parsed configuration. `state.motional.n` rewrites the quantum
/// number of the configured motional family (a Fock pair becomes the twin
/// state `|n, n>`).
pub fn with_override(base_text: &str, key: &str, value: f64) -> Result<ExperimentConfig, CliError> {
    if key == "state.motional.n" {
        let mut cfg = parse(base_text)?;
        let n = value.round() as i64;
        if n < 0 || (value - n as f64).abs() > 1e-9 {
            return Err(parse_err(format!(
                "state.motional.n sweep value {value} is not a non-negative integer"
            )));
        }
        let n = n as usize;
        cfg.state.motional = match cfg.state.motional {
            MotionalSpec::Fock { .. } => MotionalSpec::Fock { n_b: n, n_r: n },
            MotionalSpec::Binomial(_) => MotionalSpec::Binomial(n),
            MotionalSpec::NoonLike(_) => MotionalSpec::NoonLike(n),
        };
        return Ok(cfg);
    }

    // integral values print as integers so integer-typed keys stay parseable
    let rendered = if value.fract() == 0.0 && value.abs() < 1e15 {
        format!("{}", value as i64)
    } else {
        format!("{value:e}")
    };
    let mut rebuilt = String::new();
    let mut replaced = false;
    for raw in base_text.lines() {
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let is_target = stripped
            .split_once('=')
            .map(|(k, _)| k.trim() == key)
            .unwrap_or(false);
        if is_target {
            rebuilt.push_str(&format!("{key} = {rendered}\n"));
            replaced = true;
        } else {
            rebuilt.push_str(raw);
            rebuilt.push('\n');
        }
    }
    if !replaced {
        rebuilt.push_str(&format!("{key} = {rendered}\n"));
    }
    parse(&rebuilt)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# beam-splitter run
scheme = case2
drive.g_over_2pi_khz = 3.5
drive.omega_over_2pi_khz = 45.0
drive.lambda_over_2pi_khz = 0.15
time.t_final_ms = 20.0
time.n_samples = 201
state.spin = plus
state.motional = fock 2 0
cutoff.n_b = 8
cutoff.n_r = 10
output = fock_b 0 1 2
output = cfi
";

    #[test]
    fn parses_sample() {
        let cfg = parse(SAMPLE).unwrap();
        assert_eq!(cfg.scheme, DriveCase::SpinRocking);
        assert_eq!(cfg.cutoffs, SpaceLayout::new(8, 10));
        assert_eq!(cfg.n_time_samples, 201);
        assert_eq!(cfg.outputs.len(), 2);
        assert_eq!(cfg.outputs[0], OutputSpec::FockB(vec![0, 1, 2]));
        assert_eq!(cfg.measurement, Measurement::FockBreathing);
        let drive = cfg.drive();
        assert!((drive.omega - TAU * 45e3).abs() < 1e-9);
        assert!((drive.duration - 0.02).abs() < 1e-15);
    }

    #[test]
    fn roundtrip_is_stable() {
        let cfg = parse(SAMPLE).unwrap();
        let text = cfg.to_conf_string();
        let cfg2 = parse(&text).unwrap();
        assert_eq!(cfg2.to_conf_string(), text);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse("scheme case1\n").is_err());
        assert!(parse(&SAMPLE.replace("case2", "case7")).is_err());
        assert!(parse(&format!("{SAMPLE}bogus.key = 3\n")).is_err());
        assert!(parse(&format!("{SAMPLE}scheme = case1\n")).is_err());
        assert!(parse(&SAMPLE.replace("fock 2 0", "fock x 0")).is_err());
        assert!(parse(&SAMPLE.replace("output = cfi", "output = cfi 3")).is_err());
        // removing all outputs is an error
        let no_out: String = SAMPLE
            .lines()
            .filter(|l| !l.starts_with("output"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(parse(&no_out).is_err());
    }

    #[test]
    fn override_rewrites_numeric_keys() {
        let cfg = with_override(SAMPLE, "drive.lambda_over_2pi_khz", 0.4).unwrap();
        assert!((cfg.lambda_over_2pi_khz - 0.4).abs() < 1e-15);
        let cfg = with_override(SAMPLE, "state.motional.n", 3.0).unwrap();
        assert_eq!(cfg.state.motional, MotionalSpec::Fock { n_b: 3, n_r: 3 });
        assert!(with_override(SAMPLE, "state.motional.n", 2.5).is_err());
    }

    #[test]
    fn noon_like_is_accepted() {
        let cfg = parse(&SAMPLE.replace("fock 2 0", "noon_like 2")).unwrap();
        assert_eq!(cfg.state.motional, MotionalSpec::NoonLike(2));
    }

    mod roundtrip_property {
        use super::*;
        use proptest::prelude::*;

        fn arb_motional() -> impl Strategy<Value = String> {
            prop_oneof![
                (0usize..5, 0usize..5).prop_map(|(b, r)| format!("fock {b} {r}")),
                (0usize..5).prop_map(|n| format!("binomial {n}")),
                (0usize..5).prop_map(|n| format!("noon_like {n}")),
            ]
        }

        proptest! {
            #[test]
            fn serialization_roundtrips(
                scheme_case1 in any::<bool>(),
                g in 0.1f64..20.0,
                omega in 1.0f64..200.0,
                lambda in 0.001f64..2.0,
                t in 0.1f64..50.0,
                samples in 2usize..400,
                spin in prop_oneof![Just("up"), Just("down"), Just("plus"), Just("minus")],
                motional in arb_motional(),
                cut_b in 5usize..30,
                cut_r in 5usize..30,
                nu in 1u64..1000,
            ) {
                let text = format!(
                    "scheme = {}\ndrive.g_over_2pi_khz = {g:e}\n\
                     drive.omega_over_2pi_khz = {omega:e}\ndrive.lambda_over_2pi_khz = {lambda:e}\n\
                     time.t_final_ms = {t:e}\ntime.n_samples = {samples}\n\
                     state.spin = {spin}\nstate.motional = {motional}\n\
                     cutoff.n_b = {cut_b}\ncutoff.n_r = {cut_r}\n\
                     output = spin\noutput = cfi\nestimation.nu = {nu}\n",
                    if scheme_case1 { "case1" } else { "case2" },
                );
                let cfg = parse(&text).unwrap();
                let serialized = cfg.to_conf_string();
                let reparsed = parse(&serialized).unwrap();
                prop_assert_eq!(serialized, reparsed.to_conf_string());
                // exact field stability through the round trip
                prop_assert_eq!(cfg.g_over_2pi_khz.to_bits(), reparsed.g_over_2pi_khz.to_bits());
                prop_assert_eq!(cfg.t_final_ms.to_bits(), reparsed.t_final_ms.to_bits());
                prop_assert_eq!(cfg.state, reparsed.state);
                prop_assert_eq!(cfg.outputs, reparsed.outputs);
                prop_assert_eq!(cfg.nu, reparsed.nu);
            }
        }
    }
}
