//! Closed-form predictions of the dispersive theory: squeezed-vacuum and
//! beam-splitter Fock distributions, twin-Fock interference, and Ramsey
//! spin populations.
//!
//! The twin-Fock distribution is computed by exact ladder-operator
//! expansion of the two-mode rotation, not from a printed closed form
//! whose normalization fails for two or more quanta per mode; that form
//! is kept available as [`twin_fock_pmf_printed`] to document the
//! discrepancy.

use num_complex::Complex64;

use crate::hamiltonians::{DriveCase, DriveConfig};
use crate::{Error, Result};

/// Squeeze phase of the dispersive evolution. Fixed by the chosen
/// rotating frame.
pub const SQUEEZE_PHASE: f64 = -std::f64::consts::FRAC_PI_2;

/// Parameters of the dispersive (effective) evolution.
#[derive(Debug, Clone, Copy)]
pub struct EffectiveParams {
    /// Squeeze parameter accumulated over the drive duration,
    /// `r = (2 g lambda / omega) t` (breathing drive).
    pub squeeze_r: f64,
    /// Squeeze phase, [`SQUEEZE_PHASE`].
    pub squeeze_phi: f64,
    /// Beam-splitter rotation rate `theta = 2 g lambda / omega`, rad/s
    /// (rocking drive).
    pub theta: f64,
}

impl EffectiveParams {
    pub fn from_drive(cfg: &DriveConfig) -> Result<Self> {
        if cfg.omega == 0.0 {
            return Err(Error::ZeroDetuning);
        }
        let theta = 2.0 * cfg.g * cfg.lambda / cfg.omega;
        Ok(Self {
            squeeze_r: theta * cfg.duration,
            squeeze_phi: SQUEEZE_PHASE,
            theta,
        })
    }

    /// The rate that carries the estimated parameter in either scheme:
    /// squeeze growth rate for the breathing drive, beam-splitter rate
    /// for the rocking drive. Numerically both are `2 g lambda / omega`.
    pub fn rate(&self, case: DriveCase) -> f64 {
        match case {
            DriveCase::SpinBreathing => self.theta,
            DriveCase::SpinRocking => self.theta,
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut c = 1.0;
    for j in 0..k.min(n - k) {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    c
}

/// Fock distribution of the squeezed vacuum up to `n_max`, plus the
/// probability mass captured by the truncation.
///
/// Odd entries are exactly zero; even entries follow
/// `p_{2m} = tanh^{2m}(r) / cosh(r) * (2m)! / (2^{2m} (m!)^2)`,
/// evaluated by a stable ratio recurrence.
pub fn squeezed_vacuum_pmf(r: f64, n_max: usize) -> Result<(Vec<f64>, f64)> {
    if r < 0.0 {
        return Err(Error::InvalidInput(format!(
            "squeeze parameter must be non-negative, got {r}"
        )));
    }
    let mut probs = vec![0.0; n_max + 1];
    let mut p = 1.0 / r.cosh();
    let t2 = r.tanh() * r.tanh();
    probs[0] = p;
    let mut m = 1;
    while 2 * m <= n_max {
        p *= t2 * (2.0 * m as f64 - 1.0) / (2.0 * m as f64);
        probs[2 * m] = p;
        m += 1;
    }
    let captured: f64 = probs.iter().sum();
    Ok((probs, captured))
}

/// Fock amplitudes of the squeezed vacuum `S(xi)|0>` with the squeeze
/// phase fixed to [`SQUEEZE_PHASE`]:
/// `c_{2m} = (i tanh r)^m sqrt((2m)!) / (2^m m!) / sqrt(cosh r)`.
pub fn squeezed_vacuum_amplitudes(r: f64, n_max: usize) -> Result<Vec<Complex64>> {
    if r < 0.0 {
        return Err(Error::InvalidInput(format!(
            "squeeze parameter must be non-negative, got {r}"
        )));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); n_max + 1];
    // magnitude recurrence: rho_m = rho_{m-1} * tanh(r) * sqrt((2m-1)/(2m))
    let mut rho = 1.0 / r.cosh().sqrt();
    let th = r.tanh();
    let i_unit = Complex64::new(0.0, 1.0);
    let mut phase = Complex64::new(1.0, 0.0);
    amps[0] = Complex64::new(rho, 0.0);
    let mut m = 1;
    while 2 * m <= n_max {
        rho *= th * ((2.0 * m as f64 - 1.0) / (2.0 * m as f64)).sqrt();
        phase *= i_unit;
        amps[2 * m] = phase * rho;
        m += 1;
    }
    Ok(amps)
}

/// Amplitudes of the two-mode rotation `exp(i phi (a_b^dag a_r + a_b a_r^dag))`
/// applied to `|n_b_in, n_r_in>`, indexed by the output breathing count
/// `k_b = 0 ..= n_b_in + n_r_in` (the rocking count is the complement).
///
/// Exact ladder-operator expansion: the rotation maps
/// `a_b^dag -> cos(phi) a_b^dag + i sin(phi) a_r^dag` and
/// `a_r^dag -> i sin(phi) a_b^dag + cos(phi) a_r^dag`.
pub fn two_mode_rotation_amplitudes(n_b_in: usize, n_r_in: usize, phi: f64) -> Vec<Complex64> {
    let (m, p) = (n_b_in, n_r_in);
    let total = m + p;
    let c = phi.cos();
    let s = phi.sin();
    let norm_in = (factorial(m) * factorial(p)).sqrt();
    let mut amps = Vec::with_capacity(total + 1);
    for k in 0..=total {
        let j_lo = k.saturating_sub(p);
        let j_hi = m.min(k);
        let mut sum = 0.0;
        for j in j_lo..=j_hi {
            let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
            sum += sign
                * binomial(m, j)
                * binomial(p, k - j)
                * c.powi((p + 2 * j - k) as i32)
                * s.powi((m + k - 2 * j) as i32);
        }
        let magnitude = (factorial(k) * factorial(total - k)).sqrt() / norm_in * sum;
        // global i^(m + k) phase from the expansion
        let phase = match (m + k) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        amps.push(phase * magnitude);
    }
    amps
}

/// Breathing-mode Fock distribution after beam-splitter rotation of
/// `|n_b, 0>`: `p_k = C(n_b, k) cos^{2k}(theta t) sin^{2(n_b-k)}(theta t)`.
/// Sums to 1 exactly by the binomial theorem.
pub fn beam_splitter_pmf(n_b: usize, theta_t: f64) -> Vec<f64> {
    let c2 = theta_t.cos().powi(2);
    let s2 = theta_t.sin().powi(2);
    (0..=n_b)
        .map(|k| binomial(n_b, k) * c2.powi(k as i32) * s2.powi((n_b - k) as i32))
        .collect()
}

/// Breathing-mode Fock distribution after beam-splitter rotation of the
/// twin-Fock state `|n, n>`, over `k_b = 0 ..= 2n`. Exact ladder algebra;
/// sums to 1 to machine precision.
pub fn twin_fock_pmf(n: usize, theta_t: f64) -> Vec<f64> {
    two_mode_rotation_amplitudes(n, n, theta_t)
        .iter()
        .map(|a| a.norm_sqr())
        .collect()
}

/// The twin-Fock distribution as printed in the source derivation, kept
/// verbatim for documentation: its repeated `(n-k)!` factor breaks
/// normalization for `n >= 2`. Use [`twin_fock_pmf`] for the correct
/// distribution.
pub fn twin_fock_pmf_printed(n: usize, theta_t: f64) -> Vec<f64> {
    let c = theta_t.cos();
    let s = theta_t.sin();
    let mut probs = vec![0.0; 2 * n + 1];
    for (k_b, prob) in probs.iter_mut().enumerate() {
        let mut sum = 0.0;
        for k in 0..=n {
            for l in 0..=n {
                if n + k != k_b + l {
                    continue;
                }
                let sign = if (n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
                sum += sign
                    * s.powi((2 * n - k - l) as i32)
                    * c.powi((k + l) as i32)
                    * factorial(n)
                    * (factorial(k_b) * factorial(n - k + l)).sqrt()
                    / (factorial(k) * factorial(n - k) * factorial(l) * factorial(n - k));
            }
        }
        *prob = sum * sum;
    }
    probs
}

/// Ramsey spin populations for the n-quanta binomial motional state:
/// `(p_down, p_up) = (cos^2(n theta t), sin^2(n theta t))`.
pub fn ramsey_populations(n: usize, theta: f64, t: f64) -> (f64, f64) {
    let phase = n as f64 * theta * t;
    (phase.cos().powi(2), phase.sin().powi(2))
}
