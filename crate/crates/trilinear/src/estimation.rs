//! Classical and quantum Fisher information and Cramér-Rao sensitivity
//! bounds for the nonlinear-coupling estimate.
//!
//! A [`ProbabilityModel`] maps the coupling to an outcome distribution —
//! either an analytic one or the result of full propagation — and is
//! differentiated centrally with Richardson refinement unless an analytic
//! derivative is supplied. Saturation of the quantum bound is always
//! demonstrated through the equality `CFI = QFI`; no optimal-measurement
//! operator is constructed.

use num_complex::Complex64;

use crate::fock::Ket;
use crate::{Error, Result};

/// Default relative finite-difference step.
pub const DEFAULT_FD_REL_STEP: f64 = 1e-4;

/// Probability floor below which outcomes are excluded from the CFI sum
/// (their derivative mass is reported instead of regularized away).
pub const PMF_FLOOR: f64 = 1e-12;

/// Tolerated deviation of an evaluator output from a normalized pmf.
pub const PMF_VALIDITY_TOL: f64 = 1e-9;

/// How the derivative of the outcome distribution is obtained.
pub enum DerivativeMode<'a> {
    /// Caller-supplied `d p_n / d lambda`.
    Analytic(Box<dyn Fn(f64) -> Result<Vec<f64>> + Sync + 'a>),
    /// Central differences with one Richardson refinement.
    CentralDifference,
}

/// A parametrized outcome distribution `lambda -> (p_n)`.
pub struct ProbabilityModel<'a> {
    evaluator: Box<dyn Fn(f64) -> Result<Vec<f64>> + Sync + 'a>,
    derivative: DerivativeMode<'a>,
    fd_rel_step: f64,
    /// Absolute scale used for the step when probing near `lambda = 0`;
    /// callers set this to the natural coupling scale (e.g. `g^2 / omega`).
    lambda_floor: f64,
}

impl<'a> ProbabilityModel<'a> {
    pub fn new(evaluator: impl Fn(f64) -> Result<Vec<f64>> + Sync + 'a) -> Self {
        Self {
            evaluator: Box::new(evaluator),
            derivative: DerivativeMode::CentralDifference,
            fd_rel_step: DEFAULT_FD_REL_STEP,
            lambda_floor: 1.0,
        }
    }

    pub fn with_analytic_derivative(
        mut self,
        derivative: impl Fn(f64) -> Result<Vec<f64>> + Sync + 'a,
    ) -> Self {
        self.derivative = DerivativeMode::Analytic(Box::new(derivative));
        self
    }

    pub fn with_fd_rel_step(mut self, step: f64) -> Self {
        self.fd_rel_step = step;
        self
    }

    pub fn with_lambda_floor(mut self, floor: f64) -> Self {
        self.lambda_floor = floor.abs();
        self
    }

    fn step(&self, lambda: f64) -> f64 {
        self.fd_rel_step * lambda.abs().max(self.lambda_floor)
    }

    fn probe(&self, lambda: f64) -> Result<Vec<f64>> {
        let p = (self.evaluator)(lambda)?;
        validate_pmf(&p)?;
        Ok(p)
    }
}

fn validate_pmf(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidPmf("empty distribution".to_string()));
    }
    let mut total = 0.0;
    for (n, &v) in p.iter().enumerate() {
        if !v.is_finite() || v < -PMF_VALIDITY_TOL {
            return Err(Error::InvalidPmf(format!("entry {n} is {v}")));
        }
        total += v;
    }
    if (total - 1.0).abs() > PMF_VALIDITY_TOL {
        return Err(Error::InvalidPmf(format!(
            "entries sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Classical Fisher information of a model at a coupling value, plus the
/// total |dp/dlambda| carried by outcomes dropped for sitting below
/// [`PMF_FLOOR`].
#[derive(Debug, Clone, Copy)]
pub struct CfiReport {
    pub value: f64,
    pub dropped_derivative_mass: f64,
}

/// `F_cl(lambda) = sum_n (1/p_n) (dp_n/dlambda)^2` over outcomes above
/// the probability floor.
pub fn cfi(model: &ProbabilityModel, lambda: f64) -> Result<CfiReport> {
    let p = model.probe(lambda)?;
    let dp = match &model.derivative {
        DerivativeMode::Analytic(d) => {
            let dp = d(lambda)?;
            if dp.len() != p.len() {
                return Err(Error::InvalidPmf(
                    "derivative length differs from distribution".to_string(),
                ));
            }
            dp
        }
        DerivativeMode::CentralDifference => {
            let h = model.step(lambda);
            let coarse = central_difference(model, lambda, h)?;
            let fine = central_difference(model, lambda, h / 2.0)?;
            // Richardson: (4 D(h/2) - D(h)) / 3
            fine.iter()
                .zip(&coarse)
                .map(|(f, c)| (4.0 * f - c) / 3.0)
                .collect()
        }
    };

    let mut value = 0.0;
    let mut dropped = 0.0;
    for (pn, dpn) in p.iter().zip(&dp) {
        if *pn > PMF_FLOOR {
            value += dpn * dpn / pn;
        } else {
            dropped += dpn.abs();
        }
    }
    Ok(CfiReport {
        value,
        dropped_derivative_mass: dropped,
    })
}

fn central_difference(model: &ProbabilityModel, lambda: f64, h: f64) -> Result<Vec<f64>> {
    let plus = model.probe(lambda + h)?;
    let minus = model.probe(lambda - h)?;
    if plus.len() != minus.len() {
        return Err(Error::InvalidPmf(
            "distribution length changed across the probe step".to_string(),
        ));
    }
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect())
}

/// Rotate a state's global phase so its largest amplitude is real and
/// non-negative; makes finite differences of amplitudes meaningful.
fn align_global_phase(psi: &Ket) -> Vec<Complex64> {
    let amps = psi.amplitudes();
    let mut max_idx = 0;
    let mut max_norm = -1.0;
    for (i, a) in amps.iter().enumerate() {
        let n = a.norm_sqr();
        if n > max_norm {
            max_norm = n;
            max_idx = i;
        }
    }
    let anchor = amps[max_idx];
    let phase = if anchor.norm() > 0.0 {
        anchor.conj() / anchor.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    amps.iter().map(|a| a * phase).collect()
}

/// Quantum Fisher information of a pure-state family,
/// `F_Q = 4 { <d psi|d psi> - |<psi|d psi>|^2 }`, with the amplitude
/// derivative taken by central differences after global-phase alignment.
pub fn qfi_pure(
    state_fn: impl Fn(f64) -> Result<Ket>,
    lambda: f64,
    fd_rel_step: f64,
    lambda_floor: f64,
) -> Result<f64> {
    let h = fd_rel_step * lambda.abs().max(lambda_floor.abs());
    let center = align_global_phase(&state_fn(lambda)?);
    let plus = align_global_phase(&state_fn(lambda + h)?);
    let minus = align_global_phase(&state_fn(lambda - h)?);
    if plus.len() != center.len() || minus.len() != center.len() {
        return Err(Error::LayoutMismatch);
    }
    let two_h = Complex64::new(2.0 * h, 0.0);
    let mut dd = 0.0;
    let mut overlap = Complex64::new(0.0, 0.0);
    for i in 0..center.len() {
        let d = (plus[i] - minus[i]) / two_h;
        dd += d.norm_sqr();
        overlap += center[i].conj() * d;
    }
    Ok(4.0 * (dd - overlap.norm_sqr()))
}

/// Closed-form sensitivity of the squeezed-vacuum scheme.
#[derive(Debug, Clone, Copy)]
pub struct SqueezedBound {
    /// `F_Q = 8 g^2 t^2 / omega^2`.
    pub qfi: f64,
    /// `delta lambda = omega / (sqrt(8 nu) g t)`, rad/s.
    pub delta_lambda: f64,
}

/// Quantum Fisher information and Cramér-Rao bound of the squeezed-vacuum
/// probe in closed form.
pub fn qfi_squeezed_analytic(g: f64, omega: f64, t: f64, nu: u64) -> Result<SqueezedBound> {
    if omega == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    if nu == 0 {
        return Err(Error::InvalidInput(
            "need at least one repetition".to_string(),
        ));
    }
    let qfi = 8.0 * g * g * t * t / (omega * omega);
    if qfi <= 0.0 {
        // the bound diverges when the probe does not couple (g = 0 or t = 0)
        return Err(Error::NonPositiveFisher(qfi));
    }
    Ok(SqueezedBound {
        qfi,
        delta_lambda: 1.0 / (nu as f64 * qfi).sqrt(),
    })
}

/// Measurement schemes with closed-form CFI in the dispersive theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfiScheme {
    /// Breathing Fock measurement after beam-splitter rotation of `|n_b, 0>`:
    /// `16 n_b g^2 t^2 / omega^2` (standard quantum limit in `n_b`).
    FockBreathing { n_b: usize },
    /// Breathing Fock measurement after rotation of the twin state `|n, n>`:
    /// `32 n (n + 1) g^2 t^2 / omega^2` (Heisenberg scaling).
    TwinFock { n: usize },
    /// Spin readout of the n-quanta binomial state:
    /// `16 n^2 g^2 t^2 / omega^2` (Heisenberg scaling).
    RamseyBinomial { n: usize },
}

/// Closed-form CFI of the named scheme.
pub fn analytic_cfi(scheme: CfiScheme, g: f64, omega: f64, t: f64) -> f64 {
    let base = 16.0 * g * g * t * t / (omega * omega);
    match scheme {
        CfiScheme::FockBreathing { n_b } => base * n_b as f64,
        CfiScheme::TwinFock { n } => 2.0 * base * (n * (n + 1)) as f64,
        CfiScheme::RamseyBinomial { n } => base * (n * n) as f64,
    }
}

/// Cramér-Rao bound `delta lambda = 1 / sqrt(nu F)`.
pub fn cramer_rao(fisher: f64, nu: u64) -> Result<f64> {
    if nu == 0 {
        return Err(Error::InvalidInput(
            "need at least one repetition".to_string(),
        ));
    }
    if !fisher.is_finite() || fisher <= 0.0 {
        return Err(Error::NonPositiveFisher(fisher));
    }
    Ok(1.0 / (nu as f64 * fisher).sqrt())
}

/// Combined estimation summary. Construction checks the quantum bound.
#[derive(Debug, Clone, Copy)]
pub struct EstimationResult {
    pub cfi: f64,
    pub qfi: f64,
    pub nu: u64,
    /// Bound implied by the better of the two informations.
    pub delta_lambda: f64,
}

impl EstimationResult {
    pub fn new(cfi_value: f64, qfi_value: f64, nu: u64) -> Result<Self> {
        if cfi_value > qfi_value * (1.0 + 1e-6) {
            return Err(Error::InvalidInput(format!(
                "classical information {cfi_value:.6e} exceeds the quantum bound {qfi_value:.6e}"
            )));
        }
        Ok(Self {
            cfi: cfi_value,
            qfi: qfi_value,
            nu,
            delta_lambda: cramer_rao(qfi_value.max(cfi_value), nu)?,
        })
    }
}
