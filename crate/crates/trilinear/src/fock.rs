//! Truncated Hilbert space of the probe: spin-1/2 ⊗ breathing Fock space
//! ⊗ rocking Fock space, as dense complex vectors and matrices.
//!
//! Basis ordering is fixed so serialized states are portable: the spin
//! index varies fastest (down = 0, up = 1), then the breathing Fock index,
//! then the rocking Fock index. A basis state `(s, n_b, n_r)` therefore
//! lives at `s + 2 * (n_b + (n_cut_b + 1) * n_r)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Spin-1/2 basis label; `Down` is index 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Down = 0,
    Up = 1,
}

/// One of the two collective phonon modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Breathing,
    Rocking,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Breathing => write!(f, "breathing"),
            Mode::Rocking => write!(f, "rocking"),
        }
    }
}

/// Truncation cutoffs of the two Fock ladders (inclusive maxima).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceLayout {
    pub n_cut_b: usize,
    pub n_cut_r: usize,
}

impl SpaceLayout {
    pub fn new(n_cut_b: usize, n_cut_r: usize) -> Self {
        Self { n_cut_b, n_cut_r }
    }

    pub fn total_dim(&self) -> usize {
        2 * (self.n_cut_b + 1) * (self.n_cut_r + 1)
    }

    pub fn cutoff(&self, mode: Mode) -> usize {
        match mode {
            Mode::Breathing => self.n_cut_b,
            Mode::Rocking => self.n_cut_r,
        }
    }

    /// Linear index of the basis state `(spin, n_b, n_r)`.
    #[inline]
    pub fn index(&self, spin: Spin, n_b: usize, n_r: usize) -> usize {
        debug_assert!(n_b <= self.n_cut_b && n_r <= self.n_cut_r);
        spin as usize + 2 * (n_b + (self.n_cut_b + 1) * n_r)
    }

    /// Inverse of [`SpaceLayout::index`].
    #[inline]
    pub fn unpack(&self, idx: usize) -> (Spin, usize, usize) {
        let spin = if idx.is_multiple_of(2) {
            Spin::Down
        } else {
            Spin::Up
        };
        let rest = idx / 2;
        let n_b = rest % (self.n_cut_b + 1);
        let n_r = rest / (self.n_cut_b + 1);
        (spin, n_b, n_r)
    }

    /// Iterate all basis labels in index order.
    pub fn states(&self) -> impl Iterator<Item = (Spin, usize, usize)> + '_ {
        (0..self.total_dim()).map(|i| self.unpack(i))
    }
}

/// Normalized state vector on a [`SpaceLayout`].
#[derive(Debug, Clone)]
pub struct Ket {
    amplitudes: DVector<Complex64>,
    layout: SpaceLayout,
}

/// Norm tolerance accepted by [`Ket::from_amplitudes`] before renormalizing.
pub const KET_NORM_TOL: f64 = 1e-9;

impl Ket {
    /// Wrap raw amplitudes. The vector must already be normalized to
    /// within [`KET_NORM_TOL`]; the residual rounding is then scaled out.
    pub fn from_amplitudes(layout: SpaceLayout, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::LayoutMismatch);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > KET_NORM_TOL {
            return Err(Error::NormDrift {
                norm,
                tol: KET_NORM_TOL,
            });
        }
        let mut amplitudes = amplitudes;
        amplitudes.scale_mut(1.0 / norm);
        Ok(Self { amplitudes, layout })
    }

    /// Basis state `(spin, n_b, n_r)`.
    pub fn basis_state(layout: SpaceLayout, spin: Spin, n_b: usize, n_r: usize) -> Self {
        let mut amplitudes = DVector::zeros(layout.total_dim());
        amplitudes[layout.index(spin, n_b, n_r)] = Complex64::new(1.0, 0.0);
        Self { amplitudes, layout }
    }

    pub fn layout(&self) -> SpaceLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Expectation value `<psi|M|psi>` (real part; the caller is expected
    /// to pass a hermitian operator).
    pub fn expectation(&self, op: &LinOp) -> f64 {
        assert_eq!(self.layout, op.layout, "layout mismatch");
        let mv = &op.mat * &self.amplitudes;
        self.amplitudes.dotc(&mv).re
    }

    /// Marginal Fock distribution of one mode, traced over spin and the
    /// other mode. Entries sum to 1 up to the state's normalization.
    pub fn fock_probs(&self, mode: Mode) -> Vec<f64> {
        let cut = self.layout.cutoff(mode);
        let mut probs = vec![0.0; cut + 1];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let (_, n_b, n_r) = self.layout.unpack(idx);
            let n = match mode {
                Mode::Breathing => n_b,
                Mode::Rocking => n_r,
            };
            probs[n] += amp.norm_sqr();
        }
        probs
    }

    /// Marginal spin populations `(p_down, p_up)`.
    pub fn spin_probs(&self) -> (f64, f64) {
        let mut down = 0.0;
        let mut up = 0.0;
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            if idx.is_multiple_of(2) {
                down += amp.norm_sqr();
            } else {
                up += amp.norm_sqr();
            }
        }
        (down, up)
    }

    /// Debug snapshot as CSV rows `index,re,im`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,re,im")?;
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            writeln!(w, "{idx},{:e},{:e}", amp.re, amp.im)?;
        }
        Ok(())
    }
}

/// Dense operator on a [`SpaceLayout`]. The `hermitian` flag is set by
/// constructors that guarantee it and is checked in debug builds.
#[derive(Debug, Clone)]
pub struct LinOp {
    mat: DMatrix<Complex64>,
    layout: SpaceLayout,
    hermitian: bool,
}

impl LinOp {
    pub fn zeros(layout: SpaceLayout) -> Self {
        Self {
            mat: DMatrix::zeros(layout.total_dim(), layout.total_dim()),
            layout,
            hermitian: true,
        }
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        Self {
            mat: DMatrix::identity(layout.total_dim(), layout.total_dim()),
            layout,
            hermitian: true,
        }
    }

    pub fn from_matrix(layout: SpaceLayout, mat: DMatrix<Complex64>, hermitian: bool) -> Self {
        assert_eq!(mat.nrows(), layout.total_dim());
        assert_eq!(mat.ncols(), layout.total_dim());
        let op = Self {
            mat,
            layout,
            hermitian,
        };
        debug_assert!(!hermitian || op.hermiticity_deviation() < 1e-12);
        op
    }

    pub fn layout(&self) -> SpaceLayout {
        self.layout
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Mutable matrix access for in-crate builders; callers must restore
    /// the hermitian invariant via [`LinOp::into_hermitian`].
    pub(crate) fn matrix_mut(&mut self) -> &mut DMatrix<Complex64> {
        self.hermitian = false;
        &mut self.mat
    }

    pub fn is_flagged_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Max-abs deviation from self-adjointness.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.mat.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Error unless `|M - M^dag|_max < tol`.
    pub fn assert_hermitian(&self, tol: f64) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev < tol {
            Ok(())
        } else {
            Err(Error::NotHermitian { deviation: dev })
        }
    }

    /// Verify self-adjointness and set the hermitian flag. Builders whose
    /// intermediate products lose the flag (e.g. commuting factor
    /// products) finish with this.
    pub fn into_hermitian(mut self, tol: f64) -> Result<Self> {
        self.assert_hermitian(tol)?;
        self.hermitian = true;
        Ok(self)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            layout: self.layout,
            hermitian: self.hermitian,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            mat: &self.mat * Complex64::new(factor, 0.0),
            layout: self.layout,
            hermitian: self.hermitian,
        }
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self {
            mat: &self.mat * factor,
            layout: self.layout,
            hermitian: self.hermitian && factor.im == 0.0,
        }
    }

    pub fn add(&self, other: &LinOp) -> Self {
        assert_eq!(self.layout, other.layout, "layout mismatch");
        Self {
            mat: &self.mat + &other.mat,
            layout: self.layout,
            hermitian: self.hermitian && other.hermitian,
        }
    }

    pub fn sub(&self, other: &LinOp) -> Self {
        assert_eq!(self.layout, other.layout, "layout mismatch");
        Self {
            mat: &self.mat - &other.mat,
            layout: self.layout,
            hermitian: self.hermitian && other.hermitian,
        }
    }

    /// Operator product `self * other` (not hermitian in general).
    pub fn mul(&self, other: &LinOp) -> Self {
        assert_eq!(self.layout, other.layout, "layout mismatch");
        Self {
            mat: &self.mat * &other.mat,
            layout: self.layout,
            hermitian: false,
        }
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &LinOp) -> Self {
        let ab = &self.mat * &other.mat;
        let ba = &other.mat * &self.mat;
        Self {
            mat: ab - ba,
            layout: self.layout,
            hermitian: false,
        }
    }

    /// Largest absolute matrix element.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// Matrix element `<bra|M|ket>` between basis states.
    pub fn element(&self, bra: (Spin, usize, usize), ket: (Spin, usize, usize)) -> Complex64 {
        let i = self.layout.index(bra.0, bra.1, bra.2);
        let j = self.layout.index(ket.0, ket.1, ket.2);
        self.mat[(i, j)]
    }

    /// Apply to a state; the result is renormalization-checked by the
    /// caller when unitarity is expected.
    pub fn apply_raw(&self, psi: &Ket) -> DVector<Complex64> {
        assert_eq!(self.layout, psi.layout, "layout mismatch");
        &self.mat * &psi.amplitudes
    }
}

/// Annihilation operator of one mode: `<n-1|a|n> = sqrt(n)`, identity on
/// the spin and the other mode.
pub fn annihilator(layout: SpaceLayout, mode: Mode) -> LinOp {
    let dim = layout.total_dim();
    let mut mat = DMatrix::zeros(dim, dim);
    for (spin, n_b, n_r) in layout.states() {
        match mode {
            Mode::Breathing => {
                if n_b > 0 {
                    let from = layout.index(spin, n_b, n_r);
                    let to = layout.index(spin, n_b - 1, n_r);
                    mat[(to, from)] = Complex64::new((n_b as f64).sqrt(), 0.0);
                }
            }
            Mode::Rocking => {
                if n_r > 0 {
                    let from = layout.index(spin, n_b, n_r);
                    let to = layout.index(spin, n_b, n_r - 1);
                    mat[(to, from)] = Complex64::new((n_r as f64).sqrt(), 0.0);
                }
            }
        }
    }
    LinOp {
        mat,
        layout,
        hermitian: false,
    }
}

/// Creation operator of one mode.
pub fn creator(layout: SpaceLayout, mode: Mode) -> LinOp {
    annihilator(layout, mode).adjoint()
}

/// Number operator of one mode (hermitian, diagonal).
pub fn number_op(layout: SpaceLayout, mode: Mode) -> LinOp {
    let dim = layout.total_dim();
    let mut mat = DMatrix::zeros(dim, dim);
    for (spin, n_b, n_r) in layout.states() {
        let i = layout.index(spin, n_b, n_r);
        let n = match mode {
            Mode::Breathing => n_b,
            Mode::Rocking => n_r,
        };
        mat[(i, i)] = Complex64::new(n as f64, 0.0);
    }
    LinOp {
        mat,
        layout,
        hermitian: true,
    }
}

/// Pauli operator label on the spin factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliOp {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// Pauli operator embedded on the spin factor, identity on the phonons.
/// `sigma^+- = (sigma^x +- i sigma^y) / 2` flip `|down> <-> |up>`.
pub fn pauli(layout: SpaceLayout, op: PauliOp) -> LinOp {
    let dim = layout.total_dim();
    let mut mat = DMatrix::zeros(dim, dim);
    let one = Complex64::new(1.0, 0.0);
    let i_unit = Complex64::new(0.0, 1.0);
    for (spin, n_b, n_r) in layout.states() {
        let idx = layout.index(spin, n_b, n_r);
        let flipped = match spin {
            Spin::Down => layout.index(Spin::Up, n_b, n_r),
            Spin::Up => layout.index(Spin::Down, n_b, n_r),
        };
        match op {
            PauliOp::X => {
                mat[(flipped, idx)] = one;
            }
            PauliOp::Y => {
                // sigma^y |down> = -i |up>, sigma^y |up> = i |down>
                mat[(flipped, idx)] = match spin {
                    Spin::Down => -i_unit,
                    Spin::Up => i_unit,
                };
            }
            PauliOp::Z => {
                mat[(idx, idx)] = match spin {
                    Spin::Down => -one,
                    Spin::Up => one,
                };
            }
            PauliOp::Plus => {
                if spin == Spin::Down {
                    mat[(flipped, idx)] = one;
                }
            }
            PauliOp::Minus => {
                if spin == Spin::Up {
                    mat[(flipped, idx)] = one;
                }
            }
        }
    }
    let hermitian = matches!(op, PauliOp::X | PauliOp::Y | PauliOp::Z);
    LinOp {
        mat,
        layout,
        hermitian,
    }
}

/// Spin part of an initial-state specification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinSpec {
    Up,
    Down,
    /// `(|up> + |down>) / sqrt(2)`, the +1 eigenstate of sigma^x.
    Plus,
    /// `(|up> - |down>) / sqrt(2)`.
    Minus,
}

/// Motional part of an initial-state specification.
///
/// `Binomial(n)` is the state `(a_b^dag + a_r^dag)^n / sqrt(2^n n!) |0,0>`,
/// whose amplitude on `|k, n-k>` is `sqrt(C(n,k) / 2^n)`. `NoonLike(n)`
/// denotes the same n-quanta superposition family and prepares the
/// identical state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionalSpec {
    Fock { n_b: usize, n_r: usize },
    Binomial(usize),
    NoonLike(usize),
}

/// Full initial-state specification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateSpec {
    pub spin: SpinSpec,
    pub motional: MotionalSpec,
}

fn binomial_coeff(n: usize, k: usize) -> f64 {
    let mut c = 1.0;
    for j in 0..k.min(n - k) {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    c
}

/// Prepare a normalized state; every occupied Fock index must stay at
/// least `margin` levels below its cutoff.
pub fn prepare_state_with_margin(
    layout: SpaceLayout,
    spec: &StateSpec,
    margin: usize,
) -> Result<Ket> {
    let check = |n_b: usize, n_r: usize| -> Result<()> {
        if n_b + margin > layout.n_cut_b || n_r + margin > layout.n_cut_r {
            Err(Error::StateExceedsCutoff {
                n_b,
                n_r,
                cut_b: layout.n_cut_b,
                cut_r: layout.n_cut_r,
                margin,
            })
        } else {
            Ok(())
        }
    };

    // (index within the motional factor, amplitude) pairs
    let mut motional: Vec<(usize, usize, f64)> = Vec::new();
    match spec.motional {
        MotionalSpec::Fock { n_b, n_r } => {
            check(n_b, n_r)?;
            motional.push((n_b, n_r, 1.0));
        }
        MotionalSpec::Binomial(n) | MotionalSpec::NoonLike(n) => {
            let norm = (2.0f64).powi(n as i32).sqrt();
            for k in 0..=n {
                check(k, n - k)?;
                motional.push((k, n - k, binomial_coeff(n, k).sqrt() / norm));
            }
        }
    }

    let spin_amps: Vec<(Spin, Complex64)> = match spec.spin {
        SpinSpec::Up => vec![(Spin::Up, Complex64::new(1.0, 0.0))],
        SpinSpec::Down => vec![(Spin::Down, Complex64::new(1.0, 0.0))],
        SpinSpec::Plus => vec![
            (
                Spin::Down,
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ),
            (
                Spin::Up,
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ),
        ],
        SpinSpec::Minus => vec![
            (
                Spin::Down,
                Complex64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ),
            (
                Spin::Up,
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ),
        ],
    };

    let mut amplitudes = DVector::zeros(layout.total_dim());
    for &(spin, s_amp) in &spin_amps {
        for &(n_b, n_r, m_amp) in &motional {
            amplitudes[layout.index(spin, n_b, n_r)] = s_amp * m_amp;
        }
    }
    Ket::from_amplitudes(layout, amplitudes)
}

/// [`prepare_state_with_margin`] with the default margin of 0.
pub fn prepare_state(layout: SpaceLayout, spec: &StateSpec) -> Result<Ket> {
    prepare_state_with_margin(layout, spec, 0)
}
