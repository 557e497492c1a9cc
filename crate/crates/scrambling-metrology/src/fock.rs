//! Truncated Fock-space linear algebra: states, operators, and unitaries.
//!
//! Everything downstream (model evolution, information matrices, sweeps) is
//! built from the pieces in this module:
//!
//! * [`FockVector`] — a state in the number basis `|0..N-1>`;
//! * [`FockOperator`] — a dense complex matrix carrying its band width;
//! * probe constructors ([`coherent_state`], [`squeezed_vacuum_state`]);
//! * the scrambling unitary `U = exp(-i gamma x^m)` ([`Scrambler`], [`build_scrambler`]);
//! * [`TruncationPolicy`] — the knobs of the adaptive dimension-doubling loop.
//!
//! All values are immutable after construction and every function is pure, so
//! the whole module is safe to use from concurrent sweep workers.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default neglected-probability-mass tolerance for probe construction.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Hard cap used when estimating how large a basis a probe would need.
const REQUIRED_DIM_SEARCH_CAP: usize = 1 << 24;

// ---------------------------------------------------------------------------
// states
// ---------------------------------------------------------------------------

/// A vector in the truncated number basis: amplitudes `c_0 .. c_{N-1}`.
///
/// Constructed probe states and evolved states are unit-norm; derivative
/// states are deliberately not normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub amplitudes: Array1<Complex64>,
}

impl FockVector {
    pub fn new(amplitudes: Array1<Complex64>) -> Self {
        assert!(!amplitudes.is_empty(), "a Fock vector needs dim >= 1");
        Self { amplitudes }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(Array1::zeros(dim))
    }

    /// Basis size `N`.
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Mean of the number operator, `<n>`.
    pub fn mean_number(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// Probability mass at or above level `k`: `sum_{n >= k} |c_n|^2`.
    pub fn tail_mass(&self, k: usize) -> f64 {
        assert!(k <= self.dim(), "tail index beyond dimension");
        self.amplitudes.iter().skip(k).map(|c| c.norm_sqr()).sum()
    }

    /// Zero-pad (or truncate) to `dim` entries.
    pub fn resized(&self, dim: usize) -> FockVector {
        let mut out = Array1::zeros(dim);
        let keep = self.dim().min(dim);
        out.slice_mut(ndarray::s![..keep])
            .assign(&self.amplitudes.slice(ndarray::s![..keep]));
        FockVector::new(out)
    }
}

/// Probability mass of `state` at or above level `k` (free-function form).
pub fn tail_mass(state: &FockVector, k: usize) -> f64 {
    state.tail_mass(k)
}

// ---------------------------------------------------------------------------
// operators
// ---------------------------------------------------------------------------

/// Dense complex `N x N` matrix together with its band width
/// (`band_width = 0` means diagonal; entries vanish for `|i - j| > band_width`).
#[derive(Debug, Clone)]
pub struct FockOperator {
    pub entries: Array2<Complex64>,
    pub band_width: usize,
}

impl FockOperator {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Matrix-vector product exploiting the band structure.
    pub fn apply(&self, state: &FockVector) -> FockVector {
        let n = self.dim();
        assert_eq!(n, state.dim(), "dimension mismatch");
        let mut out = Array1::zeros(n);
        for i in 0..n {
            let lo = i.saturating_sub(self.band_width);
            let hi = (i + self.band_width + 1).min(n);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in lo..hi {
                acc += self.entries[(i, j)] * state.amplitudes[j];
            }
            out[i] = acc;
        }
        FockVector::new(out)
    }

    /// Largest entrywise deviation from Hermiticity, `max |A - A^dag|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// The number operator `n = a^dag a`: diagonal entries `0 .. N-1`.
pub fn number_operator(dim: usize) -> FockOperator {
    assert!(dim >= 1, "dim >= 1 required");
    let mut entries = Array2::zeros((dim, dim));
    for k in 0..dim {
        entries[(k, k)] = Complex64::new(k as f64, 0.0);
    }
    FockOperator {
        entries,
        band_width: 0,
    }
}

/// Real banded product `c = a * b`, exact for all retained rows.
fn mul_banded_real(
    a: &Array2<f64>,
    band_a: usize,
    b: &Array2<f64>,
    band_b: usize,
) -> (Array2<f64>, usize) {
    let n = a.nrows();
    let band_c = band_a + band_b;
    let mut c = Array2::zeros((n, n));
    for i in 0..n {
        let jlo = i.saturating_sub(band_c);
        let jhi = (i + band_c + 1).min(n);
        for j in jlo..jhi {
            let klo = i.saturating_sub(band_a).max(j.saturating_sub(band_b));
            let khi = ((i + band_a).min(j + band_b) + 1).min(n);
            let mut acc = 0.0;
            for k in klo..khi {
                acc += a[(i, k)] * b[(k, j)];
            }
            c[(i, j)] = acc;
        }
    }
    (c, band_c)
}

/// Exact top-left `dim x dim` block of `x^m` as a real symmetric matrix,
/// where `x = a + a^dag`.
///
/// The quadrature is built at dimension `dim + m` before taking the m-th
/// power, then truncated. Powering the already-truncated matrix would corrupt
/// the last `m` rows; padding first reproduces the exact infinite-dimensional
/// matrix elements for every retained row, so the same entry computed at two
/// different dimensions is bit-identical.
pub(crate) fn quadrature_power_real(m: u8, dim: usize) -> Result<(Array2<f64>, usize)> {
    if !(1..=3).contains(&m) {
        return Err(Error::InvalidInput(format!(
            "quadrature exponent must be 1, 2 or 3 (got {m})"
        )));
    }
    if dim < m as usize + 1 {
        return Err(Error::InvalidInput(format!(
            "dim must be at least m + 1 = {} (got {dim})",
            m as usize + 1
        )));
    }
    let padded = dim + m as usize;
    let mut x = Array2::zeros((padded, padded));
    for k in 1..padded {
        let v = (k as f64).sqrt();
        x[(k - 1, k)] = v;
        x[(k, k - 1)] = v;
    }
    let (power, band) = match m {
        1 => (x, 1),
        2 => mul_banded_real(&x, 1, &x, 1),
        _ => {
            let (x2, b2) = mul_banded_real(&x, 1, &x, 1);
            mul_banded_real(&x2, b2, &x, 1)
        }
    };
    let mut out = Array2::zeros((dim, dim));
    for i in 0..dim {
        let lo = i.saturating_sub(band);
        let hi = (i + band + 1).min(dim);
        for j in lo..hi {
            out[(i, j)] = power[(i, j)];
        }
    }
    Ok((out, band))
}

/// Exact Fock-basis matrix of `x^m` (`x = a + a^dag`, `m` in 1..=3),
/// restricted to the top-left `dim x dim` block.
pub fn quadrature_power(m: u8, dim: usize) -> Result<FockOperator> {
    let (real, band) = quadrature_power_real(m, dim)?;
    let entries = real.mapv(|v| Complex64::new(v, 0.0));
    Ok(FockOperator {
        entries,
        band_width: band,
    })
}

// ---------------------------------------------------------------------------
// ladder-operator actions (vector form, no matrix build)
// ---------------------------------------------------------------------------

/// `a |psi>`: `(a psi)_n = sqrt(n+1) psi_{n+1}`.
pub fn lowering_apply(state: &FockVector) -> FockVector {
    let n = state.dim();
    let mut out = Array1::zeros(n);
    for k in 0..n - 1 {
        out[k] = ((k + 1) as f64).sqrt() * state.amplitudes[k + 1];
    }
    FockVector::new(out)
}

/// `a^dag |psi>`: `(a^dag psi)_n = sqrt(n) psi_{n-1}`.
pub fn raising_apply(state: &FockVector) -> FockVector {
    let n = state.dim();
    let mut out = Array1::zeros(n);
    for k in 1..n {
        out[k] = (k as f64).sqrt() * state.amplitudes[k - 1];
    }
    FockVector::new(out)
}

/// `n |psi>`: `(n psi)_n = n psi_n`.
pub fn number_apply(state: &FockVector) -> FockVector {
    let amps = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(k, c)| c * k as f64)
        .collect::<Array1<_>>();
    FockVector::new(amps)
}

// ---------------------------------------------------------------------------
// probes
// ---------------------------------------------------------------------------

/// Which probe state feeds the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeKind {
    Coherent,
    SqueezedVacuum,
}

impl std::fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProbeKind::Coherent => write!(f, "coherent"),
            ProbeKind::SqueezedVacuum => write!(f, "squeezed-vacuum"),
        }
    }
}

/// A probe specification: kind, mean photon number and signal phase.
///
/// For a coherent probe the amplitude is `alpha = sqrt(nbar) e^{i phase}`;
/// for squeezed vacuum the squeezing parameter is `r = asinh(sqrt(nbar))`
/// with squeezing phase `phase`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    pub kind: ProbeKind,
    pub nbar: f64,
    pub probe_phase: f64,
}

impl ProbeSpec {
    pub fn new(kind: ProbeKind, nbar: f64, probe_phase: f64) -> Result<Self> {
        if !nbar.is_finite() || nbar < 0.0 {
            return Err(Error::InvalidInput(format!(
                "mean photon number must be finite and >= 0 (got {nbar})"
            )));
        }
        if !probe_phase.is_finite() {
            return Err(Error::InvalidInput("probe phase must be finite".into()));
        }
        Ok(Self {
            kind,
            nbar,
            probe_phase,
        })
    }

    /// Materialize the probe in a `dim`-dimensional basis.
    pub fn build(&self, dim: usize, tail_tolerance: f64) -> Result<FockVector> {
        match self.kind {
            ProbeKind::Coherent => {
                coherent_state_with_tolerance(self.nbar, self.probe_phase, dim, tail_tolerance)
            }
            ProbeKind::SqueezedVacuum => squeezed_vacuum_state_with_tolerance(
                self.nbar,
                self.probe_phase,
                dim,
                tail_tolerance,
            ),
        }
    }
}

fn check_probe_args(nbar: f64, phase: f64, dim: usize) -> Result<()> {
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(Error::InvalidInput(format!(
            "mean photon number must be finite and >= 0 (got {nbar})"
        )));
    }
    if !phase.is_finite() {
        return Err(Error::InvalidInput("probe phase must be finite".into()));
    }
    if dim == 0 {
        return Err(Error::InvalidInput("dim >= 1 required".into()));
    }
    Ok(())
}

/// Finish a probe build: verify the neglected tail, then renormalize.
///
/// `next_prob(k, p_k)` must return `p_{k+1}` given the occupation probability
/// `p_k` of the *last analytically populated* level sequence; it is used to
/// estimate the dimension that would satisfy the tolerance when the build
/// fails.
#[allow(clippy::too_many_arguments)]
fn finalize_probe(
    mut amps: Array1<Complex64>,
    retained_mass: f64,
    tolerance: f64,
    dim: usize,
    mut level: usize,
    mut prob: f64,
    step: usize,
    next_prob: impl Fn(usize, f64) -> f64,
) -> Result<FockVector> {
    let tail = (1.0 - retained_mass).max(0.0);
    if tail > tolerance {
        // Walk the occupation recurrence forward until enough mass is kept.
        let mut kept = retained_mass;
        let mut required = dim;
        while 1.0 - kept > tolerance && level < REQUIRED_DIM_SEARCH_CAP {
            prob = next_prob(level, prob);
            level += step;
            kept += prob;
            required = level + 1;
        }
        return Err(Error::TailMass {
            dim,
            tail,
            tolerance,
            required,
        });
    }
    if retained_mass > 0.0 {
        let scale = retained_mass.sqrt().recip();
        amps.mapv_inplace(|c| c * scale);
    }
    Ok(FockVector::new(amps))
}

/// Coherent probe `|alpha>`, `alpha = sqrt(nbar) e^{i phase}`:
/// `c_n = e^{-nbar/2} alpha^n / sqrt(n!)`, renormalized after truncation.
pub fn coherent_state(nbar: f64, probe_phase: f64, dim: usize) -> Result<FockVector> {
    coherent_state_with_tolerance(nbar, probe_phase, dim, DEFAULT_TAIL_TOLERANCE)
}

/// [`coherent_state`] with an explicit neglected-tail tolerance.
pub fn coherent_state_with_tolerance(
    nbar: f64,
    probe_phase: f64,
    dim: usize,
    tail_tolerance: f64,
) -> Result<FockVector> {
    check_probe_args(nbar, probe_phase, dim)?;
    let alpha = Complex64::from_polar(nbar.sqrt(), probe_phase);
    let mut amps = Array1::zeros(dim);
    let mut c = Complex64::new((-nbar / 2.0).exp(), 0.0);
    let mut mass = 0.0;
    for n in 0..dim {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        amps[n] = c;
        mass += c.norm_sqr();
    }
    let last_prob = amps[dim - 1].norm_sqr();
    finalize_probe(amps, mass, tail_tolerance, dim, dim - 1, last_prob, 1, |k, p| {
        // Poisson recurrence: p_{k+1} = p_k * nbar / (k+1)
        p * nbar / (k + 1) as f64
    })
}

/// Squeezed-vacuum probe with `r = asinh(sqrt(nbar))` and squeezing phase
/// `probe_phase`: even amplitudes
/// `c_{2k} = (cosh r)^{-1/2} (-e^{i phase} tanh r)^k sqrt((2k)!) / (2^k k!)`,
/// odd amplitudes exactly zero; renormalized after truncation.
pub fn squeezed_vacuum_state(nbar: f64, probe_phase: f64, dim: usize) -> Result<FockVector> {
    squeezed_vacuum_state_with_tolerance(nbar, probe_phase, dim, DEFAULT_TAIL_TOLERANCE)
}

/// [`squeezed_vacuum_state`] with an explicit neglected-tail tolerance.
pub fn squeezed_vacuum_state_with_tolerance(
    nbar: f64,
    probe_phase: f64,
    dim: usize,
    tail_tolerance: f64,
) -> Result<FockVector> {
    check_probe_args(nbar, probe_phase, dim)?;
    let r = nbar.sqrt().asinh();
    let t = r.tanh();
    let ratio_base = -Complex64::from_polar(t, probe_phase);
    let mut amps = Array1::zeros(dim);
    let mut c = Complex64::new(r.cosh().sqrt().recip(), 0.0);
    amps[0] = c;
    let mut mass = c.norm_sqr();
    let mut last_even = 0usize;
    let mut n = 2;
    while n < dim {
        let k = n as f64;
        c *= ratio_base * ((k - 1.0) / k).sqrt();
        amps[n] = c;
        mass += c.norm_sqr();
        last_even = n;
        n += 2;
    }
    let last_prob = amps[last_even].norm_sqr();
    let t2 = t * t;
    finalize_probe(
        amps,
        mass,
        tail_tolerance,
        dim,
        last_even,
        last_prob,
        2,
        move |k, p| {
            // |c_{2j+2}|^2 = |c_{2j}|^2 * tanh^2 r * (2j+1)/(2j+2), k = 2j
            p * t2 * (k + 1) as f64 / (k + 2) as f64
        },
    )
}

/// Phase rotation `e^{-i phi n}`: `c_n <- e^{-i phi n} c_n` (diagonal action,
/// no matrix build). Preserves every `|c_n|` and the norm.
pub fn apply_phase_shift(state: &FockVector, phi: f64) -> FockVector {
    let amps = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(n, c)| c * Complex64::from_polar(1.0, -phi * n as f64))
        .collect::<Array1<_>>();
    FockVector::new(amps)
}

// ---------------------------------------------------------------------------
// scrambler
// ---------------------------------------------------------------------------

/// The scrambling unitary `U(gamma) = exp(-i gamma x^m)` in factored form.
///
/// The Hermitian `x^m` is eigendecomposed once (`x^m = V L V^T`); every
/// strength then costs only two dense matrix-vector products, and the spectrum
/// is reusable across many `gamma` values. The construction is exactly
/// unitary up to round-off, unlike series or scaling-and-squaring schemes.
#[derive(Debug, Clone)]
pub struct Scrambler {
    m: u8,
    dim: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: Array2<f64>,
}

impl Scrambler {
    /// Eigendecompose `x^m` at the given dimension (`m` in {2, 3}).
    pub fn new(m: u8, dim: usize) -> Result<Self> {
        if !(2..=3).contains(&m) {
            return Err(Error::InvalidInput(format!(
                "scrambling order must be 2 or 3 (got {m})"
            )));
        }
        let (xm, _) = quadrature_power_real(m, dim)?;
        let mat = faer::Mat::from_fn(dim, dim, |i, j| xm[(i, j)]);
        let eig =
            faer::linalg::solvers::SelfAdjointEigen::new(mat.as_ref(), faer::Side::Lower)
                .map_err(|_| Error::Eigendecomposition { dim, gamma: f64::NAN })?;
        let eigenvalues: Vec<f64> = eig.S().column_vector().iter().copied().collect();
        let u = eig.U();
        let eigenvectors = Array2::from_shape_fn((dim, dim), |(i, j)| u[(i, j)]);
        Ok(Self {
            m,
            dim,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn m(&self) -> u8 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `U(gamma) |psi> = V e^{-i gamma L} V^T |psi>`.
    // Index loops over `(i, k)` matrix entries; iterator chains obscure the
    // dense mat-vec structure here without making it faster.
    #[allow(clippy::needless_range_loop)]
    pub fn apply(&self, gamma: f64, state: &FockVector) -> FockVector {
        let n = self.dim;
        assert_eq!(n, state.dim(), "dimension mismatch");
        // w = V^T psi
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for (k, wk) in w.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                acc += self.eigenvectors[(i, k)] * state.amplitudes[i];
            }
            *wk = acc;
        }
        // w_k *= exp(-i gamma lambda_k)
        for (k, wk) in w.iter_mut().enumerate() {
            *wk *= Complex64::from_polar(1.0, -gamma * self.eigenvalues[k]);
        }
        // out = V w
        let mut out = Array1::zeros(n);
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += self.eigenvectors[(i, k)] * w[k];
            }
            out[i] = acc;
        }
        FockVector::new(out)
    }

    /// Materialize the dense unitary matrix (mostly for diagnostics and small
    /// dimensions; evolution should prefer [`Scrambler::apply`]).
    #[allow(clippy::needless_range_loop)]
    pub fn unitary(&self, gamma: f64) -> FockOperator {
        let n = self.dim;
        let phases: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -gamma * l))
            .collect();
        let mut entries = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.eigenvectors[(i, k)] * phases[k] * self.eigenvectors[(j, k)];
                }
                entries[(i, j)] = acc;
            }
        }
        FockOperator {
            entries,
            band_width: n.saturating_sub(1),
        }
    }
}

/// One-shot construction of `U = exp(-i gamma x^m)` as a dense matrix.
pub fn build_scrambler(gamma: f64, m: u8, dim: usize) -> Result<FockOperator> {
    if !gamma.is_finite() {
        return Err(Error::InvalidInput("gamma must be finite".into()));
    }
    Ok(Scrambler::new(m, dim)?.unitary(gamma))
}

// ---------------------------------------------------------------------------
// truncation policy
// ---------------------------------------------------------------------------

/// Controls the adaptive truncation loop used by the numeric engine.
///
/// The basis is grown geometrically until every monitored scalar changes by
/// less than `convergence_rtol` between consecutive dimensions; probe builds
/// must keep neglected tail mass below `tail_tolerance`. Truncation is never
/// user-facing in results — it either certifies convergence or errors out.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct TruncationPolicy {
    pub initial_dim: usize,
    pub growth_factor: usize,
    pub tail_tolerance: f64,
    pub convergence_rtol: f64,
    pub max_dim: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            initial_dim: 64,
            growth_factor: 2,
            tail_tolerance: 1e-12,
            convergence_rtol: 1e-8,
            max_dim: 16384,
        }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.initial_dim < 8 {
            return Err(Error::InvalidInput(format!(
                "initial_dim must be >= 8 (got {})",
                self.initial_dim
            )));
        }
        if self.growth_factor < 2 {
            return Err(Error::InvalidInput(format!(
                "growth_factor must be >= 2 (got {})",
                self.growth_factor
            )));
        }
        if !(self.tail_tolerance > 0.0) {
            return Err(Error::InvalidInput(
                "tail_tolerance must be positive".into(),
            ));
        }
        if !(self.convergence_rtol > 0.0) {
            return Err(Error::InvalidInput(
                "convergence_rtol must be positive".into(),
            ));
        }
        if self.max_dim < self.initial_dim {
            return Err(Error::InvalidInput(format!(
                "max_dim ({}) must be >= initial_dim ({})",
                self.max_dim, self.initial_dim
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
