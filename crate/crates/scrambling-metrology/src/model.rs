//! Two-phase interferometric model with an intermediate scrambler, and the
//! quantum information matrices that govern joint estimation of the phases.
//!
//! The sequence is `|psi> = V(phi2) U(gamma) V(phi1) |psi0>` with phase
//! rotations `V(phi) = exp(-i phi n)` and scrambler `U = exp(-i gamma x^m)`.
//! Two independent computational routes are provided:
//!
//! * the **state route** ([`evolve`] + [`info_matrices`]) differentiates the
//!   evolved state directly;
//! * the **generator route** ([`info_matrices_via_generators`]) works with
//!   the Heisenberg-picture generators and never materializes the scrambler.
//!
//! Both adapt the basis size until the reported scalars stop moving; see
//! [`TruncationPolicy`]. The generator route is cheaper by orders of
//! magnitude (no eigendecomposition) and is the engine of record for sweeps;
//! the state route provides the independent cross-check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    apply_phase_shift, lowering_apply, number_apply, quadrature_power, raising_apply, FockOperator,
    FockVector, ProbeSpec, Scrambler, TruncationPolicy,
};

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

/// Scrambler parameters: quadrature exponent `m` and strength `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScramblerConfig {
    pub m: u8,
    pub gamma: f64,
}

impl ScramblerConfig {
    pub fn new(m: u8, gamma: f64) -> Result<Self> {
        let cfg = Self { m, gamma };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.m) {
            return Err(Error::InvalidInput(format!(
                "scrambling order must be 2 or 3 (got {})",
                self.m
            )));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::InvalidInput(format!(
                "gamma must be finite and >= 0 (got {})",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// The two phases to be estimated jointly.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct PhasePair {
    pub phi1: f64,
    pub phi2: f64,
}

impl PhasePair {
    pub fn new(phi1: f64, phi2: f64) -> Result<Self> {
        if !phi1.is_finite() || !phi2.is_finite() {
            return Err(Error::InvalidInput("phases must be finite".into()));
        }
        Ok(Self { phi1, phi2 })
    }
}

/// How a [`ModelState`] was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub probe: ProbeSpec,
    pub config: ScramblerConfig,
    pub phases: PhasePair,
    pub dim: usize,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "probe={} nbar={} probe_phase={} m={} gamma={} phi1={} phi2={} dim={}",
            self.probe.kind,
            self.probe.nbar,
            self.probe.probe_phase,
            self.config.m,
            self.config.gamma,
            self.phases.phi1,
            self.phases.phi2,
            self.dim
        )
    }
}

/// Evolved state together with its two parameter derivatives.
///
/// `psi` is unit-norm; the derivatives are not normalized.
#[derive(Debug, Clone)]
pub struct ModelState {
    pub psi: FockVector,
    pub dpsi1: FockVector,
    pub dpsi2: FockVector,
    pub provenance: Provenance,
}

impl ModelState {
    pub fn dim(&self) -> usize {
        self.provenance.dim
    }
}

// ---------------------------------------------------------------------------
// information matrices
// ---------------------------------------------------------------------------

/// The 2x2 quantum Fisher information matrix `Q` (symmetric, PSD) and the
/// incompatibility matrix `D` (antisymmetric, stored via its only independent
/// entry `d12`).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct InfoMatrices {
    pub q11: f64,
    pub q12: f64,
    pub q22: f64,
    pub d12: f64,
    /// `|Q12_raw - Q21_raw|` before symmetrization, kept as a numerical
    /// health indicator.
    pub raw_asymmetry: f64,
}

impl InfoMatrices {
    pub fn q(&self) -> [[f64; 2]; 2] {
        [[self.q11, self.q12], [self.q12, self.q22]]
    }

    pub fn d(&self) -> [[f64; 2]; 2] {
        [[0.0, self.d12], [-self.d12, 0.0]]
    }

    pub fn det_q(&self) -> f64 {
        self.q11 * self.q22 - self.q12 * self.q12
    }

    pub fn det_d(&self) -> f64 {
        self.d12 * self.d12
    }
}

fn scalar_i(c: Complex64, v: &FockVector) -> FockVector {
    FockVector::new(v.amplitudes.mapv(|a| a * c))
}

/// QFIM and incompatibility matrix from a state and its derivatives:
/// `Q_uv = 4 Re[<d_u psi|d_v psi> - <d_u psi|psi><psi|d_v psi>]`,
/// `D_uv = 4 Im[...]`. The off-diagonal pair is symmetrized (Q) and
/// antisymmetrized (D); the raw asymmetry is recorded.
pub fn info_matrices(state: &ModelState) -> InfoMatrices {
    let psi = &state.psi;
    let d1 = &state.dpsi1;
    let d2 = &state.dpsi2;

    let g = |a: &FockVector, b: &FockVector| -> Complex64 {
        a.inner(b) - a.inner(psi) * psi.inner(b)
    };

    let g11 = g(d1, d1);
    let g22 = g(d2, d2);
    let g12 = g(d1, d2);
    let g21 = g(d2, d1);

    let q12_raw = 4.0 * g12.re;
    let q21_raw = 4.0 * g21.re;
    InfoMatrices {
        q11: 4.0 * g11.re,
        q12: 0.5 * (q12_raw + q21_raw),
        q22: 4.0 * g22.re,
        d12: 0.5 * (4.0 * g12.im - 4.0 * g21.im),
        raw_asymmetry: (q12_raw - q21_raw).abs(),
    }
}

/// Evolve the probe at a fixed basis size, producing the state and both
/// derivatives. The scrambler eigendecomposition is taken from `scrambler`,
/// so sweeping phases at a fixed dimension costs no repeated eigensolves.
pub fn evolve_with_scrambler(
    probe: &ProbeSpec,
    scrambler: &Scrambler,
    gamma: f64,
    phases: PhasePair,
    tail_tolerance: f64,
) -> Result<ModelState> {
    let dim = scrambler.dim();
    let psi0 = probe.build(dim, tail_tolerance)?;
    let rotated = apply_phase_shift(&psi0, phases.phi1);
    let scrambled = scrambler.apply(gamma, &rotated);
    let psi = apply_phase_shift(&scrambled, phases.phi2);

    // d/dphi1: V(phi2) U (-i n) V(phi1) |psi0>
    let minus_i = Complex64::new(0.0, -1.0);
    let dpsi1 = apply_phase_shift(
        &scrambler.apply(gamma, &scalar_i(minus_i, &number_apply(&rotated))),
        phases.phi2,
    );
    // d/dphi2: -i n |psi>
    let dpsi2 = scalar_i(minus_i, &number_apply(&psi));

    Ok(ModelState {
        psi,
        dpsi1,
        dpsi2,
        provenance: Provenance {
            probe: *probe,
            config: ScramblerConfig {
                m: scrambler.m(),
                gamma,
            },
            phases,
            dim,
        },
    })
}

/// [`evolve_with_scrambler`] with a freshly built scrambler at `dim`.
pub fn evolve_at_dim(
    probe: &ProbeSpec,
    config: &ScramblerConfig,
    phases: PhasePair,
    dim: usize,
    tail_tolerance: f64,
) -> Result<ModelState> {
    config.validate()?;
    let scrambler = Scrambler::new(config.m, dim)?;
    evolve_with_scrambler(probe, &scrambler, config.gamma, phases, tail_tolerance)
}

// ---------------------------------------------------------------------------
// adaptive truncation driver
// ---------------------------------------------------------------------------

const MONITORED: [&str; 3] = ["det_q", "q22", "d12"];

fn monitored_keys(info: &InfoMatrices) -> [f64; 3] {
    [info.det_q(), info.q22, info.d12]
}

/// Grow the basis geometrically until the monitored scalars (`det Q`, `Q22`,
/// `D12`) agree between consecutive dimensions to `convergence_rtol`
/// (relative, with an absolute floor tied to the matrix scale). Probe-tail
/// violations skip ahead to the estimated adequate dimension.
fn truncation_loop<T>(
    policy: &TruncationPolicy,
    mut compute: impl FnMut(usize) -> Result<(T, InfoMatrices)>,
) -> Result<(T, InfoMatrices, usize)> {
    policy.validate()?;
    let mut dim = policy.initial_dim;
    let mut prev: Option<[f64; 3]> = None;
    loop {
        let (value, info) = match compute(dim) {
            Ok(out) => out,
            Err(Error::TailMass { required, .. }) if required <= policy.max_dim => {
                // jump to the next dimension on the geometric schedule that
                // can hold the probe
                while dim < required {
                    dim = dim.saturating_mul(policy.growth_factor);
                }
                dim = dim.min(policy.max_dim);
                continue;
            }
            Err(e) => return Err(e),
        };
        let cur = monitored_keys(&info);
        if let Some(last) = prev {
            let scale = 1.0f64.max(info.q11.abs()).max(info.q22.abs());
            let rel = |c: f64, p: f64| (c - p).abs() / (c.abs() + 1e-6 * scale);
            let worst = (0..3)
                .map(|k| (rel(cur[k], last[k]), k))
                .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
            if worst.0 <= policy.convergence_rtol {
                return Ok((value, info, dim));
            }
            if dim.saturating_mul(policy.growth_factor) > policy.max_dim {
                return Err(Error::TruncationFailure {
                    scalar: MONITORED[worst.1],
                    max_dim: policy.max_dim,
                    last_change: worst.0,
                    rtol: policy.convergence_rtol,
                });
            }
        } else if dim.saturating_mul(policy.growth_factor) > policy.max_dim {
            return Err(Error::TruncationFailure {
                scalar: "det_q",
                max_dim: policy.max_dim,
                last_change: f64::INFINITY,
                rtol: policy.convergence_rtol,
            });
        }
        prev = Some(cur);
        dim = dim.saturating_mul(policy.growth_factor);
    }
}

/// Evolve with adaptive truncation: the basis is grown until the information
/// scalars converge, and the state at the final dimension is returned.
pub fn evolve(
    probe: &ProbeSpec,
    config: &ScramblerConfig,
    phases: PhasePair,
    policy: &TruncationPolicy,
) -> Result<ModelState> {
    config.validate()?;
    let (state, _, _) = truncation_loop(policy, |dim| {
        let state = evolve_at_dim(probe, config, phases, dim, policy.tail_tolerance)?;
        let info = info_matrices(&state);
        Ok((state, info))
    })?;
    Ok(state)
}

/// State-route information matrices under adaptive truncation; returns the
/// converged matrices and the dimension that achieved them.
pub fn info_matrices_via_state(
    probe: &ProbeSpec,
    config: &ScramblerConfig,
    phases: PhasePair,
    policy: &TruncationPolicy,
) -> Result<(InfoMatrices, usize)> {
    config.validate()?;
    let (_, info, dim) = truncation_loop(policy, |dim| {
        let state = evolve_at_dim(probe, config, phases, dim, policy.tail_tolerance)?;
        let info = info_matrices(&state);
        Ok(((), info))
    })?;
    Ok((info, dim))
}

// ---------------------------------------------------------------------------
// generator route
// ---------------------------------------------------------------------------

/// Information matrices from Heisenberg-picture generators.
///
/// With `chi = V(phi1)|psi0>` and `K = U^dag a U = a - i m gamma x^{m-1}`
/// (exact, because `x` commutes with `x^m`), the generator of the second
/// phase pulled back through the scrambler is `B1 = U^dag n U = K^dag K`, and
///
/// * `Q11 = 4 Var(n)`,
/// * `Q22 = 4 (<B1^2> - <B1>^2)` with `<B1^2> = |B1 chi|^2`,
/// * `Q12 + i D12 = 4 (<n chi, B1 chi> - <n><B1>)`,
///
/// all in the state `chi`. Everything is banded matrix-vector work — no
/// eigendecomposition, no dense matrices — so this route reaches much larger
/// bases than the state route and is bit-deterministic. `phi2` provably
/// drops out (it enters only through `V(phi2)`, which commutes with `n`), so
/// this route never touches it.
pub fn info_matrices_via_generators(
    probe: &ProbeSpec,
    config: &ScramblerConfig,
    phases: PhasePair,
    policy: &TruncationPolicy,
) -> Result<(InfoMatrices, usize)> {
    config.validate()?;
    let (_, info, dim) = truncation_loop(policy, |dim| {
        let info = generator_info_at_dim(probe, config, phases.phi1, dim, policy.tail_tolerance)?;
        Ok(((), info))
    })?;
    Ok((info, dim))
}

fn generator_info_at_dim(
    probe: &ProbeSpec,
    config: &ScramblerConfig,
    phi1: f64,
    dim: usize,
    tail_tolerance: f64,
) -> Result<InfoMatrices> {
    let psi0 = probe.build(dim, tail_tolerance)?;
    let chi = apply_phase_shift(&psi0, phi1);
    let xm1 = quadrature_power(config.m - 1, dim)?;
    let coupling = Complex64::new(0.0, config.m as f64 * config.gamma);

    let k_apply = |v: &FockVector| -> FockVector {
        // K v = a v - i m gamma x^{m-1} v
        let xv = xm1.apply(v);
        let av = lowering_apply(v);
        FockVector::new(&av.amplitudes - &xv.amplitudes.mapv(|c| c * coupling))
    };
    let k_dag_apply = |v: &FockVector| -> FockVector {
        // K^dag v = a^dag v + i m gamma x^{m-1} v
        let xv = xm1.apply(v);
        let adv = raising_apply(v);
        FockVector::new(&adv.amplitudes + &xv.amplitudes.mapv(|c| c * coupling))
    };

    let n_chi = number_apply(&chi);
    let mean_n = chi.mean_number();
    let mean_n2 = n_chi.inner(&n_chi).re;

    let k_chi = k_apply(&chi);
    let mean_b1 = k_chi.inner(&k_chi).re;
    let b1_chi = k_dag_apply(&k_chi);
    let mean_b2 = b1_chi.inner(&b1_chi).re;

    let cross = n_chi.inner(&b1_chi) - Complex64::new(mean_n * mean_b1, 0.0);

    Ok(InfoMatrices {
        q11: 4.0 * (mean_n2 - mean_n * mean_n),
        q12: 4.0 * cross.re,
        q22: 4.0 * (mean_b2 - mean_b1 * mean_b1),
        d12: 4.0 * cross.im,
        raw_asymmetry: 0.0,
    })
}

// ---------------------------------------------------------------------------
// structural checks
// ---------------------------------------------------------------------------

/// Verify that the reported matrices do not depend on the second phase.
///
/// Evolves at a fixed dimension (one eigendecomposition, reused) for
/// `phi2` in {0, 0.7, 2.1} and compares all four independent entries.
/// Returns the worst relative deviation; errors if it exceeds `1e-8`.
pub fn phi2_independence_check(
    probe: &ProbeSpec,
    config: &ScramblerConfig,
    phi1: f64,
    dim: usize,
    tail_tolerance: f64,
) -> Result<f64> {
    config.validate()?;
    let scrambler = Scrambler::new(config.m, dim)?;
    let mut reference: Option<InfoMatrices> = None;
    let mut worst = 0.0f64;
    for phi2 in [0.0, 0.7, 2.1] {
        let state = evolve_with_scrambler(
            probe,
            &scrambler,
            config.gamma,
            PhasePair { phi1, phi2 },
            tail_tolerance,
        )?;
        let info = info_matrices(&state);
        match &reference {
            None => reference = Some(info),
            Some(base) => {
                let scale = 1.0f64.max(base.q11.abs()).max(base.q22.abs());
                let rel = |a: f64, b: f64| (a - b).abs() / (b.abs() + 1e-6 * scale);
                worst = worst
                    .max(rel(info.q11, base.q11))
                    .max(rel(info.q12, base.q12))
                    .max(rel(info.q22, base.q22))
                    .max(rel(info.d12, base.d12));
            }
        }
    }
    if worst > 1e-8 {
        return Err(Error::StructureViolation(format!(
            "information matrices drift with the second phase (relative deviation {worst:.3e})"
        )));
    }
    Ok(worst)
}

/// Largest deviation of `U^dag U` from the identity for a materialized
/// scrambler (diagnostic helper).
pub fn unitarity_defect(u: &FockOperator) -> f64 {
    let n = u.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += u.entries[(k, i)].conj() * u.entries[(k, j)];
            }
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc - want).norm());
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
