//! Quantum-limited joint estimation of two phases around a nonlinear
//! scrambling stage on a single bosonic mode.
//!
//! The model: a probe state (coherent or squeezed vacuum) picks up a phase
//! `phi1`, passes through the unitary `U = exp(-i gamma x^m)` (quadrature
//! `x = a + a'`, order `m` of 2 or 3, strength `gamma`), then picks up a
//! second phase `phi2`. Both phases are estimated from the output. The
//! scrambler breaks the degeneracy between the two phase generators, and
//! everything interesting — how precisely, how compatibly, and with which
//! measurement strategy the pair can be estimated — follows from the 2x2
//! quantum Fisher information matrix `Q` and the incompatibility matrix `D`
//! of the output state.
//!
//! Two independent engines compute `Q` and `D`:
//!
//! * [`model`] — numeric: adaptive truncated Fock bases built by [`fock`],
//!   with two internally distinct routes (evolved derivative states, and
//!   scrambled-generator moments) that check each other;
//! * [`analytic`] — closed forms for all four probe/order combinations,
//!   plus factored special cases, optimal-phase formulas, small- and
//!   large-strength expansions and limiting bounds.
//!
//! On top of the matrices, [`bounds`] derives scalar figures of merit
//! (sloppiness `S = 1/det Q`, quantumness `R`, the joint bounds `C_Q` and
//! `C_T`, allocation-optimized stepwise bounds), optimizes the signal phase,
//! and classifies where joint estimation provably beats measuring the
//! phases one at a time. [`sweep`] turns all of that into deterministic
//! CSV/JSON artifacts driven by TOML configs, with cross-engine
//! verification and checked-in presets; the `scrambling-metrology` binary
//! is a thin CLI over it.
//!
//! ```
//! use scrambling_metrology::{
//!     analytic_info, bound_set, CaseId, DEFAULT_DEGENERACY_EPS,
//! };
//!
//! // squeezed-vacuum probe, cubic scrambler, unit occupation
//! let info = analytic_info(CaseId::SQUEEZED_CUBIC, 1.0, 0.5, 0.9).unwrap();
//! let set = bound_set(&info, DEFAULT_DEGENERACY_EPS).unwrap();
//! assert!(set.s > 0.0 && set.c_q <= set.c_t);
//! ```

// Input validation throughout uses `!(x > 0.0)`-style guards on purpose:
// the negated comparison is true for NaN as well as for out-of-range values,
// so a single branch rejects both. Rewriting via `partial_cmp` would lose
// that property or hide the intent.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bounds;
pub mod error;
pub mod fock;
pub mod model;
pub mod sweep;

pub use analytic::{
    analytic_info, asymptotic_coefficients, limit_bounds_large_gamma, optimal_phase_quadratic,
    sloppiness_closed_quadratic, sloppiness_series_large_gamma, sloppiness_series_small_gamma,
    AsymptoticCoefficients, CaseId,
};
pub use bounds::{
    bound_set, case_info, classify, compare_strategies, optimize_phase, refine_threshold,
    step_bounds, step_bounds_optimal, t_w_via_singular_values, BoundSet, Engine, Objective,
    PhaseOptimum, StepOptimum, StrategyComparison, StrategyPoint, Winner,
    DEFAULT_DEGENERACY_EPS,
};
pub use error::{Error, Result};
pub use fock::{
    build_scrambler, coherent_state, number_operator, quadrature_power, squeezed_vacuum_state,
    FockOperator, FockVector, ProbeKind, ProbeSpec, Scrambler, TruncationPolicy,
    DEFAULT_TAIL_TOLERANCE,
};
pub use model::{
    evolve, evolve_at_dim, info_matrices, info_matrices_via_generators, info_matrices_via_state,
    phi2_independence_check, InfoMatrices, ModelState, PhasePair, ScramblerConfig,
};
pub use sweep::{
    compute_rows, crosscheck, run_figure2, run_figure3, run_sweep, CrosscheckReport, EngineChoice,
    GammaGrid, GridScale, OutputFormat, Phi1Mode, RowStatus, StrategyRunConfig, SweepConfig,
    SweepRow, SweepSummary, CROSSCHECK_TOLERANCE, SAFE_GAMMA_CAP_CUBIC, SAFE_GAMMA_CAP_QUADRATIC,
    WORKERS_ENV,
};
