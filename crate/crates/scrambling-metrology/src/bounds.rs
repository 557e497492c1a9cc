//! Scalar figures of merit, precision bounds, phase optimization and the
//! joint-versus-stepwise strategy comparison.
//!
//! From the 2x2 information matrices this module derives:
//!
//! * sloppiness `S = 1/det Q` and quantumness `R = sqrt(det D / det Q)`;
//! * the joint-estimation bounds `C_Q = tr Q^{-1}` and
//!   `C_T = (1 + T_W) C_Q = C_Q + 2 S |D12|`;
//! * stepwise bounds with optimal shot allocation;
//! * signal-phase optimization of any of these objectives;
//! * a conservative three-way classification of which strategy provably wins.
//!
//! All bounds are reported per shot (`M = 1`); rescaling by a repetition
//! count is left to the output layer since `M` enters only as a prefactor.

use crate::analytic::{analytic_info, CaseId};
use crate::error::{Error, Result};
use crate::fock::{ProbeSpec, TruncationPolicy};
use crate::model::{info_matrices_via_generators, InfoMatrices, PhasePair, ScramblerConfig};

/// Default relative threshold below which `det Q` is treated as zero.
pub const DEFAULT_DEGENERACY_EPS: f64 = 1e-10;

// ---------------------------------------------------------------------------
// engine selection
// ---------------------------------------------------------------------------

/// Which computational engine produces information matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Closed-form expressions ([`crate::analytic`]); exact and fast.
    Analytic,
    /// Adaptive truncated-basis evaluation ([`crate::model`]).
    Numeric,
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Engine::Analytic => "analytic",
            Engine::Numeric => "numeric",
        })
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(Engine::Analytic),
            "numeric" => Ok(Engine::Numeric),
            other => Err(Error::InvalidInput(format!(
                "unknown engine {other:?}; expected analytic or numeric"
            ))),
        }
    }
}

/// Information matrices for a case at a given signal phase, from the chosen
/// engine. Returns the truncation dimension for the numeric engine.
///
/// The signal phase is realized as the probe's preparation phase, matching
/// the closed forms. An equivalent first-arm rotation by `theta` shifts the
/// signal phase by `-theta` (coherent) or `-2 theta` (squeezed vacuum).
pub fn case_info(
    engine: Engine,
    case: CaseId,
    nbar: f64,
    gamma: f64,
    phi1: f64,
    policy: &TruncationPolicy,
) -> Result<(InfoMatrices, Option<usize>)> {
    match engine {
        Engine::Analytic => Ok((analytic_info(case, nbar, gamma, phi1)?, None)),
        Engine::Numeric => {
            let probe = ProbeSpec::new(case.probe, nbar, phi1)?;
            let config = ScramblerConfig::new(case.m, gamma)?;
            let (info, dim) =
                info_matrices_via_generators(&probe, &config, PhasePair::default(), policy)?;
            Ok((info, Some(dim)))
        }
    }
}

// ---------------------------------------------------------------------------
// bound set
// ---------------------------------------------------------------------------

/// Scalar figures of merit derived from one pair of information matrices.
///
/// When `degenerate` is set (determinant at or below the relative threshold,
/// e.g. at zero scrambling strength), the diverging quantities are reported
/// as `+inf` and the undefined ones (`r`, allocations) as NaN.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BoundSet {
    pub det_q: f64,
    /// Sloppiness `S = 1/det Q`.
    pub s: f64,
    /// Squared incompatibility `det D = D12^2`.
    pub det_d: f64,
    /// Quantumness `R = sqrt(det D / det Q)`, clamped to `[0, 1]`.
    pub r: f64,
    /// Amount removed by the clamp (zero in healthy arithmetic).
    pub r_clamp: f64,
    /// Joint-estimation lower bound `C_Q = tr Q^{-1}`.
    pub c_q: f64,
    /// Attainability upper companion `C_T = C_Q + 2 S |D12|`.
    pub c_t: f64,
    /// Optimized stepwise bound, first phase measured first.
    pub c_step1: f64,
    pub beta_opt1: f64,
    /// Optimized stepwise bound, second phase measured first.
    pub c_step2: f64,
    pub beta_opt2: f64,
    pub degenerate: bool,
}

/// Derive every scalar bound from the information matrices.
///
/// `degeneracy_eps` is relative: the model counts as degenerate when
/// `det Q <= degeneracy_eps * |Q11 Q22|`.
pub fn bound_set(info: &InfoMatrices, degeneracy_eps: f64) -> Result<BoundSet> {
    for v in [info.q11, info.q12, info.q22, info.d12] {
        if !v.is_finite() {
            return Err(Error::InvalidInput(
                "information matrices contain non-finite entries".into(),
            ));
        }
    }
    if !(degeneracy_eps >= 0.0) {
        return Err(Error::InvalidInput(
            "degeneracy threshold must be >= 0".into(),
        ));
    }
    let det_q = info.det_q();
    let det_d = info.det_d();
    if det_q <= degeneracy_eps * (info.q11 * info.q22).abs() {
        return Ok(BoundSet {
            det_q,
            s: f64::INFINITY,
            det_d,
            r: f64::NAN,
            r_clamp: 0.0,
            c_q: f64::INFINITY,
            c_t: f64::INFINITY,
            c_step1: f64::INFINITY,
            beta_opt1: f64::NAN,
            c_step2: f64::INFINITY,
            beta_opt2: f64::NAN,
            degenerate: true,
        });
    }
    let s = det_q.recip();
    let r_raw = (det_d * s).sqrt();
    let r = r_raw.clamp(0.0, 1.0);
    let c_q = (info.q11 + info.q22) * s;
    let c_t = c_q + 2.0 * s * info.d12.abs();
    let steps = step_bounds_optimal(info)?;
    Ok(BoundSet {
        det_q,
        s,
        det_d,
        r,
        r_clamp: (r_raw - 1.0).max(0.0),
        c_q,
        c_t,
        c_step1: steps.c_step_min1,
        beta_opt1: steps.beta_opt1,
        c_step2: steps.c_step_min2,
        beta_opt2: steps.beta_opt2,
        degenerate: false,
    })
}

/// The weighted-incompatibility ratio `T_W = ||Q^{-1} D Q^{-1}||_1 / C_Q`
/// (nuclear norm, identity weight), computed the honest way: form the 2x2
/// product explicitly and sum its singular values. Satisfies
/// `(1 + T_W) C_Q = C_Q + 2 S |D12|`, which the test suite verifies against
/// this brute-force evaluation.
pub fn t_w_via_singular_values(info: &InfoMatrices) -> Result<f64> {
    let det_q = info.det_q();
    if det_q <= 0.0 {
        return Err(Error::Degenerate(format!(
            "t_w needs positive-definite Q (det Q = {det_q:.3e})"
        )));
    }
    let q_inv = [
        [info.q22 / det_q, -info.q12 / det_q],
        [-info.q12 / det_q, info.q11 / det_q],
    ];
    let d = [[0.0, info.d12], [-info.d12, 0.0]];
    let mul = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| -> [[f64; 2]; 2] {
        let mut c = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        c
    };
    let a = mul(mul(q_inv, d), q_inv);
    // nuclear norm of a 2x2 matrix: (s1 + s2)^2 = ||A||_F^2 + 2 |det A|
    let fro2 = a.iter().flatten().map(|v| v * v).sum::<f64>();
    let det_a = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let nuclear = (fro2 + 2.0 * det_a.abs()).sqrt();
    let c_q = (info.q11 + info.q22) / det_q;
    Ok(nuclear / c_q)
}

// ---------------------------------------------------------------------------
// stepwise bounds
// ---------------------------------------------------------------------------

/// Stepwise total-variance bounds at shot fraction `beta` for the first
/// stage: `C_step1 = S Q22 / beta + 1/((1-beta) Q22)` (first phase measured
/// first, second phase with the first known), and symmetrically
/// `C_step2 = S Q11 / beta + 1/((1-beta) Q11)`.
pub fn step_bounds(info: &InfoMatrices, beta: f64) -> Result<(f64, f64)> {
    let det_q = info.det_q();
    if det_q <= 0.0 {
        return Err(Error::Degenerate(format!(
            "stepwise bounds need positive-definite Q (det Q = {det_q:.3e})"
        )));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "allocation must lie strictly inside (0, 1) (got {beta})"
        )));
    }
    let s = det_q.recip();
    let c1 = s * info.q22 / beta + 1.0 / ((1.0 - beta) * info.q22);
    let c2 = s * info.q11 / beta + 1.0 / ((1.0 - beta) * info.q11);
    Ok((c1, c2))
}

/// Stepwise bounds minimized over the allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptimum {
    pub c_step_min1: f64,
    pub beta_opt1: f64,
    pub c_step_min2: f64,
    pub beta_opt2: f64,
}

/// Closed-form allocation optimum for both stepwise orders: with
/// `E1 = Q22`, `E2 = Q11`,
/// `beta_opt = E sqrt(S) / (E sqrt(S) + 1)` and
/// `C_step_min = S (E + 1/sqrt(S))^2 / E`.
pub fn step_bounds_optimal(info: &InfoMatrices) -> Result<StepOptimum> {
    let det_q = info.det_q();
    if det_q <= 0.0 {
        return Err(Error::Degenerate(format!(
            "stepwise bounds need positive-definite Q (det Q = {det_q:.3e})"
        )));
    }
    let s = det_q.recip();
    let sqrt_s = s.sqrt();
    let optimum = |e: f64| -> (f64, f64) {
        let beta = e * sqrt_s / (e * sqrt_s + 1.0);
        let cost = s * (e + 1.0 / sqrt_s).powi(2) / e;
        (cost, beta)
    };
    let (c1, b1) = optimum(info.q22);
    let (c2, b2) = optimum(info.q11);
    Ok(StepOptimum {
        c_step_min1: c1,
        beta_opt1: b1,
        c_step_min2: c2,
        beta_opt2: b2,
    })
}

// ---------------------------------------------------------------------------
// phase optimization
// ---------------------------------------------------------------------------

/// Scalar objective minimized over the signal phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// `S = 1/det Q`.
    Sloppiness,
    /// `C_Q = tr Q^{-1}`.
    TraceBound,
    /// `C_T = C_Q + 2 S |D12|`.
    TotalBound,
    /// The better of the two allocation-optimized stepwise bounds.
    StepMin,
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Objective::Sloppiness => "sloppiness",
            Objective::TraceBound => "trace-bound",
            Objective::TotalBound => "total-bound",
            Objective::StepMin => "step-min",
        })
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sloppiness" | "s" => Ok(Objective::Sloppiness),
            "trace-bound" | "cq" => Ok(Objective::TraceBound),
            "total-bound" | "ct" => Ok(Objective::TotalBound),
            "step-min" | "cstep" => Ok(Objective::StepMin),
            other => Err(Error::InvalidInput(format!(
                "unknown objective {other:?}; expected sloppiness, trace-bound, \
                 total-bound or step-min"
            ))),
        }
    }
}

/// Internal optimization target: the public objectives plus the two
/// individual stepwise orders needed by the strategy comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Goal {
    Public(Objective),
    Step1,
    Step2,
}

fn goal_value(set: &BoundSet, goal: Goal) -> f64 {
    if set.degenerate {
        return f64::INFINITY;
    }
    match goal {
        Goal::Public(Objective::Sloppiness) => set.s,
        Goal::Public(Objective::TraceBound) => set.c_q,
        Goal::Public(Objective::TotalBound) => set.c_t,
        Goal::Public(Objective::StepMin) => set.c_step1.min(set.c_step2),
        Goal::Step1 => set.c_step1,
        Goal::Step2 => set.c_step2,
    }
}

/// Result of a signal-phase optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseOptimum {
    pub phi1: f64,
    pub value: f64,
}

const SCAN_POINTS: usize = 512;
const PHASE_TOLERANCE: f64 = 1e-8;
/// Candidates within this relative margin of the best value count as ties.
const TIE_REL: f64 = 1e-9;

/// Golden-section minimization on `[a, b]`, assuming a bracketed minimum.
fn golden_min(
    mut a: f64,
    mut b: f64,
    f: &mut impl FnMut(f64) -> Result<f64>,
    tol: f64,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid)?;
    Ok(if fc <= fd && fc <= fm {
        (c, fc)
    } else if fd <= fm {
        (d, fd)
    } else {
        (mid, fm)
    })
}

pub(crate) fn optimize_goal(
    engine: Engine,
    case: CaseId,
    nbar: f64,
    gamma: f64,
    goal: Goal,
    policy: &TruncationPolicy,
    degeneracy_eps: f64,
) -> Result<PhaseOptimum> {
    let mut eval = |phi: f64| -> Result<f64> {
        let (info, _) = case_info(engine, case, nbar, gamma, phi, policy)?;
        Ok(goal_value(&bound_set(&info, degeneracy_eps)?, goal))
    };

    let tau = 2.0 * std::f64::consts::PI;
    let step = tau / SCAN_POINTS as f64;
    let mut values = Vec::with_capacity(SCAN_POINTS);
    for i in 0..SCAN_POINTS {
        values.push(eval(i as f64 * step)?);
    }

    // Refine every finite local minimum of the circular scan; an objective
    // can have several equal-depth wells (the phase dependence is periodic
    // with case-specific period) and near-degenerate spikes between them.
    let mut candidates: Vec<PhaseOptimum> = Vec::new();
    for i in 0..SCAN_POINTS {
        let prev = values[(i + SCAN_POINTS - 1) % SCAN_POINTS];
        let next = values[(i + 1) % SCAN_POINTS];
        let here = values[i];
        if here.is_finite() && here <= prev && here <= next {
            let center = i as f64 * step;
            let (phi, value) = golden_min(center - step, center + step, &mut eval, PHASE_TOLERANCE)?;
            if value.is_finite() {
                candidates.push(PhaseOptimum {
                    phi1: phi.rem_euclid(tau),
                    value,
                });
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::Degenerate(
            "objective is non-finite at every scanned phase (degenerate model)".into(),
        ));
    }
    let best = candidates
        .iter()
        .map(|c| c.value)
        .fold(f64::INFINITY, f64::min);
    candidates.sort_by(|x, y| x.phi1.total_cmp(&y.phi1));
    let margin = best.abs() * TIE_REL;
    let winner = candidates
        .into_iter()
        .find(|c| c.value <= best + margin)
        .expect("at least one candidate attains the minimum");
    Ok(winner)
}

/// Minimize `objective` over the signal phase.
///
/// Coarse scan of 512 points over `[0, 2 pi)`, then golden-section
/// refinement of **every** local minimum to a phase tolerance of `1e-8`;
/// near-degenerate phases evaluate to `+inf` and are skipped. Ties within a
/// relative margin of `1e-9` resolve toward the smallest phase. Errors with
/// a degeneracy report when the objective is non-finite everywhere (e.g. at
/// `gamma = 0`).
pub fn optimize_phase(
    engine: Engine,
    case: CaseId,
    nbar: f64,
    gamma: f64,
    objective: Objective,
    policy: &TruncationPolicy,
    degeneracy_eps: f64,
) -> Result<PhaseOptimum> {
    optimize_goal(
        engine,
        case,
        nbar,
        gamma,
        Goal::Public(objective),
        policy,
        degeneracy_eps,
    )
}

// ---------------------------------------------------------------------------
// strategy comparison
// ---------------------------------------------------------------------------

/// Which estimation strategy provably wins at a parameter point.
///
/// The comparison is conservative: the exact attainable joint cost lies
/// somewhere in `[C_Q, C_T]`, so joint wins only when even its upper end
/// beats stepwise, stepwise wins only when it beats the lower end, and
/// everything in between is left undecided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Winner {
    Stepwise,
    Joint,
    Indeterminate,
}

impl std::fmt::Display for Winner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Winner::Stepwise => "stepwise",
            Winner::Joint => "joint",
            Winner::Indeterminate => "indeterminate",
        })
    }
}

/// Classify a single point from bounds evaluated at a common phase.
pub fn classify(c_q: f64, c_t: f64, c_step_min: f64) -> Winner {
    if c_step_min < c_q {
        Winner::Stepwise
    } else if c_t < c_step_min {
        Winner::Joint
    } else {
        Winner::Indeterminate
    }
}

/// Strategy bounds at one strength, each minimized over its own phase.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct StrategyPoint {
    pub gamma: f64,
    pub phi_c_q: f64,
    pub c_q: f64,
    pub phi_c_t: f64,
    pub c_t: f64,
    pub phi_c_step1: f64,
    pub c_step1: f64,
    pub beta_opt1: f64,
    pub phi_c_step2: f64,
    pub c_step2: f64,
    pub beta_opt2: f64,
    pub winner: Winner,
}

/// Outcome of [`compare_strategies`] over a strength grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StrategyComparison {
    pub case: CaseId,
    pub nbar: f64,
    pub points: Vec<StrategyPoint>,
    /// First grid strength where joint estimation provably wins.
    pub threshold_gamma: Option<f64>,
}

pub(crate) fn strategy_point(
    engine: Engine,
    case: CaseId,
    nbar: f64,
    gamma: f64,
    policy: &TruncationPolicy,
    degeneracy_eps: f64,
) -> Result<StrategyPoint> {
    let trace = optimize_goal(
        engine,
        case,
        nbar,
        gamma,
        Goal::Public(Objective::TraceBound),
        policy,
        degeneracy_eps,
    )?;
    let total = optimize_goal(
        engine,
        case,
        nbar,
        gamma,
        Goal::Public(Objective::TotalBound),
        policy,
        degeneracy_eps,
    )?;
    let step1 = optimize_goal(engine, case, nbar, gamma, Goal::Step1, policy, degeneracy_eps)?;
    let step2 = optimize_goal(engine, case, nbar, gamma, Goal::Step2, policy, degeneracy_eps)?;

    // allocations at the winning phases
    let beta_at = |phi: f64, first: bool| -> Result<f64> {
        let (info, _) = case_info(engine, case, nbar, gamma, phi, policy)?;
        let opt = step_bounds_optimal(&info)?;
        Ok(if first { opt.beta_opt1 } else { opt.beta_opt2 })
    };
    let beta1 = beta_at(step1.phi1, true)?;
    let beta2 = beta_at(step2.phi1, false)?;

    Ok(StrategyPoint {
        gamma,
        phi_c_q: trace.phi1,
        c_q: trace.value,
        phi_c_t: total.phi1,
        c_t: total.value,
        phi_c_step1: step1.phi1,
        c_step1: step1.value,
        beta_opt1: beta1,
        phi_c_step2: step2.phi1,
        c_step2: step2.value,
        beta_opt2: beta2,
        winner: classify(trace.value, total.value, step1.value.min(step2.value)),
    })
}

/// Compare joint and stepwise estimation across a strictly increasing grid
/// of positive strengths; every bound is optimized over its own phase.
pub fn compare_strategies(
    engine: Engine,
    case: CaseId,
    nbar: f64,
    gamma_grid: &[f64],
    policy: &TruncationPolicy,
    degeneracy_eps: f64,
) -> Result<StrategyComparison> {
    if gamma_grid.is_empty() {
        return Err(Error::InvalidInput("empty strength grid".into()));
    }
    for pair in gamma_grid.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::InvalidInput(
                "strength grid must be strictly increasing".into(),
            ));
        }
    }
    if !(gamma_grid[0] > 0.0) {
        return Err(Error::InvalidInput(
            "strength grid must be positive".into(),
        ));
    }
    let points = gamma_grid
        .iter()
        .map(|&gamma| strategy_point(engine, case, nbar, gamma, policy, degeneracy_eps))
        .collect::<Result<Vec<_>>>()?;
    let threshold_gamma = points
        .iter()
        .find(|p| p.winner == Winner::Joint)
        .map(|p| p.gamma);
    Ok(StrategyComparison {
        case,
        nbar,
        points,
        threshold_gamma,
    })
}

/// Bisect the joint-win onset between the last non-joint and first joint
/// grid points of a comparison, to a relative strength tolerance of `1e-4`.
/// Returns `None` when no grid point is a joint win; returns the first grid
/// strength itself if even that point is joint.
pub fn refine_threshold(
    engine: Engine,
    comparison: &StrategyComparison,
    policy: &TruncationPolicy,
    degeneracy_eps: f64,
) -> Result<Option<f64>> {
    let Some(first_joint) = comparison
        .points
        .iter()
        .position(|p| p.winner == Winner::Joint)
    else {
        return Ok(None);
    };
    if first_joint == 0 {
        return Ok(Some(comparison.points[0].gamma));
    }
    let mut lo = comparison.points[first_joint - 1].gamma;
    let mut hi = comparison.points[first_joint].gamma;
    while (hi - lo) > 1e-4 * hi {
        let mid = (lo * hi).sqrt();
        let point = strategy_point(
            engine,
            comparison.case,
            comparison.nbar,
            mid,
            policy,
            degeneracy_eps,
        )?;
        if point.winner == Winner::Joint {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn info(q11: f64, q12: f64, q22: f64, d12: f64) -> InfoMatrices {
        InfoMatrices {
            q11,
            q12,
            q22,
            d12,
            raw_asymmetry: 0.0,
        }
    }

    #[test]
    fn diagonal_compatible_model() {
        let set = bound_set(&info(4.0, 0.0, 4.0, 0.0), DEFAULT_DEGENERACY_EPS).unwrap();
        assert!((set.s - 1.0 / 16.0).abs() <= 1e-15);
        assert_eq!(set.r, 0.0);
        assert!((set.c_q - 0.5).abs() <= 1e-15);
        assert!((set.c_t - 0.5).abs() <= 1e-15);
        assert!(!set.degenerate);
    }

    #[test]
    fn diagonal_incompatible_model() {
        let m = info(2.0, 0.0, 2.0, 1.0);
        let set = bound_set(&m, DEFAULT_DEGENERACY_EPS).unwrap();
        assert!((set.s - 0.25).abs() <= 1e-15);
        assert!((set.r - 0.5).abs() <= 1e-15);
        assert!((set.c_q - 1.0).abs() <= 1e-15);
        assert!((set.c_t - 1.5).abs() <= 1e-15);
        // brute-force singular values reproduce the same sandwich bound
        let t_w = t_w_via_singular_values(&m).unwrap();
        assert!((t_w - 0.5).abs() <= 1e-12);
        assert!(((1.0 + t_w) * set.c_q - set.c_t).abs() <= 1e-12);
    }

    #[test]
    fn t_w_vanishes_without_incompatibility() {
        assert!(t_w_via_singular_values(&info(3.0, 0.4, 5.0, 0.0)).unwrap() <= 1e-15);
        assert!(t_w_via_singular_values(&info(1.0, 1.0, 1.0, 0.2)).is_err());
    }

    #[test]
    fn zero_strength_is_degenerate() {
        let m = crate::analytic::analytic_info(CaseId::SQUEEZED_QUADRATIC, 1.0, 0.0, 0.4).unwrap();
        let set = bound_set(&m, DEFAULT_DEGENERACY_EPS).unwrap();
        assert!(set.degenerate);
        assert!(set.s.is_infinite() && set.c_q.is_infinite() && set.c_t.is_infinite());
        assert!(set.r.is_nan());
    }

    #[test]
    fn bound_set_rejects_non_finite_entries() {
        assert!(bound_set(&info(f64::NAN, 0.0, 1.0, 0.0), 1e-10).is_err());
    }

    #[test]
    fn stepwise_half_allocation_example() {
        // diag(2,2): C_step1(1/2) = 2([Q^-1]_11 + 1/Q22) = 2(1/2 + 1/2) = 2
        let m = info(2.0, 0.0, 2.0, 0.0);
        let (c1, c2) = step_bounds(&m, 0.5).unwrap();
        assert!((c1 - 2.0).abs() <= 1e-15);
        assert!((c2 - 2.0).abs() <= 1e-15);
        assert!(step_bounds(&m, 0.0).is_err());
        assert!(step_bounds(&m, 1.0).is_err());
    }

    #[test]
    fn stepwise_optimum_symmetric_case() {
        let m = info(2.0, 0.0, 2.0, 0.0);
        let opt = step_bounds_optimal(&m).unwrap();
        assert!((opt.beta_opt1 - 0.5).abs() <= 1e-15);
        assert!((opt.c_step_min1 - 2.0).abs() <= 1e-15);
        assert!((opt.c_step_min2 - 2.0).abs() <= 1e-15);
    }

    #[test]
    fn stepwise_optimum_never_worse_than_half_split() {
        let m = info(5.0, 1.2, 9.0, 0.7);
        let opt = step_bounds_optimal(&m).unwrap();
        let (c1, c2) = step_bounds(&m, 0.5).unwrap();
        assert!(opt.c_step_min1 <= c1 + 1e-12);
        assert!(opt.c_step_min2 <= c2 + 1e-12);
        assert!(opt.beta_opt1 > 0.0 && opt.beta_opt1 < 1.0);
    }

    #[test]
    fn quadratic_phase_optimum_matches_closed_form() {
        let policy = TruncationPolicy::default();
        let opt = optimize_phase(
            Engine::Analytic,
            CaseId::SQUEEZED_QUADRATIC,
            1.0,
            0.5,
            Objective::Sloppiness,
            &policy,
            DEFAULT_DEGENERACY_EPS,
        )
        .unwrap();
        let want = crate::analytic::optimal_phase_quadratic(CaseId::SQUEEZED_QUADRATIC, 0.5)
            .unwrap();
        assert!(
            (opt.phi1 - want).abs() <= 1e-5,
            "got {} want {want}",
            opt.phi1
        );
        // value matches the factored closed form at the optimum
        let s = crate::analytic::sloppiness_closed_quadratic(
            CaseId::SQUEEZED_QUADRATIC,
            1.0,
            0.5,
            opt.phi1,
        )
        .unwrap();
        assert!((opt.value - s).abs() <= 1e-9 * s);
    }

    #[test]
    fn optimizer_reports_degeneracy_at_zero_strength() {
        let err = optimize_phase(
            Engine::Analytic,
            CaseId::COHERENT_QUADRATIC,
            1.0,
            0.0,
            Objective::Sloppiness,
            &TruncationPolicy::default(),
            DEFAULT_DEGENERACY_EPS,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn sloppiness_and_total_bound_prefer_different_phases() {
        let policy = TruncationPolicy::default();
        let s_opt = optimize_phase(
            Engine::Analytic,
            CaseId::SQUEEZED_CUBIC,
            1.0,
            0.5,
            Objective::Sloppiness,
            &policy,
            DEFAULT_DEGENERACY_EPS,
        )
        .unwrap();
        let t_opt = optimize_phase(
            Engine::Analytic,
            CaseId::SQUEEZED_CUBIC,
            1.0,
            0.5,
            Objective::TotalBound,
            &policy,
            DEFAULT_DEGENERACY_EPS,
        )
        .unwrap();
        assert!(
            (s_opt.phi1 - t_opt.phi1).abs() > 1e-3,
            "phases coincide: {} vs {}",
            s_opt.phi1,
            t_opt.phi1
        );
    }

    #[test]
    fn classification_boundaries() {
        assert_eq!(classify(1.0, 1.5, 0.9), Winner::Stepwise);
        assert_eq!(classify(1.0, 1.5, 1.7), Winner::Joint);
        assert_eq!(classify(1.0, 1.5, 1.2), Winner::Indeterminate);
        // degenerate point: everything infinite, nothing provable
        assert_eq!(
            classify(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            Winner::Indeterminate
        );
    }

    #[test]
    fn strategy_comparison_finds_coherent_cubic_transition() {
        let policy = TruncationPolicy::default();
        let cmp = compare_strategies(
            Engine::Analytic,
            CaseId::COHERENT_CUBIC,
            1.0,
            &[0.01, 5.0],
            &policy,
            DEFAULT_DEGENERACY_EPS,
        )
        .unwrap();
        assert_eq!(cmp.points[0].winner, Winner::Stepwise);
        assert_eq!(cmp.points[1].winner, Winner::Joint);
        assert_eq!(cmp.threshold_gamma, Some(5.0));
        // Bisection sharpens the onset to the known ~0.228 at unit
        // occupation, far below the coarse bracketing grid point.
        let refined = refine_threshold(Engine::Analytic, &cmp, &policy, DEFAULT_DEGENERACY_EPS)
            .unwrap()
            .unwrap();
        assert!(
            refined > 0.22 && refined < 0.24,
            "refined onset {refined}"
        );
    }

    #[test]
    fn strategy_grid_validation() {
        let policy = TruncationPolicy::default();
        assert!(compare_strategies(
            Engine::Analytic,
            CaseId::COHERENT_CUBIC,
            1.0,
            &[0.5, 0.4],
            &policy,
            DEFAULT_DEGENERACY_EPS
        )
        .is_err());
        assert!(compare_strategies(
            Engine::Analytic,
            CaseId::COHERENT_CUBIC,
            1.0,
            &[],
            &policy,
            DEFAULT_DEGENERACY_EPS
        )
        .is_err());
    }

    #[test]
    fn engine_and_objective_parsing() {
        assert_eq!("analytic".parse::<Engine>().unwrap(), Engine::Analytic);
        assert!("magic".parse::<Engine>().is_err());
        assert_eq!("cq".parse::<Objective>().unwrap(), Objective::TraceBound);
        assert_eq!(
            "sloppiness".parse::<Objective>().unwrap(),
            Objective::Sloppiness
        );
    }
}
