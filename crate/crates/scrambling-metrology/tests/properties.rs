//! Randomized invariants. Every test uses a fixed seed, so failures are
//! reproducible; draw counts are chosen to keep the whole suite under a
//! minute while still exploring the parameter space broadly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scrambling_metrology::fock::apply_phase_shift;
use scrambling_metrology::model::{evolve_at_dim, evolve_with_scrambler, info_matrices};
use scrambling_metrology::{
    analytic_info, bound_set, case_info, info_matrices_via_generators, optimize_phase,
    phi2_independence_check, sloppiness_closed_quadratic, t_w_via_singular_values, CaseId, Engine,
    InfoMatrices, Objective, PhasePair, ProbeKind, ProbeSpec, Scrambler, ScramblerConfig,
    TruncationPolicy, DEFAULT_DEGENERACY_EPS, DEFAULT_TAIL_TOLERANCE,
};

const ALL_CASES: [CaseId; 4] = [
    CaseId::SQUEEZED_CUBIC,
    CaseId::SQUEEZED_QUADRATIC,
    CaseId::COHERENT_CUBIC,
    CaseId::COHERENT_QUADRATIC,
];

fn max_entry_rel(a: &InfoMatrices, b: &InfoMatrices) -> f64 {
    let scale = 1f64.max(b.q11.abs()).max(b.q22.abs());
    let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1e-6 * scale);
    [
        rel(a.q11, b.q11),
        rel(a.q12, b.q12),
        rel(a.q22, b.q22),
        rel(a.d12, b.d12),
    ]
    .into_iter()
    .fold(0.0f64, f64::max)
}

fn random_case(rng: &mut ChaCha8Rng) -> CaseId {
    ALL_CASES[rng.random_range(0..4)]
}

/// Synthetic positive-definite `Q` plus an incompatibility entry within the
/// physical range.
fn random_synthetic(rng: &mut ChaCha8Rng) -> InfoMatrices {
    let q11 = (rng.random_range(-2.0..4.0f64)).exp();
    let q22 = (rng.random_range(-2.0..4.0f64)).exp();
    let rho = rng.random_range(-0.9..0.9f64);
    let q12 = rho * (q11 * q22).sqrt();
    let det_q = q11 * q22 - q12 * q12;
    let d12 = rng.random_range(-0.99..0.99f64) * det_q.sqrt();
    InfoMatrices {
        q11,
        q12,
        q22,
        d12,
        raw_asymmetry: 0.0,
    }
}

#[test]
fn probe_states_are_normalized_and_phase_shifts_preserve_populations() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..60 {
        let kind = if rng.random_range(0..2) == 0 {
            ProbeKind::SqueezedVacuum
        } else {
            ProbeKind::Coherent
        };
        let nbar = rng.random_range(0.1..3.5f64);
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        let probe = ProbeSpec::new(kind, nbar, phase).unwrap();
        let state = probe.build(384, DEFAULT_TAIL_TOLERANCE).unwrap();
        assert!(
            (state.norm() - 1.0).abs() <= 1e-12,
            "{kind:?} nbar={nbar:.3}: norm {:.15}",
            state.norm()
        );

        let shifted = apply_phase_shift(&state, rng.random_range(0.0..std::f64::consts::TAU));
        assert!((shifted.norm() - 1.0).abs() <= 1e-13);
        for (a, b) in state.amplitudes.iter().zip(shifted.amplitudes.iter()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-14 * a.norm().max(1.0));
        }
    }
}

#[test]
fn analytic_engine_matches_generator_route_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let policy = TruncationPolicy::default();
    let mut worst = 0.0f64;
    for draw in 0..100 {
        let case = random_case(&mut rng);
        let nbar = rng.random_range(0.3..2.5f64);
        let gamma = rng.random_range(0.01..2.5f64);
        let phi1 = rng.random_range(0.0..std::f64::consts::TAU);
        let exact = analytic_info(case, nbar, gamma, phi1).unwrap();
        let (numeric, _) = case_info(Engine::Numeric, case, nbar, gamma, phi1, &policy).unwrap();
        let rel = max_entry_rel(&numeric, &exact);
        assert!(
            rel <= 1e-6,
            "draw {draw} ({case}, nbar={nbar:.3}, gamma={gamma:.3}, phi1={phi1:.3}): rel {rel:.3e}"
        );
        worst = worst.max(rel);
    }
    println!("worst analytic-vs-generator deviation: {worst:.3e}");
}

#[test]
fn quadratic_state_route_matches_generator_route_on_random_draws() {
    // The evolved-state route carries the scrambled state itself, whose
    // number-basis support grows steeply with the strength (a squeezed probe
    // under gamma ~ 2 quadratic scrambling still shows ~4e-3 entry error at
    // 2048 levels). The cross-check therefore draws from the region a fixed
    // 1024-level basis certifiably resolves — squeezed strengths up to 0.6,
    // coherent up to 1.2 — where the measured worst deviation is 3.5e-11.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let policy = TruncationPolicy::default();
    let scrambler = Scrambler::new(2, 1024).unwrap();
    let mut worst = 0.0f64;
    for draw in 0..100 {
        let kind = if rng.random_range(0..2) == 0 {
            ProbeKind::SqueezedVacuum
        } else {
            ProbeKind::Coherent
        };
        let nbar = rng.random_range(0.5..2.0f64);
        let gamma = match kind {
            ProbeKind::SqueezedVacuum => rng.random_range(0.05..0.6f64),
            ProbeKind::Coherent => rng.random_range(0.05..1.2f64),
        };
        let probe = ProbeSpec::new(kind, nbar, rng.random_range(0.0..std::f64::consts::TAU))
            .unwrap();
        let config = ScramblerConfig::new(2, gamma).unwrap();
        let phases = PhasePair {
            phi1: rng.random_range(0.0..std::f64::consts::TAU),
            phi2: rng.random_range(0.0..std::f64::consts::TAU),
        };
        let (generator, _) =
            info_matrices_via_generators(&probe, &config, phases, &policy).unwrap();
        let state = info_matrices(
            &evolve_with_scrambler(&probe, &scrambler, gamma, phases, DEFAULT_TAIL_TOLERANCE)
                .unwrap(),
        );
        let rel = max_entry_rel(&state, &generator);
        assert!(
            rel <= 1e-8,
            "draw {draw} ({kind:?}, nbar={nbar:.3}, gamma={gamma:.3}): rel {rel:.3e}"
        );
        worst = worst.max(rel);
    }
    println!("worst state-vs-generator deviation: {worst:.3e}");
}

#[test]
fn information_matrices_are_symmetric_positive_and_probe_determined() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let policy = TruncationPolicy::default();
    for draw in 0..100 {
        let case = random_case(&mut rng);
        let nbar = rng.random_range(0.3..2.5f64);
        let gamma = rng.random_range(0.0..2.5f64);
        let phi1 = rng.random_range(0.0..std::f64::consts::TAU);
        let (info, _) = case_info(Engine::Numeric, case, nbar, gamma, phi1, &policy).unwrap();

        // Q11 is a probe moment: 8 nbar (1 + nbar) squeezed, 4 nbar coherent,
        // independent of scrambling order, strength, and phases.
        let expected_q11 = match case.probe {
            ProbeKind::SqueezedVacuum => 8.0 * nbar * (1.0 + nbar),
            ProbeKind::Coherent => 4.0 * nbar,
        };
        assert!(
            (info.q11 - expected_q11).abs() / expected_q11 <= 1e-6,
            "draw {draw}: q11 {:.9} vs probe moment {expected_q11:.9}",
            info.q11
        );

        let trace = info.q11 + info.q22;
        assert!(info.q22 >= 0.0);
        assert!(
            info.det_q() >= -1e-8 * trace * trace,
            "draw {draw}: det Q = {:.3e}",
            info.det_q()
        );
        assert!(
            info.q12.abs() <= (info.q11 * info.q22).sqrt() * (1.0 + 1e-8),
            "draw {draw}: |q12| exceeds the Cauchy-Schwarz envelope"
        );
        assert!(
            info.raw_asymmetry <= 1e-9 * trace.max(1.0),
            "draw {draw}: raw asymmetry {:.3e}",
            info.raw_asymmetry
        );
    }
}

#[test]
fn information_matrices_ignore_the_second_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for draw in 0..12 {
        let case = random_case(&mut rng);
        let nbar = rng.random_range(0.5..2.0f64);
        let gamma = rng.random_range(0.05..1.0f64);
        let phi1 = rng.random_range(0.0..std::f64::consts::TAU);
        let probe = ProbeSpec::new(case.probe, nbar, 0.0).unwrap();
        let config = ScramblerConfig::new(case.m, gamma).unwrap();
        let worst =
            phi2_independence_check(&probe, &config, phi1, 288, DEFAULT_TAIL_TOLERANCE).unwrap();
        assert!(
            worst <= 1e-8,
            "draw {draw} ({case}): second-phase sensitivity {worst:.3e}"
        );
    }
}

#[test]
fn closed_form_sloppiness_inverts_the_information_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0usize;
    for _ in 0..200 {
        let case = if rng.random_range(0..2) == 0 {
            CaseId::SQUEEZED_QUADRATIC
        } else {
            CaseId::COHERENT_QUADRATIC
        };
        let nbar = rng.random_range(0.2..3.0f64);
        let gamma = rng.random_range(0.01..3.0f64);
        let phi1 = rng.random_range(0.0..std::f64::consts::TAU);
        let info = analytic_info(case, nbar, gamma, phi1).unwrap();
        let det = info.det_q();
        if det <= 1e-4 * (info.q11 * info.q22).abs() {
            // Close to the determinant-annihilating phase ray, det Q itself
            // is produced by cancellation and has fewer than ten reliable
            // digits, so the identity cannot be checked at 1e-10 there.
            continue;
        }
        let s = sloppiness_closed_quadratic(case, nbar, gamma, phi1).unwrap();
        assert!(
            (s * det - 1.0).abs() <= 1e-10,
            "{case} nbar={nbar:.3} gamma={gamma:.3} phi1={phi1:.3}: S det Q = {:.15}",
            s * det
        );
        checked += 1;
    }
    assert!(checked >= 150, "only {checked} nondegenerate draws");
}

#[test]
fn optimized_sloppiness_decreases_with_probe_energy() {
    for case in ALL_CASES {
        for gamma in [0.05, 0.2, 0.5, 1.0, 2.0] {
            let mut previous = f64::INFINITY;
            for nbar in [0.5, 1.0, 2.0] {
                let value = optimize_phase(
                    Engine::Analytic,
                    case,
                    nbar,
                    gamma,
                    Objective::Sloppiness,
                    &TruncationPolicy::default(),
                    DEFAULT_DEGENERACY_EPS,
                )
                .unwrap()
                .value;
                assert!(
                    value < previous,
                    "{case} gamma={gamma}: S({nbar}) = {value:.6e} not below {previous:.6e}"
                );
                previous = value;
            }
        }
    }
}

#[test]
fn trace_bound_stays_below_total_bound_with_equality_iff_compatible() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for draw in 0..500 {
        let mut info = random_synthetic(&mut rng);
        let bounds = bound_set(&info, DEFAULT_DEGENERACY_EPS).unwrap();
        assert!(
            bounds.c_t >= bounds.c_q * (1.0 - 1e-14),
            "draw {draw}: C_T {:.15e} below C_Q {:.15e}",
            bounds.c_t,
            bounds.c_q
        );
        if info.d12.abs() > 1e-6 * info.det_q().sqrt() {
            assert!(bounds.c_t > bounds.c_q, "draw {draw}: equality despite D != 0");
        }

        info.d12 = 0.0;
        let compatible = bound_set(&info, DEFAULT_DEGENERACY_EPS).unwrap();
        assert!(
            (compatible.c_t - compatible.c_q).abs() <= 1e-12 * compatible.c_q,
            "draw {draw}: C_T != C_Q at D = 0"
        );
    }
}

#[test]
fn incompatibility_matches_the_explicit_eigenvalue_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for draw in 0..500 {
        let info = random_synthetic(&mut rng);
        let bounds = bound_set(&info, DEFAULT_DEGENERACY_EPS).unwrap();

        // Explicit route: form Q^{-1} D as a real 2x2 matrix and solve its
        // characteristic polynomial; the spectrum of i Q^{-1} D is the same
        // set of moduli.
        let det_q = info.det_q();
        let (m11, m12) = (info.q12 * info.d12 / det_q, info.q22 * info.d12 / det_q);
        let (m21, m22) = (-info.q11 * info.d12 / det_q, -info.q12 * info.d12 / det_q);
        let trace = m11 + m22;
        let det = m11 * m22 - m12 * m21;
        let disc = trace * trace - 4.0 * det;
        let modulus = if disc >= 0.0 {
            let root = disc.sqrt();
            ((trace + root).abs() / 2.0).max((trace - root).abs() / 2.0)
        } else {
            // complex pair: |lambda|^2 = det
            det.sqrt()
        };
        assert!(
            (bounds.r - modulus).abs() <= 1e-10 * modulus.max(1e-30),
            "draw {draw}: R = {:.15e} vs eigenvalue route {modulus:.15e}",
            bounds.r
        );
    }
}

#[test]
fn physical_draws_keep_incompatibility_in_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for draw in 0..500 {
        let case = random_case(&mut rng);
        let nbar = rng.random_range(0.2..3.0f64);
        let gamma = rng.random_range(0.01..4.0f64);
        let phi1 = rng.random_range(0.0..std::f64::consts::TAU);
        let info = analytic_info(case, nbar, gamma, phi1).unwrap();
        let bounds = bound_set(&info, DEFAULT_DEGENERACY_EPS).unwrap();
        if bounds.degenerate {
            continue;
        }
        assert!(
            (0.0..=1.0).contains(&bounds.r),
            "draw {draw} ({case}): R = {}",
            bounds.r
        );
        assert!(
            bounds.r_clamp < 1e-8,
            "draw {draw} ({case}): clamp event of magnitude {:.3e}",
            bounds.r_clamp
        );
    }
}

#[test]
fn bound_identity_holds_on_physical_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for draw in 0..200 {
        let case = random_case(&mut rng);
        let nbar = rng.random_range(0.2..3.0f64);
        let gamma = rng.random_range(0.05..4.0f64);
        let phi1 = rng.random_range(0.0..std::f64::consts::TAU);
        let info = analytic_info(case, nbar, gamma, phi1).unwrap();
        let bounds = bound_set(&info, DEFAULT_DEGENERACY_EPS).unwrap();
        if bounds.degenerate {
            continue;
        }
        let t_w = t_w_via_singular_values(&info).unwrap();
        let lhs = (1.0 + t_w) * bounds.c_q;
        let rhs = bounds.c_q + 2.0 * bounds.s * info.d12.abs();
        assert!(
            (lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()),
            "draw {draw} ({case}): {lhs:.15e} vs {rhs:.15e}"
        );
    }
}

#[test]
fn fixed_dimension_evolution_is_deterministic() {
    // Same inputs, same bits: the numeric path has no hidden state.
    let probe = ProbeSpec::new(ProbeKind::SqueezedVacuum, 1.3, 0.4).unwrap();
    let config = ScramblerConfig::new(3, 0.35).unwrap();
    let phases = PhasePair {
        phi1: 0.9,
        phi2: 1.2,
    };
    let a = evolve_at_dim(&probe, &config, phases, 192, DEFAULT_TAIL_TOLERANCE).unwrap();
    let b = evolve_at_dim(&probe, &config, phases, 192, DEFAULT_TAIL_TOLERANCE).unwrap();
    assert_eq!(a.psi.amplitudes, b.psi.amplitudes);
    assert_eq!(a.dpsi1.amplitudes, b.dpsi1.amplitudes);
    assert_eq!(a.dpsi2.amplitudes, b.dpsi2.amplitudes);
    let ia = info_matrices(&a);
    let ib = info_matrices(&b);
    assert_eq!(ia, ib);
}
