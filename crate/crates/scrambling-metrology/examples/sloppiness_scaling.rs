//! Phase-optimized sloppiness versus scrambling strength: the weak-field
//! 1/gamma^2 law, the strong-field 1/gamma^4 law, and the closed-form
//! series coefficients that pin both asymptotes down.
//!
//! Run with: `cargo run --example sloppiness_scaling`

use scrambling_metrology::{
    asymptotic_coefficients, optimize_phase, sloppiness_series_large_gamma,
    sloppiness_series_small_gamma, CaseId, Engine, Objective, Result, TruncationPolicy,
    DEFAULT_DEGENERACY_EPS,
};

fn optimized_s(case: CaseId, nbar: f64, gamma: f64) -> Result<f64> {
    Ok(optimize_phase(
        Engine::Analytic,
        case,
        nbar,
        gamma,
        Objective::Sloppiness,
        &TruncationPolicy::default(),
        DEFAULT_DEGENERACY_EPS,
    )?
    .value)
}

fn loglog_slope(case: CaseId, nbar: f64, lo: f64, hi: f64) -> Result<f64> {
    let (a, b) = (optimized_s(case, nbar, lo)?, optimized_s(case, nbar, hi)?);
    Ok((b.ln() - a.ln()) / (hi.ln() - lo.ln()))
}

fn main() -> Result<()> {
    let nbar = 1.0;
    for case in CaseId::ALL {
        println!("case {case} at nbar = {nbar}:");
        for gamma in [0.01, 0.1, 1.0, 10.0, 100.0] {
            println!("  gamma {gamma:>6}: optimized S = {:.6e}", optimized_s(case, nbar, gamma)?);
        }
        println!(
            "  log-log slope on [1e-3, 1e-2]: {:+.4}   on [1e2, 1e3]: {:+.4}",
            loglog_slope(case, nbar, 1e-3, 1e-2)?,
            loglog_slope(case, nbar, 1e2, 1e3)?
        );

        // The closed-form series reproduce the asymptotes (at the reference
        // phases documented on `asymptotic_coefficients`).
        let coeff = asymptotic_coefficients(case, nbar)?;
        println!(
            "  series coefficients: f = {:.6e}, g = {:.6e}, kappa = {:.6e}",
            coeff.f, coeff.g, coeff.kappa
        );
        println!(
            "  weak series  S(1e-3) ~ {:.6e}",
            sloppiness_series_small_gamma(case, nbar, 1e-3)?
        );
        println!(
            "  strong series S(1e3) ~ {:.6e}",
            sloppiness_series_large_gamma(case, nbar, 1e3)?
        );
        println!();
    }

    // the cubic scrambler beats the quadratic one at every strength
    println!("cubic vs quadratic (squeezed probe, optimized S):");
    for gamma in [0.05, 0.2, 0.5, 1.0, 2.0] {
        let s3 = optimized_s(CaseId::SQUEEZED_CUBIC, nbar, gamma)?;
        let s2 = optimized_s(CaseId::SQUEEZED_QUADRATIC, nbar, gamma)?;
        println!("  gamma {gamma:>4}: S3/S2 = {:.3e}", s3 / s2);
    }
    Ok(())
}
