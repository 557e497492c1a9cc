//! From information matrices to precision bounds: sloppiness, quantumness,
//! the joint-estimation sandwich `C_Q <= C <= C_T`, and stepwise bounds
//! with their optimal shot allocation.
//!
//! Run with: `cargo run --example precision_bounds`

use scrambling_metrology::{
    analytic_info, bound_set, step_bounds, step_bounds_optimal, t_w_via_singular_values, CaseId,
    Result, DEFAULT_DEGENERACY_EPS,
};

fn main() -> Result<()> {
    let case = CaseId::COHERENT_QUADRATIC;
    let (nbar, gamma, phi1) = (1.0, 0.5, 0.0);
    let info = analytic_info(case, nbar, gamma, phi1)?;
    println!("case {case}: nbar = {nbar}, gamma = {gamma}, phi1 = {phi1}");
    println!(
        "Q = [[{:.6}, {:.6}], [{:.6}, {:.6}]],  D12 = {:.6}\n",
        info.q11, info.q12, info.q12, info.q22, info.d12
    );

    let set = bound_set(&info, DEFAULT_DEGENERACY_EPS)?;
    println!("scalar figures of merit:");
    println!("  det Q   {:.6e}", set.det_q);
    println!("  S       {:.6e}   (sloppiness, 1/det Q)", set.s);
    println!("  R       {:.6e}   (quantumness, in [0, 1])", set.r);
    println!("  C_Q     {:.6e}   (joint lower bound, tr Q^-1)", set.c_q);
    println!("  C_T     {:.6e}   (attainable upper companion)", set.c_t);

    // the sandwich width comes from the incompatibility ratio T_W,
    // computed here the brute-force way from singular values
    let t_w = t_w_via_singular_values(&info)?;
    println!(
        "  T_W     {:.6e}   (so (1 + T_W) C_Q = {:.6e})",
        t_w,
        (1.0 + t_w) * set.c_q
    );

    println!("\nstepwise bounds over the shot split beta:");
    for beta in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let (c1, c2) = step_bounds(&info, beta)?;
        println!("  beta {beta:.1}: first-phase-first {c1:.6e}, second-phase-first {c2:.6e}");
    }
    let opt = step_bounds_optimal(&info)?;
    println!(
        "  optimal: beta {:.6} -> {:.6e}   /   beta {:.6} -> {:.6e}",
        opt.beta_opt1, opt.c_step_min1, opt.beta_opt2, opt.c_step_min2
    );

    let stepwise_best = opt.c_step_min1.min(opt.c_step_min2);
    println!("\njoint window [C_Q, C_T] = [{:.6e}, {:.6e}]", set.c_q, set.c_t);
    println!("best stepwise bound     = {stepwise_best:.6e}");
    Ok(())
}
