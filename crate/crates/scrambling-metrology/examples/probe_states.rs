//! Build the two probe families, inspect their Fock-space footprint, and
//! see how the tail-mass guard reports an undersized basis.
//!
//! Run with: `cargo run --example probe_states`

use scrambling_metrology::{Error, ProbeKind, ProbeSpec, Result};

fn main() -> Result<()> {
    for kind in [ProbeKind::Coherent, ProbeKind::SqueezedVacuum] {
        let probe = ProbeSpec::new(kind, 1.0, 0.4)?;
        let state = probe.build(128, 1e-12)?;
        println!("{kind} probe at nbar = 1, preparation phase 0.4:");
        println!("  norm            {:.16}", state.norm());
        println!("  mean occupation {:.12}", state.mean_number());
        for level in [8, 16, 32, 64] {
            println!("  mass above level {level:3}: {:.3e}", state.tail_mass(level));
        }
        // squeezed vacuum populates only even levels
        let odd_mass: f64 = state
            .amplitudes
            .iter()
            .skip(1)
            .step_by(2)
            .map(|a| a.norm_sqr())
            .sum();
        println!("  mass on odd levels: {odd_mass:.3e}");
        println!();
    }

    // An undersized basis is refused, with an estimate of what would do.
    let heavy = ProbeSpec::new(ProbeKind::SqueezedVacuum, 4.0, 0.0)?;
    match heavy.build(32, 1e-12) {
        Err(Error::TailMass {
            dim,
            tail,
            required,
            ..
        }) => {
            println!("squeezed probe at nbar = 4 refused at dim {dim}:");
            println!("  neglected tail {tail:.3e}, estimated adequate dim {required}");
            let state = heavy.build(required, 1e-12)?;
            println!("  rebuilt at dim {required}: norm {:.16}", state.norm());
        }
        other => println!("unexpected outcome: {other:?}"),
    }
    Ok(())
}
