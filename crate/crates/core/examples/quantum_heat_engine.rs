//! Driven two-level heat engine: steady state, spectra, Rényi flows into a
//! cold probe, and the closed-form expression they should match.

use entroflow::bath::{BathSpec, Susceptibility};
use entroflow::models::{qhe_closed_rflow, qhe_spectra, qhe_steady_state, QheSpec};
use entroflow::rflow::{shannon_flow, total_flow, RenyiOrder};

fn main() -> entroflow::Result<()> {
    let probe = BathSpec::new(1.0, Susceptibility::scalar(0.5)?)?;
    let hot = BathSpec::new(0.2, Susceptibility::scalar(1.0)?)?;

    for rabi in [0.0, 0.3, 1.0, 3.0] {
        let spec = QheSpec::new(1.0, probe.clone(), vec![hot.clone()], rabi)?;
        let st = qhe_steady_state(&spec)?;
        let (ycal, ycoh) = qhe_spectra(&spec, &st)?;
        println!("Rabi {rabi}: p1 = {:.6}, |ρ01|² = {:.6}", st.p1, st.coherence_sq());
        for m in [2.0, 3.0] {
            let order = RenyiOrder::new(m)?;
            let f = total_flow(&spec.probe, order, &ycal, &ycoh)?;
            let closed = qhe_closed_rflow(&spec, &st, order)?;
            println!(
                "  M = {m}: flow {:.12e} (single {:.6e}, multi {:+.6e}), closed form {:.12e}",
                f.value, f.single_world, f.multi_world, closed
            );
        }
        println!("  Shannon flow {:.12e}", shannon_flow(&spec.probe, &ycal, &ycoh)?);
    }
    Ok(())
}
