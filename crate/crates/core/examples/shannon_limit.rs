//! Approach to M = 1: the Rényi flow divided by M − 1 tends to the Shannon
//! entropy flow β(C1 incoherent − C1 coherent).

use entroflow::bath::{BathSpec, Susceptibility};
use entroflow::models::{qhe_spectra, qhe_steady_state, QheSpec};
use entroflow::rflow::{shannon_flow, total_flow, RenyiOrder};

fn main() -> entroflow::Result<()> {
    let spec = QheSpec::new(
        1.0,
        BathSpec::new(1.0, Susceptibility::scalar(1.0)?)?,
        vec![BathSpec::new(0.3, Susceptibility::scalar(1.0)?)?],
        0.5,
    )?;
    let st = qhe_steady_state(&spec)?;
    let (ycal, ycoh) = qhe_spectra(&spec, &st)?;
    let s = shannon_flow(&spec.probe, &ycal, &ycoh)?;
    println!("Shannon flow {s:.15e}");
    for eps in [1e-1, 1e-2, 1e-3, 1e-4, -1e-4] {
        let f = total_flow(&spec.probe, RenyiOrder::new(1.0 + eps)?, &ycal, &ycoh)?.value / eps;
        println!("ε = {eps:>7}: F/ε = {f:.15e}, rel {:.2e}", (f - s).abs() / s.abs());
    }
    Ok(())
}
