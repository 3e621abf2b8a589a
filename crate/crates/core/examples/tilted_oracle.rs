//! Independent check of the perturbative generating function: the dominant
//! eigenvalue of the counting-field tilted generator, and quantum-jump
//! sampling of the transferred quanta.

use entroflow::bath::{BathSpec, Susceptibility};
use entroflow::fcs::{cumulant, gf_incoherent};
use entroflow::linalg::c64;
use entroflow::models::{qhe_spectra, qhe_steady_state, qhe_steady_state_without_probe, QheSpec};
use entroflow::oracle::{fcs_via_tilted, poisson_chi_square, sample_trajectories};
use entroflow::verify::weak_probe_engine;

fn main() -> entroflow::Result<()> {
    // probe 1e-6 as strong as the hot bath
    let spec = weak_probe_engine(1e-6, 0.0)?;
    let (ycal, _) = qhe_spectra(&spec, &qhe_steady_state_without_probe(&spec)?)?;
    for xi in [c64(0.5, 0.0), c64(0.0, 1.0), c64(1.0, -0.5)] {
        let t = fcs_via_tilted(&spec, xi)?;
        let p = gf_incoherent(&spec.probe, &ycal, xi)?;
        println!("ξ = {xi}: tilted {:.10e}, perturbative {:.10e}", t.value, p);
    }

    let spec = weak_probe_engine(0.5, 0.0)?;
    let (ycal, _) = qhe_spectra(&spec, &qhe_steady_state(&spec)?)?;
    let analytic = cumulant(|xi| gf_incoherent(&spec.probe, &ycal, xi), 1, 1.0)?.value;
    let s = sample_trajectories(&spec, 10.0, 50_000, 11)?;
    println!("C1 analytic {analytic:.6e}, sampled {:.6e} ± {:.1e}", s.c1(), s.c1_stderr());
    println!("C2 sampled {:.6e} ± {:.1e}", s.c2(), s.c2_stderr());

    // A cold, weak probe only absorbs, and rarely enough that the count is Poissonian.
    let cold = QheSpec::new(
        1.0,
        BathSpec::new(20.0, Susceptibility::scalar(3e-3)?)?,
        vec![BathSpec::new(0.3, Susceptibility::scalar(1.0)?)?],
        0.0,
    )?;
    let s = sample_trajectories(&cold, 200.0, 20_000, 12)?;
    println!("cold probe: mean count {:.4}, variance {:.4}", s.mean_count(), s.count_variance());
    let fit = poisson_chi_square(&s.histogram)?;
    println!("Poisson fit of net quanta: χ² = {:.2} on {} dof, p = {:.3}", fit.statistic, fit.dof, fit.p_value);
    Ok(())
}
