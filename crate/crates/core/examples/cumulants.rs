//! Cumulants of transferred energy from a generating function by Ridders
//! extrapolation, with the residual imaginary parts as a quality flag.

use entroflow::bath::{BathSpec, Susceptibility};
use entroflow::fcs::{cumulants, gf_incoherent, transfer_rates};
use entroflow::spectrum::LineSpectrum;

fn main() -> entroflow::Result<()> {
    let probe = BathSpec::new(1.0, Susceptibility::scalar(1.0)?)?;
    let y = LineSpectrum::scalar(&[(1.0, 0.3), (-1.0, 0.7), (2.5, 0.05)])?;
    let rates = transfer_rates(&probe, &y)?;
    let cs = cumulants(|xi| gf_incoherent(&probe, &y, xi), 2.5)?;
    for c in &cs {
        // each cumulant is Σ νⁿ Γ over lines
        let exact: f64 = rates.iter().map(|(nu, g)| nu.powi(c.order as i32) * g).sum();
        println!(
            "C{} = {:+.12e} (exact {:+.12e}), imag {:.1e}, err {:.1e}, flagged {}",
            c.order, c.value, exact, c.imag_residue, c.error_estimate, c.flagged
        );
    }
    Ok(())
}
