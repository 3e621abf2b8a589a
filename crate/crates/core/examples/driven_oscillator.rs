//! Harmonic oscillator with a thermal-like occupation and a classical drive.
//! The flow changes sign where the effective temperature crosses the probe's
//! and does not depend on the drive amplitude.

use entroflow::bath::{BathSpec, Susceptibility};
use entroflow::linalg::c64;
use entroflow::models::{ho_closed_rflow, ho_spectra, OscillatorSpec};
use entroflow::rflow::{total_flow, RenyiOrder};

fn main() -> entroflow::Result<()> {
    let probe = BathSpec::new(1.0, Susceptibility::scalar(1.0)?)?;
    let order = RenyiOrder::new(2.0)?;
    println!("{:>6} {:>22} {:>22} {:>22}", "T'", "no drive", "driven", "closed form");
    for t in [0.25, 0.5, 0.8, 1.0, 1.25, 2.0, 4.0] {
        let quiet = OscillatorSpec::new(1.0, 1.7, t, c64(0.0, 0.0), c64(0.0, 0.0))?;
        let loud = OscillatorSpec::new(1.0, 1.7, t, c64(2.0, 0.5), c64(-1.0, 1.0))?;
        let flow = |s: &OscillatorSpec| -> entroflow::Result<f64> {
            let (ycal, ycoh) = ho_spectra(s)?;
            Ok(total_flow(&probe, order, &ycal, &ycoh)?.value)
        };
        println!("{t:>6} {:>22.15e} {:>22.15e} {:>22.15e}", flow(&quiet)?, flow(&loud)?, ho_closed_rflow(&quiet, &probe, order)?);
    }
    Ok(())
}
