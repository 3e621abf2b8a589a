//! Rényi flow into a probe computed two ways: directly from the multi-replica
//! correlators, and from the energy-transfer generating functions at a
//! rescaled temperature and imaginary counting field.

use entroflow::bath::{BathSpec, Susceptibility};
use entroflow::linalg::{c64, CVector};
use entroflow::rflow::{flow_via_correspondence, total_flow, RenyiOrder};
use entroflow::spectrum::LineSpectrum;

fn main() -> entroflow::Result<()> {
    // two-channel probe with ohmic response
    let amp = entroflow::linalg::CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.2, 0.1), c64(0.2, -0.1), c64(0.5, 0.0)]);
    let probe = BathSpec::new(0.8, Susceptibility::ohmic(amp, 2.0)?)?;

    // force amplitudes of the system at three frequencies
    let amps = vec![
        (1.3, CVector::from_vec(vec![c64(0.6, 0.0), c64(0.1, 0.3)])),
        (-1.3, CVector::from_vec(vec![c64(0.2, -0.1), c64(0.0, 0.4)])),
        (0.4, CVector::from_vec(vec![c64(0.3, 0.3), c64(-0.2, 0.0)])),
    ];
    let ycoh = LineSpectrum::from_amplitudes(amps)?;
    // the full correlator adds an incoherent part on top of the coherent one
    let extra = LineSpectrum::from_amplitudes(vec![(1.3, CVector::from_vec(vec![c64(0.5, 0.0), c64(0.0, 0.5)]))])?;
    let ycal = ycoh.merged(&extra)?;

    println!("{:>5} {:>22} {:>22} {:>10}", "M", "direct", "via generating fns", "rel diff");
    for m in [0.5, 2.0, 3.0, 4.5, 10.0] {
        let order = RenyiOrder::new(m)?;
        let direct = total_flow(&probe, order, &ycal, &ycoh)?;
        let via = flow_via_correspondence(&probe, order, &ycal, &ycoh)?;
        println!(
            "{m:>5} {:>22.15e} {:>22.15e} {:>10.2e}",
            direct.value,
            via.value,
            (direct.value - via.value).abs() / direct.value.abs()
        );
    }
    Ok(())
}
