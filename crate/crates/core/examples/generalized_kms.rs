//! Thermal correlators of the probe: detailed balance S(−ω) = e^{βω} S(ω)
//! and the multi-replica generalization S^{N,M}.

use entroflow::bath::{gen_correlator, std_correlator, InverseTemperature, Susceptibility};

fn main() -> entroflow::Result<()> {
    let chi = Susceptibility::scalar(1.0)?;
    let beta = InverseTemperature::new(1.0)?;
    for w in [0.5, 1.0, 2.0] {
        let plus = std_correlator(&chi, beta, w)?[(0, 0)].re;
        let minus = std_correlator(&chi, beta, -w)?[(0, 0)].re;
        println!("ω = {w}: S(ω) = {plus:.10}, S(−ω)/S(ω) = {:.10}, e^βω = {:.10}", minus / plus, w.exp());
    }
    // S^{N,M}(−ω) = S^{M−N,M}(ω) for integer N ≤ M
    let m = 3.0;
    for n in 0..=3u32 {
        let a = gen_correlator(&chi, beta, -1.0, n, m)?[(0, 0)].re;
        let b = gen_correlator(&chi, beta, 1.0, 3 - n, m)?[(0, 0)].re;
        println!("N = {n}, M = 3: S(−1) = {a:+.10}, S^(M−N)(1) = {b:+.10}");
    }
    Ok(())
}
