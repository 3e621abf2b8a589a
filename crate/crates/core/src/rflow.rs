//! Rényi entropy flows into the probe at second order in the coupling.
//!
//! Each line of a spectrum enters through `ω = −ν` and `q = e^{βω}`. The
//! flows here are built from the multi-replica correlator `S^{N,M}` with real
//! prefactors only; [`flow_via_correspondence`] instead goes through the
//! generating functions at complex ξ, so the two routes share nothing but the
//! Bose function and the susceptibility.

use num_complex::Complex64;

use crate::bath::{gen_correlator, BathSpec};
use crate::error::{Error, Result};
use crate::fcs::{cumulant, gf_coherent, gf_incoherent};
use crate::linalg::CMatrix;
use crate::spectrum::{contract, LineSpectrum};

/// Rényi order M. Any positive real is accepted; formulas with a pole at
/// M = 1 reject it separately.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::NonPositiveOrder(m));
        }
        Ok(Self(m))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    fn away_from_one(self) -> Result<f64> {
        if self.0 == 1.0 {
            return Err(Error::OrderIsOne);
        }
        Ok(self.0)
    }

    /// Integer value for the world-counting sums (M ≥ 2).
    pub fn as_worlds(self) -> Result<u32> {
        if self.0 < 2.0 || self.0.fract() != 0.0 || self.0 > f64::from(u32::MAX) {
            return Err(Error::NonIntegerOrder(self.0));
        }
        Ok(self.0 as u32)
    }
}

/// Total flow with its single-world / multi-world split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowResult {
    pub order: f64,
    pub value: f64,
    pub single_world: f64,
    pub multi_world: f64,
    /// Sum of absolute line contributions; the natural size for tolerances.
    pub scale: f64,
}

fn check_dims(bath: &BathSpec, spectrum: &LineSpectrum) -> Result<()> {
    if bath.dim() != spectrum.dim() {
        return Err(Error::DimensionMismatch { expected: bath.dim(), got: spectrum.dim() });
    }
    Ok(())
}

/// `Σ_k (q^{M−1} − 1) Σ_mn S^{0,M}_mn(ω_k) W_mn` term by term.
fn replica_terms<'a>(
    bath: &'a BathSpec,
    m: f64,
    lines: impl Iterator<Item = (f64, &'a CMatrix)> + 'a,
) -> impl Iterator<Item = Result<f64>> + 'a {
    let beta = bath.beta.get();
    lines.map(move |(nu, w)| {
        let omega = -nu;
        let s = gen_correlator(&bath.chi, bath.beta, omega, 0, m)?;
        Ok((beta * (m - 1.0) * omega).exp_m1() * contract(&s, w).re)
    })
}

fn spectrum_lines(s: &LineSpectrum) -> impl Iterator<Item = (f64, &CMatrix)> {
    s.lines().iter().map(|l| (l.frequency, &l.weight))
}

/// Flow from interactions inside a single replica, driven by the full
/// force spectrum.
pub fn single_world_flow(bath: &BathSpec, order: RenyiOrder, ycal: &LineSpectrum) -> Result<f64> {
    check_dims(bath, ycal)?;
    let m = order.away_from_one()?;
    let sum: f64 = replica_terms(bath, m, spectrum_lines(ycal)).sum::<Result<f64>>()?;
    Ok(-m * sum)
}

/// Multi-world flow in the form that pairs with [`single_world_flow`]:
/// `+M Σ_k (q^{M−1} − 1) S^{0,M} W_Y`.
///
/// Equals [`multi_world_flow_closed`] whenever the coherent spectrum is its
/// own mirror image, which holds for forces from Hermitian operators.
pub fn multi_world_flow(bath: &BathSpec, order: RenyiOrder, ycoh: &LineSpectrum) -> Result<f64> {
    check_dims(bath, ycoh)?;
    let m = order.away_from_one()?;
    let sum: f64 = replica_terms(bath, m, spectrum_lines(ycoh)).sum::<Result<f64>>()?;
    Ok(m * sum)
}

/// Resummed multi-world flow `−(M/2) Σ_k (q^{M−1} − 1)(q − 1) S^{0,M} W_Y`.
///
/// Each line carries one of the two on-shell branches, hence the 1/2.
pub fn multi_world_flow_closed(bath: &BathSpec, order: RenyiOrder, ycoh: &LineSpectrum) -> Result<f64> {
    check_dims(bath, ycoh)?;
    let m = order.away_from_one()?;
    let beta = bath.beta.get();
    let mut sum = 0.0;
    for line in ycoh.lines() {
        let omega = -line.frequency;
        let s = gen_correlator(&bath.chi, bath.beta, omega, 0, m)?;
        sum += (beta * (m - 1.0) * omega).exp_m1() * (beta * omega).exp_m1() * contract(&s, &line.weight).re;
    }
    Ok(-0.5 * m * sum)
}

/// Multi-world flow as the explicit sum over pairs of worlds.
///
/// Every pair `2 ≤ N ≤ M′ ≤ M` contributes the second difference
/// `S^{N−2,M} − 2S^{N−1,M} + S^{N,M}`, once on the line frequency and once on
/// its mirror with transposed channel indices.
pub fn multi_world_flow_diagram_sum(bath: &BathSpec, order: RenyiOrder, ycoh: &LineSpectrum) -> Result<f64> {
    check_dims(bath, ycoh)?;
    let m = order.as_worlds()?;
    let mf = f64::from(m);
    let second_difference = |omega: f64, n: u32| -> Result<CMatrix> {
        let a = gen_correlator(&bath.chi, bath.beta, omega, n - 2, mf)?;
        let b = gen_correlator(&bath.chi, bath.beta, omega, n - 1, mf)?;
        let c = gen_correlator(&bath.chi, bath.beta, omega, n, mf)?;
        Ok(a - b.scale(2.0) + c)
    };
    let mut total = 0.0;
    for line in ycoh.lines() {
        let omega = -line.frequency;
        let mut acc = Complex64::new(0.0, 0.0);
        for outer in 2..=m {
            for n in 2..=outer {
                let forward = second_difference(omega, n)?;
                let mirror = second_difference(-omega, n)?.transpose();
                acc += 0.5 * (contract(&forward, &line.weight) + contract(&mirror, &line.weight));
            }
        }
        total -= acc.re;
    }
    Ok(total)
}

/// Total Rényi flow `−M Σ_k (q^{M−1} − 1) S^{0,M}(ω_k) (W_𝒴 − W_Y)`.
///
/// Weights are subtracted line by line before anything is evaluated, so a
/// purely classical force (𝒴 = Y) gives exactly zero.
pub fn total_flow(bath: &BathSpec, order: RenyiOrder, ycal: &LineSpectrum, ycoh: &LineSpectrum) -> Result<FlowResult> {
    check_dims(bath, ycal)?;
    check_dims(bath, ycoh)?;
    let m = order.away_from_one()?;
    let diff = ycal.difference(ycoh)?;
    let terms: Vec<f64> = replica_terms(bath, m, diff.iter().map(|(nu, w)| (*nu, w))).collect::<Result<_>>()?;
    let single = single_world_flow(bath, order, ycal)?;
    let multi = multi_world_flow(bath, order, ycoh)?;
    let scale_of = |s: &LineSpectrum| -> Result<f64> {
        Ok(replica_terms(bath, m, spectrum_lines(s)).collect::<Result<Vec<f64>>>()?.iter().map(|t| m * t.abs()).sum())
    };
    Ok(FlowResult {
        order: m,
        value: -m * terms.iter().sum::<f64>(),
        single_world: single,
        multi_world: multi,
        scale: scale_of(ycal)? + scale_of(ycoh)?,
    })
}

/// Flow obtained from the generating functions at inverse temperature Mβ and
/// imaginary counting parameter ξ* = iβ(M − 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrespondenceFlow {
    pub value: f64,
    pub imag_residue: f64,
    pub flagged: bool,
}

pub fn flow_via_correspondence(
    bath: &BathSpec,
    order: RenyiOrder,
    ycal: &LineSpectrum,
    ycoh: &LineSpectrum,
) -> Result<CorrespondenceFlow> {
    let m = order.away_from_one()?;
    let star = bath.rescaled(m)?;
    let xi = Complex64::new(0.0, bath.beta.get() * (m - 1.0));
    let fi = gf_incoherent(&star, ycal, xi)?;
    let fc = gf_coherent(&star, ycoh, xi)?;
    let v = (fi - fc) * m;
    let size = m * (fi.norm() + fc.norm());
    Ok(CorrespondenceFlow { value: v.re, imag_residue: v.im, flagged: v.im.abs() > 1e-10 * size.max(f64::MIN_POSITIVE) })
}

/// Shannon (M → 1) flow: β times the difference of mean energy currents.
pub fn shannon_flow(bath: &BathSpec, ycal: &LineSpectrum, ycoh: &LineSpectrum) -> Result<f64> {
    let wmax = ycal.max_frequency().into_iter().chain(ycoh.max_frequency()).fold(0.0, f64::max);
    let ci = cumulant(|xi| gf_incoherent(bath, ycal, xi), 1, wmax)?;
    let cc = cumulant(|xi| gf_coherent(bath, ycoh, xi), 1, wmax)?;
    Ok(bath.beta.get() * (ci.value - cc.value))
}

/// Left side of the frequency-reflection identity,
/// `Σ_k (q^{M−1} − 1) q S^{0,M}_mn(ω_k) f(ω_k) W_mn` with ω_k = −ν_k.
pub fn reflection_lhs(
    bath: &BathSpec,
    order: RenyiOrder,
    spectrum: &LineSpectrum,
    f: impl Fn(f64) -> Complex64,
) -> Result<Complex64> {
    check_dims(bath, spectrum)?;
    let m = order.get();
    let beta = bath.beta.get();
    let mut total = Complex64::new(0.0, 0.0);
    for line in spectrum.lines() {
        let omega = -line.frequency;
        let s = gen_correlator(&bath.chi, bath.beta, omega, 0, m)?;
        let pref = (beta * (m - 1.0) * omega).exp_m1() * (beta * omega).exp();
        total += pref * f(omega) * contract(&s, &line.weight);
    }
    Ok(total)
}

/// Right side of the reflection identity, evaluated on the mirrored lines:
/// `−Σ_{ω′} (e^{β(M−1)ω′} − 1) S^{0,M}_nm(ω′) f(−ω′) W_mn`.
pub fn reflection_rhs(
    bath: &BathSpec,
    order: RenyiOrder,
    spectrum: &LineSpectrum,
    f: impl Fn(f64) -> Complex64,
) -> Result<Complex64> {
    check_dims(bath, spectrum)?;
    let m = order.get();
    let beta = bath.beta.get();
    let mirrored = spectrum.reflected();
    let mut total = Complex64::new(0.0, 0.0);
    for line in mirrored.lines() {
        let omega = -line.frequency;
        let s = gen_correlator(&bath.chi, bath.beta, omega, 0, m)?;
        total -= (beta * (m - 1.0) * omega).exp_m1() * f(-omega) * contract(&s, &line.weight);
    }
    Ok(total)
}
