//! Long-time generating functions of the energy transferred into the probe.
//!
//! With ν the energy delivered to the probe by a line, the rate per line is
//! `Γ_k = Σ_mn S_mn(−ν_k) W_mn` and the generating function is
//!
//! ```text
//! f̄(ξ) = −Σ_k (e^{iν_k ξ} − 1) Γ_k
//! ```
//!
//! so that `C_n = −(−i)ⁿ f̄⁽ⁿ⁾(0) = Σ_k ν_kⁿ Γ_k` are the cumulant rates of the
//! transferred energy. ξ may be complex.

use num_complex::Complex64;

use crate::bath::{bose_occupation, std_correlator, BathSpec};
use crate::error::{Error, Result};
use crate::linalg::{cexp_m1, CMatrix};
use crate::spectrum::{contract, LineSpectrum};

/// One evaluation of a generating function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfSample {
    pub xi: Complex64,
    pub value: Complex64,
}

fn check_dims(bath: &BathSpec, spectrum: &LineSpectrum) -> Result<()> {
    if bath.dim() != spectrum.dim() {
        return Err(Error::DimensionMismatch { expected: bath.dim(), got: spectrum.dim() });
    }
    Ok(())
}

fn gf_lines(bath: &BathSpec, spectrum: &LineSpectrum, xi: Complex64) -> Result<Complex64> {
    check_dims(bath, spectrum)?;
    let mut total = Complex64::new(0.0, 0.0);
    for line in spectrum.lines() {
        let omega = -line.frequency;
        let s = std_correlator(&bath.chi, bath.beta, omega)?;
        let phase = cexp_m1(Complex64::new(0.0, -omega) * xi);
        total -= phase * contract(&s, &line.weight);
    }
    Ok(total)
}

/// Generating function of the full (incoherent) force spectrum.
pub fn gf_incoherent(bath: &BathSpec, ycal: &LineSpectrum, xi: Complex64) -> Result<Complex64> {
    gf_lines(bath, ycal, xi)
}

/// Generating function of the coherent part, driven by the averaged forces.
pub fn gf_coherent(bath: &BathSpec, ycoh: &LineSpectrum, xi: Complex64) -> Result<Complex64> {
    gf_lines(bath, ycoh, xi)
}

/// Coherent generating function written as a response to a classical force.
///
/// Only positive frequencies of the susceptibility are touched: lines that
/// pull energy out of the probe carry `n̄`, lines that push energy in carry
/// `n̄ + 1` and the transposed susceptibility.
pub fn gf_coherent_response(bath: &BathSpec, ycoh: &LineSpectrum, xi: Complex64) -> Result<Complex64> {
    check_dims(bath, ycoh)?;
    let beta = bath.beta.get();
    let mut total = Complex64::new(0.0, 0.0);
    for line in ycoh.lines() {
        let nu = line.frequency;
        let u = nu.abs();
        let chi: CMatrix = bath.chi.eval(u)?;
        let nbar = bose_occupation(beta * u)?;
        let (phase, amplitude) = if nu < 0.0 {
            (cexp_m1(Complex64::new(0.0, -u) * xi), contract(&chi, &line.weight) * nbar)
        } else {
            (cexp_m1(Complex64::new(0.0, u) * xi), contract(&chi.transpose(), &line.weight) * (nbar + 1.0))
        };
        total -= phase * amplitude;
    }
    Ok(total)
}

/// Per-line transfer rates `(ν_k, Γ_k)` at the bath temperature.
pub fn transfer_rates(bath: &BathSpec, spectrum: &LineSpectrum) -> Result<Vec<(f64, f64)>> {
    check_dims(bath, spectrum)?;
    spectrum
        .lines()
        .iter()
        .map(|l| Ok((l.frequency, contract(&std_correlator(&bath.chi, bath.beta, -l.frequency)?, &l.weight).re)))
        .collect()
}

/// Mean energy current into the probe, summed line by line.
pub fn mean_current(bath: &BathSpec, spectrum: &LineSpectrum) -> Result<f64> {
    Ok(transfer_rates(bath, spectrum)?.iter().map(|(nu, rate)| nu * rate).sum())
}

/// Extracted cumulant with its numerical diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cumulant {
    pub order: u32,
    pub value: f64,
    /// Imaginary part left over after the phase factor; zero for exact input.
    pub imag_residue: f64,
    pub error_estimate: f64,
    /// Imaginary residue is not explained by discretization error.
    pub flagged: bool,
}

const RIDDERS_LEVELS: usize = 6;
const RIDDERS_FIRST_STEP: f64 = 0.5;

fn stencil<F>(gf: &F, order: u32, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let at = |x: f64| gf(Complex64::new(x, 0.0));
    Ok(match order {
        1 => (at(h)? - at(-h)?) / (2.0 * h),
        2 => (at(h)? - 2.0 * at(0.0)? + at(-h)?) / (h * h),
        3 => (at(2.0 * h)? - 2.0 * at(h)? + 2.0 * at(-h)? - at(-2.0 * h)?) / (2.0 * h.powi(3)),
        4 => (at(2.0 * h)? - 4.0 * at(h)? + 6.0 * at(0.0)? - 4.0 * at(-h)? + at(-2.0 * h)?) / h.powi(4),
        _ => return Err(Error::InvalidArgument(format!("cumulant order must be 1..=4, got {order}"))),
    })
}

/// n-th derivative at the origin by a Ridders tableau of central differences.
/// The full tableau is always built; the entry with the smallest error
/// estimate wins.
fn derivative<F>(gf: &F, order: u32, first_step: f64) -> Result<(Complex64, f64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut h = first_step;
    let mut prev = vec![stencil(gf, order, h)?];
    let mut best = prev[0];
    let mut err = f64::INFINITY;
    for _ in 1..RIDDERS_LEVELS {
        h /= 2.0;
        let mut row = vec![stencil(gf, order, h)?];
        let mut fac = 4.0;
        for j in 1..=prev.len() {
            let next = (row[j - 1] * fac - prev[j - 1]) / (fac - 1.0);
            let errt = (next - row[j - 1]).norm().max((next - prev[j - 1]).norm());
            if errt <= err {
                err = errt;
                best = next;
            }
            row.push(next);
            fac *= 4.0;
        }
        prev = row;
    }
    Ok((best, err))
}

/// Cumulant rate `C_n = −(−i)ⁿ f̄⁽ⁿ⁾(0)` for n in 1..=4.
///
/// `omega_max` sets the step scale; pass the largest |ν| in the spectra.
pub fn cumulant<F>(gf: F, order: u32, omega_max: f64) -> Result<Cumulant>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if !(1..=4).contains(&order) {
        return Err(Error::InvalidArgument(format!("cumulant order must be 1..=4, got {order}")));
    }
    let scale = if omega_max > 0.0 && omega_max.is_finite() { omega_max } else { 1.0 };
    let (d, err) = derivative(&gf, order, RIDDERS_FIRST_STEP / scale)?;
    let c = -Complex64::new(0.0, -1.0).powu(order) * d;
    Ok(Cumulant {
        order,
        value: c.re,
        imag_residue: c.im,
        error_estimate: err,
        flagged: c.im.abs() > 1e-6 * c.re.abs() + 10.0 * err,
    })
}

/// First four cumulant rates.
pub fn cumulants<F>(gf: F, omega_max: f64) -> Result<[Cumulant; 4]>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    Ok([
        cumulant(&gf, 1, omega_max)?,
        cumulant(&gf, 2, omega_max)?,
        cumulant(&gf, 3, omega_max)?,
        cumulant(&gf, 4, omega_max)?,
    ])
}

/// Evaluate a generating function on a grid of ξ.
pub fn sample_grid<F>(gf: F, grid: &[Complex64]) -> Result<Vec<GfSample>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    grid.iter().map(|&xi| Ok(GfSample { xi, value: gf(xi)? })).collect()
}
