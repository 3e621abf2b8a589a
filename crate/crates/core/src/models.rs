//! The two worked examples: a resonantly driven two-level heat engine and a
//! driven harmonic oscillator, each as a spectrum builder plus a closed form.

use num_complex::Complex64;

use crate::bath::{bose_occupation, BathSpec};
use crate::error::{Error, Result};
use crate::linalg::{c64, lindblad_generator, steady_state, CMatrix, DensityMatrix};
use crate::rflow::RenyiOrder;
use crate::spectrum::{LineSpectrum, SpectralLine};

/// Two-level system with splitting Ω, a probe bath and optional further
/// baths, driven on resonance with Rabi frequency ΩR.
#[derive(Debug, Clone, PartialEq)]
pub struct QheSpec {
    pub splitting: f64,
    pub probe: BathSpec,
    pub other_baths: Vec<BathSpec>,
    pub rabi: f64,
}

/// Excitation and relaxation rates induced by one bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathRates {
    pub up: f64,
    pub down: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QheRates {
    pub probe: BathRates,
    pub others: Vec<BathRates>,
}

impl QheRates {
    pub fn total(&self) -> BathRates {
        self.others.iter().fold(self.probe, |acc, r| BathRates { up: acc.up + r.up, down: acc.down + r.down })
    }

    fn total_without_probe(&self) -> BathRates {
        self.others.iter().fold(BathRates { up: 0.0, down: 0.0 }, |acc, r| BathRates { up: acc.up + r.up, down: acc.down + r.down })
    }
}

fn bath_rates(bath: &BathSpec, splitting: f64) -> Result<BathRates> {
    if bath.dim() != 1 {
        return Err(Error::InvalidModel(format!("two-level baths couple through one channel, got dimension {}", bath.dim())));
    }
    let chi = bath.chi.eval(splitting)?[(0, 0)];
    if chi.re < 0.0 || chi.im.abs() > 1e-12 * chi.re.abs().max(1.0) {
        return Err(Error::InvalidModel(format!("susceptibility at Ω must be real and non-negative, got {chi}")));
    }
    let nbar = bose_occupation(bath.beta.get() * splitting)?;
    let rates = BathRates { up: nbar * chi.re, down: (nbar + 1.0) * chi.re };
    if !rates.up.is_finite() || !rates.down.is_finite() {
        return Err(Error::InvalidModel("bath rates are not finite".into()));
    }
    Ok(rates)
}

impl QheSpec {
    pub fn new(splitting: f64, probe: BathSpec, other_baths: Vec<BathSpec>, rabi: f64) -> Result<Self> {
        if !(splitting > 0.0) || !splitting.is_finite() {
            return Err(Error::InvalidModel(format!("splitting must be positive, got {splitting}")));
        }
        if !(rabi >= 0.0) || !rabi.is_finite() {
            return Err(Error::InvalidModel(format!("Rabi frequency must be non-negative, got {rabi}")));
        }
        let spec = Self { splitting, probe, other_baths, rabi };
        spec.rates()?;
        Ok(spec)
    }

    /// Γ↑ = n̄(βΩ)χ̃(Ω) and Γ↓ = (n̄ + 1)χ̃(Ω) for every bath, probe first.
    pub fn rates(&self) -> Result<QheRates> {
        Ok(QheRates {
            probe: bath_rates(&self.probe, self.splitting)?,
            others: self.other_baths.iter().map(|b| bath_rates(b, self.splitting)).collect::<Result<_>>()?,
        })
    }
}

/// Populations and coherence of the two-level system; index 0 is the ground
/// state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QheSteadyState {
    pub p0: f64,
    pub p1: f64,
    pub rho01: Complex64,
}

impl QheSteadyState {
    pub fn new(p0: f64, p1: f64, rho01: Complex64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p0) || !(0.0..=1.0).contains(&p1) || (p0 + p1 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDensityMatrix(format!("populations ({p0}, {p1}) do not form a distribution")));
        }
        if rho01.norm_sqr() > p0 * p1 + 1e-12 {
            return Err(Error::InvalidDensityMatrix(format!("|ρ01|² = {} exceeds p0·p1 = {}", rho01.norm_sqr(), p0 * p1)));
        }
        Ok(Self { p0, p1, rho01 })
    }

    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: rho.dim() });
        }
        let m = rho.matrix();
        Self::new(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)])
    }

    pub fn coherence_sq(&self) -> f64 {
        self.rho01.norm_sqr()
    }
}

fn lowering() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)])
}

/// Rotating-frame generator with drive `(ΩR/2)σx` and the given total rates.
pub fn qhe_generator(rabi: f64, rates: BathRates) -> CMatrix {
    let sx = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]);
    let sm = lowering();
    let sp = sm.adjoint();
    lindblad_generator(&sx.scale(rabi / 2.0), &[(rates.down, sm), (rates.up, sp)])
}

fn solve(rabi: f64, rates: BathRates) -> Result<QheSteadyState> {
    if rates.up + rates.down <= 0.0 {
        return Err(Error::NoUniqueSteadyState("no dissipative channel".into()));
    }
    QheSteadyState::from_density(&steady_state(&qhe_generator(rabi, rates))?)
}

/// Steady state with every bath, the probe included.
pub fn qhe_steady_state(spec: &QheSpec) -> Result<QheSteadyState> {
    solve(spec.rabi, spec.rates()?.total())
}

/// Steady state set by the other baths alone: the zeroth-order state around
/// which the probe is treated perturbatively.
pub fn qhe_steady_state_without_probe(spec: &QheSpec) -> Result<QheSteadyState> {
    solve(spec.rabi, spec.rates()?.total_without_probe())
}

/// Force spectra seen by the probe. Emission (+Ω) carries p1, absorption
/// (−Ω) carries p0, and the coherent part carries |ρ01|² on both lines.
pub fn qhe_spectra(spec: &QheSpec, steady: &QheSteadyState) -> Result<(LineSpectrum, LineSpectrum)> {
    let w = spec.splitting;
    let ycal = LineSpectrum::scalar(&[(w, steady.p1), (-w, steady.p0)])?;
    let c = steady.coherence_sq();
    let ycoh = if c > 0.0 { LineSpectrum::scalar(&[(w, c), (-w, c)])? } else { LineSpectrum::empty(1) };
    Ok((ycal, ycoh))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcsPart {
    Incoherent,
    Coherent,
}

/// Generating function of the heat engine at β* = Mβ and ξ* = iβ(M − 1),
/// written in terms of the probe rates at the base temperature.
pub fn qhe_closed_fcs(spec: &QheSpec, steady: &QheSteadyState, order: RenyiOrder, part: FcsPart) -> Result<Complex64> {
    let m = order.get();
    let x = spec.probe.beta.get() * spec.splitting;
    let r = spec.rates()?.probe;
    let bracket = match part {
        FcsPart::Incoherent => r.down * steady.p1 - r.up * steady.p0,
        FcsPart::Coherent => (r.down - r.up) * steady.coherence_sq(),
    };
    let value = ((m - 1.0) * x).exp_m1() * bose_occupation(m * x)? / bose_occupation(x)? * bracket;
    Ok(Complex64::new(value, 0.0))
}

/// Closed-form Rényi flow of the heat engine,
/// `M n̄(MβΩ) / (n̄((M−1)βΩ) n̄(βΩ)) · (p1Γ↓ − p0Γ↑ − (Γ↓ − Γ↑)|ρ01|²)`.
pub fn qhe_closed_rflow(spec: &QheSpec, steady: &QheSteadyState, order: RenyiOrder) -> Result<f64> {
    let m = order.get();
    if m == 1.0 {
        return Err(Error::OrderIsOne);
    }
    let x = spec.probe.beta.get() * spec.splitting;
    let r = spec.rates()?.probe;
    let bracket = steady.p1 * r.down - steady.p0 * r.up - (r.down - r.up) * steady.coherence_sq();
    Ok(m * bose_occupation(m * x)? / (bose_occupation((m - 1.0) * x)? * bose_occupation(x)?) * bracket)
}

/// Harmonic oscillator at ω0 with thermal-like occupation at T′ and a
/// classical drive `⟨a(t)⟩ = a₊e^{iΩt} + a₋e^{−iΩt}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorSpec {
    pub omega0: f64,
    pub drive_frequency: f64,
    pub effective_temperature: f64,
    pub drive_plus: Complex64,
    pub drive_minus: Complex64,
    /// Replaces n̄(ω0/T′) by an arbitrary occupation.
    pub occupation_override: Option<f64>,
    /// Allows ω0 = Ω, merging the drive lines into the thermal ones.
    pub degenerate: bool,
}

impl OscillatorSpec {
    pub fn new(omega0: f64, drive_frequency: f64, effective_temperature: f64, drive_plus: Complex64, drive_minus: Complex64) -> Result<Self> {
        let spec = Self {
            omega0,
            drive_frequency,
            effective_temperature,
            drive_plus,
            drive_minus,
            occupation_override: None,
            degenerate: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("ω0", self.omega0), ("Ω", self.drive_frequency), ("T′", self.effective_temperature)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidModel(format!("{name} must be positive, got {v}")));
            }
        }
        if self.omega0 == self.drive_frequency && !self.degenerate {
            return Err(Error::InvalidModel("ω0 = Ω needs the degenerate flag".into()));
        }
        if let Some(n) = self.occupation_override {
            if !(n >= 0.0) || !n.is_finite() {
                return Err(Error::InvalidModel(format!("occupation must be non-negative, got {n}")));
            }
        }
        Ok(())
    }

    pub fn occupation(&self) -> Result<f64> {
        match self.occupation_override {
            Some(n) => Ok(n),
            None => bose_occupation(self.omega0 / self.effective_temperature),
        }
    }
}

/// Oscillator spectra: thermal lines at ±ω0 (n̄′ into the probe, n̄′ + 1 out
/// of it) plus the drive lines at ±Ω, which the coherent spectrum repeats.
pub fn ho_spectra(spec: &OscillatorSpec) -> Result<(LineSpectrum, LineSpectrum)> {
    spec.validate()?;
    let n = spec.occupation()?;
    let thermal = LineSpectrum::scalar(&[(spec.omega0, n), (-spec.omega0, n + 1.0)])?;
    let mut drive = Vec::new();
    for (nu, a) in [(spec.drive_frequency, spec.drive_plus), (-spec.drive_frequency, spec.drive_minus)] {
        if a.norm_sqr() > 0.0 {
            drive.push(SpectralLine { frequency: nu, weight: CMatrix::from_element(1, 1, c64(a.norm_sqr(), 0.0)) });
        }
    }
    let ycoh = LineSpectrum::new(1, drive)?;
    let ycal = thermal.merged(&ycoh)?;
    Ok((ycal, ycoh))
}

/// Closed-form oscillator flow
/// `M n̄(Mβω0) χ̃(ω0) / (n̄((M−1)βω0) n̄(βω0)) · (n̄′ − n̄(βω0))`.
/// The drive does not enter.
pub fn ho_closed_rflow(spec: &OscillatorSpec, bath: &BathSpec, order: RenyiOrder) -> Result<f64> {
    spec.validate()?;
    let m = order.get();
    if m == 1.0 {
        return Err(Error::OrderIsOne);
    }
    if bath.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: bath.dim() });
    }
    let x = bath.beta.get() * spec.omega0;
    let chi = bath.chi.eval(spec.omega0)?[(0, 0)].re;
    let pref = m * bose_occupation(m * x)? * chi / (bose_occupation((m - 1.0) * x)? * bose_occupation(x)?);
    Ok(pref * (spec.occupation()? - bose_occupation(x)?))
}
