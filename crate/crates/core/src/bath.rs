//! Thermal probe environment.
//!
//! Units: ħ = k_B = 1, so frequencies are energies and β is an inverse energy.
//!
//! A bath is fixed by β and its dynamical susceptibility χ̃_mn(ω). All two-point
//! correlators follow from the (generalized) KMS relation
//! `S^{N,M}(ω) = e^{βNω} n̄(Mβω) χ̃(ω)`, with `S^{0,1}` the ordinary spectral density.
//! Here `S(ω)` at ω > 0 is the rate at which the bath *gives* energy ω.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, norm, CMatrix};

/// β = 1/T, finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct InverseTemperature(f64);

impl InverseTemperature {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta > 0.0 {
            Ok(Self(beta))
        } else {
            Err(Error::InvalidTemperature(beta))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Rescaled inverse temperature Mβ.
    pub fn scaled(self, factor: f64) -> Result<Self> {
        Self::new(self.0 * factor)
    }
}

/// How χ̃ depends on frequency.
#[derive(Debug, Clone, PartialEq)]
pub enum SusceptibilityFamily {
    /// χ̃(ω) = C for ω > 0.
    Constant(CMatrix),
    /// χ̃(ω) = A·ω·e^{−ω/ω_c} for ω > 0.
    Ohmic { amplitude: CMatrix, cutoff: f64 },
    /// Piecewise-linear interpolation of positive-frequency samples.
    Tabulated { omegas: Vec<f64>, values: Vec<CMatrix> },
}

/// Temperature-independent dynamical susceptibility χ̃_mn(ω).
///
/// Each family specifies ω > 0; negative frequencies follow from
/// `χ̃(−ω) = −χ̃(ω)ᵀ`, which is what makes the KMS detailed-balance relation
/// `S(−ω) = e^{βω} S(ω)ᵀ` hold.
#[derive(Debug, Clone, PartialEq)]
pub struct Susceptibility {
    family: SusceptibilityFamily,
    dim: usize,
}

const HERMITIAN_TOL: f64 = 1e-12;

fn check_hermitian(m: &CMatrix, what: &str) -> Result<()> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::InvalidSusceptibility(format!("{what} must be a non-empty square matrix")));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidSusceptibility(format!("{what} has non-finite entries")));
    }
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL * norm(m).max(1.0) {
        return Err(Error::InvalidSusceptibility(format!("{what} is not Hermitian (‖χ − χ†‖ = {dev:.3e})")));
    }
    Ok(())
}

impl Susceptibility {
    pub fn constant(value: CMatrix) -> Result<Self> {
        check_hermitian(&value, "constant susceptibility")?;
        let dim = value.nrows();
        Ok(Self { family: SusceptibilityFamily::Constant(value), dim })
    }

    /// Single coupling channel with χ̃ = `value` at positive frequency.
    pub fn scalar(value: f64) -> Result<Self> {
        Self::constant(CMatrix::from_element(1, 1, value.into()))
    }

    pub fn ohmic(amplitude: CMatrix, cutoff: f64) -> Result<Self> {
        check_hermitian(&amplitude, "ohmic amplitude")?;
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::InvalidSusceptibility(format!("ohmic cutoff must be positive, got {cutoff}")));
        }
        let dim = amplitude.nrows();
        Ok(Self { family: SusceptibilityFamily::Ohmic { amplitude, cutoff }, dim })
    }

    pub fn tabulated(omegas: Vec<f64>, values: Vec<CMatrix>) -> Result<Self> {
        if omegas.len() < 2 || omegas.len() != values.len() {
            return Err(Error::InvalidSusceptibility(
                "tabulated susceptibility needs at least two (omega, value) samples".into(),
            ));
        }
        if omegas[0] <= 0.0 || omegas.windows(2).any(|w| !(w[1] > w[0])) || omegas.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidSusceptibility(
                "tabulated frequencies must be positive and strictly increasing".into(),
            ));
        }
        for v in &values {
            check_hermitian(v, "tabulated value")?;
        }
        let dim = values[0].nrows();
        if values.iter().any(|v| v.nrows() != dim) {
            return Err(Error::InvalidSusceptibility("tabulated values differ in dimension".into()));
        }
        Ok(Self { family: SusceptibilityFamily::Tabulated { omegas, values }, dim })
    }

    pub fn family(&self) -> &SusceptibilityFamily {
        &self.family
    }

    /// Name used in configuration files.
    pub fn family_name(&self) -> &'static str {
        match self.family {
            SusceptibilityFamily::Constant(_) => "constant",
            SusceptibilityFamily::Ohmic { .. } => "ohmic",
            SusceptibilityFamily::Tabulated { .. } => "tabulated",
        }
    }

    /// Number of coupling operators.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The same susceptibility multiplied by a non-negative factor.
    pub fn scaled(&self, factor: f64) -> Self {
        let family = match &self.family {
            SusceptibilityFamily::Constant(c) => SusceptibilityFamily::Constant(c.scale(factor)),
            SusceptibilityFamily::Ohmic { amplitude, cutoff } => {
                SusceptibilityFamily::Ohmic { amplitude: amplitude.scale(factor), cutoff: *cutoff }
            }
            SusceptibilityFamily::Tabulated { omegas, values } => SusceptibilityFamily::Tabulated {
                omegas: omegas.clone(),
                values: values.iter().map(|v| v.scale(factor)).collect(),
            },
        };
        Self { family, dim: self.dim }
    }

    fn positive(&self, omega: f64) -> Result<CMatrix> {
        match &self.family {
            SusceptibilityFamily::Constant(c) => Ok(c.clone()),
            SusceptibilityFamily::Ohmic { amplitude, cutoff } => Ok(amplitude.scale(omega * (-omega / cutoff).exp())),
            SusceptibilityFamily::Tabulated { omegas, values } => {
                let (min, max) = (omegas[0], *omegas.last().expect("non-empty"));
                if omega < min || omega > max {
                    return Err(Error::OutOfTable { omega, min, max });
                }
                let k = omegas.partition_point(|&w| w <= omega).clamp(1, omegas.len() - 1);
                let t = (omega - omegas[k - 1]) / (omegas[k] - omegas[k - 1]);
                Ok(values[k - 1].scale(1.0 - t) + values[k].scale(t))
            }
        }
    }

    /// χ̃(ω); ω = 0 is rejected.
    pub fn eval(&self, omega: f64) -> Result<CMatrix> {
        if omega == 0.0 || !omega.is_finite() {
            return Err(Error::ZeroFrequency);
        }
        if omega > 0.0 {
            self.positive(omega)
        } else {
            Ok(-self.positive(-omega)?.transpose())
        }
    }
}

/// A thermal environment: temperature plus susceptibility.
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    pub beta: InverseTemperature,
    pub chi: Susceptibility,
}

impl BathSpec {
    pub fn new(beta: f64, chi: Susceptibility) -> Result<Self> {
        Ok(Self { beta: InverseTemperature::new(beta)?, chi })
    }

    /// Same susceptibility at inverse temperature Mβ.
    pub fn rescaled(&self, order: f64) -> Result<Self> {
        Ok(Self { beta: self.beta.scaled(order)?, chi: self.chi.clone() })
    }

    pub fn dim(&self) -> usize {
        self.chi.dim()
    }
}

/// Bose function n̄(x) = 1/(eˣ − 1) of the scaled frequency x = βω.
pub fn bose_occupation(x: f64) -> Result<f64> {
    if x == 0.0 || x.is_nan() {
        return Err(Error::ZeroFrequency);
    }
    Ok(1.0 / x.exp_m1())
}

/// Spectral density `S^{(β)}(ω) = n̄(βω) χ̃(ω)`.
pub fn std_correlator(chi: &Susceptibility, beta: InverseTemperature, omega: f64) -> Result<CMatrix> {
    let nbar = bose_occupation(beta.get() * omega)?;
    Ok(chi.eval(omega)?.scale(nbar))
}

/// Multi-replica correlator `S^{N,M}(ω) = e^{βNω} n̄(Mβω) χ̃(ω)`.
///
/// `replicas` (M) may be any positive real for closed-form use; `shift` (N)
/// must not exceed it.
pub fn gen_correlator(
    chi: &Susceptibility,
    beta: InverseTemperature,
    omega: f64,
    shift: u32,
    replicas: f64,
) -> Result<CMatrix> {
    if !(replicas > 0.0) || !replicas.is_finite() {
        return Err(Error::NonPositiveOrder(replicas));
    }
    if f64::from(shift) > replicas {
        return Err(Error::InvalidArgument(format!("N = {shift} exceeds M = {replicas}")));
    }
    let b = beta.get();
    let weight = (b * f64::from(shift) * omega).exp() * bose_occupation(replicas * b * omega)?;
    Ok(chi.eval(omega)?.scale(weight))
}
