//! Discrete line spectra of the driven system's force correlators.
//!
//! A line `(ν, W)` says that the system exchanges energy quanta ν with the
//! probe, weighted by the Hermitian matrix `W_mn` over coupling channels.
//! The sign convention is fixed throughout the crate: **ν > 0 means the
//! energy goes into the probe** (e.g. the two-level emission line sits at +Ω).
//! The probe correlator that drives such a transfer is `S(−ν)`: the bath
//! absorbs energy ν.
//!
//! The incoherent spectrum carries the full correlator ⟨Y_m Y_n⟩, the coherent
//! one only the product of averages ⟨Y_m⟩⟨Y_n⟩ and is rank one per line.

use crate::error::{Error, Result};
use crate::linalg::{herm_eigendecompose, hermitian_deviation, norm, CMatrix, CVector};

const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLine {
    /// Energy delivered to the probe per event.
    pub frequency: f64,
    /// Hermitian PSD weight over coupling indices.
    pub weight: CMatrix,
}

/// Finite set of lines with distinct, non-zero frequencies, kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSpectrum {
    dim: usize,
    lines: Vec<SpectralLine>,
}

fn check_weight(dim: usize, line: &SpectralLine) -> Result<()> {
    let w = &line.weight;
    if w.nrows() != dim || w.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: w.nrows() });
    }
    if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidSpectrum(format!("non-finite weight at ν = {}", line.frequency)));
    }
    let scale = norm(w).max(1.0);
    let dev = hermitian_deviation(w);
    if dev > WEIGHT_TOL * scale {
        return Err(Error::InvalidSpectrum(format!(
            "weight at ν = {} is not Hermitian (‖W − W†‖ = {dev:.3e})",
            line.frequency
        )));
    }
    let lowest = herm_eigendecompose(w)?.values[0];
    if lowest < -WEIGHT_TOL * scale {
        return Err(Error::InvalidSpectrum(format!(
            "weight at ν = {} has negative eigenvalue {lowest:.3e}",
            line.frequency
        )));
    }
    Ok(())
}

impl LineSpectrum {
    pub fn new(dim: usize, mut lines: Vec<SpectralLine>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpectrum("coupling dimension must be positive".into()));
        }
        for line in &lines {
            if line.frequency == 0.0 || !line.frequency.is_finite() {
                return Err(Error::InvalidSpectrum(format!("line frequency must be finite and non-zero, got {}", line.frequency)));
            }
            check_weight(dim, line)?;
        }
        lines.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        if let Some(w) = lines.windows(2).find(|w| w[0].frequency == w[1].frequency) {
            return Err(Error::InvalidSpectrum(format!("two lines share frequency {}", w[0].frequency)));
        }
        Ok(Self { dim, lines })
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, lines: Vec::new() }
    }

    /// Single-channel spectrum from (ν, weight) pairs.
    pub fn scalar(lines: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            1,
            lines
                .iter()
                .map(|&(frequency, w)| SpectralLine { frequency, weight: CMatrix::from_element(1, 1, w.into()) })
                .collect(),
        )
    }

    /// Coherent spectrum from force amplitudes: a line at ν with amplitude
    /// vector `a` has weight `W_mn = conj(a_m) a_n`.
    pub fn from_amplitudes(lines: Vec<(f64, CVector)>) -> Result<Self> {
        let dim = lines.first().map(|(_, a)| a.len()).unwrap_or(1);
        Self::new(
            dim,
            lines
                .into_iter()
                .map(|(frequency, a)| SpectralLine { frequency, weight: a.conjugate() * a.transpose() })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lines(&self) -> &[SpectralLine] {
        &self.lines
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    /// Largest |ν|, or `None` for an empty spectrum.
    pub fn max_frequency(&self) -> Option<f64> {
        self.lines.iter().map(|l| l.frequency.abs()).reduce(f64::max)
    }

    pub fn weight_at(&self, frequency: f64) -> Option<&CMatrix> {
        self.lines
            .binary_search_by(|l| l.frequency.total_cmp(&frequency))
            .ok()
            .map(|i| &self.lines[i].weight)
    }

    /// Every line has rank ≤ 1 (what a coherent spectrum must satisfy).
    pub fn is_rank_one(&self, tol: f64) -> bool {
        self.lines.iter().all(|l| {
            let vals = herm_eigendecompose(&l.weight).map(|e| e.values).unwrap_or_default();
            let top = vals.last().copied().unwrap_or(0.0);
            vals.len() < 2 || vals[vals.len() - 2] <= tol * top.max(1e-300)
        })
    }

    /// Sum of two spectra; weights at shared frequencies add.
    pub fn merged(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut lines = self.lines.clone();
        for line in &other.lines {
            match lines.iter_mut().find(|l| l.frequency == line.frequency) {
                Some(l) => l.weight += &line.weight,
                None => lines.push(line.clone()),
            }
        }
        Self::new(self.dim, lines)
    }

    /// Mirror image: every line moved to −ν with its weight transposed.
    /// Forces built from Hermitian operators give spectra equal to their own
    /// mirror image.
    pub fn reflected(&self) -> Self {
        let mut lines: Vec<SpectralLine> = self
            .lines
            .iter()
            .map(|l| SpectralLine { frequency: -l.frequency, weight: l.weight.transpose() })
            .collect();
        lines.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        Self { dim: self.dim, lines }
    }

    /// Line-by-line difference `W_self − W_other` over the union of
    /// frequencies. Frequencies are matched exactly, so identical spectra
    /// give exact zeros.
    pub fn difference(&self, other: &Self) -> Result<Vec<(f64, CMatrix)>> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut out: Vec<(f64, CMatrix)> = self.lines.iter().map(|l| (l.frequency, l.weight.clone())).collect();
        for line in &other.lines {
            match out.iter_mut().find(|(f, _)| *f == line.frequency) {
                Some((_, w)) => *w -= &line.weight,
                None => out.push((line.frequency, -line.weight.clone())),
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(out)
    }
}

/// `Σ_mn A_mn B_mn`, the channel contraction used by every flow formula.
pub fn contract(a: &CMatrix, b: &CMatrix) -> num_complex::Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}
