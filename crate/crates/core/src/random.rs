//! Seeded generators of random baths and spectra for self-checks.

use rand::Rng;

use crate::bath::{BathSpec, Susceptibility};
use crate::linalg::{c64, CMatrix, CVector};
use crate::spectrum::{LineSpectrum, SpectralLine};

fn random_matrix(rng: &mut impl Rng, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Bath with β ∈ [0.1, 5] and a constant or ohmic positive-definite susceptibility.
pub fn random_bath(rng: &mut impl Rng, dim: usize) -> BathSpec {
    let a = random_matrix(rng, dim);
    let amp = &a * a.adjoint() + CMatrix::identity(dim, dim).scale(0.1);
    let chi = if rng.random_bool(0.5) {
        Susceptibility::constant(amp).expect("positive definite")
    } else {
        Susceptibility::ohmic(amp, rng.random_range(0.5..3.0)).expect("positive definite")
    };
    BathSpec::new(rng.random_range(0.1..5.0), chi).expect("positive temperature")
}

/// 1 to 5 distinct frequencies with |ν| ∈ [0.1, 3] and random sign.
pub fn random_frequencies(rng: &mut impl Rng) -> Vec<f64> {
    let n = rng.random_range(1..=5);
    let mut out: Vec<f64> = Vec::with_capacity(n);
    while out.len() < n {
        let nu = rng.random_range(0.1..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        if out.iter().all(|f| (f - nu).abs() > 1e-3) {
            out.push(nu);
        }
    }
    out
}

/// Spectrum with full-rank PSD weights.
pub fn random_incoherent(rng: &mut impl Rng, dim: usize) -> LineSpectrum {
    let lines = random_frequencies(rng)
        .into_iter()
        .map(|frequency| {
            let a = random_matrix(rng, dim);
            SpectralLine { frequency, weight: &a * a.adjoint() }
        })
        .collect();
    LineSpectrum::new(dim, lines).expect("valid lines")
}

/// Spectrum with rank-one weights from random amplitudes.
pub fn random_coherent(rng: &mut impl Rng, dim: usize) -> LineSpectrum {
    let lines = random_frequencies(rng)
        .into_iter()
        .map(|nu| (nu, CVector::from_fn(dim, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))))
        .collect();
    LineSpectrum::from_amplitudes(lines).expect("valid lines")
}
