//! Small dense complex linear algebra.
//!
//! Everything here works on `DMatrix<Complex64>` of dimension at most a few
//! dozen: Hermitian eigendecomposition, PSD matrix powers, spectra of
//! non-Hermitian generators and steady states of Lindblad superoperators.
//!
//! Superoperators act on row-major vectorized density matrices,
//! `vec(ρ)[i·d + j] = ρ[i, j]`, so that `vec(A ρ B) = (A ⊗ Bᵀ) vec(ρ)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance on ‖H − H†‖ accepted by [`herm_eigendecompose`], relative to max(1, ‖H‖).
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues below this are set to zero before fractional powers.
pub const PSD_CLAMP: f64 = 1e-15;
/// Two eigenvalues closer than this (relative to max(1, ‖L‖)) are a crossing.
pub const CROSSING_TOL: f64 = 1e-9;
/// Kernel threshold for [`steady_state`], relative to ‖L‖.
pub const KERNEL_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `e^z − 1` without cancellation for small |z|.
pub fn cexp_m1(z: Complex64) -> Complex64 {
    let half_sin = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * z.im.cos() - 2.0 * half_sin * half_sin, z.re.exp() * z.im.sin())
}

/// Frobenius norm.
pub fn norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius norm of `H − H†`.
pub fn hermitian_deviation(h: &CMatrix) -> f64 {
    norm(&(h - h.adjoint()))
}

pub fn is_hermitian(h: &CMatrix, tol: f64) -> bool {
    h.is_square() && hermitian_deviation(h) <= tol
}

fn check_square_finite(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Eigendecomposition `H = V diag(λ) V†` with ascending real eigenvalues.
#[derive(Debug, Clone)]
pub struct HermEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermEigen {
    /// `V diag(g(λ)) V†`.
    pub fn reconstruct_with(&self, g: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let s = g(lam);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|x| x)
    }
}

pub fn herm_eigendecompose(h: &CMatrix) -> Result<HermEigen> {
    check_square_finite(h)?;
    let tolerance = HERMITIAN_TOL * norm(h).max(1.0);
    let deviation = hermitian_deviation(h);
    if deviation > tolerance {
        return Err(Error::NotHermitian { deviation, tolerance });
    }
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(h.nrows(), h.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermEigen { values, vectors })
}

/// A validated density matrix: Hermitian, positive semidefinite, unit trace
/// (all within 1e-12).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub const TOL: f64 = 1e-12;

    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_square_finite(&matrix)?;
        let dev = hermitian_deviation(&matrix);
        if dev > Self::TOL {
            return Err(Error::InvalidDensityMatrix(format!("‖ρ − ρ†‖ = {dev:.3e}")));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > Self::TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace = {tr}")));
        }
        let eig = herm_eigendecompose(&matrix)?;
        if let Some(&lo) = eig.values.first() {
            if lo < -Self::TOL {
                return Err(Error::InvalidDensityMatrix(format!("eigenvalue {lo:.3e} < 0")));
            }
        }
        Ok(Self(matrix))
    }

    /// Diagonal density matrix from probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let n = probs.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| if i == j { c64(probs[i], 0.0) } else { c64(0.0, 0.0) }))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Rényi moment Tr ρ^M = Σ p_n^M.
    pub fn renyi_moment(&self, order: f64) -> Result<f64> {
        Ok(matrix_power_psd(self, order)?.trace().re)
    }
}

/// `ρ^M` through the eigenbasis, with eigenvalues below [`PSD_CLAMP`] set to zero.
pub fn matrix_power_psd(rho: &DensityMatrix, order: f64) -> Result<CMatrix> {
    if !(order > 0.0) || !order.is_finite() {
        return Err(Error::NonPositiveOrder(order));
    }
    let eig = herm_eigendecompose(rho.matrix())?;
    Ok(eig.reconstruct_with(|lam| if lam < PSD_CLAMP { 0.0 } else { lam.powf(order) }))
}

/// All eigenvalues of a general complex matrix, read off the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    check_square_finite(m)?;
    let (_, t) = m.clone().schur().unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Result of picking one eigenvalue out of a non-Hermitian spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectedEigenvalue {
    pub value: Complex64,
    /// Another eigenvalue lies within [`CROSSING_TOL`]; the choice is not reliable.
    pub ambiguous: bool,
}

fn crossing_scale(m: &CMatrix) -> f64 {
    CROSSING_TOL * norm(m).max(1.0)
}

fn select(spectrum: &[Complex64], idx: usize, tol: f64) -> SelectedEigenvalue {
    let value = spectrum[idx];
    let ambiguous = spectrum
        .iter()
        .enumerate()
        .any(|(i, z)| i != idx && (z - value).norm() < tol);
    SelectedEigenvalue { value, ambiguous }
}

/// Eigenvalue with the largest real part; eigenvalues tied in real part are
/// resolved by proximity to `anchor`.
pub fn dominant_eigenvalue(l: &CMatrix, anchor: Complex64) -> Result<SelectedEigenvalue> {
    let spectrum = eigenvalues(l)?;
    if spectrum.is_empty() {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let tol = crossing_scale(l);
    let top = spectrum.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let idx = (0..spectrum.len())
        .filter(|&i| spectrum[i].re >= top - tol)
        .min_by(|&a, &b| (spectrum[a] - anchor).norm().total_cmp(&(spectrum[b] - anchor).norm()))
        .expect("at least one candidate");
    Ok(select(&spectrum, idx, tol))
}

/// Eigenvalue closest to `anchor`; used for branch continuation.
pub fn nearest_eigenvalue(l: &CMatrix, anchor: Complex64) -> Result<SelectedEigenvalue> {
    let spectrum = eigenvalues(l)?;
    if spectrum.is_empty() {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let idx = (0..spectrum.len())
        .min_by(|&a, &b| (spectrum[a] - anchor).norm().total_cmp(&(spectrum[b] - anchor).norm()))
        .expect("non-empty");
    Ok(select(&spectrum, idx, crossing_scale(l)))
}

/// Right null vector of `m`: the right singular vector of the smallest
/// singular value. Returns (vector, smallest, second smallest singular value).
pub fn null_vector(m: &CMatrix) -> (CVector, f64, f64) {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let k = order[0];
    let vec = CVector::from_fn(n, |i, _| v_t[(k, i)].conj());
    let second = order.get(1).map(|&i| svd.singular_values[i]).unwrap_or(f64::INFINITY);
    (vec, svd.singular_values[k], second)
}

/// Right eigenvector for a known eigenvalue.
pub fn eigenvector(m: &CMatrix, lambda: Complex64) -> CVector {
    let shifted = m - CMatrix::identity(m.nrows(), m.ncols()) * lambda;
    null_vector(&shifted).0
}

pub fn vectorize(rho: &CMatrix) -> CVector {
    let d = rho.nrows();
    CVector::from_fn(d * d, |k, _| rho[(k / d, k % d)])
}

pub fn unvectorize(v: &CVector) -> Result<CMatrix> {
    let d = (v.len() as f64).sqrt().round() as usize;
    if d * d != v.len() {
        return Err(Error::InvalidArgument(format!("length {} is not a square", v.len())));
    }
    Ok(CMatrix::from_fn(d, d, |i, j| v[i * d + j]))
}

/// Superoperator of `ρ ↦ A ρ B`.
pub fn sandwich(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(&b.transpose())
}

/// Lindblad generator `−i[H, ·] + Σ γ (L · L† − ½{L†L, ·})`.
pub fn lindblad_generator(h: &CMatrix, jumps: &[(f64, CMatrix)]) -> CMatrix {
    let d = h.nrows();
    let id = CMatrix::identity(d, d);
    let i = c64(0.0, 1.0);
    let mut gen = (sandwich(h, &id) - sandwich(&id, h)) * (-i);
    for (rate, l) in jumps {
        let ldl = l.adjoint() * l;
        gen += (sandwich(l, &l.adjoint()) - (sandwich(&ldl, &id) + sandwich(&id, &ldl)).scale(0.5))
            .scale(*rate);
    }
    gen
}

/// Unique steady state of a superoperator acting on vectorized density matrices.
pub fn steady_state(l: &CMatrix) -> Result<DensityMatrix> {
    check_square_finite(l)?;
    let scale = norm(l);
    if scale == 0.0 {
        return Err(Error::NoUniqueSteadyState("generator is zero".into()));
    }
    let (v, smallest, second) = null_vector(l);
    if smallest > KERNEL_TOL * scale {
        return Err(Error::NoUniqueSteadyState(format!(
            "smallest singular value {smallest:.3e} is not a kernel"
        )));
    }
    if second <= KERNEL_TOL * scale {
        return Err(Error::NoUniqueSteadyState(format!(
            "kernel is at least two-dimensional (σ₂ = {second:.3e})"
        )));
    }
    let m = unvectorize(&v)?;
    let tr = m.trace();
    if tr.norm() < 1e-12 {
        return Err(Error::NoUniqueSteadyState("kernel vector has zero trace".into()));
    }
    let m = m / tr;
    let m = (&m + m.adjoint()).scale(0.5);
    DensityMatrix::new(m)
}
