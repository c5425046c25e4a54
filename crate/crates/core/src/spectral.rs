//! Laplacian eigenbasis, graph Fourier transform and spectral kernels.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;
const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 100_000;

/// Ascending Laplacian eigenvalues with the matching orthonormal
/// eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralBasis {
    /// Wraps an existing decomposition. Columns of `eigenvectors` must be
    /// orthonormal and paired with `eigenvalues`; no check is made beyond
    /// dimensions and ordering.
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: DMatrix<f64>) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvectors.nrows() != n || eigenvectors.ncols() != n {
            return Err(Error::invalid(format!(
                "{n} eigenvalues but a {}x{} eigenvector matrix",
                eigenvectors.nrows(),
                eigenvectors.ncols()
            )));
        }
        if eigenvalues.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("eigenvalues must be ascending"));
        }
        Ok(SpectralBasis {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Magnitude below which an eigenvalue counts as zero:
    /// `1e-12 * max(1, largest eigenvalue)`.
    pub fn zero_threshold(&self) -> f64 {
        let top = self.eigenvalues.last().copied().unwrap_or(0.0);
        1e-12 * top.max(1.0)
    }

    /// Number of eigenvalues within [`zero_threshold`](Self::zero_threshold)
    /// of zero; the number of connected components for a Laplacian.
    pub fn null_dimension(&self) -> usize {
        let tol = self.zero_threshold();
        self.eigenvalues.iter().filter(|l| l.abs() <= tol).count()
    }

    fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len != self.n() {
            return Err(Error::invalid(format!(
                "{what} has length {len}, basis has dimension {}",
                self.n()
            )));
        }
        Ok(())
    }
}

/// Full symmetric eigendecomposition of `l`. Eigenvalues are sorted
/// ascending (stable for ties) and every eigenvector is signed so that its
/// largest-magnitude entry, first by index, is positive.
pub fn eigendecompose(l: &DMatrix<f64>) -> Result<SpectralBasis> {
    let n = l.nrows();
    if l.ncols() != n {
        return Err(Error::invalid(format!(
            "matrix is {}x{}, expected square",
            n,
            l.ncols()
        )));
    }
    if l.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    for j in 0..n {
        for i in (j + 1)..n {
            if (l[(i, j)] - l[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::invalid(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    if n == 0 {
        return Ok(SpectralBasis {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::try_new(l.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::NumericFailure("symmetric eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let mut pivot = 0;
        for i in 1..n {
            if col[i].abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        eigenvectors.set_column(dst, &(col * sign));
    }
    Ok(SpectralBasis {
        eigenvalues,
        eigenvectors,
    })
}

/// `Uᵀ s`.
pub fn gft(basis: &SpectralBasis, s: &[f64]) -> Result<Vec<f64>> {
    basis.check_len(s.len(), "signal")?;
    let v = DVector::from_column_slice(s);
    Ok(basis.eigenvectors.tr_mul(&v).data.into())
}

/// `U ŝ`.
pub fn igft(basis: &SpectralBasis, coeffs: &[f64]) -> Result<Vec<f64>> {
    basis.check_len(coeffs.len(), "coefficient vector")?;
    let v = DVector::from_column_slice(coeffs);
    Ok((&basis.eigenvectors * v).data.into())
}

/// Graph convolution `U[(Uᵀs) ⊙ (Uᵀv)]`.
pub fn graph_convolve(basis: &SpectralBasis, s: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let sh = gft(basis, s)?;
    let vh = gft(basis, v)?;
    let prod: Vec<f64> = sh.iter().zip(&vh).map(|(a, b)| a * b).collect();
    igft(basis, &prod)
}

/// Hann taper `(1 + cos(πx)) / 2` on `|x| < 1`, zero elsewhere.
pub fn hann(x: f64) -> f64 {
    if x.abs() < 1.0 {
        0.5 * (1.0 + (std::f64::consts::PI * x).cos())
    } else {
        0.0
    }
}

/// Filter values per eigenvalue index together with the cutoff that
/// produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralKernel {
    pub values: Vec<f64>,
    pub cutoff: f64,
}

impl SpectralKernel {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `‖ŵ‖∞`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `ŵᵢ = hann(λᵢ / l)`; a low-pass kernel with support `λ < l`.
pub fn hann_spectral_kernel(basis: &SpectralBasis, cutoff: f64) -> Result<SpectralKernel> {
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(Error::invalid(format!(
            "kernel cutoff must be positive and finite, got {cutoff}"
        )));
    }
    let tol = basis.zero_threshold();
    let values = basis
        .eigenvalues
        .iter()
        .map(|&lam| if lam.abs() <= tol { 1.0 } else { hann(lam / cutoff) })
        .collect();
    Ok(SpectralKernel { values, cutoff })
}

/// Threshold below which a kernel value counts as zero.
pub const KERNEL_ZERO_TOL: f64 = 1e-12;

/// Limit kernel of the spectral sifting iteration `ŝ ← (1 - ŵ) ⊙ ŝ`: one
/// where `ŵ` vanishes, zero elsewhere. Requires every value in `[0, 2)`.
pub fn spectral_sifting_limit(kernel: &SpectralKernel) -> Result<SpectralKernel> {
    if let Some((i, v)) = kernel
        .values
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v >= -KERNEL_ZERO_TOL && **v < 2.0))
    {
        return Err(Error::HypothesisViolation(format!(
            "kernel value {v} at index {i} is outside [0, 2)"
        )));
    }
    let values = kernel
        .values
        .iter()
        .map(|&v| if v.abs() <= KERNEL_ZERO_TOL { 1.0 } else { 0.0 })
        .collect();
    Ok(SpectralKernel {
        values,
        cutoff: kernel.cutoff,
    })
}

/// `igft(ŵ ⊙ gft(s))`.
pub fn apply_kernel(basis: &SpectralBasis, kernel: &SpectralKernel, s: &[f64]) -> Result<Vec<f64>> {
    basis.check_len(kernel.len(), "kernel")?;
    let mut coeffs = gft(basis, s)?;
    for (c, w) in coeffs.iter_mut().zip(&kernel.values) {
        *c *= w;
    }
    igft(basis, &coeffs)
}
