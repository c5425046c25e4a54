//! Distance-windowed averaging operators `W = B·B`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::distances::DistanceMatrix;
use crate::error::{Error, Result};
use crate::sifting::{AveragingOperator, OperatorDescriptor};
use crate::spectral::hann;

/// Maximum number of symmetric Sinkhorn sweeps.
pub const SINKHORN_MAX_SWEEPS: usize = 10_000;
/// Largest accepted deviation of a row sum from 1 in symmetrized mode.
pub const SINKHORN_TOL: f64 = 1e-10;
/// Sweeps continue until this deviation is reached, if it can be.
const SINKHORN_TARGET: f64 = 1e-13;
/// `Storage::Auto` picks the sparse layout at or below this fill ratio.
pub const SPARSE_FILL_RATIO: f64 = 0.25;

/// `l = 2ν · extent / k`.
pub fn db_window_length(extent: f64, extrema: usize, nu: f64) -> Result<f64> {
    if extrema < 2 {
        return Err(Error::OuterLoopTerminal { extrema });
    }
    if !(extent.is_finite() && extent > 0.0) {
        return Err(Error::invalid(format!("domain extent must be positive, got {extent}")));
    }
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::invalid(format!("nu must be positive, got {nu}")));
    }
    Ok(2.0 * nu * extent / extrema as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WindowMode {
    /// `B = D⁻¹K` with `K = hann(C / l)`: each row normalized to sum 1.
    #[default]
    RowStochastic,
    /// `B = XKX` with `X` diagonal, chosen so `B` is doubly stochastic.
    Symmetrized,
}

impl WindowMode {
    pub fn name(self) -> &'static str {
        match self {
            WindowMode::RowStochastic => "row_stochastic",
            WindowMode::Symmetrized => "symmetrized",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Storage {
    #[default]
    Auto,
    Dense,
    Sparse,
}

#[derive(Debug, Clone)]
struct Csr {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    fn mul(&self, s: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let (a, b) = (self.offsets[i], self.offsets[i + 1]);
            *o = self.cols[a..b]
                .iter()
                .zip(&self.vals[a..b])
                .map(|(&j, v)| v * s[j])
                .sum();
        }
    }
}

#[derive(Debug, Clone)]
enum Base {
    Dense(DMatrix<f64>),
    Sparse(Csr),
}

/// The base window matrix `B`; applies `W s = B (B s)` without forming `W`.
#[derive(Debug, Clone)]
pub struct WindowOperator {
    base: Base,
    n: usize,
    nnz: usize,
    window_length: f64,
    mode: WindowMode,
    pub(crate) nu: Option<f64>,
    pub(crate) experimental: bool,
}

/// Builds `B` from `C` with [`Storage::Auto`].
pub fn build_window_operator(c: &DistanceMatrix, l: f64, mode: WindowMode) -> Result<WindowOperator> {
    build_window_operator_with(c, l, mode, Storage::Auto)
}

pub fn build_window_operator_with(
    c: &DistanceMatrix,
    l: f64,
    mode: WindowMode,
    storage: Storage,
) -> Result<WindowOperator> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::invalid(format!("window length must be positive, got {l}")));
    }
    let n = c.n();
    // Row-major triplets of the raw kernel hann(C / l), restricted to C < l.
    let mut offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    offsets.push(0);
    for i in 0..n {
        let row = c.row(i);
        let mut sum = 0.0;
        for (j, &d) in row.iter().enumerate() {
            let w = hann(d / l);
            if w > 0.0 {
                cols.push(j);
                vals.push(w);
                sum += w;
            }
        }
        if !(sum > 0.0) {
            return Err(Error::WindowSupport {
                vertex: i,
                window_length: l,
            });
        }
        offsets.push(cols.len());
    }

    match mode {
        WindowMode::RowStochastic => {
            for i in 0..n {
                let (a, b) = (offsets[i], offsets[i + 1]);
                let sum: f64 = vals[a..b].iter().sum();
                for v in &mut vals[a..b] {
                    *v /= sum;
                }
            }
        }
        WindowMode::Symmetrized => {
            let scale = symmetric_sinkhorn(&offsets, &cols, &vals)?;
            for i in 0..n {
                for p in offsets[i]..offsets[i + 1] {
                    let j = cols[p];
                    // Same product order for (i, j) and (j, i): exact symmetry.
                    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
                    vals[p] *= scale[lo] * scale[hi];
                }
            }
        }
    }

    let nnz = cols.len();
    let sparse = match storage {
        Storage::Sparse => true,
        Storage::Dense => false,
        Storage::Auto => (nnz as f64) <= SPARSE_FILL_RATIO * (n * n) as f64,
    };
    let csr = Csr { offsets, cols, vals };
    let base = if sparse {
        Base::Sparse(csr)
    } else {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for p in csr.offsets[i]..csr.offsets[i + 1] {
                m[(i, csr.cols[p])] = csr.vals[p];
            }
        }
        Base::Dense(m)
    };
    Ok(WindowOperator {
        base,
        n,
        nnz,
        window_length: l,
        mode,
        nu: None,
        experimental: false,
    })
}

/// Diagonal `x` with `diag(x) K diag(x)` doubly stochastic, by the damped
/// fixed-point iteration `x ← sqrt(x / Kx)`.
fn symmetric_sinkhorn(offsets: &[usize], cols: &[usize], vals: &[f64]) -> Result<Vec<f64>> {
    let n = offsets.len() - 1;
    let kx = |x: &[f64], i: usize| -> f64 {
        (offsets[i]..offsets[i + 1]).map(|p| vals[p] * x[cols[p]]).sum()
    };
    let mut x = vec![1.0; n];
    let mut deviation = f64::INFINITY;
    for _ in 0..SINKHORN_MAX_SWEEPS {
        let prod: Vec<f64> = (0..n).map(|i| kx(&x, i)).collect();
        deviation = (0..n).map(|i| (x[i] * prod[i] - 1.0).abs()).fold(0.0, f64::max);
        if deviation <= SINKHORN_TARGET {
            return Ok(x);
        }
        for (xi, p) in x.iter_mut().zip(&prod) {
            *xi = (*xi / p).sqrt();
        }
    }
    if deviation <= SINKHORN_TOL {
        Ok(x)
    } else {
        Err(Error::NumericFailure(format!(
            "symmetric normalization did not converge: row-sum deviation {deviation:e} after {SINKHORN_MAX_SWEEPS} sweeps"
        )))
    }
}

impl WindowOperator {
    pub fn window_length(&self) -> f64 {
        self.window_length
    }

    pub fn mode(&self) -> WindowMode {
        self.mode
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.base, Base::Sparse(_))
    }

    /// Stored nonzeros of `B`.
    pub fn nnz(&self) -> usize {
        self.nnz
    }

    /// `B s`.
    pub fn apply_base(&self, s: &[f64], out: &mut [f64]) {
        match &self.base {
            Base::Dense(m) => {
                let x = nalgebra::DVectorView::from_slice(s, self.n);
                let mut y = nalgebra::DVectorViewMut::from_slice(out, self.n);
                y.gemv(1.0, m, &x, 0.0);
            }
            Base::Sparse(csr) => csr.mul(s, out),
        }
    }

    /// `B` as a dense matrix.
    pub fn base_matrix(&self) -> DMatrix<f64> {
        match &self.base {
            Base::Dense(m) => m.clone(),
            Base::Sparse(csr) => {
                let mut m = DMatrix::zeros(self.n, self.n);
                for i in 0..self.n {
                    for p in csr.offsets[i]..csr.offsets[i + 1] {
                        m[(i, csr.cols[p])] = csr.vals[p];
                    }
                }
                m
            }
        }
    }

    /// `W = B·B` as a dense matrix.
    pub fn averaging_matrix(&self) -> DMatrix<f64> {
        let b = self.base_matrix();
        &b * &b
    }
}

impl AveragingOperator for WindowOperator {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, s: &[f64], out: &mut [f64]) {
        let mut tmp = vec![0.0; self.n];
        self.apply_base(s, &mut tmp);
        self.apply_base(&tmp, out);
    }

    fn descriptor(&self) -> OperatorDescriptor {
        OperatorDescriptor {
            window_length: Some(self.window_length),
            nu: self.nu,
            mode: Some(self.mode.name().to_string()),
            experimental: self.experimental,
            ..OperatorDescriptor::new("db_if")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distances::{circular_distance_matrix, euclidean_distance_matrix};
    use nalgebra::SymmetricEigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn random_angles(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
        a.sort_by(f64::total_cmp);
        a
    }

    #[test]
    fn window_length_rule() {
        let l = db_window_length(TAU, 10, 1.6).unwrap();
        assert!((l - 0.32 * TAU).abs() < 1e-15);
        assert!((l - 2.0106).abs() < 1e-4);
        assert_eq!(db_window_length(7.0, 7, 0.5).unwrap(), 1.0);
        assert!(matches!(
            db_window_length(TAU, 1, 1.6),
            Err(Error::OuterLoopTerminal { extrema: 1 })
        ));
        assert!(db_window_length(0.0, 4, 1.6).is_err());
        assert!(db_window_length(1.0, 4, -1.0).is_err());
    }

    #[test]
    fn window_length_tracks_discrete_rule() {
        let (n, k, nu) = (512usize, 16usize, 1.6);
        let l = db_window_length(TAU, k, nu).unwrap();
        let samples = l * n as f64 / TAU;
        let discrete = 2.0 * ((nu * n as f64 / k as f64).floor());
        assert!((samples - discrete).abs() <= 2.0);
    }

    #[test]
    fn single_vertex() {
        let c = DistanceMatrix::new(DMatrix::zeros(1, 1)).unwrap();
        let op = build_window_operator(&c, 1.0, WindowMode::RowStochastic).unwrap();
        assert_eq!(op.base_matrix()[(0, 0)], 1.0);
        assert_eq!(op.apply(&[3.0]), vec![3.0]);
    }

    #[test]
    fn rows_sum_to_one_and_support_is_compact() {
        let angles = random_angles(100, 3);
        let c = circular_distance_matrix(&angles).unwrap();
        let l = 0.7;
        for storage in [Storage::Dense, Storage::Sparse] {
            let op = build_window_operator_with(&c, l, WindowMode::RowStochastic, storage).unwrap();
            let b = op.base_matrix();
            for i in 0..100 {
                let sum: f64 = b.row(i).iter().sum();
                assert!((sum - 1.0).abs() <= 1e-12);
                for j in 0..100 {
                    assert!(b[(i, j)] >= 0.0);
                    if c.get(i, j) >= l {
                        assert_eq!(b[(i, j)], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn sparse_and_dense_agree() {
        let angles = random_angles(80, 4);
        let c = circular_distance_matrix(&angles).unwrap();
        let d = build_window_operator_with(&c, 0.5, WindowMode::Symmetrized, Storage::Dense).unwrap();
        let s = build_window_operator_with(&c, 0.5, WindowMode::Symmetrized, Storage::Sparse).unwrap();
        assert!(!d.is_sparse() && s.is_sparse());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..80).map(|_| rng.random_range(-1.0..1.0)).collect();
        for (a, b) in d.apply(&x).iter().zip(s.apply(&x)) {
            assert!((a - b).abs() <= 1e-13);
        }
        let auto = build_window_operator(&c, 0.5, WindowMode::RowStochastic).unwrap();
        assert!(auto.is_sparse());
        let auto = build_window_operator(&c, 3.0, WindowMode::RowStochastic).unwrap();
        assert!(!auto.is_sparse());
    }

    #[test]
    fn equispaced_circle_gives_circular_convolution() {
        let n = 64;
        let angles: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let c = circular_distance_matrix(&angles).unwrap();
        let op = build_window_operator(&c, PI / 4.0, WindowMode::RowStochastic).unwrap();
        let b = op.base_matrix();
        let first: Vec<f64> = b.row(0).iter().copied().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..5 {
            let s: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut bs = vec![0.0; n];
            op.apply_base(&s, &mut bs);
            for i in 0..n {
                let conv: f64 = (0..n).map(|j| first[(j + n - i) % n] * s[j]).sum();
                assert!((bs[i] - conv).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn symmetrized_operator_has_spectrum_in_unit_interval() {
        let angles = random_angles(128, 7);
        let c = circular_distance_matrix(&angles).unwrap();
        let op = build_window_operator(&c, 0.6, WindowMode::Symmetrized).unwrap();
        let b = op.base_matrix();
        assert_eq!(b, b.transpose());
        for i in 0..128 {
            let sum: f64 = b.row(i).iter().sum();
            assert!((sum - 1.0).abs() <= SINKHORN_TOL);
        }
        let eig = SymmetricEigen::new(op.averaging_matrix());
        for &lam in eig.eigenvalues.iter() {
            assert!((-1e-10..=1.0 + 1e-10).contains(&lam), "{lam}");
        }
    }

    #[test]
    fn coincident_points_share_a_window() {
        let pts = [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]];
        let c = euclidean_distance_matrix(&pts).unwrap();
        let op = build_window_operator(&c, 0.5, WindowMode::RowStochastic).unwrap();
        let b = op.base_matrix();
        assert_eq!(b[(0, 1)], 0.5);
        assert_eq!(b[(2, 2)], 1.0);
    }

    #[test]
    fn invalid_window_length() {
        let c = DistanceMatrix::new(DMatrix::zeros(2, 2)).unwrap();
        assert!(build_window_operator(&c, 0.0, WindowMode::RowStochastic).is_err());
        assert!(build_window_operator(&c, f64::NAN, WindowMode::RowStochastic).is_err());
    }

    #[test]
    fn descriptor_records_parameters() {
        let c = DistanceMatrix::new(DMatrix::zeros(2, 2)).unwrap();
        let op = build_window_operator(&c, 0.5, WindowMode::Symmetrized).unwrap();
        let d = op.descriptor();
        assert_eq!(d.method, "db_if");
        assert_eq!(d.window_length, Some(0.5));
        assert_eq!(d.mode.as_deref(), Some("symmetrized"));
    }
}
