//! The general discrete iterative-filtering engine: averaging operators,
//! the sifting inner loop, the IMF outer loop, and the closed-form limit of
//! the inner loop for normal operators.

use std::time::Instant;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{count_extrema, norm2, Graph, Signal};

/// Sifting aborts once `‖s_m‖` exceeds this multiple of `‖s_0‖`.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// Parameters that produced an averaging operator, as written to metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct OperatorDescriptor {
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// Set when a parameter came from a heuristic with no established rule
    /// behind it (automatic spectral cutoffs, 2D window extents).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub experimental: bool,
}

impl OperatorDescriptor {
    pub fn new(method: impl Into<String>) -> Self {
        OperatorDescriptor {
            method: method.into(),
            ..Default::default()
        }
    }
}

/// A linear map `s ↦ W s` on signals of a fixed length.
pub trait AveragingOperator {
    fn dim(&self) -> usize;

    /// Writes `W s` into `out`. Both slices have length [`dim`](Self::dim).
    fn apply_into(&self, s: &[f64], out: &mut [f64]);

    fn descriptor(&self) -> OperatorDescriptor;

    fn apply(&self, s: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(s, &mut out);
        out
    }
}

impl<T: AveragingOperator + ?Sized> AveragingOperator for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply_into(&self, s: &[f64], out: &mut [f64]) {
        (**self).apply_into(s, out)
    }

    fn descriptor(&self) -> OperatorDescriptor {
        (**self).descriptor()
    }
}

/// An explicit `n×n` matrix.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    matrix: DMatrix<f64>,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::invalid("averaging matrix must be square"));
        }
        Ok(DenseOperator { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

impl AveragingOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply_into(&self, s: &[f64], out: &mut [f64]) {
        let n = self.dim();
        let x = nalgebra::DVectorView::from_slice(s, n);
        let mut y = nalgebra::DVectorViewMut::from_slice(out, n);
        y.gemv(1.0, &self.matrix, &x, 0.0);
    }

    fn descriptor(&self) -> OperatorDescriptor {
        OperatorDescriptor::new("dense")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StopMode {
    /// Run exactly `max_iterations` steps.
    FixedIterations,
    /// Stop when `‖s_{m+1} - s_m‖ / ‖s_m‖ < delta`, or at `max_iterations`.
    #[default]
    RelativeChange,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub mode: StopMode,
    pub max_iterations: usize,
    pub delta: f64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule {
            mode: StopMode::RelativeChange,
            max_iterations: 200,
            delta: 1e-3,
        }
    }
}

impl StoppingRule {
    pub fn fixed(iterations: usize) -> Self {
        StoppingRule {
            mode: StopMode::FixedIterations,
            max_iterations: iterations,
            delta: 1e-3,
        }
    }

    pub fn relative_change(delta: f64, max_iterations: usize) -> Self {
        StoppingRule {
            mode: StopMode::RelativeChange,
            max_iterations,
            delta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        if self.mode == StopMode::RelativeChange && !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::invalid(format!(
                "relative-change threshold must be positive, got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Inner loop `s_{m+1} = s_m - W s_m` where `average` writes `W s` into its
/// second argument. Returns the final iterate and the number of steps.
pub(crate) fn run_sift<F>(s0: &[f64], rule: &StoppingRule, mut average: F) -> Result<(Vec<f64>, usize)>
where
    F: FnMut(&[f64], &mut [f64]),
{
    rule.validate()?;
    let initial_norm = norm2(s0);
    let mut cur = s0.to_vec();
    let mut avg = vec![0.0; cur.len()];
    let mut m = 0;
    while m < rule.max_iterations {
        let cur_norm = norm2(&cur);
        if rule.mode == StopMode::RelativeChange && cur_norm == 0.0 {
            break;
        }
        average(&cur, &mut avg);
        let change = norm2(&avg);
        for (c, a) in cur.iter_mut().zip(&avg) {
            *c -= a;
        }
        m += 1;
        let norm = norm2(&cur);
        if !norm.is_finite() || norm > DIVERGENCE_FACTOR * initial_norm {
            return Err(Error::Divergence {
                iteration: m,
                norm,
                initial_norm,
            });
        }
        if rule.mode == StopMode::RelativeChange && change < rule.delta * cur_norm {
            break;
        }
    }
    Ok((cur, m))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiftOutcome {
    pub imf: Vec<f64>,
    pub iterations: usize,
}

/// Runs the sifting inner loop with operator `op` from `s0`.
pub fn sift<O: AveragingOperator + ?Sized>(
    op: &O,
    s0: &[f64],
    rule: &StoppingRule,
) -> Result<SiftOutcome> {
    if s0.len() != op.dim() {
        return Err(Error::invalid(format!(
            "signal has length {} but the operator acts on {}",
            s0.len(),
            op.dim()
        )));
    }
    let (imf, iterations) = run_sift(s0, rule, |s, out| op.apply_into(s, out))?;
    Ok(SiftOutcome { imf, iterations })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImfMeta {
    pub iterations: usize,
    pub extrema_count: usize,
    pub elapsed_seconds: f64,
    pub operator: OperatorDescriptor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub imfs: Vec<Signal>,
    pub residual: Signal,
    pub meta: Vec<ImfMeta>,
    /// SHA-256 of the input values as little-endian `f64` bytes, hex encoded.
    pub input_checksum: String,
}

impl DecompositionResult {
    /// Sum of all IMFs and the residual.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = self.residual.to_vec();
        for imf in &self.imfs {
            for (o, v) in out.iter_mut().zip(imf.iter()) {
                *o += v;
            }
        }
        out
    }

    /// `‖reconstruct() - input‖ / ‖input‖` (absolute error when the input is zero).
    pub fn reconstruction_error(&self, input: &[f64]) -> f64 {
        let rec = self.reconstruct();
        let diff: Vec<f64> = rec.iter().zip(input).map(|(a, b)| a - b).collect();
        let scale = norm2(input);
        if scale > 0.0 {
            norm2(&diff) / scale
        } else {
            norm2(&diff)
        }
    }
}

pub fn signal_checksum(s: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in s {
        h.update(v.to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Outer-loop settings shared by all decomposers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecomposeOptions {
    pub rule: StoppingRule,
    pub max_imfs: usize,
    /// Extract exactly `max_imfs` IMFs even after the residual runs out of
    /// extrema (windows are then sized as if two extrema remained). Used
    /// for cost measurements.
    #[serde(default)]
    pub force_imfs: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            rule: StoppingRule::default(),
            max_imfs: 10,
            force_imfs: false,
        }
    }
}

impl DecomposeOptions {
    pub fn with_rule(rule: StoppingRule, max_imfs: usize) -> Self {
        DecomposeOptions {
            rule,
            max_imfs,
            force_imfs: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.rule.validate()?;
        if self.max_imfs == 0 {
            return Err(Error::invalid("max_imfs must be at least 1"));
        }
        Ok(())
    }

    /// Next extrema count to size a window with, or `None` to stop.
    pub(crate) fn next_extrema(&self, extracted: usize, extrema: usize) -> Option<usize> {
        if extracted >= self.max_imfs {
            None
        } else if extrema >= 2 {
            Some(extrema)
        } else if self.force_imfs {
            Some(2)
        } else {
            None
        }
    }
}

/// Generic outer loop: while the residual has at least two extrema (and the
/// IMF cap allows), build an operator from the residual, sift one IMF and
/// subtract it. `factory` receives the residual and its extrema count.
pub fn decompose<O, F>(
    mut factory: F,
    s: &[f64],
    g: &Graph,
    opts: &DecomposeOptions,
) -> Result<DecompositionResult>
where
    O: AveragingOperator,
    F: FnMut(&[f64], usize) -> Result<O>,
{
    g.check_signal(s)?;
    outer_loop(
        s,
        opts,
        |r| count_extrema(g, r),
        |residual, k| {
            let op = factory(residual, k)?;
            let out = sift(&op, residual, &opts.rule)?;
            Ok(Some(Extracted {
                imf: out.imf,
                iterations: out.iterations,
                operator: op.descriptor(),
            }))
        },
    )
}

pub(crate) struct Extracted {
    pub imf: Vec<f64>,
    pub iterations: usize,
    pub operator: OperatorDescriptor,
}

/// Outer loop shared by every decomposer. `extract` receives the current
/// residual and the extrema count to size the window with; returning
/// `Ok(None)` ends the decomposition early.
pub(crate) fn outer_loop<C, E>(
    s: &[f64],
    opts: &DecomposeOptions,
    mut count: C,
    mut extract: E,
) -> Result<DecompositionResult>
where
    C: FnMut(&[f64]) -> Result<usize>,
    E: FnMut(&[f64], usize) -> Result<Option<Extracted>>,
{
    opts.validate()?;
    let mut residual = s.to_vec();
    let mut imfs = Vec::new();
    let mut meta = Vec::new();
    loop {
        let extrema = count(&residual)?;
        let Some(k) = opts.next_extrema(imfs.len(), extrema) else {
            break;
        };
        let index = imfs.len();
        let started = Instant::now();
        let Some(out) = extract(&residual, k).map_err(|e| e.at_imf(index))? else {
            break;
        };
        for (r, v) in residual.iter_mut().zip(&out.imf) {
            *r -= v;
        }
        meta.push(ImfMeta {
            iterations: out.iterations,
            extrema_count: extrema,
            elapsed_seconds: started.elapsed().as_secs_f64(),
            operator: out.operator,
        });
        imfs.push(Signal::new(out.imf)?);
    }
    Ok(DecompositionResult {
        imfs,
        residual: Signal::new(residual)?,
        meta,
        input_checksum: signal_checksum(s),
    })
}

fn max_abs_row_sum(w: &DMatrix<f64>) -> f64 {
    w.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Default zero tolerance for eigenvalues of `W`: `1e-12 · max(1, ‖W‖∞)`.
pub fn default_zero_tol(w: &DMatrix<f64>) -> f64 {
    1e-12 * max_abs_row_sum(w).max(1.0)
}

fn check_eigenvalue(re: f64, im: f64, zero_tol: f64) -> Result<bool> {
    if re.hypot(im) <= zero_tol {
        return Ok(true);
    }
    if (1.0 - re).hypot(im) < 1.0 {
        return Ok(false);
    }
    Err(Error::NonConvergence { re, im })
}

/// Closed-form limit of the sifting iteration for a normal `W`: the
/// orthogonal projection of `s0` onto the null space of `W`. Fails when `W`
/// is not normal or has an eigenvalue that is neither (numerically) zero nor
/// inside the disc `|1 - λ| < 1`.
pub fn sifting_limit(w: &DMatrix<f64>, s0: &[f64], zero_tol: Option<f64>) -> Result<Vec<f64>> {
    let n = w.nrows();
    if w.ncols() != n || s0.len() != n {
        return Err(Error::invalid(format!(
            "operator is {}x{} and the signal has length {}",
            n,
            w.ncols(),
            s0.len()
        )));
    }
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("operator has non-finite entries"));
    }
    let zero_tol = zero_tol.unwrap_or_else(|| default_zero_tol(w));
    let scale = (w.amax().powi(2) * n as f64).max(1.0);
    let commutator = (w * w.transpose() - w.transpose() * w).amax();
    if commutator > 1e-8 * scale {
        return Err(Error::HypothesisViolation(format!(
            "operator is not normal: max |WWᵀ - WᵀW| = {commutator:e}"
        )));
    }

    let x = DVector::from_column_slice(s0);
    let mut kernel_basis: Vec<DVector<f64>> = Vec::new();
    let symmetric = (w - w.transpose()).amax() <= 1e-12 * w.amax().max(1.0);
    if symmetric {
        let sym = (w + w.transpose()) * 0.5;
        let eig = SymmetricEigen::try_new(sym, 1e-15, 100_000)
            .ok_or_else(|| Error::NumericFailure("symmetric eigensolver did not converge".into()))?;
        for (i, &lam) in eig.eigenvalues.iter().enumerate() {
            if check_eigenvalue(lam, 0.0, zero_tol)? {
                kernel_basis.push(eig.eigenvectors.column(i).into_owned());
            }
        }
    } else {
        let schur = Schur::try_new(w.clone(), 1e-15, 100_000)
            .ok_or_else(|| Error::NumericFailure("Schur decomposition did not converge".into()))?;
        let (q, t) = schur.unpack();
        let mut i = 0;
        while i < n {
            if i + 1 < n && t[(i + 1, i)] != 0.0 {
                let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
                let half_trace = 0.5 * (a + d);
                let disc = 0.25 * (a - d).powi(2) + b * c;
                if disc >= 0.0 {
                    for lam in [half_trace + disc.sqrt(), half_trace - disc.sqrt()] {
                        if check_eigenvalue(lam, 0.0, zero_tol)? {
                            return Err(Error::NumericFailure(
                                "zero eigenvalue inside an unreduced 2x2 Schur block".into(),
                            ));
                        }
                    }
                } else {
                    check_eigenvalue(half_trace, (-disc).sqrt(), zero_tol)?;
                }
                i += 2;
            } else {
                if check_eigenvalue(t[(i, i)], 0.0, zero_tol)? {
                    kernel_basis.push(q.column(i).into_owned());
                }
                i += 1;
            }
        }
    }

    let mut out = DVector::zeros(n);
    for v in &kernel_basis {
        out += v * v.dot(&x);
    }
    Ok(out.data.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_ring_graph, Edge};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn dense(m: DMatrix<f64>) -> DenseOperator {
        DenseOperator::new(m).unwrap()
    }

    /// `Q diag(eigs) Qᵀ` with `Q` from the QR factorisation of a random matrix.
    fn random_symmetric(eigs: &[f64], rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let n = eigs.len();
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let q = a.qr().q();
        &q * DMatrix::from_diagonal(&DVector::from_column_slice(eigs)) * q.transpose()
    }

    #[test]
    fn identity_operator_stops_after_one_step() {
        let op = dense(DMatrix::identity(3, 3));
        let out = sift(&op, &[1.0, 2.0, 3.0], &StoppingRule::default()).unwrap();
        assert_eq!(out.imf, vec![0.0; 3]);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn zero_operator_is_a_fixed_point() {
        let op = dense(DMatrix::zeros(2, 2));
        let out = sift(&op, &[1.0, -2.0], &StoppingRule::default()).unwrap();
        assert_eq!(out.imf, vec![1.0, -2.0]);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn diagonal_operator_decays_geometrically() {
        let op = dense(DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.0])));
        let out = sift(&op, &[1.0, 1.0], &StoppingRule::fixed(50)).unwrap();
        assert_eq!(out.iterations, 50);
        assert_eq!(out.imf, vec![0.5f64.powi(50), 1.0]);
    }

    #[test]
    fn eigenvalue_above_two_diverges() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = random_symmetric(&[0.0, 0.5, 1.0, 2.1], &mut rng);
        let s0 = [1.0, 0.3, -0.2, 0.7];
        let err = sift(&dense(w.clone()), &s0, &StoppingRule::fixed(10_000)).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
        let err = sift(&dense(w.clone()), &s0, &StoppingRule::default()).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
        assert!(matches!(
            sifting_limit(&w, &s0, None),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn limit_of_trivial_operators() {
        let s0 = [0.4, -1.0, 2.0];
        let lim = sifting_limit(&DMatrix::identity(3, 3), &s0, None).unwrap();
        assert!(lim.iter().all(|v| v.abs() < 1e-15));
        let lim = sifting_limit(&DMatrix::zeros(3, 3), &s0, None).unwrap();
        for (a, b) in lim.iter().zip(&s0) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn limit_matches_long_iteration_and_is_approached_monotonically() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let eigs = [0.0, 0.0, 0.05, 0.3, 0.9, 1.2, 1.6, 1.9];
        let w = random_symmetric(&eigs, &mut rng);
        let s0: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lim = sifting_limit(&w, &s0, Some(1e-10)).unwrap();
        let op = dense(w.clone());
        let mut s = s0.clone();
        let mut prev = f64::INFINITY;
        for _ in 0..10_000 {
            let avg = op.apply(&s);
            for (x, a) in s.iter_mut().zip(&avg) {
                *x -= a;
            }
            let err = norm2(&s.iter().zip(&lim).map(|(a, b)| a - b).collect::<Vec<_>>());
            assert!(err <= prev + 1e-14);
            prev = err;
        }
        assert!(prev <= 1e-6 * norm2(&lim));
        // Limit lies in the kernel: one more step leaves it unchanged.
        let step = op.apply(&lim);
        assert!(norm2(&step) <= 1e-10 * norm2(&s0));
    }

    #[test]
    fn non_normal_operator_is_rejected() {
        let w = DMatrix::from_row_slice(2, 2, &[0.5, 1.0, 0.0, 0.5]);
        assert!(matches!(
            sifting_limit(&w, &[1.0, 1.0], None),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn rotation_like_normal_operator() {
        // W = I - R/2 with R a rotation by 0.3 rad has eigenvalues
        // 1 - e^{±0.3i}/2, inside |1 - λ| < 1, and no kernel: the limit is zero.
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let w = DMatrix::from_row_slice(2, 2, &[1.0 - 0.5 * c, 0.5 * s, -0.5 * s, 1.0 - 0.5 * c]);
        let lim = sifting_limit(&w, &[1.0, 2.0], None).unwrap();
        assert!(lim.iter().all(|v| v.abs() < 1e-15));
        // W = I + R puts both eigenvalues on the circle |1 - λ| = 1.
        let w = DMatrix::from_row_slice(2, 2, &[1.0 + c, -s, s, 1.0 + c]);
        assert!(matches!(
            sifting_limit(&w, &[1.0, 2.0], None),
            Err(Error::NonConvergence { .. })
        ));
    }

    fn ring(n: usize) -> (Graph, Vec<f64>) {
        let angles: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        (build_ring_graph(&angles, 1).unwrap(), angles)
    }

    #[test]
    fn monotone_signal_yields_no_imfs() {
        // On a path there is no wrap-around, so a ramp has no strict interior
        // extrema; the endpoints each have one neighbor and are extrema, so
        // use a ring with a plateau instead.
        let (g, _) = ring(8);
        let s = [0.0, 1.0, 2.0, 3.0, 3.0, 2.0, 1.0, 0.0];
        let mut calls = 0;
        let res = decompose(
            |_, _| {
                calls += 1;
                Ok(dense(DMatrix::identity(8, 8)))
            },
            &s,
            &g,
            &DecomposeOptions::default(),
        )
        .unwrap();
        assert_eq!(calls, 0);
        assert!(res.imfs.is_empty());
        assert_eq!(res.residual.as_slice(), &s);
    }

    #[test]
    fn imf_cap_is_respected_and_reconstruction_exact() {
        let (g, angles) = ring(64);
        let s: Vec<f64> = angles
            .iter()
            .map(|t| (12.0 * t).sin() + 0.5 * (3.0 * t).cos())
            .collect();
        let w = DMatrix::from_fn(64, 64, |i, j| {
            let d = (i as i64 - j as i64).rem_euclid(64).min((j as i64 - i as i64).rem_euclid(64));
            if d <= 2 {
                0.2
            } else {
                0.0
            }
        });
        let opts = DecomposeOptions::with_rule(StoppingRule::fixed(5), 1);
        let res = decompose(|_, _| Ok(dense(w.clone())), &s, &g, &opts).unwrap();
        assert_eq!(res.imfs.len(), 1);
        assert_eq!(res.meta[0].iterations, 5);
        assert!(res.reconstruction_error(&s) <= 1e-12);
        assert_eq!(res.input_checksum, signal_checksum(&s));
    }

    #[test]
    fn factory_errors_carry_imf_index() {
        let (g, angles) = ring(16);
        let s: Vec<f64> = angles.iter().map(|t| (3.0 * t).sin()).collect();
        let err = decompose(
            |_, _| -> Result<DenseOperator> { Err(Error::WindowSupport { vertex: 3, window_length: 0.1 }) },
            &s,
            &g,
            &DecomposeOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::AtImf { index: 0, .. }));
        assert_eq!(err.kind(), "window_support");
    }

    #[test]
    fn decompose_validates_signal() {
        let g = Graph::new(
            2,
            vec![Edge {
                i: 0,
                j: 1,
                weight: 1.0,
            }],
            None,
        )
        .unwrap();
        let f = |_: &[f64], _| Ok(dense(DMatrix::zeros(2, 2)));
        assert!(decompose(f, &[1.0], &g, &DecomposeOptions::default()).is_err());
        assert!(decompose(f, &[1.0, f64::NAN], &g, &DecomposeOptions::default()).is_err());
    }
}
